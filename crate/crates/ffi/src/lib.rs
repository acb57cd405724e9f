//! C ABI for `floquet-raman`.
//!
//! Handles are opaque and owned by the caller once returned: every
//! `fr_*_new` or producing call is paired with an `fr_*_free`. Functions
//! return an [`FrStatus`]; on failure the message is kept per thread and
//! read back with [`fr_last_error_message`]. Angular frequencies are in
//! rad/s and times in seconds throughout. No Rust panic crosses the
//! boundary.

use floquet_raman::experiment::{simulate_floquet_raman, NoiseModel, Preparation, TimeTrace};
use floquet_raman::floquet::{
    adiabaticity_parameter, eigenbasis, quasienergies, quasienergy_gap, raman_rabi_frequency, resonance_frequency,
    resonance_locate, RabiMethod,
};
use floquet_raman::{DriveParams, Error};
use libc::{c_char, c_double, c_uint, size_t};
use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DegenerateSystem = 3,
    StepUnderflow = 4,
    PreconditionViolated = 5,
    NotNearResonance = 6,
    NoPeakFound = 7,
    FilterBandsOverlap = 8,
    FitFailed = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// How [`fr_raman_rabi_frequency`] obtains the Raman Rabi frequency.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrRabiMethod {
    Ladder = 0,
    QuasienergyGap = 1,
    TimeFit = 2,
}

/// Drive parameters `(Δz, Δx, A, ω)` plus optional phase modulation.
pub struct FrDrive {
    params: DriveParams,
}

/// A noiseless population trace.
pub struct FrTrace {
    trace: TimeTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FrStatus {
    match e {
        Error::InvalidParameter { .. } => FrStatus::InvalidParameter,
        Error::DegenerateSystem => FrStatus::DegenerateSystem,
        Error::StepUnderflow { .. } => FrStatus::StepUnderflow,
        Error::PreconditionViolated(_) => FrStatus::PreconditionViolated,
        Error::NotNearResonance { .. } => FrStatus::NotNearResonance,
        Error::NoPeakFound { .. } => FrStatus::NoPeakFound,
        Error::FilterBandsOverlap { .. } => FrStatus::FilterBandsOverlap,
        Error::FitFailed(_) => FrStatus::FitFailed,
    }
}

/// Internal failure before it is flattened to a status code.
enum Fail {
    Null(&'static str),
    Lib(Error),
    Buffer(usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, recording the error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FrStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_last_error(format!("null pointer passed as `{name}`"));
            FrStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Buffer(needed))) => {
            set_last_error(format!("output buffer too small; {needed} elements needed"));
            FrStatus::BufferTooSmall
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            FrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(name))
}

unsafe fn write<T>(p: *mut T, value: T, name: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    unsafe { p.write(value) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Copies the last error message of the calling thread into `buf`
/// (NUL-terminated, truncated to `len − 1` bytes) and returns the full
/// message length excluding the NUL. Returns 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn fr_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Creates a drive. Frequencies in rad/s.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fr_drive_new(
    delta_z: c_double,
    delta_x: c_double,
    amp_a: c_double,
    omega: c_double,
    out: *mut *mut FrDrive,
) -> FrStatus {
    guard(|| {
        let params = DriveParams::new(delta_z, delta_x, amp_a, omega)?;
        unsafe { write(out, Box::into_raw(Box::new(FrDrive { params })), "out") }
    })
}

/// Turns on phase modulation `φ(t) = ωt + (a/ν) sin νt`; `a = 0`
/// switches it off.
///
/// # Safety
/// `drive` must come from [`fr_drive_new`].
#[no_mangle]
pub unsafe extern "C" fn fr_drive_set_phase_modulation(drive: *mut FrDrive, a: c_double, nu: c_double) -> FrStatus {
    guard(|| {
        let d = unsafe { drive.as_mut() }.ok_or(Fail::Null("drive"))?;
        d.params = d.params.with_phase_modulation(a, nu)?;
        Ok(())
    })
}

/// Releases a drive. Null is ignored.
///
/// # Safety
/// `drive` must come from [`fr_drive_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fr_drive_free(drive: *mut FrDrive) {
    if !drive.is_null() {
        drop(unsafe { Box::from_raw(drive) });
    }
}

/// Mixing angle θ and level splitting ω₀ of the static Hamiltonian.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_eigenbasis(drive: *const FrDrive, theta: *mut c_double, omega0: *mut c_double) -> FrStatus {
    guard(|| {
        let b = eigenbasis(&unsafe { deref(drive, "drive") }?.params)?;
        unsafe {
            write(theta, b.theta, "theta")?;
            write(omega0, b.omega0, "omega0")
        }
    })
}

/// The two quasienergies folded into `[−ω/2, ω/2)`, written to `out[0..2]`.
///
/// # Safety
/// `out` must be valid for two writes.
#[no_mangle]
pub unsafe extern "C" fn fr_quasienergies(drive: *const FrDrive, tol: c_double, out: *mut c_double) -> FrStatus {
    guard(|| {
        let eps = quasienergies(&unsafe { deref(drive, "drive") }?.params, tol)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        unsafe { ptr::copy_nonoverlapping(eps.as_ptr(), out, 2) };
        Ok(())
    })
}

/// Distance between the two quasienergies on the zone circle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_quasienergy_gap(drive: *const FrDrive, tol: c_double, out: *mut c_double) -> FrStatus {
    guard(|| {
        let gap = quasienergy_gap(&unsafe { deref(drive, "drive") }?.params, tol)?;
        unsafe { write(out, gap, "out") }
    })
}

/// Bare resonance ω₀/m.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_resonance_frequency(drive: *const FrDrive, m: c_uint, out: *mut c_double) -> FrStatus {
    guard(|| {
        let w = resonance_frequency(&unsafe { deref(drive, "drive") }?.params, m)?;
        unsafe { write(out, w, "out") }
    })
}

/// Drive frequency of maximal order-`m` transfer within `ω₀/m ± width`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_resonance_locate(
    drive: *const FrDrive,
    m: c_uint,
    width: c_double,
    out: *mut c_double,
) -> FrStatus {
    guard(|| {
        let w = resonance_locate(&unsafe { deref(drive, "drive") }?.params, m, width)?;
        unsafe { write(out, w, "out") }
    })
}

/// On-resonance Raman Rabi frequency Ω_F of order `m`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_raman_rabi_frequency(
    drive: *const FrDrive,
    m: c_uint,
    method: FrRabiMethod,
    out: *mut c_double,
) -> FrStatus {
    guard(|| {
        let method = match method {
            FrRabiMethod::Ladder => RabiMethod::Ladder,
            FrRabiMethod::QuasienergyGap => RabiMethod::QuasienergyGap,
            FrRabiMethod::TimeFit => RabiMethod::TimeFit,
        };
        let w = raman_rabi_frequency(&unsafe { deref(drive, "drive") }?.params, m, method)?;
        unsafe { write(out, w, "out") }
    })
}

/// Traditional adiabaticity parameter of the weak drive.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fr_adiabaticity(drive: *const FrDrive, out: *mut c_double) -> FrStatus {
    guard(|| {
        let x = adiabaticity_parameter(&unsafe { deref(drive, "drive") }?.params)?;
        unsafe { write(out, x, "out") }
    })
}

/// Noiseless Floquet Raman experiment: a `Y_θ` pulse of Rabi amplitude
/// `prep_rabi` followed by the drive. `times` are measured from the drive
/// start. A negative `prep_theta` prepares the upper band `|+⟩`.
///
/// # Safety
/// `times` must be valid for `n` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn fr_simulate_floquet_raman(
    drive: *const FrDrive,
    prep_theta: c_double,
    prep_rabi: c_double,
    times: *const c_double,
    n: size_t,
    tol: c_double,
    out: *mut *mut FrTrace,
) -> FrStatus {
    guard(|| {
        let params = &unsafe { deref(drive, "drive") }?.params;
        if times.is_null() {
            return Err(Fail::Null("times"));
        }
        let times = unsafe { std::slice::from_raw_parts(times, n) };
        let theta = if prep_theta < 0.0 { eigenbasis(params)?.theta } else { prep_theta };
        let prep = Preparation { theta, rabi_amp: prep_rabi };
        let trace = simulate_floquet_raman(params, &prep, times, &NoiseModel::noiseless(), tol)?;
        unsafe { write(out, Box::into_raw(Box::new(FrTrace { trace })), "out") }
    })
}

/// Number of samples in a trace; 0 for null.
///
/// # Safety
/// `trace` must be null or come from a producing call.
#[no_mangle]
pub unsafe extern "C" fn fr_trace_len(trace: *const FrTrace) -> size_t {
    unsafe { trace.as_ref() }.map_or(0, |t| t.trace.len())
}

/// Which series [`fr_trace_copy`] reads.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrSeries {
    /// Sample times in seconds.
    Times = 0,
    /// Population of `|0⟩`.
    P0 = 1,
    /// Population of the lower eigenstate `|−⟩`.
    Lower = 2,
}

/// Copies one series into `buf`, which must hold [`fr_trace_len`] values.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fr_trace_copy(
    trace: *const FrTrace,
    series: FrSeries,
    buf: *mut c_double,
    len: size_t,
) -> FrStatus {
    guard(|| {
        let t = &unsafe { deref(trace, "trace") }?.trace;
        let src: &[f64] = match series {
            FrSeries::Times => &t.times,
            FrSeries::P0 => &t.values,
            FrSeries::Lower => t.band_minus.as_deref().unwrap_or(&[]),
        };
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        if len < src.len() {
            return Err(Fail::Buffer(src.len()));
        }
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
        Ok(())
    })
}

/// Releases a trace. Null is ignored.
///
/// # Safety
/// `trace` must come from a producing call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fr_trace_free(trace: *mut FrTrace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}
