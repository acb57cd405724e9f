use floquet_raman_ffi::*;
use std::f64::consts::TAU;
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn mhz(x: f64) -> f64 {
    TAU * 1e6 * x
}

fn operating_point() -> *mut FrDrive {
    let mut d = ptr::null_mut();
    let s = unsafe { fr_drive_new(mhz(10.03), mhz(9.67), mhz(2.37), mhz(6.985), &mut d) };
    assert_eq!(s, FrStatus::Ok);
    assert!(!d.is_null());
    d
}

fn last_error() -> String {
    let mut buf = vec![0 as libc::c_char; 256];
    let n = unsafe { fr_last_error_message(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(fr_version()) }.to_str().unwrap();
    assert_eq!(v, floquet_raman::VERSION);
}

#[test]
fn invalid_drive_reports_status_and_message() {
    let mut d = ptr::null_mut();
    let s = unsafe { fr_drive_new(1.0, 1.0, 1.0, -1.0, &mut d) };
    assert_eq!(s, FrStatus::InvalidParameter);
    assert!(d.is_null());
    assert!(last_error().contains("omega"), "{}", last_error());
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(unsafe { fr_drive_new(1.0, 1.0, 1.0, 1.0, ptr::null_mut()) }, FrStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { fr_adiabaticity(ptr::null(), &mut x) }, FrStatus::NullPointer);
    assert!(last_error().contains("drive"));
    unsafe {
        fr_drive_free(ptr::null_mut());
        fr_trace_free(ptr::null_mut());
    }
}

#[test]
fn analysis_calls_match_the_library() {
    let d = operating_point();
    let (mut theta, mut w0) = (0.0, 0.0);
    assert_eq!(unsafe { fr_eigenbasis(d, &mut theta, &mut w0) }, FrStatus::Ok);
    assert!((w0 - mhz(10.03).hypot(mhz(9.67))).abs() < 1e-6);
    assert!((theta - mhz(9.67).atan2(mhz(10.03))).abs() < 1e-12);

    let mut eps = [0.0; 2];
    assert_eq!(unsafe { fr_quasienergies(d, 1e-10, eps.as_mut_ptr()) }, FrStatus::Ok);
    let mut gap = 0.0;
    assert_eq!(unsafe { fr_quasienergy_gap(d, 1e-10, &mut gap) }, FrStatus::Ok);
    let omega = mhz(6.985);
    for e in eps {
        assert!((-omega / 2.0..omega / 2.0).contains(&e));
    }

    let mut res = 0.0;
    assert_eq!(unsafe { fr_resonance_frequency(d, 2, &mut res) }, FrStatus::Ok);
    assert!((res - w0 / 2.0).abs() < 1e-6);

    let (mut ladder, mut qgap) = (0.0, 0.0);
    assert_eq!(unsafe { fr_raman_rabi_frequency(d, 2, FrRabiMethod::Ladder, &mut ladder) }, FrStatus::Ok);
    assert_eq!(unsafe { fr_raman_rabi_frequency(d, 2, FrRabiMethod::QuasienergyGap, &mut qgap) }, FrStatus::Ok);
    assert!((ladder / qgap - 1.0).abs() < 0.05, "{ladder} vs {qgap}");

    let mut adi = 0.0;
    assert_eq!(unsafe { fr_adiabaticity(d, &mut adi) }, FrStatus::Ok);
    assert!(adi > 0.0 && adi < 0.2);
    unsafe { fr_drive_free(d) };
}

#[test]
fn resonance_order_zero_is_an_error() {
    let d = operating_point();
    let mut res = 0.0;
    let s = unsafe { fr_resonance_frequency(d, 0, &mut res) };
    assert_ne!(s, FrStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe { fr_drive_free(d) };
}

#[test]
fn trace_round_trip_and_buffer_check() {
    let d = operating_point();
    let times: Vec<f64> = (0..50).map(|k| k as f64 * 2e-9).collect();
    let mut tr = ptr::null_mut();
    let s = unsafe { fr_simulate_floquet_raman(d, -1.0, mhz(20.0), times.as_ptr(), times.len(), 1e-9, &mut tr) };
    assert_eq!(s, FrStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { fr_trace_len(tr) }, 50);

    let mut small = vec![0.0; 10];
    assert_eq!(unsafe { fr_trace_copy(tr, FrSeries::P0, small.as_mut_ptr(), small.len()) }, FrStatus::BufferTooSmall);

    let mut t = vec![0.0; 50];
    let mut p0 = vec![0.0; 50];
    let mut lower = vec![0.0; 50];
    unsafe {
        assert_eq!(fr_trace_copy(tr, FrSeries::Times, t.as_mut_ptr(), 50), FrStatus::Ok);
        assert_eq!(fr_trace_copy(tr, FrSeries::P0, p0.as_mut_ptr(), 50), FrStatus::Ok);
        assert_eq!(fr_trace_copy(tr, FrSeries::Lower, lower.as_mut_ptr(), 50), FrStatus::Ok);
    }
    assert_eq!(t, times);
    assert!(p0.iter().chain(&lower).all(|p| (0.0..=1.0).contains(p)));
    // Prepared in the upper band, so the lower band starts empty.
    assert!(lower[0] < 1e-9);
    unsafe {
        fr_trace_free(tr);
        fr_drive_free(d);
    }
}

#[test]
fn phase_modulation_setter_validates() {
    let d = operating_point();
    assert_eq!(unsafe { fr_drive_set_phase_modulation(d, 1.0, 0.0) }, FrStatus::InvalidParameter);
    assert_eq!(unsafe { fr_drive_set_phase_modulation(d, mhz(4.35 * 7.343), mhz(7.343)) }, FrStatus::Ok);
    unsafe { fr_drive_free(d) };
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/floquet_raman.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    assert!(text.starts_with("#ifndef FLOQUET_RAMAN_H"));
    for name in [
        "fr_version",
        "fr_last_error_message",
        "fr_drive_new",
        "fr_drive_set_phase_modulation",
        "fr_drive_free",
        "fr_eigenbasis",
        "fr_quasienergies",
        "fr_quasienergy_gap",
        "fr_resonance_frequency",
        "fr_resonance_locate",
        "fr_raman_rabi_frequency",
        "fr_adiabaticity",
        "fr_simulate_floquet_raman",
        "fr_trace_len",
        "fr_trace_copy",
        "fr_trace_free",
        "typedef struct FrDrive FrDrive;",
        "typedef struct FrTrace FrTrace;",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a C program against the header and the static
/// library when a C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libfloquet_raman_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <math.h>
#include "floquet_raman.h"
int main(void) {
    const double two_pi_mhz = 2.0 * M_PI * 1e6;
    FrDrive *d = NULL;
    if (fr_drive_new(10.03 * two_pi_mhz, 9.67 * two_pi_mhz, 2.37 * two_pi_mhz, 6.985 * two_pi_mhz, &d) != FR_STATUS_OK) return 1;
    double theta = 0.0, omega0 = 0.0;
    if (fr_eigenbasis(d, &theta, &omega0) != FR_STATUS_OK) return 2;
    FrDrive *bad = NULL;
    if (fr_drive_new(1.0, 1.0, 1.0, -1.0, &bad) != FR_STATUS_INVALID_PARAMETER) return 3;
    char msg[128];
    if (fr_last_error_message(msg, sizeof msg) == 0) return 4;
    printf("%s %.6f %.3f\n", fr_version(), theta, omega0 / two_pi_mhz);
    fr_drive_free(d);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with(floquet_raman::VERSION), "{line}");
    assert!(line.contains("13.932"), "{line}");
}
