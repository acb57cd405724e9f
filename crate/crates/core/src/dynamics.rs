//! Time-dependent two-level Hamiltonian and its propagation.
//!
//! The rotating-frame Hamiltonian is
//!
//! ```text
//! H(t) = (Δz/2) σz + (Δx/2) σx + A sin φ(t) σx,
//! φ(t) = ω t + (a/ν) sin(ν t)
//! ```
//!
//! with the phase modulation switched off when `a = 0`. Every generator in
//! this crate is traceless and Hermitian, so it is carried as a real Bloch
//! vector `h` with `H = h·σ` and every substep propagator is an exact SU(2)
//! exponential.

use crate::error::{Error, Result};
use crate::spin::{cross, Mat2, SpinState, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default integration tolerance (amplitude level, see [`Integrator`]).
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default number of substeps per shortest characteristic period.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 64.0;

/// Drive and system frequencies defining `H(t)`. All fields are angular
/// frequencies in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Longitudinal detuning Δz = ΔE − ω_d.
    pub delta_z: f64,
    /// Static transverse drive Δx.
    pub delta_x: f64,
    /// Weak periodic drive amplitude A.
    pub amp_a: f64,
    /// Weak drive frequency ω.
    pub omega: f64,
    /// Phase-modulation depth a; zero disables the modulation.
    pub phase_mod_a: f64,
    /// Phase-modulation frequency ν.
    pub phase_mod_nu: f64,
}

impl DriveParams {
    /// Unmodulated drive. Returns an error if the invariants do not hold.
    pub fn new(delta_z: f64, delta_x: f64, amp_a: f64, omega: f64) -> Result<Self> {
        let p = DriveParams {
            delta_z,
            delta_x,
            amp_a,
            omega,
            phase_mod_a: 0.0,
            phase_mod_nu: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`DriveParams::new`] with every value given as `(2π)·x MHz`.
    pub fn from_mhz(delta_z: f64, delta_x: f64, amp_a: f64, omega: f64) -> Result<Self> {
        use crate::units::mhz;
        Self::new(mhz(delta_z), mhz(delta_x), mhz(amp_a), mhz(omega))
    }

    pub fn with_phase_modulation(mut self, a: f64, nu: f64) -> Result<Self> {
        self.phase_mod_a = a;
        self.phase_mod_nu = nu;
        self.validate()?;
        Ok(self)
    }

    pub fn with_amp(mut self, amp_a: f64) -> Self {
        self.amp_a = amp_a;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_delta_z(mut self, delta_z: f64) -> Self {
        self.delta_z = delta_z;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_z", self.delta_z),
            ("delta_x", self.delta_x),
            ("amp_a", self.amp_a),
            ("omega", self.omega),
            ("phase_mod_a", self.phase_mod_a),
            ("phase_mod_nu", self.phase_mod_nu),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} is not finite") });
            }
        }
        if self.delta_x < 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta_x",
                reason: "must be non-negative".into(),
            });
        }
        if self.amp_a < 0.0 {
            return Err(Error::InvalidParameter { name: "amp_a", reason: "must be non-negative".into() });
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParameter { name: "omega", reason: "must be positive".into() });
        }
        if self.phase_mod_a < 0.0 {
            return Err(Error::InvalidParameter {
                name: "phase_mod_a",
                reason: "must be non-negative".into(),
            });
        }
        if self.phase_mod_a > 0.0 && self.phase_mod_nu <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "phase_mod_nu",
                reason: "must be positive when phase modulation is enabled".into(),
            });
        }
        if !self.is_weak_drive() {
            log::warn!(
                "drive amplitude {:e} rad/s is not below the static gap {:e} rad/s; weak-drive picture does not apply",
                self.amp_a,
                self.omega0()
            );
        }
        Ok(())
    }

    /// Static gap ω₀ = (Δz² + Δx²)^½.
    pub fn omega0(&self) -> f64 {
        self.delta_z.hypot(self.delta_x)
    }

    pub fn is_weak_drive(&self) -> bool {
        self.amp_a < self.omega0()
    }

    pub fn is_modulated(&self) -> bool {
        self.phase_mod_a > 0.0
    }

    /// Drive period 2π/ω.
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// φ(t) = ωt, or ωt + (a/ν) sin(νt) with phase modulation.
    pub fn drive_phase(&self, t: f64) -> f64 {
        if self.is_modulated() {
            self.omega * t + self.phase_mod_a / self.phase_mod_nu * (self.phase_mod_nu * t).sin()
        } else {
            self.omega * t
        }
    }

    /// Bloch vector of `H(t)`.
    pub fn bloch(&self, t: f64) -> Vec3 {
        [0.5 * self.delta_x + self.amp_a * self.drive_phase(t).sin(), 0.0, 0.5 * self.delta_z]
    }
}

/// `H(t)` evaluated at one instant, rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSample {
    pub matrix: Mat2,
    pub t: f64,
}

/// Rotating-frame Hamiltonian at time `t ≥ 0`.
pub fn hamiltonian_at(params: &DriveParams, t: f64) -> HamiltonianSample {
    debug_assert!(t >= 0.0, "hamiltonian_at called with negative time");
    HamiltonianSample { matrix: Mat2::from_bloch(params.bloch(t)), t }
}

/// A traceless Hamiltonian `H(t) = h(t)·σ` that the integrator can step.
pub trait BlochField: Sync {
    fn bloch(&self, t: f64) -> Vec3;

    /// Largest admissible substep, seconds. `f64::INFINITY` for static fields.
    fn max_step(&self) -> f64;

    /// Refinement floor; below it the integrator reports `StepUnderflow`.
    fn min_step(&self) -> f64;

    fn is_static(&self) -> bool {
        false
    }
}

impl BlochField for DriveParams {
    fn bloch(&self, t: f64) -> Vec3 {
        DriveParams::bloch(self, t)
    }

    fn max_step(&self) -> f64 {
        if self.is_static() {
            return f64::INFINITY;
        }
        // the instantaneous drive frequency peaks at ω + a
        let mut fastest = self.omega.max(self.omega0());
        if self.is_modulated() {
            fastest = fastest.max(self.omega + self.phase_mod_a).max(self.phase_mod_nu);
        }
        TAU / fastest / DEFAULT_STEPS_PER_PERIOD
    }

    fn min_step(&self) -> f64 {
        1e-6 / self.omega
    }

    fn is_static(&self) -> bool {
        self.amp_a == 0.0
    }
}

/// Constant field, e.g. a resonant pulse or free precession.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticField(pub Vec3);

impl BlochField for StaticField {
    fn bloch(&self, _t: f64) -> Vec3 {
        self.0
    }

    fn max_step(&self) -> f64 {
        f64::INFINITY
    }

    fn min_step(&self) -> f64 {
        0.0
    }

    fn is_static(&self) -> bool {
        true
    }
}

/// A field whose clock is offset: `bloch(t) = inner.bloch(t + offset)`.
#[derive(Clone, Copy, Debug)]
pub struct Delayed<'a, F: BlochField> {
    pub inner: &'a F,
    pub offset: f64,
}

impl<F: BlochField> BlochField for Delayed<'_, F> {
    fn bloch(&self, t: f64) -> Vec3 {
        self.inner.bloch(t + self.offset)
    }
    fn max_step(&self) -> f64 {
        self.inner.max_step()
    }
    fn min_step(&self) -> f64 {
        self.inner.min_step()
    }
    fn is_static(&self) -> bool {
        self.inner.is_static()
    }
}

/// Lab-frame Hamiltonian `(ΔE/2) σz + V(t) σx` with the synthesized drive
/// `V(t) = Δx cos(ω_d t) + 2A cos(ω_d t) sin φ(t)` and `ΔE = ω_d + Δz`.
#[derive(Clone, Copy, Debug)]
pub struct LabFrame {
    pub params: DriveParams,
    pub omega_d: f64,
}

impl BlochField for LabFrame {
    fn bloch(&self, t: f64) -> Vec3 {
        let p = &self.params;
        let carrier = (self.omega_d * t).cos();
        let v = p.delta_x * carrier + 2.0 * p.amp_a * carrier * p.drive_phase(t).sin();
        [v, 0.0, 0.5 * (self.omega_d + p.delta_z)]
    }

    fn max_step(&self) -> f64 {
        let fastest = self.omega_d + self.params.delta_z.abs();
        (TAU / fastest / DEFAULT_STEPS_PER_PERIOD).min(self.params.max_step())
    }

    fn min_step(&self) -> f64 {
        1e-6 / self.omega_d
    }
}

/// Substep rule. Both rules produce exact SU(2) exponentials per substep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Piecewise-constant Hamiltonian sampled at the substep midpoint.
    Midpoint,
    /// Fourth-order Magnus expansion on two Gauss–Legendre nodes.
    Magnus4,
}

impl Scheme {
    /// Global convergence order in the step size.
    pub fn order(self) -> u32 {
        match self {
            Scheme::Midpoint => 2,
            Scheme::Magnus4 => 4,
        }
    }
}

/// Step-doubling integrator. The step is halved until two successive
/// resolutions of the full interval differ by less than `tol` in the
/// Frobenius norm of the propagator; the finer one is returned. Populations
/// then agree to better than `2·tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrator {
    pub scheme: Scheme,
    pub tol: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator { scheme: Scheme::Magnus4, tol: DEFAULT_TOL }
    }
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Integrator { tol, ..Default::default() }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Propagator of a single substep `[t, t + h]`.
    pub fn step<F: BlochField + ?Sized>(&self, field: &F, t: f64, h: f64) -> Mat2 {
        match self.scheme {
            Scheme::Midpoint => {
                let b = field.bloch(t + 0.5 * h);
                Mat2::exp_neg_i_bloch([b[0] * h, b[1] * h, b[2] * h])
            }
            Scheme::Magnus4 => {
                const C: f64 = 0.288_675_134_594_812_9; // √3/6
                let b1 = field.bloch(t + (0.5 - C) * h);
                let b2 = field.bloch(t + (0.5 + C) * h);
                let c = cross(b2, b1);
                let s = C * h * h;
                let k = [
                    0.5 * h * (b1[0] + b2[0]) + s * c[0],
                    0.5 * h * (b1[1] + b2[1]) + s * c[1],
                    0.5 * h * (b1[2] + b2[2]) + s * c[2],
                ];
                Mat2::exp_neg_i_bloch(k)
            }
        }
    }

    /// `n` uniform substeps over `[t0, t1]`.
    pub fn fixed<F: BlochField + ?Sized>(&self, field: &F, t0: f64, t1: f64, n: usize) -> Mat2 {
        let h = (t1 - t0) / n as f64;
        (0..n).fold(Mat2::identity(), |u, k| self.step(field, t0 + k as f64 * h, h) * u)
    }

    /// Resolves `[t0, t1]` under step control. Returns the substep count and
    /// the propagator.
    pub fn resolve<F: BlochField + ?Sized>(
        &self,
        field: &F,
        t0: f64,
        t1: f64,
    ) -> Result<(usize, Mat2)> {
        check_interval(t0, t1, self.tol)?;
        let span = t1 - t0;
        if span == 0.0 {
            return Ok((0, Mat2::identity()));
        }
        if field.is_static() {
            let b = field.bloch(t0);
            return Ok((1, Mat2::exp_neg_i_bloch([b[0] * span, b[1] * span, b[2] * span])));
        }
        let mut n = ((span / field.max_step()).ceil() as usize).max(1);
        let mut coarse = self.fixed(field, t0, t1, n);
        loop {
            let fine_step = span / (2 * n) as f64;
            if fine_step < field.min_step() {
                return Err(Error::StepUnderflow { step: fine_step, floor: field.min_step() });
            }
            let fine = self.fixed(field, t0, t1, 2 * n);
            if (fine - coarse).frobenius_norm() < self.tol {
                return Ok((2 * n, fine));
            }
            n *= 2;
            coarse = fine;
        }
    }

    pub fn unitary<F: BlochField + ?Sized>(&self, field: &F, t0: f64, t1: f64) -> Result<Mat2> {
        self.resolve(field, t0, t1).map(|(_, u)| u)
    }

    /// `U(t0 → t_k)` for every sample time. The step size is resolved once
    /// over the whole window and reused between samples.
    pub fn sampled<F: BlochField + ?Sized>(
        &self,
        field: &F,
        t0: f64,
        times: &[f64],
    ) -> Result<Vec<Mat2>> {
        let Some(&t_last) = times.last() else {
            return Ok(Vec::new());
        };
        if times.windows(2).any(|w| w[1] < w[0]) || times[0] < t0 {
            return Err(Error::PreconditionViolated(
                "sample times must be non-decreasing and not precede the start time".into(),
            ));
        }
        if field.is_static() {
            return Ok(times
                .iter()
                .map(|&t| {
                    let b = field.bloch(t0);
                    let d = t - t0;
                    Mat2::exp_neg_i_bloch([b[0] * d, b[1] * d, b[2] * d])
                })
                .collect());
        }
        let (n, _) = self.resolve(field, t0, t_last)?;
        let h = if n == 0 { f64::INFINITY } else { (t_last - t0) / n as f64 };
        let mut out = Vec::with_capacity(times.len());
        let mut u = Mat2::identity();
        let mut t = t0;
        for &tk in times {
            let d = tk - t;
            if d > 0.0 {
                let m = ((d / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                u = self.fixed(field, t, tk, m) * u;
            }
            t = tk;
            out.push(u);
        }
        Ok(out)
    }
}

fn check_interval(t0: f64, t1: f64, tol: f64) -> Result<()> {
    if !(t1 >= t0) {
        return Err(Error::PreconditionViolated(format!("t1 = {t1:e} precedes t0 = {t0:e}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: "must be positive".into() });
    }
    Ok(())
}

/// Evolution operator over `[t_start, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub u: Mat2,
    pub t_start: f64,
    pub t_end: f64,
}

impl Propagator {
    pub fn identity(t: f64) -> Self {
        Propagator { u: Mat2::identity(), t_start: t, t_end: t }
    }

    /// `later ∘ self`, i.e. evolution over `[self.t_start, later.t_end]`.
    pub fn then(&self, later: &Propagator) -> Result<Propagator> {
        let gap = (later.t_start - self.t_end).abs();
        if gap > 1e-15 * self.t_end.abs().max(1e-9) {
            return Err(Error::PreconditionViolated(format!(
                "propagators do not abut: {:e} vs {:e}",
                self.t_end, later.t_start
            )));
        }
        Ok(Propagator { u: later.u * self.u, t_start: self.t_start, t_end: later.t_end })
    }

    /// Evolution backwards from `t_end` to `t_start`.
    pub fn inverse(&self) -> Propagator {
        Propagator { u: self.u.adjoint(), t_start: self.t_end, t_end: self.t_start }
    }

    pub fn apply(&self, s: &SpinState) -> SpinState {
        self.u.apply(s)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.u.unitarity_defect()
    }
}

/// `U(t0 → t1)·state` under the rotating-frame Hamiltonian.
pub fn propagate_state(
    state: &SpinState,
    params: &DriveParams,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<SpinState> {
    Ok(propagate_unitary(params, t0, t1, tol)?.apply(state))
}

/// Time-ordered evolution operator `U(t0 → t1)`.
pub fn propagate_unitary(params: &DriveParams, t0: f64, t1: f64, tol: f64) -> Result<Propagator> {
    params.validate()?;
    let u = Integrator::new(tol).unitary(params, t0, t1)?;
    Ok(Propagator { u, t_start: t0, t_end: t1 })
}

/// Lowest ratio ω_d / ω₀ accepted by [`lab_frame_check`].
pub const RWA_MIN_CARRIER_RATIO: f64 = 50.0;

/// Simulates the lab-frame Hamiltonian with carrier `omega_d` and compares
/// `P|0⟩` against the rotating-frame evolution over `[0, t1]`. Populations
/// are invariant under the frame change, so the maximum absolute deviation
/// measures the rotating-wave error directly. The initial state is the
/// upper static eigenstate `|+⟩` (or `|0⟩` when ω₀ = 0).
pub fn lab_frame_check(params: &DriveParams, omega_d: f64, t1: f64) -> Result<f64> {
    params.validate()?;
    let omega0 = params.omega0();
    if !(omega_d >= RWA_MIN_CARRIER_RATIO * omega0) || omega_d <= 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "carrier {omega_d:e} rad/s must be at least {RWA_MIN_CARRIER_RATIO}·ω₀ = {:e} rad/s",
            RWA_MIN_CARRIER_RATIO * omega0
        )));
    }
    if !(t1 > 0.0) {
        return Err(Error::PreconditionViolated("t1 must be positive".into()));
    }
    let start = if omega0 > 0.0 {
        let half = 0.5 * params.delta_x.atan2(params.delta_z);
        SpinState::from_real(half.cos(), half.sin())
    } else {
        SpinState::ground()
    };
    // Sample at a quarter of the fastest rotating-frame period.
    let fastest = params.omega.max(omega0).max(params.amp_a);
    let n = ((t1 * fastest / TAU) * 16.0).ceil().max(64.0) as usize;
    let times: Vec<f64> = (0..=n).map(|k| t1 * k as f64 / n as f64).collect();

    let integ = Integrator::default();
    let lab = LabFrame { params: *params, omega_d };
    let lab_u = integ.sampled(&lab, 0.0, &times)?;
    let rot_u = integ.sampled(params, 0.0, &times)?;
    Ok(lab_u
        .iter()
        .zip(&rot_u)
        .map(|(ul, ur)| (ul.apply(&start).p0() - ur.apply(&start).p0()).abs())
        .fold(0.0, f64::max))
}
