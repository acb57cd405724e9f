//! Nonlinear least-squares fits of the line shapes used in the analysis:
//! sinusoids, Gaussian-damped Ramsey fringes and Lorentzian peaks.
//!
//! Abscissae are rescaled to `[0, 1]` before fitting so that frequencies in
//! rad/s and times in seconds do not wreck the conditioning.

use crate::error::{Error, Result};
use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{DMatrix, DVector, Dyn, Owned};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Model `y = f(p; x)` with analytic gradient with respect to `p`.
trait Model {
    const N: usize;
    fn eval(p: &[f64], x: f64, grad: &mut [f64]) -> f64;
}

struct Problem<'a, M: Model> {
    x: &'a [f64],
    y: &'a [f64],
    p: DVector<f64>,
    _model: std::marker::PhantomData<M>,
}

impl<M: Model> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_, M> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, p: &DVector<f64>) {
        self.p.copy_from(p);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let mut g = vec![0.0; M::N];
        let p = self.p.as_slice();
        Some(DVector::from_iterator(
            self.x.len(),
            self.x.iter().zip(self.y).map(|(&x, &y)| M::eval(p, x, &mut g) - y),
        ))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let mut j = DMatrix::zeros(self.x.len(), M::N);
        let mut g = vec![0.0; M::N];
        let p = self.p.as_slice();
        for (i, &x) in self.x.iter().enumerate() {
            M::eval(p, x, &mut g);
            for k in 0..M::N {
                j[(i, k)] = g[k];
            }
        }
        Some(j)
    }
}

struct Fitted {
    p: Vec<f64>,
    r_squared: f64,
    rms: f64,
}

fn run<M: Model>(x: &[f64], y: &[f64], seed: Vec<f64>) -> Result<Fitted> {
    let problem = Problem::<M> { x, y, p: DVector::from_vec(seed), _model: std::marker::PhantomData };
    let (solved, report) = LevenbergMarquardt::new().with_patience(200).minimize(problem);
    if !report.termination.was_successful() {
        return Err(Error::FitFailed(format!("{:?}", report.termination)));
    }
    let p: Vec<f64> = solved.p.iter().copied().collect();
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailed("non-finite parameters".into()));
    }
    let residuals = solved.residuals().expect("residuals are always available");
    let ss_res = residuals.norm_squared();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(Fitted {
        p,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        rms: (ss_res / y.len() as f64).sqrt(),
    })
}

fn check_data(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::PreconditionViolated("abscissa and ordinate lengths differ".into()));
    }
    if x.len() < min_len {
        return Err(Error::FitFailed(format!("need at least {min_len} points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::FitFailed("non-finite data".into()));
    }
    Ok(())
}

/// Affine map of the abscissa onto `[0, 1]`.
#[derive(Clone, Copy)]
struct Scale {
    origin: f64,
    span: f64,
}

impl Scale {
    fn of(x: &[f64]) -> Result<Self> {
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::FitFailed("abscissa has zero span".into()));
        }
        Ok(Scale { origin: lo, span: hi - lo })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| (v - self.origin) / self.span).collect()
    }
}

/// Longest record searched point by point; longer records are decimated.
const DFT_MAX_POINTS: usize = 2048;

/// Strongest Fourier component of `y − mean(y)` sampled at (possibly
/// non-uniform) times `t`. Returns `(ω, amplitude, phase)` for the model
/// `amplitude·cos(ω t + phase)`. The search runs from half a cycle over the
/// record up to the Nyquist rate of the mean spacing, oversampled fourfold.
/// Records longer than 2048 points are decimated first, which caps the
/// searchable frequency at about 1024 cycles per record.
pub fn dominant_frequency(t: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    check_data(t, y, 4)?;
    if t.len() > DFT_MAX_POINTS {
        let stride = t.len().div_ceil(DFT_MAX_POINTS);
        let td: Vec<f64> = t.iter().step_by(stride).copied().collect();
        let yd: Vec<f64> = y.iter().step_by(stride).copied().collect();
        return dominant_frequency(&td, &yd);
    }
    let scale = Scale::of(t)?;
    let s = scale.apply(t);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let n = y.len();
    let nyquist_cycles = 0.5 * (n - 1) as f64;
    let steps = (4.0 * nyquist_cycles).ceil() as usize;
    let component = |cycles: f64| {
        let w = TAU * cycles;
        let (mut re, mut im) = (0.0, 0.0);
        for (&x, &v) in s.iter().zip(y) {
            let (sn, cs) = (w * x).sin_cos();
            re += (v - mean) * cs;
            im -= (v - mean) * sn;
        }
        (re, im)
    };
    let mut best = (0.0, 0.0, 0.0, 0.0);
    for k in 0..=steps {
        let cycles = 0.5 + (nyquist_cycles - 0.5) * k as f64 / steps.max(1) as f64;
        let (re, im) = component(cycles);
        let power = re * re + im * im;
        if power > best.0 {
            best = (power, cycles, re, im);
        }
    }
    let (_, cycles, re, im) = best;
    let amp = 2.0 * (re * re + im * im).sqrt() / n as f64;
    let omega = TAU * cycles / scale.span;
    // phase relative to the true time origin
    let phase = im.atan2(re) - omega * scale.origin;
    Ok((omega, amp, phase.rem_euclid(TAU)))
}

struct SinusoidModel;

impl Model for SinusoidModel {
    const N: usize = 4;
    fn eval(p: &[f64], x: f64, g: &mut [f64]) -> f64 {
        let (c, a, w, phi) = (p[0], p[1], p[2], p[3]);
        let (s, cs) = (w * x + phi).sin_cos();
        g[0] = 1.0;
        g[1] = cs;
        g[2] = -a * x * s;
        g[3] = -a * s;
        c + a * cs
    }
}

/// `offset + amplitude·cos(ω t + phase)`, with `amplitude ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub r_squared: f64,
    pub rms: f64,
}

impl SinusoidFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (self.omega * t + self.phase).cos()
    }
}

/// Fits a sinusoid. The frequency seed defaults to the dominant Fourier
/// component.
pub fn fit_sinusoid(t: &[f64], y: &[f64], omega_seed: Option<f64>) -> Result<SinusoidFit> {
    check_data(t, y, 5)?;
    let scale = Scale::of(t)?;
    let (w_dft, a_dft, phi_dft) = dominant_frequency(t, y)?;
    let w0 = omega_seed.unwrap_or(w_dft);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let s = scale.apply(t);
    let seed = vec![mean, a_dft.max(1e-12), w0 * scale.span, phi_dft + w0 * scale.origin];
    let f = run::<SinusoidModel>(&s, y, seed)?;
    let (mut a, w_s, mut phi) = (f.p[1], f.p[2], f.p[3]);
    let mut w = w_s / scale.span;
    if a < 0.0 {
        a = -a;
        phi += std::f64::consts::PI;
    }
    if w < 0.0 {
        w = -w;
        phi = -phi;
    }
    phi -= w * scale.origin;
    Ok(SinusoidFit {
        offset: f.p[0],
        amplitude: a,
        omega: w,
        phase: phi.rem_euclid(TAU),
        r_squared: f.r_squared,
        rms: f.rms,
    })
}

struct RamseyModel;

impl Model for RamseyModel {
    const N: usize = 5;
    fn eval(p: &[f64], x: f64, g: &mut [f64]) -> f64 {
        let (c, a, w, phi, tau) = (p[0], p[1], p[2], p[3], p[4]);
        let u = x / tau;
        let env = (-u * u).exp();
        let (s, cs) = (w * x + phi).sin_cos();
        g[0] = 1.0;
        g[1] = env * cs;
        g[2] = -a * env * x * s;
        g[3] = -a * env * s;
        g[4] = a * cs * env * 2.0 * u * u / tau;
        c + a * env * cs
    }
}

/// `offset + amplitude·exp(−(t/τ)²)·cos(ω t + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyFit {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub tau: f64,
    pub r_squared: f64,
    pub rms: f64,
}

/// Fits Gaussian-damped fringes. The time origin is the free-evolution
/// start, so `t` is not rescaled by an offset here; only the span is used.
pub fn fit_ramsey(t: &[f64], y: &[f64]) -> Result<RamseyFit> {
    check_data(t, y, 6)?;
    let span = t.iter().copied().fold(0.0, f64::max);
    if !(span > 0.0) {
        return Err(Error::FitFailed("times must extend past zero".into()));
    }
    let (w0, _, phi0) = dominant_frequency(t, y)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let a0 = y.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let s: Vec<f64> = t.iter().map(|v| v / span).collect();
    let mut best: Option<Fitted> = None;
    for tau_frac in [0.25, 0.5, 1.0] {
        let seed = vec![mean, a0, w0 * span, phi0, tau_frac];
        if let Ok(f) = run::<RamseyModel>(&s, y, seed) {
            if best.as_ref().is_none_or(|b| f.rms < b.rms) {
                best = Some(f);
            }
        }
    }
    let f = best.ok_or_else(|| Error::FitFailed("no Ramsey seed converged".into()))?;
    let (mut a, mut w, mut phi) = (f.p[1], f.p[2] / span, f.p[3]);
    if a < 0.0 {
        a = -a;
        phi += std::f64::consts::PI;
    }
    if w < 0.0 {
        w = -w;
        phi = -phi;
    }
    Ok(RamseyFit {
        offset: f.p[0],
        amplitude: a,
        omega: w,
        phase: phi.rem_euclid(TAU),
        tau: f.p[4].abs() * span,
        r_squared: f.r_squared,
        rms: f.rms,
    })
}

struct LorentzianModel;

impl Model for LorentzianModel {
    const N: usize = 4;
    fn eval(p: &[f64], x: f64, g: &mut [f64]) -> f64 {
        let (b, h, c, gam) = (p[0], p[1], p[2], p[3]);
        let g2 = gam * gam;
        let d = x - c;
        let den = g2 + d * d;
        let l = g2 / den;
        g[0] = 1.0;
        g[1] = l;
        g[2] = h * g2 * 2.0 * d / (den * den);
        g[3] = h * 2.0 * gam * d * d / (den * den);
        b + h * l
    }
}

/// `baseline + height·γ²/(γ² + (x − centre)²)`; `gamma` is the half width
/// at half maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub baseline: f64,
    pub height: f64,
    pub centre: f64,
    pub gamma: f64,
    pub r_squared: f64,
    pub rms: f64,
}

impl LorentzianFit {
    pub fn eval(&self, x: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        self.baseline + self.height * g2 / (g2 + (x - self.centre).powi(2))
    }
}

pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LorentzianFit> {
    check_data(x, y, 5)?;
    let scale = Scale::of(x)?;
    let s = scale.apply(x);
    let (kmax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("data is non-empty");
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let half = 0.5 * (ymax + ymin);
    let above = s.iter().zip(y).filter(|(_, &v)| v >= half).map(|(&x, _)| x);
    let (lo, hi) = above.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    let gamma0 = (0.5 * (hi - lo)).max(0.5 / s.len() as f64);
    let seed = vec![ymin, ymax - ymin, s[kmax], gamma0];
    let f = run::<LorentzianModel>(&s, y, seed)?;
    Ok(LorentzianFit {
        baseline: f.p[0],
        height: f.p[1],
        centre: scale.origin + f.p[2] * scale.span,
        gamma: f.p[3].abs() * scale.span,
        r_squared: f.r_squared,
        rms: f.rms,
    })
}
