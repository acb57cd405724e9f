//! Floquet structure of the periodically driven two-level system.
//!
//! Quasienergies come from the eigenphases of the one-period propagator
//! (monodromy matrix), `ε = −arg(λ)/T`, folded into the zone
//! `[−ω/2, ω/2)`. The ladder picture, resonance conditions and the Raman
//! Rabi frequency `Ω_F` build on top of that.

use crate::dynamics::{DriveParams, Integrator, Propagator};
use crate::error::{Error, Result};
use crate::experiment;
use crate::fit;
use crate::ladder::{ladder_min_splitting, DEFAULT_N_RANGE};
use crate::optimize::{golden_max, golden_min};
use crate::spin::{Mat2, SpinState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Static eigenbasis of `H_s = (Δz/2)σz + (Δx/2)σx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    /// Mixing angle `atan2(Δx, Δz)`.
    pub theta: f64,
    pub omega0: f64,
    /// `cos(θ/2)|0⟩ + sin(θ/2)|−1⟩`, energy `+ω₀/2`.
    pub plus: SpinState,
    /// `−sin(θ/2)|0⟩ + cos(θ/2)|−1⟩`, energy `−ω₀/2`.
    pub minus: SpinState,
}

impl EigenBasis {
    /// Population of the lower band `|−⟩`.
    pub fn lower_population(&self, s: &SpinState) -> f64 {
        self.minus.overlap(s)
    }

    pub fn upper_population(&self, s: &SpinState) -> f64 {
        self.plus.overlap(s)
    }
}

pub fn eigenbasis(params: &DriveParams) -> Result<EigenBasis> {
    let omega0 = params.omega0();
    if omega0 == 0.0 {
        return Err(Error::DegenerateSystem);
    }
    let theta = params.delta_x.atan2(params.delta_z);
    let (s, c) = (0.5 * theta).sin_cos();
    Ok(EigenBasis {
        theta,
        omega0,
        plus: SpinState::from_real(c, s),
        minus: SpinState::from_real(-s, c),
    })
}

/// Folds `eps` into `[−ω/2, ω/2)`.
pub fn fold_quasienergy(eps: f64, omega: f64) -> f64 {
    let folded = eps - omega * ((eps + 0.5 * omega) / omega).floor();
    // floor rounding can leave the value exactly on the excluded edge
    if folded >= 0.5 * omega {
        folded - omega
    } else {
        folded
    }
}

/// Distance between two quasienergies on the circle of circumference ω.
pub fn quasienergy_gap_between(e1: f64, e2: f64, omega: f64) -> f64 {
    let d = (e1 - e2).rem_euclid(omega);
    d.min(omega - d)
}

/// Floquet quasienergies and periodic modes.
#[derive(Clone, Debug, PartialEq)]
pub struct FloquetSpectrum {
    /// `[ε_a, ε_b]` in `[−ω/2, ω/2)`; mode `a` is the one with the larger
    /// overlap with `|+⟩` (or `|0⟩` when ω₀ = 0) at the period start.
    pub quasienergies: [f64; 2],
    /// Sample times relative to the period start, `0..=T`.
    pub sample_times: Vec<f64>,
    /// `|φ_a(t)⟩, |φ_b(t)⟩` at each sample time.
    pub modes: Vec<[SpinState; 2]>,
    pub period: f64,
    pub t0: f64,
    /// A quasienergy sits on the zone boundary.
    pub zone_edge: bool,
    /// Eigenphases coincide within 1e−12; modes are then an arbitrary basis.
    pub degenerate: bool,
}

impl FloquetSpectrum {
    pub fn gap(&self) -> f64 {
        quasienergy_gap_between(self.quasienergies[0], self.quasienergies[1], TAU / self.period)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloquetOptions {
    pub tol: f64,
    pub mode_samples: usize,
    /// Start of the period used for the monodromy matrix.
    pub t0: f64,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions { tol: 1e-10, mode_samples: 64, t0: 0.0 }
    }
}

fn require_periodic(params: &DriveParams) -> Result<()> {
    params.validate()?;
    if params.is_modulated() {
        return Err(Error::PreconditionViolated(
            "Floquet analysis needs a single-period drive (phase_mod_a = 0)".into(),
        ));
    }
    Ok(())
}

/// One-period propagator `U(t0 → t0 + T)`.
pub fn monodromy(params: &DriveParams, t0: f64, tol: f64) -> Result<Propagator> {
    require_periodic(params)?;
    let t1 = t0 + params.period();
    let u = Integrator::new(tol).unitary(params, t0, t1)?;
    Ok(Propagator { u, t_start: t0, t_end: t1 })
}

fn reference_state(params: &DriveParams) -> SpinState {
    eigenbasis(params).map(|b| b.plus).unwrap_or(SpinState::ground())
}

struct Decomposed {
    eps: [f64; 2],
    vecs: [SpinState; 2],
    degenerate: bool,
}

fn decompose(u: &Mat2, params: &DriveParams) -> Decomposed {
    let period = params.period();
    let [(l0, v0), (l1, v1)] = u.eig_normal();
    let degenerate = (l0.arg() - l1.arg()).abs() < 1e-12;
    let eps0 = fold_quasienergy(-l0.arg() / period, params.omega);
    let eps1 = fold_quasienergy(-l1.arg() / period, params.omega);
    let reference = reference_state(params);
    if reference.overlap(&v0) >= reference.overlap(&v1) {
        Decomposed { eps: [eps0, eps1], vecs: [v0, v1], degenerate }
    } else {
        Decomposed { eps: [eps1, eps0], vecs: [v1, v0], degenerate }
    }
}

/// Quasienergies only, without mode sampling.
pub fn quasienergies(params: &DriveParams, tol: f64) -> Result<[f64; 2]> {
    let m = monodromy(params, 0.0, tol)?;
    Ok(decompose(&m.u, params).eps)
}

/// Circular distance between the two quasienergies.
pub fn quasienergy_gap(params: &DriveParams, tol: f64) -> Result<f64> {
    let [a, b] = quasienergies(params, tol)?;
    Ok(quasienergy_gap_between(a, b, params.omega))
}

pub fn floquet_spectrum(params: &DriveParams, tol: f64) -> Result<FloquetSpectrum> {
    floquet_spectrum_with(params, &FloquetOptions { tol, ..Default::default() })
}

pub fn floquet_spectrum_with(params: &DriveParams, opts: &FloquetOptions) -> Result<FloquetSpectrum> {
    require_periodic(params)?;
    let period = params.period();
    let n = opts.mode_samples.max(2);
    let times: Vec<f64> = (0..=n).map(|k| opts.t0 + period * k as f64 / n as f64).collect();
    let us = Integrator::new(opts.tol).sampled(params, opts.t0, &times)?;
    let mono = us[n];
    let d = decompose(&mono, params);
    if d.degenerate {
        log::warn!("Floquet eigenphases coincide; modes are not uniquely defined");
    }
    let modes = us
        .iter()
        .zip(&times)
        .map(|(u, &t)| {
            let dt = t - opts.t0;
            [0, 1].map(|k| {
                let phase = num_complex::Complex64::from_polar(1.0, d.eps[k] * dt);
                u.apply(&d.vecs[k]).scale(phase)
            })
        })
        .collect();
    let half = 0.5 * params.omega;
    let zone_edge = d.eps.iter().any(|e| (e.abs() - half).abs() < 1e-9 * params.omega);
    Ok(FloquetSpectrum {
        quasienergies: d.eps,
        sample_times: times.iter().map(|t| t - opts.t0).collect(),
        modes,
        period,
        t0: opts.t0,
        zone_edge,
        degenerate: d.degenerate,
    })
}

/// Quasienergies along a scan of ω. Branches are followed by eigenvector
/// overlap with the previous scan point, so an avoided crossing does not
/// swap labels.
pub fn quasienergy_scan(params: &DriveParams, omegas: &[f64], tol: f64) -> Result<Vec<[f64; 2]>> {
    let decomposed: Vec<Decomposed> = omegas
        .par_iter()
        .map(|&w| {
            let p = params.with_omega(w);
            monodromy(&p, 0.0, tol).map(|m| decompose(&m.u, &p))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(decomposed.len());
    let mut prev: Option<[SpinState; 2]> = None;
    for d in decomposed {
        let (eps, vecs) = match prev {
            Some(p) if p[0].overlap(&d.vecs[1]) > p[0].overlap(&d.vecs[0]) => {
                ([d.eps[1], d.eps[0]], [d.vecs[1], d.vecs[0]])
            }
            _ => (d.eps, d.vecs),
        };
        prev = Some(vecs);
        out.push(eps);
    }
    Ok(out)
}

/// Bare order-`m` resonance ω₀/m. Higher-order Stark shifts move the
/// operational resonance slightly; see [`resonance_locate`].
pub fn resonance_frequency(params: &DriveParams, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "m", reason: "order must be at least 1".into() });
    }
    Ok(eigenbasis(params)?.omega0 / m as f64)
}

/// Drive-frequency window `ω₀/m · [0.9, 1.1]` searched for the shifted
/// resonance.
pub fn resonance_window(params: &DriveParams, m: u32) -> Result<(f64, f64)> {
    let centre = resonance_frequency(params, m)?;
    Ok((0.9 * centre, 1.1 * centre))
}

/// Location and size of the smallest quasienergy gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub omega: f64,
    pub gap: f64,
}

/// Minimum of the quasienergy gap over `[lo, hi]`.
pub fn min_quasienergy_gap_in(params: &DriveParams, lo: f64, hi: f64, tol: f64) -> Result<GapMinimum> {
    let xtol = 1e-8 * params.omega0();
    let (omega, gap) = golden_min(|w| quasienergy_gap(&params.with_omega(w), tol), lo, hi, xtol)?;
    Ok(GapMinimum { omega, gap })
}

/// Avoided-crossing minimum of the quasienergy gap near the order-`m`
/// resonance.
pub fn min_quasienergy_gap(params: &DriveParams, m: u32, tol: f64) -> Result<GapMinimum> {
    let (lo, hi) = resonance_window(params, m)?;
    min_quasienergy_gap_in(params, lo, hi, tol)
}

/// Tolerance used for monodromy evaluations inside resonance searches.
const SEARCH_TOL: f64 = 1e-9;

/// Finds the drive frequency that maximizes inter-band transfer contrast
/// within `ω₀/m ± search_width`. The quasienergy avoided crossing marks
/// where the line sits; the contrast is sampled on a grid spanning a few
/// line widths around it plus the window edges, then refined by
/// golden-section search to a bracket of `1e−4·ω₀`.
pub fn resonance_locate(params: &DriveParams, m: u32, search_width: f64) -> Result<f64> {
    let centre = resonance_frequency(params, m)?;
    if !(search_width > 0.0) || search_width >= centre {
        return Err(Error::InvalidParameter {
            name: "search_width",
            reason: "must be positive and smaller than the resonance frequency".into(),
        });
    }
    let (lo, hi) = (centre - search_width, centre + search_width);
    let omega0 = params.omega0();
    let crossing = min_quasienergy_gap_in(params, lo, hi, SEARCH_TOL)?;
    if crossing.gap <= 1e-9 * omega0 {
        return Err(Error::NoPeakFound { variation: 0.0 });
    }
    let window = experiment::CONTRAST_WINDOW_PERIODS * TAU / crossing.gap;
    // the contrast line has a half width of Ω_F/m in drive frequency
    let reach = LOCATE_LINE_WIDTHS * crossing.gap / m as f64;
    let (a, b) = ((crossing.omega - reach).max(lo), (crossing.omega + reach).min(hi));
    let mut grid: Vec<f64> = (0..LOCATE_GRID).map(|k| a + (b - a) * k as f64 / (LOCATE_GRID - 1) as f64).collect();
    if a > lo {
        grid.insert(0, lo);
    }
    if b < hi {
        grid.push(hi);
    }
    let contrast = |w: f64| experiment::transfer_contrast(&params.with_omega(w), window);
    let values: Vec<f64> = grid.par_iter().map(|&w| contrast(w)).collect::<Result<_>>()?;
    let (kmax, vmax) = values
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if vmax - vmin < 0.01 {
        return Err(Error::NoPeakFound { variation: vmax - vmin });
    }
    let a = grid[kmax.saturating_sub(1)];
    let b = grid[(kmax + 1).min(grid.len() - 1)];
    let (omega, _) = golden_max(contrast, a, b, 1e-4 * omega0)?;
    Ok(omega)
}

const LOCATE_GRID: usize = 25;
const LOCATE_LINE_WIDTHS: f64 = 6.0;

/// Route used to obtain the Raman Rabi frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RabiMethod {
    /// Smallest splitting of the resonant pair in the truncated ladder.
    Ladder,
    /// Smallest quasienergy gap of the monodromy matrix.
    QuasienergyGap,
    /// Sinusoid fit to the slow inter-band population of a simulated trace
    /// at the contrast-maximizing drive frequency.
    TimeFit,
}

impl std::str::FromStr for RabiMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => Ok(RabiMethod::Ladder),
            "quasienergy-gap" => Ok(RabiMethod::QuasienergyGap),
            "time-fit" => Ok(RabiMethod::TimeFit),
            other => Err(Error::InvalidParameter { name: "method", reason: format!("unknown method `{other}`") }),
        }
    }
}

/// Raman Rabi frequency `Ω_F` of the order-`m` Floquet resonance. The value
/// refers to the operational (Stark-shifted) resonance nearest the drive
/// frequency, so `params.omega` only has to be close to `ω₀/m`.
pub fn raman_rabi_frequency(params: &DriveParams, m: u32, method: RabiMethod) -> Result<f64> {
    require_periodic(params)?;
    let target = resonance_frequency(params, m)?;
    if (params.omega - target).abs() > 0.2 * target {
        return Err(Error::NotNearResonance { omega: params.omega, order: m, target });
    }
    if params.amp_a == 0.0 {
        return Ok(0.0);
    }
    match method {
        RabiMethod::Ladder => ladder_min_splitting(params, m, DEFAULT_N_RANGE).map(|(_, s)| s),
        RabiMethod::QuasienergyGap => min_quasienergy_gap(params, m, SEARCH_TOL).map(|g| g.gap),
        RabiMethod::TimeFit => time_fit_rabi(params, m).map(|f| f.omega_f),
    }
}

/// Result of the time-domain route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeFitRabi {
    /// Drive frequency the trace was simulated at.
    pub omega: f64,
    pub omega_f: f64,
    pub fit: fit::SinusoidFit,
}

/// Locates the resonance by contrast, simulates several Raman periods from
/// `|+⟩`, and fits `a + b cos(Ω t + φ)` to the filtered lower-band
/// population.
pub fn time_fit_rabi(params: &DriveParams, m: u32) -> Result<TimeFitRabi> {
    let target = resonance_frequency(params, m)?;
    let omega = resonance_locate(params, m, 0.1 * target)?;
    let p = params.with_omega(omega);
    let estimate = quasienergy_gap(&p, SEARCH_TOL)?;
    let duration = 4.0 * TAU / estimate;
    let trace = experiment::band_evolution(&p, duration, experiment::CONTRAST_TOL)?;
    let slow = experiment::period_average(&trace.times, &trace.lower, p.period())?;
    let fit = fit::fit_sinusoid(&trace.times, &slow, None)?;
    Ok(TimeFitRabi { omega, omega_f: fit.omega, fit })
}

/// Traditional adiabaticity measure `max_t |⟨−|∂H/∂t|+⟩| / ω₀²`. For this
/// Hamiltonian `⟨−|σx|+⟩ = cos θ` and the drive derivative peaks at `A·ω`
/// (`A·(ω + a)` with phase modulation).
pub fn adiabaticity_parameter(params: &DriveParams) -> Result<f64> {
    let basis = eigenbasis(params)?;
    let rate = params.omega + if params.is_modulated() { params.phase_mod_a } else { 0.0 };
    Ok(params.amp_a * rate * basis.theta.cos().abs() / (basis.omega0 * basis.omega0))
}

/// Anomalous non-adiabaticity: the traditional condition holds while the
/// drive still transfers population between the bands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub parameter: f64,
    pub transfer_contrast: f64,
    pub anomalous: bool,
}

/// Parameter below which the traditional adiabatic condition is taken to
/// hold, and contrast above which transfer counts as substantial.
pub const ADIABATIC_THRESHOLD: f64 = 0.2;
pub const SUBSTANTIAL_TRANSFER: f64 = 0.5;

pub fn adiabaticity_report(params: &DriveParams, m: u32) -> Result<AdiabaticityReport> {
    let parameter = adiabaticity_parameter(params)?;
    let transfer_contrast = experiment::raman_contrast(params, m)?;
    Ok(AdiabaticityReport {
        parameter,
        transfer_contrast,
        anomalous: parameter < ADIABATIC_THRESHOLD && transfer_contrast > SUBSTANTIAL_TRANSFER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz, to_mhz};
    use approx::assert_relative_eq;

    fn operating_point() -> DriveParams {
        DriveParams::from_mhz(10.03, 9.67, 2.37, 6.985).unwrap()
    }

    #[test]
    fn eigenbasis_at_operating_point() {
        let b = eigenbasis(&operating_point()).unwrap();
        assert_relative_eq!(to_mhz(b.omega0), 13.93, epsilon = 5e-3);
        assert_relative_eq!(b.theta, 0.767, epsilon = 5e-4);
        let h = crate::dynamics::hamiltonian_at(&operating_point().with_amp(0.0), 0.0).matrix;
        let hp = h.apply(&b.plus);
        let hm = h.apply(&b.minus);
        assert!(hp.distance(&b.plus.scale((0.5 * b.omega0).into())) < 1e-6);
        assert!(hm.distance(&b.minus.scale((-0.5 * b.omega0).into())) < 1e-6);
        assert!(b.plus.overlap(&b.minus) < 1e-30);
    }

    #[test]
    fn eigenbasis_limits() {
        let b = eigenbasis(&DriveParams::from_mhz(5.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(b.theta, 0.0);
        assert_eq!(b.plus, SpinState::ground());
        let b = eigenbasis(&DriveParams::from_mhz(0.0, 5.0, 0.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(b.theta, std::f64::consts::FRAC_PI_2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(b.plus.distance(&SpinState::from_real(r, r)) < 1e-15);
        assert!(b.minus.distance(&SpinState::from_real(-r, r)) < 1e-15);
        assert_eq!(
            eigenbasis(&DriveParams::from_mhz(0.0, 0.0, 1.0, 1.0).unwrap()),
            Err(Error::DegenerateSystem)
        );
    }

    #[test]
    fn folding() {
        let w = 3.0;
        assert_eq!(fold_quasienergy(1.5, w), -1.5);
        assert_eq!(fold_quasienergy(-1.5, w), -1.5);
        assert_relative_eq!(fold_quasienergy(4.0, w), 1.0, epsilon = 1e-15);
        assert_relative_eq!(quasienergy_gap_between(1.4, -1.4, w), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn bare_second_order_resonance_is_degenerate() {
        // ω₀ = 2ω: ±ω₀/2 = ±ω both fold onto the zone centre.
        let p = DriveParams::from_mhz(14.0, 0.0, 0.0, 7.0).unwrap();
        let s = floquet_spectrum(&p, 1e-10).unwrap();
        assert!(s.degenerate);
        assert!(!s.zone_edge);
        for e in s.quasienergies {
            assert!(e.abs() < 1e-6 * p.omega0());
        }
    }

    #[test]
    fn zone_edge_flagged() {
        // ω = ω₀: ±ω₀/2 sit on the zone boundary ±ω/2.
        let p = DriveParams::from_mhz(14.0, 0.0, 0.0, 14.0).unwrap();
        let s = floquet_spectrum(&p, 1e-10).unwrap();
        assert!(s.zone_edge);
        for e in s.quasienergies {
            assert_relative_eq!(e, -0.5 * p.omega, max_relative = 1e-9);
        }
    }

    #[test]
    fn static_modes_are_eigenstates() {
        let p = DriveParams::from_mhz(10.03, 9.67, 0.0, 3.1).unwrap();
        let s = floquet_spectrum(&p, 1e-10).unwrap();
        let b = eigenbasis(&p).unwrap();
        let w0 = b.omega0;
        assert_relative_eq!(s.quasienergies[0], fold_quasienergy(0.5 * w0, p.omega), epsilon = 1e-6 * w0);
        assert_relative_eq!(s.quasienergies[1], fold_quasienergy(-0.5 * w0, p.omega), epsilon = 1e-6 * w0);
        for modes in &s.modes {
            assert!(b.plus.overlap(&modes[0]) > 1.0 - 1e-12);
            assert!(b.minus.overlap(&modes[1]) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn modes_periodic_and_orthonormal() {
        let s = floquet_spectrum(&operating_point(), 1e-10).unwrap();
        let first = s.modes.first().unwrap();
        let last = s.modes.last().unwrap();
        for k in 0..2 {
            assert!(first[k].distance(&last[k]) < 1e-8);
        }
        for m in &s.modes {
            assert!((m[0].norm_sqr() - 1.0).abs() < 1e-8);
            assert!(m[0].inner(&m[1]).norm() < 1e-8);
        }
        assert!(!s.degenerate);
    }

    #[test]
    fn gauge_independent_quasienergies() {
        let p = operating_point();
        let base = floquet_spectrum(&p, 1e-11).unwrap();
        for frac in [0.13, 0.5, 0.91] {
            let opts = FloquetOptions { tol: 1e-11, mode_samples: 8, t0: frac * p.period() };
            let s = floquet_spectrum_with(&p, &opts).unwrap();
            for k in 0..2 {
                let d = quasienergy_gap_between(s.quasienergies[k], base.quasienergies[k], p.omega);
                assert!(d < 1e-9 * p.omega, "shift {d}");
            }
        }
    }

    #[test]
    fn resonance_orders() {
        let p = operating_point();
        assert_relative_eq!(to_mhz(resonance_frequency(&p, 2).unwrap()), 6.97, epsilon = 5e-3);
        assert_relative_eq!(resonance_frequency(&p, 1).unwrap(), p.omega0());
        let p3 = DriveParams::from_mhz(9.82, 9.67, 2.37, 4.657).unwrap();
        assert_relative_eq!(to_mhz(resonance_frequency(&p3, 3).unwrap()), 4.59, epsilon = 5e-3);
        assert!(resonance_frequency(&p, 0).is_err());
    }

    #[test]
    fn ladder_and_monodromy_agree() {
        let p = operating_point();
        let g = raman_rabi_frequency(&p, 2, RabiMethod::QuasienergyGap).unwrap();
        let l = raman_rabi_frequency(&p, 2, RabiMethod::Ladder).unwrap();
        assert!(((g - l) / g).abs() < 1e-3, "gap {g} ladder {l}");
        assert_eq!(raman_rabi_frequency(&p.with_amp(0.0), 2, RabiMethod::Ladder).unwrap(), 0.0);
    }

    #[test]
    fn far_from_resonance_rejected() {
        let p = operating_point().with_omega(mhz(5.0));
        assert!(matches!(
            raman_rabi_frequency(&p, 2, RabiMethod::Ladder),
            Err(Error::NotNearResonance { order: 2, .. })
        ));
    }

    #[test]
    fn adiabaticity_linear_in_drive() {
        let p = operating_point();
        let a = adiabaticity_parameter(&p).unwrap();
        let b = eigenbasis(&p).unwrap();
        assert_relative_eq!(a, p.amp_a * p.omega * b.theta.cos() / b.omega0.powi(2), max_relative = 1e-14);
        assert_relative_eq!(adiabaticity_parameter(&p.with_amp(2.0 * p.amp_a)).unwrap(), 2.0 * a, max_relative = 1e-14);
        assert_eq!(adiabaticity_parameter(&p.with_amp(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn modulated_drive_rejected() {
        let p = operating_point().with_phase_modulation(mhz(1.0), mhz(7.0)).unwrap();
        assert!(matches!(floquet_spectrum(&p, 1e-8), Err(Error::PreconditionViolated(_))));
    }
}
