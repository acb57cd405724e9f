//! Band-resolved evolution from the upper static eigenstate and the
//! inter-band transfer contrast built on it.

use crate::dynamics::{DriveParams, Integrator};
use crate::error::{Error, Result};
use crate::floquet::{eigenbasis, min_quasienergy_gap};
use crate::spin::{Mat2, SpinState};
use std::f64::consts::TAU;

use super::filter::period_average;

/// Contrast is measured over this many resonant Raman periods.
pub const CONTRAST_WINDOW_PERIODS: f64 = 3.0;
/// Integrator tolerance for contrast and band evolutions.
pub const CONTRAST_TOL: f64 = 1e-10;
/// Samples per period of the faster of the drive and the static gap.
const SAMPLES_PER_FAST_PERIOD: f64 = 16.0;

/// Noiseless evolution from `|+⟩`, resolved into bands.
#[derive(Clone, Debug, PartialEq)]
pub struct BandEvolution {
    pub times: Vec<f64>,
    pub p0: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Evolves `|+⟩` over `[0, duration]` on a uniform grid.
///
/// For a single-period drive the grid is commensurate with the period and
/// the state at `kT + s` is built as `U(s)·M^k|+⟩` from one integrated
/// period, where `M` is the monodromy matrix. Phase-modulated drives are
/// integrated directly.
pub fn band_evolution(params: &DriveParams, duration: f64, tol: f64) -> Result<BandEvolution> {
    params.validate()?;
    let basis = eigenbasis(params)?;
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter { name: "duration", reason: "must be positive and finite".into() });
    }
    let integ = Integrator::new(tol);
    let fast = params.omega.max(basis.omega0);
    let (times, us): (Vec<f64>, Vec<Mat2>) = if params.is_modulated() {
        let n = ((duration * fast / TAU) * SAMPLES_PER_FAST_PERIOD).ceil().max(2.0) as usize;
        let times: Vec<f64> = (0..=n).map(|k| duration * k as f64 / n as f64).collect();
        let us = integ.sampled(params, 0.0, &times)?;
        (times, us)
    } else {
        let period = params.period();
        let per = ((fast / params.omega) * SAMPLES_PER_FAST_PERIOD).ceil() as usize;
        let one_period: Vec<f64> = (0..=per).map(|k| period * k as f64 / per as f64).collect();
        let u_period = integ.sampled(params, 0.0, &one_period)?;
        let mono = u_period[per];
        let total = (duration / period * per as f64).ceil() as usize;
        let mut times = Vec::with_capacity(total + 1);
        let mut us = Vec::with_capacity(total + 1);
        let mut stroboscopic = Mat2::identity();
        for k in 0..=total {
            let (cycle, phase) = (k / per, k % per);
            if phase == 0 && cycle > 0 {
                stroboscopic = mono * stroboscopic;
            }
            times.push(cycle as f64 * period + one_period[phase]);
            us.push(u_period[phase] * stroboscopic);
        }
        (times, us)
    };
    let states: Vec<SpinState> = us.iter().map(|u| u.apply(&basis.plus)).collect();
    Ok(BandEvolution {
        times,
        p0: states.iter().map(SpinState::p0).collect(),
        lower: states.iter().map(|s| basis.lower_population(s)).collect(),
        upper: states.iter().map(|s| basis.upper_population(s)).collect(),
    })
}

/// Peak-to-trough swing of the drive-period-averaged lower-band
/// population over `[0, window]`, starting in `|+⟩`. Complete transfer
/// gives 1.
pub fn transfer_contrast(params: &DriveParams, window: f64) -> Result<f64> {
    let ev = band_evolution(params, window, CONTRAST_TOL)?;
    let slow = period_average(&ev.times, &ev.lower, params.period())?;
    let hi = slow.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = slow.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((hi - lo).clamp(0.0, 1.0))
}

/// Evaluation window of the order-`m` contrast: a fixed number of periods
/// of the resonant Raman Rabi frequency.
pub fn contrast_window(params: &DriveParams, m: u32) -> Result<f64> {
    let gap = min_quasienergy_gap(params, m, CONTRAST_TOL)?.gap;
    if !(gap > 0.0) {
        return Err(Error::PreconditionViolated("no Raman coupling (A = 0)".into()));
    }
    Ok(CONTRAST_WINDOW_PERIODS * TAU / gap)
}

/// Transfer contrast at `params.omega`, measured over the order-`m`
/// window.
pub fn raman_contrast(params: &DriveParams, m: u32) -> Result<f64> {
    if params.amp_a == 0.0 {
        return Ok(0.0);
    }
    transfer_contrast(params, contrast_window(params, m)?)
}

/// First time a sampled curve reaches `level`, linearly interpolated.
pub fn first_crossing(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    if values.first().is_some_and(|&v| v >= level) {
        return times.first().copied();
    }
    times.windows(2).zip(values.windows(2)).find_map(|(t, v)| {
        (v[0] < level && v[1] >= level).then(|| t[0] + (level - v[0]) / (v[1] - v[0]) * (t[1] - t[0]))
    })
}
