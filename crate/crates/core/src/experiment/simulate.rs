//! Simulated experiments: Ramsey and Rabi calibration, Floquet Raman
//! transfer at second and third order, and phase-modulated driving.

use crate::dynamics::{DriveParams, Integrator};
use crate::error::{Error, Result};
use crate::floquet::eigenbasis;
use crate::spin::SpinState;
use crate::units::mhz;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use super::sequence::{ensemble, run_sequence, run_sequence_projected, NoiseModel, PulseSequence, Segment};
use super::trace::{TimeTrace, TraceMeta};

/// Rabi amplitude of the hard preparation and readout pulses.
pub const DEFAULT_PULSE_RABI_MHZ: f64 = 20.0;

/// Y rotation applied to `|0⟩` before the Floquet drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preparation {
    /// Rotation angle; the mixing angle θ prepares `|+⟩`.
    pub theta: f64,
    pub rabi_amp: f64,
}

impl Preparation {
    /// Rotation that maps `|0⟩` onto the upper eigenstate `|+⟩`.
    pub fn upper_band(params: &DriveParams) -> Result<Self> {
        Ok(Preparation { theta: eigenbasis(params)?.theta, rabi_amp: mhz(DEFAULT_PULSE_RABI_MHZ) })
    }

    fn segment(&self) -> Result<Segment> {
        if !(self.rabi_amp > 0.0) || !self.theta.is_finite() || self.theta < 0.0 {
            return Err(Error::InvalidParameter {
                name: "prep",
                reason: "rotation angle must be ≥ 0 and Rabi amplitude > 0".into(),
            });
        }
        Ok(Segment::y_rotation(self.theta, self.rabi_amp))
    }
}

/// Ramsey fringes `Y_{π/2} – free(t) – Y_{π/2}` against the free
/// evolution time. The detuning offsets of the noise model are shared by
/// all delays of one realization.
pub fn simulate_ramsey(
    detuning: f64,
    rabi_amp: f64,
    free_times: &[f64],
    noise: &NoiseModel,
    tol: f64,
) -> Result<TimeTrace> {
    if free_times.windows(2).any(|w| !(w[1] > w[0])) || free_times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::PreconditionViolated("free evolution times must be ≥ 0 and increasing".into()));
    }
    let half_pi = Segment::y_rotation(FRAC_PI_2, rabi_amp);
    let sequences: Vec<PulseSequence> = free_times
        .iter()
        .map(|&t| PulseSequence::new(vec![half_pi, Segment::FreeEvolution { detuning, duration: t }, half_pi]))
        .collect::<Result<_>>()?;
    let (values, _) = ensemble(noise, |delta| {
        let p0 = sequences
            .iter()
            .map(|s| s.states(&[s.total_duration()], delta, tol).map(|v| v[0].p0()))
            .collect::<Result<_>>()?;
        Ok((p0, None))
    })?;
    Ok(TimeTrace {
        times: free_times.to_vec(),
        values,
        band_minus: None,
        meta: TraceMeta {
            description: format!("Ramsey: {}", sequences.last().map(|s| s.describe()).unwrap_or_default()),
            params: None,
            noise: *noise,
        },
    })
}

/// Rabi oscillation of `|0⟩` under the static field `(Δz σz + Δx σx)/2`.
pub fn simulate_rabi(delta_z: f64, delta_x: f64, times: &[f64], noise: &NoiseModel, tol: f64) -> Result<TimeTrace> {
    let omega0 = delta_z.hypot(delta_x);
    // A = 0: the drive frequency only has to be a valid positive number
    let params = DriveParams::new(delta_z, delta_x, 0.0, omega0.max(1.0))?;
    let duration = times.last().copied().unwrap_or(0.0);
    let seq = PulseSequence::new(vec![Segment::floquet(params, duration)])?;
    let mut trace = run_sequence(&seq, noise, times, tol)?;
    trace.meta.description = format!("Rabi: {}", trace.meta.description);
    Ok(trace)
}

/// `Y_θ` preparation followed by the Floquet drive. Trace times are
/// measured from the start of the drive; `band_minus` carries the
/// lower-band population.
pub fn simulate_floquet_raman(
    params: &DriveParams,
    prep: &Preparation,
    times: &[f64],
    noise: &NoiseModel,
    tol: f64,
) -> Result<TimeTrace> {
    let basis = eigenbasis(params)?;
    let pulse = prep.segment()?;
    let offset = pulse.duration();
    let duration = times.last().copied().unwrap_or(0.0);
    let seq = PulseSequence::new(vec![pulse, Segment::floquet(*params, duration)])?;
    let global: Vec<f64> = times.iter().map(|t| offset + t).collect();
    let mut trace = run_sequence_projected(&seq, noise, &global, tol, Some(basis.minus))?;
    trace.times = times.to_vec();
    trace.meta.description = format!("Floquet Raman: {}", trace.meta.description);
    Ok(trace)
}

/// Third-order transfer, prepared in `|+⟩`.
pub fn simulate_third_order(params: &DriveParams, times: &[f64], noise: &NoiseModel, tol: f64) -> Result<TimeTrace> {
    let mut trace = simulate_floquet_raman(params, &Preparation::upper_band(params)?, times, noise, tol)?;
    trace.meta.description = trace.meta.description.replacen("Floquet Raman", "Third-order Floquet Raman", 1);
    Ok(trace)
}

/// Upper-band probability of a system started in `|+⟩`, for a possibly
/// phase-modulated drive. `band_minus` carries the lower-band population.
pub fn simulate_photon_assisted(params: &DriveParams, times: &[f64], tol: f64) -> Result<TimeTrace> {
    params.validate()?;
    let basis = eigenbasis(params)?;
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::PreconditionViolated("times must be ≥ 0 and strictly increasing".into()));
    }
    let us = Integrator::new(tol).sampled(params, 0.0, times)?;
    let states: Vec<SpinState> = us.iter().map(|u| u.apply(&basis.plus)).collect();
    Ok(TimeTrace {
        times: times.to_vec(),
        values: states.iter().map(|s| basis.upper_population(s).clamp(0.0, 1.0)).collect(),
        band_minus: Some(states.iter().map(|s| basis.lower_population(s).clamp(0.0, 1.0)).collect()),
        meta: TraceMeta {
            description: format!(
                "photon-assisted: a/nu = {}",
                if params.is_modulated() { params.phase_mod_a / params.phase_mod_nu } else { 0.0 }
            ),
            params: Some(*params),
            noise: NoiseModel::noiseless(),
        },
    })
}

/// Uniform grid of `n` points over `[t0, t1]`.
pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::fit_sinusoid;

    #[test]
    fn prep_reaches_upper_state() {
        let p = DriveParams::from_mhz(10.03, 9.67, 0.0, 6.985).unwrap();
        let basis = eigenbasis(&p).unwrap();
        let t = linspace(0.0, 1e-6, 11);
        let tr = simulate_floquet_raman(&p, &Preparation::upper_band(&p).unwrap(), &t, &NoiseModel::noiseless(), 1e-10)
            .unwrap();
        let expected = (0.5 * basis.theta).cos().powi(2);
        for v in &tr.values {
            assert!((v - expected).abs() < 1e-9);
        }
        assert!(tr.band_minus.unwrap().iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn detuned_rabi_frequency() {
        let t = linspace(0.0, 2e-6, 401);
        let tr = simulate_rabi(mhz(2.0), mhz(4.06), &t, &NoiseModel::noiseless(), 1e-10).unwrap();
        let f = fit_sinusoid(&t, &tr.values, None).unwrap();
        let w0 = mhz(2.0f64.hypot(4.06));
        assert!((f.omega / w0 - 1.0).abs() < 1e-6);
        // swing = Δx²/ω₀²
        assert!((2.0 * f.amplitude - 4.06f64.powi(2) / (4.0 + 4.06f64.powi(2))).abs() < 1e-6);
        let flat = simulate_rabi(mhz(2.0), 0.0, &t, &NoiseModel::noiseless(), 1e-10).unwrap();
        assert!(flat.values.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn ramsey_fringe_frequency() {
        let t = linspace(0.0, 3e-6, 301);
        let tr = simulate_ramsey(mhz(2.5), mhz(20.0), &t, &NoiseModel::noiseless(), 1e-10).unwrap();
        let f = fit_sinusoid(&t, &tr.values, None).unwrap();
        assert!((f.omega / mhz(2.5) - 1.0).abs() < 1e-3);
    }
}
