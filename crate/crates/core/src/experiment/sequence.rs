//! Pulse sequences, the quasi-static dephasing model and ensemble averaging.

use crate::dynamics::{Delayed, DriveParams, Integrator, StaticField};
use crate::error::{Error, Result};
use crate::spin::SpinState;
use crate::units::mhz;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::{TimeTrace, TraceMeta};

/// Rotation axis of a resonant pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// One step of a pulse sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    /// Hard pulse `H = Ω σ_axis`; a duration `τ` rotates the Bloch vector
    /// by `θ = 2Ωτ`.
    ResonantPulse { rabi_amp: f64, duration: f64, axis: Axis },
    /// Rotating-frame drive. The drive clock reads `clock_start` when the
    /// segment begins, so a drive split in two keeps its phase.
    FloquetDrive { params: DriveParams, duration: f64, clock_start: f64 },
    /// Precession `H = (detuning/2) σz`.
    FreeEvolution { detuning: f64, duration: f64 },
}

impl Segment {
    /// Rotation by `theta` about ŷ at Rabi amplitude `rabi_amp`, lasting
    /// `θ/(2Ω)`.
    pub fn y_rotation(theta: f64, rabi_amp: f64) -> Segment {
        Segment::ResonantPulse { rabi_amp, duration: theta / (2.0 * rabi_amp), axis: Axis::Y }
    }

    pub fn floquet(params: DriveParams, duration: f64) -> Segment {
        Segment::FloquetDrive { params, duration, clock_start: 0.0 }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Segment::ResonantPulse { duration, .. }
            | Segment::FloquetDrive { duration, .. }
            | Segment::FreeEvolution { duration, .. } => duration,
        }
    }

    fn describe(&self) -> String {
        match self {
            Segment::ResonantPulse { rabi_amp, duration, axis } => {
                format!("{axis:?}({:.4} rad)", 2.0 * rabi_amp * duration)
            }
            Segment::FloquetDrive { duration, .. } => format!("Floquet({:.4} us)", duration * 1e6),
            Segment::FreeEvolution { duration, .. } => format!("Free({:.4} us)", duration * 1e6),
        }
    }

    /// Propagates `state` from `t_start` (segment start) and returns the
    /// states at `times` followed by the state at the segment end.
    fn evolve(
        &self,
        state: &SpinState,
        t_start: f64,
        times: &[f64],
        detuning_offset: f64,
        integ: &Integrator,
    ) -> Result<Vec<SpinState>> {
        let t_end = t_start + self.duration();
        let mut all: Vec<f64> = times.to_vec();
        all.push(t_end);
        let us = match *self {
            Segment::ResonantPulse { rabi_amp, axis, .. } => {
                let b = match axis {
                    Axis::X => [rabi_amp, 0.0, 0.5 * detuning_offset],
                    Axis::Y => [0.0, rabi_amp, 0.5 * detuning_offset],
                };
                integ.sampled(&StaticField(b), t_start, &all)?
            }
            Segment::FreeEvolution { detuning, .. } => {
                integ.sampled(&StaticField([0.0, 0.0, 0.5 * (detuning + detuning_offset)]), t_start, &all)?
            }
            Segment::FloquetDrive { params, clock_start, .. } => {
                let shifted = params.with_delta_z(params.delta_z + detuning_offset);
                let field = Delayed { inner: &shifted, offset: clock_start - t_start };
                integ.sampled(&field, t_start, &all)?
            }
        };
        Ok(us.iter().map(|u| u.apply(state)).collect())
    }
}

/// Ordered list of segments applied to the optically polarized `|0⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    segments: Vec<Segment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter { name: "segments", reason: "sequence is empty".into() });
        }
        for s in &segments {
            let d = s.duration();
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "duration",
                    reason: format!("segment durations must be finite and non-negative, got {d:e}"),
                });
            }
            match *s {
                Segment::ResonantPulse { rabi_amp, .. } if !rabi_amp.is_finite() => {
                    return Err(Error::InvalidParameter { name: "rabi_amp", reason: "must be finite".into() })
                }
                Segment::FreeEvolution { detuning, .. } if !detuning.is_finite() => {
                    return Err(Error::InvalidParameter { name: "detuning", reason: "must be finite".into() })
                }
                Segment::FloquetDrive { params, clock_start, .. } => {
                    params.validate()?;
                    if !clock_start.is_finite() {
                        return Err(Error::InvalidParameter { name: "clock_start", reason: "must be finite".into() });
                    }
                }
                _ => {}
            }
        }
        Ok(PulseSequence { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn describe(&self) -> String {
        self.segments.iter().map(Segment::describe).collect::<Vec<_>>().join(" - ")
    }

    fn drive_params(&self) -> Option<DriveParams> {
        self.segments.iter().find_map(|s| match s {
            Segment::FloquetDrive { params, .. } => Some(*params),
            _ => None,
        })
    }

    /// Noiseless states at `times` (seconds from the sequence start) with
    /// a static detuning offset added to every segment.
    pub fn states(&self, times: &[f64], detuning_offset: f64, tol: f64) -> Result<Vec<SpinState>> {
        check_times(times, self.total_duration())?;
        let integ = Integrator::new(tol);
        let mut out = Vec::with_capacity(times.len());
        let mut state = SpinState::ground();
        let mut t_start = 0.0;
        let mut next = 0;
        let n_seg = self.segments.len();
        for (k, seg) in self.segments.iter().enumerate() {
            let t_end = t_start + seg.duration();
            let stop = if k + 1 == n_seg {
                times.len()
            } else {
                next + times[next..].partition_point(|&t| t <= t_end)
            };
            let local: Vec<f64> = times[next..stop].iter().map(|&t| t.clamp(t_start, t_end)).collect();
            let mut evolved = seg.evolve(&state, t_start, &local, detuning_offset, &integ)?;
            state = evolved.pop().expect("segment end is always sampled");
            out.extend(evolved);
            next = stop;
            t_start = t_end;
        }
        Ok(out)
    }
}

fn check_times(times: &[f64], total: f64) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::PreconditionViolated("sample times must be strictly increasing".into()));
    }
    if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
        let slack = 1e-12 * total.max(f64::MIN_POSITIVE);
        if first < 0.0 || last > total + slack {
            return Err(Error::PreconditionViolated(format!(
                "sample times [{first:e}, {last:e}] s fall outside the sequence [0, {total:e}] s"
            )));
        }
    }
    Ok(())
}

/// Standard deviation of the quasi-static detuning that reproduces the
/// observed ~40 kHz line broadening.
pub const DEFAULT_SIGMA_DETUNING_MHZ: f64 = 0.04;
pub const DEFAULT_REALIZATIONS: usize = 200;

/// Quasi-static Gaussian dephasing plus optional finite-shot readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Standard deviation of the detuning offset added to Δz, rad/s.
    pub sigma_detuning: f64,
    pub n_realizations: usize,
    /// Binomial shots per point; `None` returns the exact expectation.
    pub readout_shots: Option<u64>,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            sigma_detuning: mhz(DEFAULT_SIGMA_DETUNING_MHZ),
            n_realizations: DEFAULT_REALIZATIONS,
            readout_shots: None,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { sigma_detuning: 0.0, n_realizations: 1, readout_shots: None, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_detuning >= 0.0) || !self.sigma_detuning.is_finite() {
            return Err(Error::InvalidParameter { name: "sigma_detuning", reason: "must be finite and ≥ 0".into() });
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter { name: "n_realizations", reason: "must be at least 1".into() });
        }
        if self.readout_shots == Some(0) {
            return Err(Error::InvalidParameter { name: "readout_shots", reason: "must be at least 1".into() });
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_detuning == 0.0 && self.readout_shots.is_none()
    }
}

/// Per-realization observables: `P|0⟩` and optionally a projection.
pub(crate) type Observed = (Vec<f64>, Option<Vec<f64>>);

/// Averages `simulate(δ)` over detuning draws and applies readout noise.
/// Draws are taken up front from one seeded stream and the reduction runs
/// in draw order, so the result does not depend on the thread count.
pub(crate) fn ensemble<F>(noise: &NoiseModel, simulate: F) -> Result<Observed>
where
    F: Fn(f64) -> Result<Observed> + Sync,
{
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let offsets: Vec<f64> = if noise.sigma_detuning == 0.0 {
        vec![0.0]
    } else {
        let normal = Normal::new(0.0, noise.sigma_detuning)
            .map_err(|e| Error::InvalidParameter { name: "sigma_detuning", reason: e.to_string() })?;
        (0..noise.n_realizations).map(|_| normal.sample(&mut rng)).collect()
    };
    let runs: Vec<Observed> = offsets.par_iter().map(|&d| simulate(d)).collect::<Result<_>>()?;
    let n = runs.len() as f64;
    let mut iter = runs.into_iter();
    let (mut p0, mut proj) = iter.next().expect("at least one realization");
    for (p, q) in iter {
        p0.iter_mut().zip(&p).for_each(|(a, b)| *a += b);
        if let (Some(acc), Some(q)) = (proj.as_mut(), q) {
            acc.iter_mut().zip(&q).for_each(|(a, b)| *a += b);
        }
    }
    let clamp = |v: &mut f64| *v = (*v / n).clamp(0.0, 1.0);
    p0.iter_mut().for_each(clamp);
    if let Some(p) = proj.as_mut() {
        p.iter_mut().for_each(clamp);
    }
    if let Some(shots) = noise.readout_shots {
        for v in p0.iter_mut() {
            let b = Binomial::new(shots, *v)
                .map_err(|e| Error::InvalidParameter { name: "readout_shots", reason: e.to_string() })?;
            *v = b.sample(&mut rng) as f64 / shots as f64;
        }
    }
    Ok((p0, proj))
}

/// Runs `seq` from `|0⟩` and returns the ensemble-averaged `P|0⟩`.
pub fn run_sequence(seq: &PulseSequence, noise: &NoiseModel, times: &[f64], tol: f64) -> Result<TimeTrace> {
    run_sequence_projected(seq, noise, times, tol, None)
}

/// As [`run_sequence`], additionally averaging `|⟨projector|ψ⟩|²` into
/// `band_minus`.
pub fn run_sequence_projected(
    seq: &PulseSequence,
    noise: &NoiseModel,
    times: &[f64],
    tol: f64,
    projector: Option<SpinState>,
) -> Result<TimeTrace> {
    check_times(times, seq.total_duration())?;
    let (values, band_minus) = ensemble(noise, |delta| {
        let states = seq.states(times, delta, tol)?;
        let p0 = states.iter().map(SpinState::p0).collect();
        let proj = projector.map(|pr| states.iter().map(|s| pr.overlap(s)).collect());
        Ok((p0, proj))
    })?;
    Ok(TimeTrace {
        times: times.to_vec(),
        values,
        band_minus,
        meta: TraceMeta { description: seq.describe(), params: seq.drive_params(), noise: *noise },
    })
}
