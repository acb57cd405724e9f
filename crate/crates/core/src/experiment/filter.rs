//! Separation of the slow inter-band component from the fast micromotion.

use crate::dynamics::DriveParams;
use crate::error::{Error, Result};
use crate::floquet::{eigenbasis, quasienergy_gap};

use super::trace::TimeTrace;

/// Moving boxcar average of width `window` over a sampled curve, treating
/// the samples as piecewise linear. Windows that would run past the record
/// are shifted inward so every output uses a full window.
pub fn period_average(times: &[f64], values: &[f64], window: f64) -> Result<Vec<f64>> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::PreconditionViolated("need at least two matching samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::PreconditionViolated("times must be strictly increasing".into()));
    }
    let (t0, t1) = (times[0], times[times.len() - 1]);
    if !(window > 0.0) || window > t1 - t0 {
        return Err(Error::PreconditionViolated(format!(
            "averaging window {window:e} s does not fit in a record of {:e} s",
            t1 - t0
        )));
    }
    let mut prefix = Vec::with_capacity(times.len());
    prefix.push(0.0);
    for k in 1..times.len() {
        let area = 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
        prefix.push(prefix[k - 1] + area);
    }
    let integral_to = |t: f64| -> f64 {
        let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
        let (ta, tb) = (times[k - 1], times[k]);
        let s = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        let v = values[k - 1] + s * (values[k] - values[k - 1]);
        prefix[k - 1] + 0.5 * (values[k - 1] + v) * (t - ta)
    };
    Ok(times
        .iter()
        .map(|&t| {
            let lo = (t - 0.5 * window).clamp(t0, t1 - window);
            (integral_to(lo + window) - integral_to(lo)) / window
        })
        .collect())
}

/// Slow population of the lower band `|−⟩`.
///
/// With a band projection recorded in the trace it is returned directly.
/// Otherwise `P|0⟩` is averaged over one drive period and inverted through
/// `⟨P|0⟩⟩ = cos²(θ/2) − cos θ · P₋`, which holds once the cross terms
/// oscillating near ω₀ are removed.
pub fn extract_interband_population(trace: &TimeTrace, params: &DriveParams) -> Result<TimeTrace> {
    let basis = eigenbasis(params)?;
    if !params.is_modulated() && params.amp_a > 0.0 {
        let slow = quasienergy_gap(params, 1e-10)?;
        if slow > 0.25 * basis.omega0 {
            return Err(Error::FilterBandsOverlap { raman: slow, gap: basis.omega0 });
        }
    }
    let values = match &trace.band_minus {
        Some(lower) => lower.clone(),
        None => {
            let c = basis.theta.cos();
            if c.abs() < 1e-3 {
                return Err(Error::PreconditionViolated(
                    "P|0⟩ carries no band information when cos θ ≈ 0".into(),
                ));
            }
            let slow = period_average(&trace.times, &trace.values, params.period())?;
            let upper_p0 = (0.5 * basis.theta).cos().powi(2);
            slow.iter().map(|p| ((upper_p0 - p) / c).clamp(0.0, 1.0)).collect()
        }
    };
    let mut meta = trace.meta.clone();
    meta.description = format!("{} (lower-band population)", meta.description);
    Ok(TimeTrace { times: trace.times.clone(), values, band_minus: None, meta })
}
