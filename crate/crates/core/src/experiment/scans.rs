//! Parameter scans: Raman Rabi frequency against drive amplitude, contrast
//! against drive frequency, and lower-band population against the
//! phase-modulation depth.

use crate::dynamics::{DriveParams, Integrator};
use crate::error::Result;
use crate::fit::fit_lorentzian;
use crate::floquet::{
    eigenbasis, min_quasienergy_gap, raman_rabi_frequency, resonance_frequency, time_fit_rabi, RabiMethod,
};
use rayon::prelude::*;

use super::band::{contrast_window, transfer_contrast};
use super::trace::ScanResult;
use crate::units::to_mhz;

/// Ω_F against the drive amplitude. For each `A` the resonance is relocated
/// and Ω_F is fitted from a simulated trace; the ladder and quasienergy-gap
/// values are recorded alongside. Frequencies are in rad/s.
pub fn scan_rabi_vs_amplitude(base: &DriveParams, amps: &[f64], m: u32) -> Result<ScanResult> {
    let centre = resonance_frequency(base, m)?;
    let rows: Vec<[f64; 5]> = amps
        .par_iter()
        .map(|&a| {
            let p = base.with_amp(a);
            p.validate()?;
            if a == 0.0 {
                return Ok([0.0, centre, 0.0, 0.0, f64::NAN]);
            }
            let fitted = time_fit_rabi(&p, m)?;
            let ladder = raman_rabi_frequency(&p, m, RabiMethod::Ladder)?;
            let gap = raman_rabi_frequency(&p, m, RabiMethod::QuasienergyGap)?;
            Ok([fitted.omega_f, fitted.omega, ladder, gap, fitted.fit.r_squared])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    Ok(ScanResult::new("amp_a", amps.to_vec(), "omega_f_time_fit", col(0))
        .with_column("omega_resonance", col(1))
        .with_column("omega_f_ladder", col(2))
        .with_column("omega_f_quasienergy_gap", col(3))
        .with_column("fit_r_squared", col(4)))
}

/// Transfer contrast against drive frequency over a fixed window of
/// [`super::CONTRAST_WINDOW_PERIODS`] resonant Raman periods, with a
/// Lorentzian fit of the resulting line.
pub fn scan_contrast_vs_frequency(base: &DriveParams, omegas: &[f64], m: u32) -> Result<ScanResult> {
    let window = contrast_window(base, m)?;
    let contrast: Vec<f64> =
        omegas.par_iter().map(|&w| transfer_contrast(&base.with_omega(w), window)).collect::<Result<_>>()?;
    let mut scan = ScanResult::new("omega", omegas.to_vec(), "contrast", contrast);
    match fit_lorentzian(omegas, &scan.observed) {
        Ok(fit) => scan.lorentzian = Some(fit),
        Err(e) => log::warn!("Lorentzian fit of the contrast scan failed: {e}"),
    }
    let gap = min_quasienergy_gap(base, m, super::band::CONTRAST_TOL)?;
    log::info!(
        "contrast window {:.3} us, resonant Raman frequency {:.4} MHz",
        window * 1e6,
        to_mhz(gap.gap)
    );
    Ok(scan)
}

/// Lower-band population of a system started in `|+⟩` at fixed times,
/// against the phase-modulation depth `a/ν`. The observable is the value
/// at the first time; each time also has its own column `p_lower_t<k>`.
pub fn scan_localization(base: &DriveParams, ratios: &[f64], times: &[f64], tol: f64) -> Result<ScanResult> {
    let basis = eigenbasis(base)?;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rows: Vec<Vec<f64>> = ratios
        .par_iter()
        .map(|&r| {
            let p = base.with_phase_modulation(r * base.phase_mod_nu, base.phase_mod_nu)?;
            let us = Integrator::new(tol).sampled(&p, 0.0, &sorted)?;
            let at = |t: f64| {
                let k = sorted.partition_point(|&x| x < t);
                basis.lower_population(&us[k].apply(&basis.plus))
            };
            Ok(times.iter().map(|&t| at(t)).collect())
        })
        .collect::<Result<_>>()?;
    let mut scan = ScanResult::new("a_over_nu", ratios.to_vec(), "p_lower", rows.iter().map(|r| r[0]).collect());
    for k in 0..times.len() {
        scan = scan.with_column(&format!("p_lower_t{k}"), rows.iter().map(|r| r[k]).collect());
    }
    Ok(scan)
}
