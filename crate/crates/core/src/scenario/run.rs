//! Executes a validated scenario and writes its CSV tables with JSON
//! metadata sidecars.

use crate::dynamics::DriveParams;
use crate::experiment::{
    first_crossing, period_average, scan_contrast_vs_frequency, scan_localization, scan_rabi_vs_amplitude,
    simulate_floquet_raman, simulate_photon_assisted, simulate_rabi, simulate_ramsey, Preparation, ScanResult,
};
use crate::fit::{fit_ramsey, fit_sinusoid};
use crate::floquet::{
    adiabaticity_parameter, eigenbasis, floquet_spectrum, quasienergy_scan, raman_rabi_frequency,
    resonance_frequency, RabiMethod,
};
use crate::ladder::ladder_model;
use crate::units::{to_mhz, to_us};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use super::config::{ExperimentKind, ScenarioConfig};
use super::output::{io_error, Table};
use super::ScenarioError;

/// One written table and its sidecar.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
}

/// What a run produced, plus a short human-readable digest.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub experiment: ExperimentKind,
    pub files: Vec<OutputFile>,
    pub lines: Vec<String>,
}

/// A computed table with experiment-specific results for its sidecar.
struct Product {
    stem: String,
    table: Table,
    results: Value,
}

/// Runs `config` and writes `<prefix>*.csv` plus `<prefix>*.json` into
/// `out_dir`. `config_text` is stored verbatim in every sidecar.
pub fn run_scenario(config: &ScenarioConfig, config_text: &str, out_dir: &Path) -> Result<RunSummary, ScenarioError> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let mut lines = Vec::new();
    let products = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| io_error("thread pool", e))?
            .install(|| compute(config, &mut lines))?,
        None => compute(config, &mut lines)?,
    };
    let wall_clock = started.elapsed().as_secs_f64();

    fs::create_dir_all(out_dir).map_err(|e| io_error(&out_dir.display().to_string(), e))?;
    let mut files = Vec::new();
    for p in products {
        let csv = out_dir.join(format!("{}.csv", p.stem));
        let sidecar = out_dir.join(format!("{}.json", p.stem));
        let file = fs::File::create(&csv).map_err(|e| io_error(&csv.display().to_string(), e))?;
        p.table.write_csv(std::io::BufWriter::new(file))?;
        let meta = json!({
            "file": csv.file_name().map(|s| s.to_string_lossy().into_owned()),
            "experiment": config.experiment.name(),
            "library": "floquet-raman",
            "library_version": crate::VERSION,
            "seed": config.seed,
            "config_text": config_text,
            "resolved": config,
            "units": {
                "resolved": "angular frequencies in rad/s, times in s",
                "csv": "times in us, frequencies in MHz (value of f in (2pi) f MHz)",
            },
            "columns": p.table.headers,
            "results": p.results,
            "started_unix_s": started_unix,
            "wall_clock_s": wall_clock,
        });
        let text = serde_json::to_string_pretty(&meta).map_err(|e| io_error("json", e))?;
        fs::write(&sidecar, text + "\n").map_err(|e| io_error(&sidecar.display().to_string(), e))?;
        files.push(OutputFile { csv, sidecar });
    }
    Ok(RunSummary { experiment: config.experiment, files, lines })
}

fn compute(c: &ScenarioConfig, lines: &mut Vec<String>) -> Result<Vec<Product>, ScenarioError> {
    let stem = |suffix: &str| format!("{}{suffix}", c.prefix);
    let us_col = |ts: &[f64]| ts.iter().map(|&t| to_us(t)).collect::<Vec<_>>();
    let mhz_col = |ws: &[f64]| ws.iter().map(|&w| to_mhz(w)).collect::<Vec<_>>();
    Ok(match c.experiment {
        ExperimentKind::Ramsey => {
            let trace = simulate_ramsey(c.drive.delta_z, c.prep_rabi, &c.times, &c.noise, c.tol)?;
            let fit = fit_ramsey(&trace.times, &trace.values);
            let (fitted, results) = match &fit {
                Ok(f) => {
                    lines.push(format!(
                        "Ramsey fringe {:.5} MHz, Gaussian decay time {:.3} us",
                        to_mhz(f.omega),
                        to_us(f.tau)
                    ));
                    let curve = trace
                        .times
                        .iter()
                        .map(|&t| f.offset + f.amplitude * (-(t / f.tau).powi(2)).exp() * (f.omega * t + f.phase).cos())
                        .collect();
                    (curve, json!({ "fit": f, "fringe_mhz": to_mhz(f.omega), "decay_time_us": to_us(f.tau) }))
                }
                Err(e) => (vec![f64::NAN; trace.len()], json!({ "fit_error": e.to_string() })),
            };
            let table = Table::new().num("t_us", us_col(&trace.times)).num("p0", trace.values).num("p0_fit", fitted);
            vec![Product { stem: stem(""), table, results }]
        }
        ExperimentKind::Rabi => {
            let drives: Vec<(Option<f64>, f64)> = if c.calibrated_delta_z.is_empty() {
                vec![(None, c.drive.delta_z)]
            } else {
                c.calibrated_delta_z.iter().map(|d| (Some(d.drive_mhz), d.delta_z)).collect()
            };
            let many = drives.len() > 1;
            let mut out = Vec::new();
            for (k, (drive_mhz, dz)) in drives.into_iter().enumerate() {
                let trace = simulate_rabi(dz, c.drive.delta_x, &c.times, &c.noise, c.tol)?;
                let expected = dz.hypot(c.drive.delta_x);
                let (fitted, results) = match fit_sinusoid(&trace.times, &trace.values, Some(expected)) {
                    Ok(f) => {
                        lines.push(format!(
                            "Rabi{}: fitted {:.5} MHz, expected {:.5} MHz",
                            drive_mhz.map(|d| format!(" at {d} MHz")).unwrap_or_default(),
                            to_mhz(f.omega),
                            to_mhz(expected)
                        ));
                        (
                            trace.times.iter().map(|&t| f.eval(t)).collect(),
                            json!({
                                "drive_mhz": drive_mhz,
                                "delta_z_mhz": to_mhz(dz),
                                "expected_mhz": to_mhz(expected),
                                "fitted_mhz": to_mhz(f.omega),
                                "relative_error": f.omega / expected - 1.0,
                                "fit": f,
                            }),
                        )
                    }
                    Err(e) => (vec![f64::NAN; trace.len()], json!({ "fit_error": e.to_string() })),
                };
                let table =
                    Table::new().num("t_us", us_col(&trace.times)).num("p0", trace.values).num("p0_fit", fitted);
                let s = if many { stem(&format!("_{k}")) } else { stem("") };
                out.push(Product { stem: s, table, results });
            }
            out
        }
        ExperimentKind::Raman | ExperimentKind::Raman3 => {
            let basis = eigenbasis(&c.drive)?;
            let prep = Preparation { theta: c.prep_theta.unwrap_or(basis.theta), rabi_amp: c.prep_rabi };
            let trace = simulate_floquet_raman(&c.drive, &prep, &c.times, &c.noise, c.tol)?;
            let filtered = period_average(&trace.times, &trace.values, c.drive.period()).map_err(|_| {
                super::ConfigError::Validation {
                    key: "time.stop_us".into(),
                    line: None,
                    reason: "the time grid must span at least one drive period".into(),
                }
            })?;
            let omega_f = if c.drive.is_modulated() {
                None
            } else {
                raman_rabi_frequency(&c.drive, c.order, RabiMethod::QuasienergyGap).ok()
            };
            let adiabaticity = adiabaticity_parameter(&c.drive)?;
            lines.push(format!(
                "order {} resonance omega0/m = {:.4} MHz, Raman frequency {} , adiabaticity {:.3}",
                c.order,
                to_mhz(resonance_frequency(&c.drive, c.order)?),
                omega_f.map(|w| format!("{:.4} MHz", to_mhz(w))).unwrap_or_else(|| "n/a".into()),
                adiabaticity
            ));
            let results = json!({
                "order": c.order,
                "theta_rad": basis.theta,
                "omega0_mhz": to_mhz(basis.omega0),
                "resonance_mhz": to_mhz(resonance_frequency(&c.drive, c.order)?),
                "raman_rabi_mhz": omega_f.map(to_mhz),
                "adiabaticity": adiabaticity,
                "prep_theta_rad": prep.theta,
            });
            let table = Table::new()
                .num("t_us", us_col(&trace.times))
                .num("p0", trace.values)
                .num("p0_filtered", filtered)
                .num("p_lower", trace.band_minus.unwrap_or_default());
            vec![Product { stem: stem(""), table, results }]
        }
        ExperimentKind::Spectrum => {
            let omegas = if c.scan.is_empty() { vec![c.drive.omega] } else { c.scan.clone() };
            let eps = quasienergy_scan(&c.drive, &omegas, c.tol)?;
            let gaps: Vec<f64> = omegas
                .iter()
                .zip(&eps)
                .map(|(&w, e)| crate::floquet::quasienergy_gap_between(e[0], e[1], w))
                .collect();
            let single = floquet_spectrum(&c.drive, c.tol)?;
            lines.push(format!("{} quasienergy points", omegas.len()));
            let results = json!({
                "omega0_mhz": to_mhz(c.drive.omega0()),
                "drive_point": {
                    "quasienergies_mhz": single.quasienergies.map(to_mhz),
                    "zone_edge": single.zone_edge,
                    "degenerate": single.degenerate,
                },
            });
            let table = Table::new()
                .num("omega_mhz", mhz_col(&omegas))
                .num("quasienergy_a_mhz", eps.iter().map(|e| to_mhz(e[0])))
                .num("quasienergy_b_mhz", eps.iter().map(|e| to_mhz(e[1])))
                .num("gap_mhz", mhz_col(&gaps));
            vec![Product { stem: stem(""), table, results }]
        }
        ExperimentKind::Ladder => {
            let (lo, hi) = c.ladder_range;
            let model = ladder_model(&c.drive, lo, hi)?;
            let split = model.resonant_splitting(c.order).ok();
            lines.push(format!(
                "ladder n in [{lo}, {hi}]: intra {:.4} MHz, inter {:.4} MHz",
                to_mhz(model.intra_coupling),
                to_mhz(model.inter_coupling)
            ));
            let results = json!({
                "intra_coupling_mhz": to_mhz(model.intra_coupling),
                "inter_coupling_mhz": to_mhz(model.inter_coupling),
                "order": c.order,
                "resonant_pair_splitting_mhz": split.map(|s| to_mhz(s.splitting)),
                "resonant_pair_bare_mhz": split.map(|s| s.bare.map(to_mhz)),
            });
            let levels = Table::new()
                .text("band", model.levels.iter().map(|l| l.band.symbol().to_string()))
                .int("n", model.levels.iter().map(|l| l.n as i64))
                .num("energy_mhz", model.levels.iter().map(|l| to_mhz(l.energy)));
            let ev = model.eigenvalues();
            let spectrum =
                Table::new().int("index", (0..ev.len() as i64).collect::<Vec<_>>()).num("eigenvalue_mhz", mhz_col(&ev));
            vec![
                Product { stem: stem(""), table: levels, results: results.clone() },
                Product { stem: stem("_spectrum"), table: spectrum, results },
            ]
        }
        ExperimentKind::ScanAmp => {
            let scan = scan_rabi_vs_amplitude(&c.drive, &c.scan, c.order)?;
            lines.push(format!("{} amplitudes scanned", scan.values.len()));
            let col = |name: &str| scan.column(name).map(<[f64]>::to_vec).unwrap_or_default();
            let table = Table::new()
                .num("amp_mhz", mhz_col(&scan.values))
                .num("omega_f_mhz", mhz_col(&scan.observed))
                .num("omega_res_mhz", mhz_col(&col("omega_resonance")))
                .num("omega_f_ladder_mhz", mhz_col(&col("omega_f_ladder")))
                .num("omega_f_gap_mhz", mhz_col(&col("omega_f_quasienergy_gap")))
                .num("fit_r_squared", col("fit_r_squared"));
            vec![Product { stem: stem(""), table, results: json!({ "order": c.order }) }]
        }
        ExperimentKind::ScanFreq => {
            let scan: ScanResult = scan_contrast_vs_frequency(&c.drive, &c.scan, c.order)?;
            let fit = scan.lorentzian;
            let results = match fit {
                Some(f) => {
                    lines.push(format!(
                        "Lorentzian centre {:.4} MHz (omega0/m = {:.4} MHz), HWHM {:.4} MHz, R^2 {:.4}",
                        to_mhz(f.centre),
                        to_mhz(resonance_frequency(&c.drive, c.order)?),
                        to_mhz(f.gamma),
                        f.r_squared
                    ));
                    json!({
                        "centre_mhz": to_mhz(f.centre),
                        "gamma_mhz": to_mhz(f.gamma),
                        "height": f.height,
                        "baseline": f.baseline,
                        "r_squared": f.r_squared,
                        "resonance_mhz": to_mhz(resonance_frequency(&c.drive, c.order)?),
                    })
                }
                None => json!({ "fit_error": "Lorentzian fit did not converge" }),
            };
            let curve: Vec<f64> = scan.values.iter().map(|&w| fit.map_or(f64::NAN, |f| f.eval(w))).collect();
            let table = Table::new()
                .num("omega_mhz", mhz_col(&scan.values))
                .num("contrast", scan.observed.clone())
                .num("lorentzian", curve);
            vec![Product { stem: stem(""), table, results }]
        }
        ExperimentKind::PhotonAssisted => {
            let modulated = simulate_photon_assisted(&c.drive, &c.times, c.tol)?;
            let plain = DriveParams { phase_mod_a: 0.0, ..c.drive };
            let reference = simulate_photon_assisted(&plain, &c.times, c.tol)?;
            let lower_mod = modulated.band_minus.unwrap_or_default();
            let lower_ref = reference.band_minus.unwrap_or_default();
            let t_mod = first_crossing(&c.times, &lower_mod, 0.5);
            let t_ref = first_crossing(&c.times, &lower_ref, 0.5);
            lines.push(format!(
                "lower band reaches 0.5 at {} (modulated) vs {} (unmodulated)",
                t_mod.map(|t| format!("{:.4} us", to_us(t))).unwrap_or_else(|| "never".into()),
                t_ref.map(|t| format!("{:.4} us", to_us(t))).unwrap_or_else(|| "never".into()),
            ));
            let results = json!({
                "a_over_nu": if c.drive.is_modulated() { c.drive.phase_mod_a / c.drive.phase_mod_nu } else { 0.0 },
                "half_transfer_us_modulated": t_mod.map(to_us),
                "half_transfer_us_unmodulated": t_ref.map(to_us),
            });
            let table = Table::new()
                .num("t_us", us_col(&c.times))
                .num("p_upper", modulated.values)
                .num("p_lower", lower_mod)
                .num("p_upper_unmodulated", reference.values)
                .num("p_lower_unmodulated", lower_ref);
            vec![Product { stem: stem(""), table, results }]
        }
        ExperimentKind::Localization => {
            let scan = scan_localization(&c.drive, &c.scan, &c.scan_times, c.tol)?;
            lines.push(format!("{} modulation depths at {} times", scan.values.len(), c.scan_times.len()));
            let mut table = Table::new().num("a_over_nu", scan.values.clone());
            for (k, t) in c.scan_times.iter().enumerate() {
                let col = scan.column(&format!("p_lower_t{k}")).map(<[f64]>::to_vec).unwrap_or_default();
                table = table.num(&format!("p_lower_{:.2}us", to_us(*t)), col);
            }
            let results = json!({ "times_us": us_col(&c.scan_times) });
            vec![Product { stem: stem(""), table, results }]
        }
    })
}
