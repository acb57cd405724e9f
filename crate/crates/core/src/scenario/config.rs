//! Scenario files: TOML with MHz / µs / kHz user units, validated in full
//! before any computation.

use crate::dynamics::DriveParams;
use crate::experiment::{NoiseModel, DEFAULT_PULSE_RABI_MHZ, DEFAULT_REALIZATIONS, DEFAULT_SIGMA_DETUNING_MHZ};
use crate::units::{mhz, us, ELECTRON_GYRO_MHZ_PER_GAUSS, NV_ZERO_FIELD_MHZ};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::ConfigError;

/// Experiments the CLI can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ramsey,
    Rabi,
    Raman,
    Raman3,
    Spectrum,
    Ladder,
    ScanAmp,
    ScanFreq,
    PhotonAssisted,
    Localization,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::Ramsey,
        ExperimentKind::Rabi,
        ExperimentKind::Raman,
        ExperimentKind::Raman3,
        ExperimentKind::Spectrum,
        ExperimentKind::Ladder,
        ExperimentKind::ScanAmp,
        ExperimentKind::ScanFreq,
        ExperimentKind::PhotonAssisted,
        ExperimentKind::Localization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ramsey => "ramsey",
            ExperimentKind::Rabi => "rabi",
            ExperimentKind::Raman => "raman",
            ExperimentKind::Raman3 => "raman3",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Ladder => "ladder",
            ExperimentKind::ScanAmp => "scan-amp",
            ExperimentKind::ScanFreq => "scan-freq",
            ExperimentKind::PhotonAssisted => "photon-assisted",
            ExperimentKind::Localization => "localization",
        }
    }

    /// Default resonance order.
    fn default_order(self) -> u32 {
        if self == ExperimentKind::Raman3 {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown experiment `{s}`; expected one of {}", names.join(", "))
        })
    }
}

// Raw file layout. Every table rejects unknown keys.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
    tol: Option<f64>,
    order: Option<u32>,
    drive: Option<RawDrive>,
    calibration: Option<RawCalibration>,
    noise: Option<RawNoise>,
    time: Option<RawGrid>,
    scan: Option<RawScan>,
    prep: Option<RawPrep>,
    ladder: Option<RawLadder>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    delta_z_mhz: Option<f64>,
    delta_x_mhz: Option<f64>,
    amp_a_mhz: Option<f64>,
    omega_mhz: Option<f64>,
    phase_mod_a_mhz: Option<f64>,
    phase_mod_nu_mhz: Option<f64>,
    /// `a/ν`, an alternative to `phase_mod_a_mhz`.
    phase_mod_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    zero_field_mhz: Option<f64>,
    field_gauss: Option<f64>,
    drive_mhz: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    sigma_khz: Option<f64>,
    realizations: Option<usize>,
    readout_shots: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start_us: Option<f64>,
    stop_us: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    values: Option<Vec<f64>>,
    times_us: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrep {
    theta_rad: Option<f64>,
    rabi_mhz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLadder {
    n_min: Option<i32>,
    n_max: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    prefix: Option<String>,
}

/// Validated scenario in SI units (rad/s, seconds).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Worker threads; `None` uses every available processor.
    pub threads: Option<usize>,
    pub tol: f64,
    /// Resonance order `m`.
    pub order: u32,
    /// Drive parameters. For `ramsey`, `delta_z` is the free-precession
    /// detuning and the rest is unused.
    pub drive: DriveParams,
    /// Δz values derived from the calibration section (`rabi`).
    pub calibrated_delta_z: Vec<CalibratedDetuning>,
    pub noise: NoiseModel,
    /// Sample times, seconds.
    pub times: Vec<f64>,
    /// Scan values in the experiment's natural unit, converted to SI where
    /// the unit is a frequency.
    pub scan: Vec<f64>,
    /// Fixed times of a localization scan, seconds.
    pub scan_times: Vec<f64>,
    pub prep_theta: Option<f64>,
    pub prep_rabi: f64,
    pub ladder_range: (i32, i32),
    pub output_dir: Option<String>,
    pub prefix: String,
}

/// A drive frequency from the calibration section and the detuning it
/// implies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CalibratedDetuning {
    pub drive_mhz: f64,
    pub delta_z: f64,
}

/// 1-based line of `key` inside `[section]` (or the top level when
/// `section` is empty), if it appears literally in the text.
pub fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            if current == section && key.is_empty() {
                return Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            if let Some((k, _)) = trimmed.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn line_for(text: &str, dotted: &str) -> Option<usize> {
    match dotted.split_once('.') {
        Some((section, key)) => line_of(text, section, key).or_else(|| line_of(text, section, "")),
        None => line_of(text, "", dotted),
    }
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Validation { key: key.to_string(), line: line_for(self.text, key), reason: reason.into() }
    }

    fn require<T: Copy>(&self, value: Option<T>, key: &str, why: &str) -> Result<T, ConfigError> {
        value.ok_or_else(|| self.fail(key, format!("missing; {why}")))
    }

    fn finite(&self, value: f64, key: &str) -> Result<f64, ConfigError> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.fail(key, "must be a finite number"))
        }
    }

    fn non_negative(&self, value: f64, key: &str) -> Result<f64, ConfigError> {
        if self.finite(value, key)? >= 0.0 {
            Ok(value)
        } else {
            Err(self.fail(key, format!("must be ≥ 0, got {value}")))
        }
    }

    fn positive(&self, value: f64, key: &str) -> Result<f64, ConfigError> {
        if self.finite(value, key)? > 0.0 {
            Ok(value)
        } else {
            Err(self.fail(key, format!("must be > 0, got {value}")))
        }
    }
}

/// Parses and validates a scenario. Unknown keys, type errors and
/// malformed TOML are `ParseError`s; missing or out-of-range values are
/// `ValidationError`s. Both name the key and, where possible, the line.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        let message = e.message().to_string();
        let key = message
            .strip_prefix("unknown field `")
            .and_then(|r| r.split('`').next())
            .map(str::to_string);
        ConfigError::Parse { key, line, message }
    })?;
    let v = Validator { text };

    let experiment_name = v.require(raw.experiment.as_deref(), "experiment", "name the experiment to run")?;
    let experiment: ExperimentKind = experiment_name.parse().map_err(|e: String| v.fail("experiment", e))?;
    let tol = v.positive(raw.tol.unwrap_or(crate::dynamics::DEFAULT_TOL), "tol")?;
    let order = raw.order.unwrap_or(experiment.default_order());
    if order == 0 {
        return Err(v.fail("order", "resonance order must be at least 1"));
    }
    if raw.threads == Some(0) {
        return Err(v.fail("threads", "must be at least 1 (omit for all processors)"));
    }

    let drive_raw = raw.drive.unwrap_or_default();
    let calibration = raw.calibration.unwrap_or_default();
    let calibrated_delta_z = resolve_calibration(&v, &calibration)?;
    let needs = |key: &str| -> bool { required_drive_keys(experiment).contains(&key) };
    let get = |value: Option<f64>, key: &str, default: f64| -> Result<f64, ConfigError> {
        let dotted = format!("drive.{key}");
        match value {
            Some(x) => v.finite(x, &dotted).map(mhz),
            None if needs(key) => Err(v.fail(&dotted, format!("missing; required by the `{experiment}` experiment"))),
            None => Ok(mhz(default)),
        }
    };
    let delta_z_default = calibrated_delta_z.first().map(|c| crate::units::to_mhz(c.delta_z));
    let delta_z = match (drive_raw.delta_z_mhz, delta_z_default) {
        (Some(x), _) => mhz(v.finite(x, "drive.delta_z_mhz")?),
        (None, Some(cal)) => mhz(cal),
        (None, None) => get(None, "delta_z_mhz", 0.0)?,
    };
    let delta_x = get(drive_raw.delta_x_mhz, "delta_x_mhz", 0.0)?;
    let amp_a = get(drive_raw.amp_a_mhz, "amp_a_mhz", 0.0)?;
    let omega_default = if needs("omega_mhz") { 0.0 } else { 1.0 };
    let omega = get(drive_raw.omega_mhz, "omega_mhz", omega_default)?;
    v.non_negative(delta_x, "drive.delta_x_mhz")?;
    v.non_negative(amp_a, "drive.amp_a_mhz")?;
    v.positive(omega, "drive.omega_mhz")?;
    let nu = match drive_raw.phase_mod_nu_mhz {
        Some(x) => mhz(v.non_negative(x, "drive.phase_mod_nu_mhz")?),
        None if needs("phase_mod_nu_mhz") => {
            return Err(v.fail("drive.phase_mod_nu_mhz", format!("missing; required by the `{experiment}` experiment")))
        }
        None => 0.0,
    };
    let a = match (drive_raw.phase_mod_a_mhz, drive_raw.phase_mod_ratio) {
        (Some(_), Some(_)) => {
            return Err(v.fail("drive.phase_mod_ratio", "give either phase_mod_a_mhz or phase_mod_ratio, not both"))
        }
        (Some(x), None) => mhz(v.non_negative(x, "drive.phase_mod_a_mhz")?),
        (None, Some(r)) => v.non_negative(r, "drive.phase_mod_ratio")? * nu,
        (None, None) => 0.0,
    };
    if a > 0.0 && !(nu > 0.0) {
        return Err(v.fail("drive.phase_mod_nu_mhz", "must be > 0 when phase modulation is on"));
    }
    let drive = DriveParams { delta_z, delta_x, amp_a, omega, phase_mod_a: a, phase_mod_nu: nu };
    drive.validate().map_err(|e| v.fail("drive", e.to_string()))?;
    if needs_gap(experiment) && drive.omega0() == 0.0 {
        return Err(v.fail("drive.delta_z_mhz", "delta_z and delta_x cannot both be zero for this experiment"));
    }

    let noise = resolve_noise(&v, raw.noise, raw.seed.unwrap_or(0))?;
    let times = resolve_time(&v, raw.time, experiment)?;
    let (scan, scan_times) = resolve_scan(&v, raw.scan, experiment)?;
    let prep = raw.prep.unwrap_or_default();
    let prep_theta = prep.theta_rad.map(|t| v.non_negative(t, "prep.theta_rad")).transpose()?;
    let prep_rabi = mhz(v.positive(prep.rabi_mhz.unwrap_or(DEFAULT_PULSE_RABI_MHZ), "prep.rabi_mhz")?);
    let ladder = raw.ladder.unwrap_or_default();
    let (lo, hi) = crate::ladder::DEFAULT_N_RANGE;
    let ladder_range = (ladder.n_min.unwrap_or(lo), ladder.n_max.unwrap_or(hi));
    if ladder_range.1 - ladder_range.0 < 2 {
        return Err(v.fail("ladder.n_max", "n_max − n_min must be at least 2"));
    }
    let output = raw.output.unwrap_or_default();
    let prefix = output.prefix.unwrap_or_else(|| experiment.name().replace('-', "_"));
    if prefix.is_empty() || prefix.contains(['/', '\\']) {
        return Err(v.fail("output.prefix", "must be a plain, non-empty file name stem"));
    }
    Ok(ScenarioConfig {
        experiment,
        seed: noise.seed,
        threads: raw.threads,
        tol,
        order,
        drive,
        calibrated_delta_z,
        noise,
        times,
        scan,
        scan_times,
        prep_theta,
        prep_rabi,
        ladder_range,
        output_dir: output.dir,
        prefix,
    })
}

fn required_drive_keys(kind: ExperimentKind) -> &'static [&'static str] {
    use ExperimentKind::*;
    match kind {
        Ramsey => &["delta_z_mhz"],
        Rabi => &["delta_x_mhz"],
        Raman | Raman3 | Spectrum | Ladder | ScanFreq => &["delta_x_mhz", "amp_a_mhz", "omega_mhz"],
        ScanAmp => &["delta_x_mhz", "omega_mhz"],
        PhotonAssisted => &["delta_x_mhz", "amp_a_mhz", "omega_mhz"],
        Localization => &["delta_x_mhz", "amp_a_mhz", "omega_mhz", "phase_mod_nu_mhz"],
    }
}

fn needs_gap(kind: ExperimentKind) -> bool {
    !matches!(kind, ExperimentKind::Ramsey | ExperimentKind::Rabi)
}

fn resolve_calibration(v: &Validator, c: &RawCalibration) -> Result<Vec<CalibratedDetuning>, ConfigError> {
    let Some(drives) = &c.drive_mhz else {
        if c.field_gauss.is_some() || c.zero_field_mhz.is_some() {
            return Err(v.fail("calibration.drive_mhz", "missing; list the microwave drive frequencies"));
        }
        return Ok(Vec::new());
    };
    if drives.is_empty() {
        return Err(v.fail("calibration.drive_mhz", "must list at least one drive frequency"));
    }
    let d = v.positive(c.zero_field_mhz.unwrap_or(NV_ZERO_FIELD_MHZ), "calibration.zero_field_mhz")?;
    let b = v.require(c.field_gauss, "calibration.field_gauss", "needed to place the m_s = −1 level")?;
    let b = v.non_negative(b, "calibration.field_gauss")?;
    let splitting = d - ELECTRON_GYRO_MHZ_PER_GAUSS * b;
    drives
        .iter()
        .map(|&w| {
            let w = v.positive(w, "calibration.drive_mhz")?;
            Ok(CalibratedDetuning { drive_mhz: w, delta_z: mhz(splitting - w) })
        })
        .collect()
}

fn resolve_noise(v: &Validator, raw: Option<RawNoise>, seed: u64) -> Result<NoiseModel, ConfigError> {
    let Some(n) = raw else {
        return Ok(NoiseModel { seed, ..NoiseModel::noiseless() });
    };
    let sigma_khz = v.non_negative(n.sigma_khz.unwrap_or(DEFAULT_SIGMA_DETUNING_MHZ * 1e3), "noise.sigma_khz")?;
    let realizations = n.realizations.unwrap_or(DEFAULT_REALIZATIONS);
    if realizations == 0 {
        return Err(v.fail("noise.realizations", "must be at least 1"));
    }
    if n.readout_shots == Some(0) {
        return Err(v.fail("noise.readout_shots", "must be at least 1 (omit for exact expectations)"));
    }
    Ok(NoiseModel {
        sigma_detuning: mhz(sigma_khz * 1e-3),
        n_realizations: realizations,
        readout_shots: n.readout_shots,
        seed,
    })
}

fn uses_time_grid(kind: ExperimentKind) -> bool {
    use ExperimentKind::*;
    matches!(kind, Ramsey | Rabi | Raman | Raman3 | PhotonAssisted)
}

fn resolve_time(v: &Validator, raw: Option<RawGrid>, kind: ExperimentKind) -> Result<Vec<f64>, ConfigError> {
    let Some(g) = raw else {
        if uses_time_grid(kind) {
            return Err(v.fail("time", format!("missing [time] section; required by the `{kind}` experiment")));
        }
        return Ok(Vec::new());
    };
    let start = v.non_negative(g.start_us.unwrap_or(0.0), "time.start_us")?;
    let stop = v.require(g.stop_us, "time.stop_us", "end of the time grid in µs")?;
    let stop = v.positive(stop, "time.stop_us")?;
    if stop <= start {
        return Err(v.fail("time.stop_us", "must exceed start_us"));
    }
    let points = g.points.unwrap_or(201);
    if points < 2 {
        return Err(v.fail("time.points", "need at least 2 points"));
    }
    Ok(crate::experiment::linspace(us(start), us(stop), points))
}

fn resolve_scan(
    v: &Validator,
    raw: Option<RawScan>,
    kind: ExperimentKind,
) -> Result<(Vec<f64>, Vec<f64>), ConfigError> {
    use ExperimentKind::*;
    let needed = matches!(kind, ScanAmp | ScanFreq | Localization);
    let Some(s) = raw else {
        if needed {
            return Err(v.fail("scan", format!("missing [scan] section; required by the `{kind}` experiment")));
        }
        return Ok((Vec::new(), Vec::new()));
    };
    let values = match (s.values, s.start, s.stop) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(v.fail("scan.values", "give either an explicit list or start/stop/points, not both"))
        }
        (Some(list), None, None) => {
            if list.is_empty() {
                return Err(v.fail("scan.values", "must not be empty"));
            }
            for x in &list {
                v.finite(*x, "scan.values")?;
            }
            list
        }
        (None, start, stop) => {
            let start = v.require(start, "scan.start", "first scan value")?;
            let stop = v.require(stop, "scan.stop", "last scan value")?;
            let points = s.points.unwrap_or(41);
            if points < 2 {
                return Err(v.fail("scan.points", "need at least 2 points"));
            }
            if !(v.finite(stop, "scan.stop")? > v.finite(start, "scan.start")?) {
                return Err(v.fail("scan.stop", "must exceed scan.start"));
            }
            crate::experiment::linspace(start, stop, points)
        }
    };
    let values = match kind {
        ScanAmp => values.iter().map(|&x| v.non_negative(x, "scan.values").map(mhz)).collect::<Result<_, _>>()?,
        ScanFreq | Spectrum => values.iter().map(|&x| v.positive(x, "scan.values").map(mhz)).collect::<Result<_, _>>()?,
        Localization => values.iter().map(|&x| v.non_negative(x, "scan.values")).collect::<Result<_, _>>()?,
        _ => values,
    };
    let scan_times = match (kind, s.times_us) {
        (Localization, None) => return Err(v.fail("scan.times_us", "missing; list the fixed readout times in µs")),
        (_, Some(ts)) => {
            if ts.is_empty() {
                return Err(v.fail("scan.times_us", "must not be empty"));
            }
            ts.iter().map(|&t| v.positive(t, "scan.times_us").map(us)).collect::<Result<_, _>>()?
        }
        (_, None) => Vec::new(),
    };
    Ok((values, scan_times))
}
