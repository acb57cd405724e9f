use floquet_raman::floquet::fold_quasienergy;
use floquet_raman::scenario::{parse_config, read_table};
use floquet_raman::units::mhz;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const RAMAN: &str = r#"experiment = "raman"
seed = 3

[drive]
delta_z_mhz = 10.03
delta_x_mhz = 9.67
amp_a_mhz = 2.37
omega_mhz = 6.985

[time]
stop_us = 1.0
points = 201
"#;

const NOISY_RAMSEY: &str = r#"experiment = "ramsey"
seed = 5

[drive]
delta_z_mhz = 2.0

[noise]
sigma_khz = 40.0
realizations = 16
readout_shots = 300

[time]
stop_us = 3.0
points = 61
"#;

fn sim(dir: &Path, name: &str, text: &str, args: &[&str]) -> Output {
    let config = dir.join(name);
    std::fs::write(&config, text).unwrap();
    Command::new(env!("CARGO_BIN_EXE_sim"))
        .arg(&config)
        .args(args)
        .env_remove("FLOQUET_SIM_OUT")
        .output()
        .unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn sidecar(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn raman_writes_documented_schema_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let run = sim(dir.path(), "raman.toml", RAMAN, &["--out", &out_arg(&out), "--quiet"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(run.stdout.is_empty());

    let table = read_table(std::fs::File::open(out.join("raman.csv")).unwrap()).unwrap();
    assert_eq!(&table.headers[..3], ["t_us", "p0", "p0_filtered"]);
    assert_eq!(table.rows(), 201);
    let t = table.column("t_us").unwrap();
    assert_eq!(t[0], 0.0);
    assert!((t[200] - 1.0).abs() < 1e-12);
    assert!(table.column("p0").unwrap().iter().all(|p| (0.0..=1.0).contains(p)));

    let meta = sidecar(out.join("raman.json"));
    assert_eq!(meta["experiment"], "raman");
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["library_version"], floquet_raman::VERSION);
    assert_eq!(meta["config_text"], RAMAN);
    assert!(meta["wall_clock_s"].as_f64().unwrap() >= 0.0);
    let dz = meta["resolved"]["drive"]["delta_z"].as_f64().unwrap();
    assert!((dz - mhz(10.03)).abs() < 1e-6);
}

#[test]
fn spectrum_without_drive_folds_static_levels() {
    let text = "experiment = \"spectrum\"\n\n[drive]\ndelta_z_mhz = 10.0\ndelta_x_mhz = 10.0\namp_a_mhz = 0.0\nomega_mhz = 6.0\n\n[scan]\nstart = 5.0\nstop = 9.0\npoints = 9\n";
    let dir = tempfile::tempdir().unwrap();
    let run = sim(dir.path(), "s.toml", text, &["--out", &out_arg(dir.path()), "--quiet"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = read_table(std::fs::File::open(dir.path().join("spectrum.csv")).unwrap()).unwrap();
    let omegas = table.column("omega_mhz").unwrap();
    let a = table.column("quasienergy_a_mhz").unwrap();
    let b = table.column("quasienergy_b_mhz").unwrap();
    let half = 10f64.hypot(10.0) / 2.0;
    for k in 0..omegas.len() {
        let mut expected = [fold_quasienergy(half, omegas[k]), fold_quasienergy(-half, omegas[k])];
        let mut got = [a[k], b[k]];
        expected.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (e, g) in expected.iter().zip(&got) {
            assert!((e - g).abs() < 1e-6, "omega {}: {got:?} vs {expected:?}", omegas[k]);
        }
    }
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(sim(dir.path(), "r.toml", NOISY_RAMSEY, &["--out", &out_arg(&a), "--quiet"]).status.success());
    assert!(sim(dir.path(), "r.toml", NOISY_RAMSEY, &["--out", &out_arg(&b), "--quiet"]).status.success());
    let read = |d: &Path| std::fs::read(d.join("ramsey.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(sim(dir.path(), "r.toml", NOISY_RAMSEY, &["--out", &out_arg(&a), "--quiet"]).status.success());
    assert!(sim(dir.path(), "r.toml", NOISY_RAMSEY, &["--out", &out_arg(&b), "--seed", "99", "--quiet"]).status.success());
    let read = |d: &Path| std::fs::read(d.join("ramsey.csv")).unwrap();
    assert_ne!(read(&a), read(&b));
    assert_eq!(sidecar(b.join("ramsey.json"))["seed"], 99);
    assert_eq!(sidecar(b.join("ramsey.json"))["resolved"]["noise"]["seed"], 99);
}

#[test]
fn sidecar_alone_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert!(sim(dir.path(), "r.toml", NOISY_RAMSEY, &["--out", &out_arg(&first), "--seed", "42", "--quiet"])
        .status
        .success());
    let meta = sidecar(first.join("ramsey.json"));
    let text = meta["config_text"].as_str().unwrap();
    let seed = meta["seed"].as_u64().unwrap().to_string();
    let again = dir.path().join("again");
    assert!(sim(dir.path(), "replay.toml", text, &["--out", &out_arg(&again), "--seed", &seed, "--quiet"])
        .status
        .success());
    assert_eq!(std::fs::read(first.join("ramsey.csv")).unwrap(), std::fs::read(again.join("ramsey.csv")).unwrap());
}

#[test]
fn missing_omega_exits_nonzero_naming_the_key() {
    let text = RAMAN.replace("omega_mhz = 6.985\n", "");
    let dir = tempfile::tempdir().unwrap();
    let run = sim(dir.path(), "bad.toml", &text, &["--out", &out_arg(dir.path())]);
    assert!(!run.status.success());
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("omega"), "{err}");
    assert!(!dir.path().join("raman.csv").exists());
}

#[test]
fn negative_duration_exits_nonzero() {
    let text = RAMAN.replace("stop_us = 1.0", "stop_us = -1.0");
    let dir = tempfile::tempdir().unwrap();
    let run = sim(dir.path(), "bad.toml", &text, &["--out", &out_arg(dir.path())]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("time.stop_us"));
}

#[test]
fn unknown_key_exits_nonzero_with_line() {
    let text = RAMAN.replace("[time]", "[time]\nstep_us = 0.1");
    let dir = tempfile::tempdir().unwrap();
    let run = sim(dir.path(), "bad.toml", &text, &["--out", &out_arg(dir.path())]);
    assert!(!run.status.success());
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("step_us") && err.contains("line 11"), "{err}");
}

#[test]
fn missing_config_file_exits_nonzero() {
    let run = Command::new(env!("CARGO_BIN_EXE_sim")).arg("/nonexistent/scenario.toml").output().unwrap();
    assert!(!run.status.success());
}

#[test]
fn environment_sets_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_env");
    let config = dir.path().join("r.toml");
    std::fs::write(&config, NOISY_RAMSEY).unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_sim"))
        .arg(&config)
        .arg("--quiet")
        .env("FLOQUET_SIM_OUT", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(run.status.success());
    assert!(target.join("ramsey.csv").exists());
    assert!(target.join("ramsey.json").exists());
}

#[test]
fn bundled_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = std::fs::read_to_string(&path).unwrap();
            parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert_eq!(n, 10);
}
