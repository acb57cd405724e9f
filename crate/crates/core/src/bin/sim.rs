//! `sim <config-path> [--out DIR] [--seed N] [--quiet]`
//!
//! Runs one scenario file and writes its CSV tables and JSON sidecars.
//! The output directory is taken from `--out`, then `[output] dir` in the
//! scenario, then `$FLOQUET_SIM_OUT`, then `./out`.

use clap::Parser;
use floquet_raman::scenario::{parse_config, run_scenario};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const OUT_ENV: &str = "FLOQUET_SIM_OUT";

#[derive(Parser, Debug)]
#[command(name = "sim", version, about = "Floquet Raman transition simulator")]
struct Args {
    /// Scenario file (TOML).
    config: PathBuf,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Suppress the run summary.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if args.quiet {
        "error"
    } else {
        "warn"
    }))
    .init();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("sim: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: &Args) -> Result<(), String> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut config = parse_config(&text).map_err(|e| format!("{}: {e}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
        config.noise.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    log::info!("running {} into {}", config.experiment, out_dir.display());
    let summary = run_scenario(&config, &text, &out_dir).map_err(|e| e.to_string())?;
    if !args.quiet {
        // A closed stdout (e.g. piped into `head`) is not a run failure.
        let mut out = std::io::stdout().lock();
        for line in &summary.lines {
            let _ = writeln!(out, "{line}");
        }
        for f in &summary.files {
            let _ = writeln!(out, "wrote {} and {}", f.csv.display(), f.sidecar.display());
        }
    }
    Ok(())
}
