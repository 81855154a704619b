use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wallcross::{exit_status, run, CliError, Command, Config};

/// Genus-zero wall-crossing checks for toric GIT quotients.
#[derive(Debug, Parser)]
#[command(name = "wallcross", version)]
struct Args {
    /// Command to run; falls back to `command` in the config.
    #[arg(value_enum)]
    command: Option<Command>,
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Truncation order N (a rational such as 6 or 13/2).
    #[arg(long, value_name = "N")]
    order: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (0 = rayon default).
    #[arg(long, value_name = "K", env = "WALLCROSS_THREADS")]
    threads: Option<usize>,
    /// Replaces every numeric acceptance tolerance.
    #[arg(long, value_name = "X")]
    tolerance: Option<f64>,
}

fn main_inner(args: Args) -> Result<i32, CliError> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(o) = &args.order {
        cfg.order = wallcross_core::rational::parse_q(o)
            .filter(|q| *q >= wallcross_core::rational::q(0))
            .ok_or_else(|| CliError::Schema { field: "--order".into(), msg: format!("`{o}` is not a non-negative rational") })?;
    }
    if let Some(t) = args.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::Schema { field: "--tolerance".into(), msg: "must be positive".into() });
        }
        cfg.override_tolerance(t);
    }
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| CliError::Threads(e.to_string()))?;
    }
    let command = args.command.or(cfg.command).ok_or(CliError::NoCommand)?;
    let report = run(command, &cfg)?;
    let text = report.to_json();
    match &args.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?,
        None => print!("{text}"),
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}", c.name);
    }
    Ok(exit_status(&report))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
