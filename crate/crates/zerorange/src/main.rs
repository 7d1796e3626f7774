use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use zerorange::{execute, ExperimentConfig};

/// Runs one seeded experiment and writes its report.
#[derive(Debug, Parser)]
#[command(name = "zerorange", version)]
struct Cli {
    /// Plain `key = value` file; flags given here override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// kernel-selftest, globular-endpoint, bulk-stationary,
    /// critical-endpoint, diffusive-scaling or smoothed-limit.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Horizon.
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long)]
    n_paths: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Time-grid resolution; its meaning depends on the experiment.
    #[arg(long)]
    grid: Option<String>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

fn run(cli: Cli) -> zerorange::Result<bool> {
    let mut pairs = match &cli.config {
        Some(path) => ExperimentConfig::read_file(path)?,
        None => Vec::new(),
    };
    let flags = [
        ("experiment", &cli.experiment),
        ("gamma", &cli.gamma),
        ("kappa", &cli.kappa),
        ("T", &cli.horizon),
        ("n_paths", &cli.n_paths),
        ("seed", &cli.seed),
        ("grid", &cli.grid),
        ("out", &cli.out),
        ("format", &cli.format),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            pairs.push((key.to_string(), v.clone()));
        }
    }
    let cfg = ExperimentConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    let report = execute(&cfg)?;
    for c in &report.criteria {
        eprintln!("[{}] {:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.number, c.name, c.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
