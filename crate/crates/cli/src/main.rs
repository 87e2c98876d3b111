//! `ymsb`: run named verification experiments and export lattice ensembles.
//!
//! Exit status is 0 iff every check in the report passed, 1 if some check
//! failed and 2 on configuration or I/O errors. The worker thread count is
//! read from `YMSB_THREADS`; reports do not depend on it.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ymsb_core::harness::{run_and_emit, Experiment, ExperimentConfig};
use ymsb_core::lattice::{sample_msh_seeded, sample_ps_seeded, write_complex_ensemble_csv, write_ensemble_csv};
use ymsb_core::report::ReportFormat;
use ymsb_core::{Error, Result};

const THREADS_VAR: &str = "YMSB_THREADS";

#[derive(Parser)]
#[command(name = "ymsb", version, about = "Seeded verification experiments for Yang-Mills on a spacetime cylinder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a key = value config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `seed` in the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `out`; without any output path the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `format` (csv or json).
        #[arg(long)]
        format: Option<ReportFormat>,
        /// Further `key=value` overrides, applied last.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the experiments and the operation each one drives.
    List,
    /// Write a CSV ensemble of lattice connections: `P_s` draws, or `M_(s,hbar)`
    /// draws when `--hbar` is given.
    Ensemble {
        #[arg(long = "links", short = 'N')]
        links: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().map_err(|_| Error::Config {
            field: THREADS_VAR.into(),
            message: format!("expected a thread count, got `{v}`"),
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config { field: THREADS_VAR.into(), message: e.to_string() })?;
    }
    Ok(())
}

fn run_command(
    config: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<ReportFormat>,
    overrides: Vec<String>,
) -> Result<bool> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.output = Some(out);
    }
    if let Some(format) = format {
        cfg.format = format;
    }
    for kv in &overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config { field: kv.clone(), message: "expected --set key=value".into() })?;
        cfg.set(k.trim(), v.trim())?;
    }
    let report = run_and_emit(&cfg)?;
    if cfg.output.is_none() {
        let mut stdout = io::stdout().lock();
        stdout.write_all(report.render(cfg.format)?.as_bytes())?;
        stdout.write_all(b"\n")?;
    }
    let failed: Vec<_> = report.failures().collect();
    eprintln!("{}: {} checks, {} failed", report.experiment, report.rows.len(), failed.len());
    for row in &failed {
        eprintln!("  FAIL {} (score {} > threshold {})", row.name, row.score, row.threshold);
    }
    Ok(failed.is_empty())
}

fn ensemble_command(
    links: usize,
    s: f64,
    hbar: Option<f64>,
    samples: u64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match hbar {
        None => {
            let draws =
                (0..samples).map(|i| Ok((i, sample_ps_seeded(links, s, seed, i)?))).collect::<Result<Vec<_>>>()?;
            write_ensemble_csv(sink, &draws)
        }
        Some(h) => {
            let draws =
                (0..samples).map(|i| Ok((i, sample_msh_seeded(links, s, h, seed, i)?))).collect::<Result<Vec<_>>>()?;
            write_complex_ensemble_csv(sink, &draws)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Run { config, seed, out, format, overrides } => run_command(config, seed, out, format, overrides),
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<20} {:<38} {}", e.name(), e.operation(), e.summary());
            }
            Ok(true)
        }
        Command::Ensemble { links, s, hbar, samples, seed, out } => {
            ensemble_command(links, s, hbar, samples, seed, out).map(|()| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
