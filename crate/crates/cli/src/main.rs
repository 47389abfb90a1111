//! `wnlab`: run registered experiments and write CSV reports.
//!
//! Exit codes: 0 all checks passed, 1 some acceptance check failed,
//! 2 configuration or runtime error.

mod config;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use wnlab::experiments::{self, REGISTRY};

#[derive(Parser)]
#[command(
    name = "wnlab",
    version,
    about = "Endpoint orders of operator norms and weighted lower bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments named in a config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// smoke, desk or full.
        #[arg(long)]
        preset: Option<String>,
        /// Seed for every randomized experiment.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List registered experiments.
    List {
        #[arg(long)]
        csv: bool,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { csv } => list(csv),
        Command::Run {
            config,
            out,
            preset,
            seed,
        } => run(config, config::Overrides { preset, seed, out }),
    }
}

fn list(csv: bool) -> ExitCode {
    let stdout = io::stdout();
    if csv {
        if let Err(e) = output::write_registry(stdout.lock(), &REGISTRY) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    } else {
        let width = REGISTRY.iter().map(|e| e.name.len()).max().unwrap_or(0);
        let mut w = stdout.lock();
        for e in &REGISTRY {
            let _ = writeln!(w, "{:width$}  {}  [{}]", e.name, e.description, e.anchor);
        }
    }
    ExitCode::SUCCESS
}

/// `WNLAB_THREADS` caps the global pool.
fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("WNLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        format!("config error in `WNLAB_THREADS`: `{v}` is not a positive integer")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

fn run(path: PathBuf, overrides: config::Overrides) -> ExitCode {
    if let Err(e) = init_threads() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_ERROR);
    }
    let plan = match config::load(&path, &overrides) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let mut reports = Vec::with_capacity(plan.experiments.len());
    for cfg in &plan.experiments {
        let t = Instant::now();
        match experiments::run(cfg) {
            Ok(r) => {
                let passed = r.checks.iter().filter(|c| c.passed).count();
                println!(
                    "{}: {passed}/{} checks passed",
                    r.experiment,
                    r.checks.len()
                );
                for c in r.checks.iter().filter(|c| !c.passed) {
                    println!(
                        "  FAIL {}: {} (want {})",
                        c.name,
                        output::num(c.value),
                        c.requirement
                    );
                }
                eprintln!("  [{} {:.2}s]", r.experiment, t.elapsed().as_secs_f64());
                reports.push(r);
            }
            Err(e) => {
                eprintln!("error in experiment `{}`: {e}", cfg.name);
                return ExitCode::from(EXIT_ERROR);
            }
        }
    }
    if let Err(e) = output::write_all(&plan.out, &reports) {
        eprintln!("error writing {}: {e}", plan.out.display());
        return ExitCode::from(EXIT_ERROR);
    }
    println!("wrote {} ({} preset)", plan.out.display(), plan.preset);
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        println!("some acceptance checks failed");
        ExitCode::from(EXIT_FAILED)
    }
}
