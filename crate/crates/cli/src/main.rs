use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use so3_energy::constants::{realizable_n, ClosedFormConstants, KAPPA};
use so3_energy::construct::{Configuration, Format};
use so3_energy::energy::log_energy;
use so3_energy::ensembles::{EnsembleKind, EnsembleSpec, FiberCount};
use so3_energy::experiment::{
    ensemble_prediction, generate, run_experiment, thread_pool, ExperimentConfig, PredictionKind, ReportFormat,
    THREADS_ENV,
};
use so3_energy::verify::{run_check, Suite, CHECK_COUNT};

/// Low logarithmic energy configurations in SO(3).
#[derive(Parser)]
#[command(name = "so3-energy", version)]
struct Cli {
    /// Worker threads (default: $SO3_ENERGY_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the named constants.
    Constants {
        #[arg(long)]
        json: bool,
    },
    /// Sample a configuration and write it to a file.
    Generate {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "auto")]
        s: FiberCount,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Logarithmic energy of a configuration file.
    Energy {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Predicted expected energy and its decomposition.
    Predict {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "auto")]
        s: FiberCount,
    },
    /// Monte Carlo estimate of the expected energy against its prediction.
    Mc {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "auto")]
        s: FiberCount,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Realizable (r, s, n) rows.
    Table {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long)]
        rmax: usize,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value = "fast")]
        suite: Suite,
        /// Run only these checks (1 to 13).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
}

enum Outcome {
    Done,
    Failed,
}

fn fmt_energy(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        "inf".to_string()
    }
}

fn run(cli: Cli) -> so3_energy::Result<Outcome> {
    match cli.command {
        Command::Constants { json } => {
            let c = ClosedFormConstants::compute()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&c.entries()).expect("constants serialize"));
            } else {
                for e in c.entries() {
                    println!("{:<18} {:>22.16}  {} (±{:.0e})", e.name, e.value, e.method, e.tolerance);
                }
            }
        }
        Command::Generate { ensemble, r, s, seed, out, format } => {
            let spec = EnsembleSpec::new(ensemble, r, s, seed)?;
            let config = generate(&spec)?;
            config.write(&out, format)?;
            println!("{}", fmt_energy(log_energy(config.matrices()).value));
        }
        Command::Energy { input } => {
            let config = Configuration::read(&input)?;
            println!("{}", fmt_energy(log_energy(config.matrices()).value));
        }
        Command::Predict { ensemble, r, s } => {
            let s = EnsembleSpec::new(ensemble, r, s, 0)?.fiber_count()?;
            let (energy, kind) = ensemble_prediction(ensemble, r, s)?;
            let n = r * s;
            let nf = n as f64;
            let kappa_n2 = KAPPA * nf * nf;
            let log_term = -nf * nf.ln() / 3.0;
            let report = json!({
                "ensemble": ensemble.name(),
                "r": r,
                "s": s,
                "n": n,
                "prediction_kind": match kind {
                    PredictionKind::Expectation => "expectation",
                    PredictionKind::UpperBound => "upper_bound",
                },
                "expected_energy": energy,
                "kappa_n2": kappa_n2,
                "log_term": log_term,
                "residual_per_n": (energy - kappa_n2 - log_term) / nf,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("prediction serializes"));
        }
        Command::Mc { ensemble, r, s, trials, seed, format } => {
            let mut cfg = ExperimentConfig::new(EnsembleSpec::new(ensemble, r, s, seed)?, trials)?;
            cfg.format = format;
            let report = run_experiment(&cfg)?;
            if report.excluded > 0 {
                eprintln!("warning: {} of {} trials had coincident rotations and were excluded", report.excluded, report.trials);
            }
            print!("{}", report.encode(format));
            if format == ReportFormat::Json {
                println!();
            }
            if !report.pass {
                return Ok(Outcome::Failed);
            }
        }
        Command::Table { ensemble, rmax } => {
            println!("r,s,n");
            for (r, s, n) in realizable_n(ensemble, rmax)? {
                println!("{r},{s},{n}");
            }
        }
        Command::Verify { suite, only, json } => {
            let ids: Vec<u32> = if only.is_empty() { (1..=CHECK_COUNT).collect() } else { only };
            let mut results = Vec::new();
            for id in ids {
                let res = run_check(id, suite);
                if !json {
                    let tag = if res.pass { "PASS" } else { "FAIL" };
                    println!("[{tag}] {:>2} {} ({:.1} s): {}", res.id, res.name, res.seconds, res.detail);
                }
                results.push(res);
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&results).expect("results serialize"));
            }
            if results.iter().any(|r| !r.pass) {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let pool = match thread_pool(cli.threads) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e} (check --threads or {THREADS_ENV})");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
