//! `acm`: generate workloads, replay them against the simulator, and compare
//! fixed against adaptive cost parameters.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acm_core::cost_model::OperatorType;
use acm_core::cpu_model::oracle::fit_observations;
use acm_core::cpu_model::OperatorObservation;
use acm_core::harness::{
    compare, generate_workload, replay, write_compare_report, write_run_report, ExperimentConfig,
    HarnessError, Mode, WorkloadTrace,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acm", version, about = "Adaptive cost model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a workload trace from the config's [workload] section.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a trace in one mode and write its report.
    Replay {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        profile: PathBuf,
        /// Unmeasured passes over the trace before the measured one.
        #[arg(long, default_value_t = 2)]
        warmup: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the final model state (acm mode) as JSON.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Replay a trace in both modes and write the combined report.
    Compare {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 2)]
        warmup: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reference solvers.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Normal-equations fit of CSV rows `n_t,n_o,n_i,s,time`; prints
    /// `c_t,c_o,c_i` with empty fields for all-zero columns.
    Lsq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale_factor: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Baseline,
    Acm,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Baseline => Mode::Baseline,
            ModeArg::Acm => Mode::Acm,
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(|e| Failure::Config(e.to_string()))
}

fn load_trace(path: &Path) -> Result<WorkloadTrace, Failure> {
    WorkloadTrace::load(path).map_err(|e| match e {
        HarnessError::Trace(m) => Failure::Config(format!("{}: {m}", path.display())),
        other => Failure::Config(other.to_string()),
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { config, seed, out } => {
            let cfg = load_config(&config)?;
            let workload = cfg.workload.as_ref().ok_or_else(|| {
                Failure::Config(format!("{}: no [workload] section", config.display()))
            })?;
            let trace = generate_workload(workload, &cfg.catalog()?, seed)?;
            trace.save(&out)?;
            println!("wrote {} queries to {}", trace.len(), out.display());
        }
        Command::Replay {
            trace,
            mode,
            profile,
            warmup,
            out,
            checkpoint,
        } => {
            let setup = load_config(&profile)?.setup()?;
            let trace = load_trace(&trace)?;
            let report = replay(&trace, mode.into(), &setup, warmup)?;
            write_run_report(&report, &out)?;
            if let (Some(path), Some(model)) = (checkpoint, &report.final_model) {
                model.save_checkpoint(&path)?;
            }
            let r = report
                .correlation()
                .map_or_else(|e| format!("undefined ({e})"), |r| format!("{r:.4}"));
            println!(
                "{}: {} queries, {:.3} ms total, pearson {r}",
                report.mode,
                report.queries.len(),
                report.total_latency_ms()
            );
        }
        Command::Compare {
            trace,
            profile,
            warmup,
            out,
        } => {
            let setup = load_config(&profile)?.setup()?;
            let trace = load_trace(&trace)?;
            let report = compare(&trace, &setup, warmup)?;
            write_compare_report(&report, &out)?;
            print!("{}", acm_core::harness::report::compare_summary(&report));
        }
        Command::Oracle {
            command:
                OracleCommand::Lsq {
                    input,
                    scale_factor,
                },
        } => {
            if !(scale_factor.is_finite() && scale_factor > 0.0) {
                return Err(Failure::Config(format!(
                    "scale factor must be positive, got {scale_factor}"
                )));
            }
            let obs = read_rows(&input)?;
            let fit = fit_observations(&obs, scale_factor)
                .ok_or_else(|| Failure::Runtime("normal equations are singular".into()))?;
            let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            println!("c_t,c_o,c_i");
            println!("{},{},{}", f(fit.c_t), f(fit.c_o), f(fit.c_i));
        }
    }
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<OperatorObservation>, Failure> {
    let bad = |m: String| Failure::Config(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let expected = ["n_t", "n_o", "n_i", "s", "time"];
    if headers.iter().map(str::trim).ne(expected) {
        return Err(bad(format!("expected header {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64, Failure> {
            record[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("line {line}: {e}")))
        };
        let count = |k: usize| -> Result<u64, Failure> {
            record[k]
                .trim()
                .parse::<u64>()
                .map_err(|e| bad(format!("line {line}: {e}")))
        };
        let obs = OperatorObservation::new(
            OperatorType::SeqScan,
            count(0)?,
            count(1)?,
            count(2)?,
            num(3)?,
            num(4)?,
        )
        .map_err(|e| bad(format!("line {line}: {e}")))?;
        out.push(obs);
    }
    Ok(out)
}
