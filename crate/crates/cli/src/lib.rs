//! Command-line runner and benchmark campaigns for the optimizer.

pub mod campaign;
pub mod registry;
pub mod runner;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use pareto_trm::{AlgoConfig, StopReason, TestProblemSpec};
use thiserror::Error;

pub use campaign::{run_campaign, summarize_dir, write_campaign, write_tables, CampaignConfig, SummaryRow};
pub use runner::{execute, RunOutput, RunRequest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pareto_trm::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pareto-trm", version, about = "Trust-region optimizer for expensive multiobjective problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the optimizer once on a test problem.
    Run {
        #[arg(long)]
        problem: String,
        /// Number of variables (default 2 for T6, 5 otherwise).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "rbf-cubic")]
        model: String,
        #[arg(long, default_value = "steepest")]
        step: String,
        /// Start point in original coordinates, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        /// Seed for the start point and the run.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with algorithm parameter overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cap on expensive evaluations, overriding the config.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "pareto-trm-out")]
        out: PathBuf,
    },
    /// Run a benchmark campaign described by a JSON config.
    Campaign {
        config: PathBuf,
        /// Output directory, overriding `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild summary.csv and plotdata/ from a directory of reports.
    Summarize {
        reports_dir: PathBuf,
        /// Where to write the tables (default: the reports directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_algo(path: Option<&PathBuf>) -> Result<AlgoConfig, CliError> {
    let Some(path) = path else {
        return Ok(AlgoConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let cfg: AlgoConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run {
            problem,
            n,
            model,
            step,
            x0,
            seed,
            config,
            budget,
            out,
        } => {
            let fam = registry::family(&problem)?;
            registry::model_spec(&model)?;
            registry::step_kind(&step)?;
            let n = n.unwrap_or(if fam == pareto_trm::Family::T6 { 2 } else { 5 });
            let spec = TestProblemSpec::new(fam, n);
            spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let mut algo = load_algo(config.as_ref())?;
            if let Some(b) = budget {
                algo.stopping.max_expensive = Some(b);
            }
            algo.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let prob = pareto_trm::make_problem(&spec)?;
            let x0 = match x0 {
                Some(x) => {
                    if x.len() != n || !prob.feasible.contains(&x) {
                        return Err(CliError::Usage(format!("--x0 must be a feasible point with {n} coordinates")));
                    }
                    x
                }
                None => registry::start_points(seed, fam, &prob, 1).remove(0),
            };
            let result = execute(&RunRequest {
                problem: spec,
                model: &model,
                step: &step,
                algo: &algo,
                x0: &x0,
                seed,
                start_index: 0,
            })?;
            runner::write_run(&out, &result)?;
            println!(
                "final_omega={:e} expensive_evals={} stop_reason={}",
                result.omega_final,
                result.report.total_expensive_evals,
                stop_label(&result.report.stop_reason)
            );
            Ok(if result.report.stop_reason.is_error() { 2 } else { 0 })
        }
        Command::Campaign { config, out } => {
            let text =
                fs::read_to_string(&config).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
            let cfg = CampaignConfig::from_json(&text)?;
            let root = out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("pareto-trm-campaign"));
            let result = run_campaign(&cfg)?;
            write_campaign(&root, &result)?;
            println!(
                "runs={} failed={} cells={} output={}",
                result.runs.len(),
                result.failures.len(),
                result.summary.len(),
                root.display()
            );
            Ok(0)
        }
        Command::Summarize { reports_dir, out } => {
            if !reports_dir.is_dir() {
                return Err(CliError::Usage(format!("{} is not a directory", reports_dir.display())));
            }
            let rows = summarize_dir(&reports_dir)?;
            let root = out.unwrap_or(reports_dir);
            write_tables(&root, &rows)?;
            println!("cells={}", rows.len());
            Ok(0)
        }
    }
}

fn stop_label(reason: &StopReason) -> String {
    match reason {
        StopReason::Error(msg) => format!("error({msg})"),
        other => serde_json::to_value(other)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_else(|| format!("{other:?}")),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
