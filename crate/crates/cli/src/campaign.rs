//! Benchmark campaigns over problem × n × model × step × start point, and
//! the aggregate tables computed from their reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use pareto_trm::{AlgoConfig, ExpensivePattern, TestProblemSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::registry::{family, model_spec, start_points, step_kind};
use crate::runner::{execute, read_run, write_run, RunOutput, RunRequest};
use crate::CliError;

/// Runs with final `ω̃` at or below this count as solved.
pub const SOLVED_THRESHOLD: f64 = 0.1;

pub const SUMMARY_HEADER: [&str; 8] = [
    "problem",
    "n",
    "model",
    "step",
    "mean_evals",
    "median_evals",
    "mean_final_omega",
    "solved_frac",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemEntry {
    Name(String),
    Detailed {
        name: String,
        #[serde(default)]
        pattern: Option<ExpensivePattern>,
    },
}

impl ProblemEntry {
    fn name(&self) -> &str {
        match self {
            ProblemEntry::Name(n) | ProblemEntry::Detailed { name: n, .. } => n,
        }
    }

    fn pattern(&self) -> Option<ExpensivePattern> {
        match self {
            ProblemEntry::Name(_) => None,
            ProblemEntry::Detailed { pattern, .. } => *pattern,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Four starts per cell.
    #[default]
    Ci,
    /// Eight starts per cell.
    Full,
}

impl Profile {
    pub fn default_starts(self) -> usize {
        match self {
            Profile::Ci => 4,
            Profile::Full => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub schema: u32,
    pub problems: Vec<ProblemEntry>,
    pub n_values: Vec<usize>,
    pub model_specs: Vec<String>,
    pub step_methods: Vec<String>,
    #[serde(default)]
    pub n_starts_per_cell: Option<usize>,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub algo: AlgoConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid campaign config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn starts(&self) -> usize {
        self.n_starts_per_cell.unwrap_or(self.profile.default_starts())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.schema != 1 {
            return usage(format!("unsupported config schema {}; expected 1", self.schema));
        }
        if self.starts() == 0 {
            return usage("n_starts_per_cell must be at least 1".into());
        }
        if self.problems.is_empty() || self.n_values.is_empty() || self.model_specs.is_empty() || self.step_methods.is_empty() {
            return usage("problems, n_values, model_specs and step_methods must be non-empty".into());
        }
        for p in &self.problems {
            family(p.name())?;
        }
        for m in &self.model_specs {
            model_spec(m)?;
        }
        for s in &self.step_methods {
            step_kind(s)?;
        }
        self.algo.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    /// Problem instances in config order; T6 is two-dimensional whatever
    /// `n_values` says.
    pub fn problem_specs(&self) -> Result<Vec<TestProblemSpec>, CliError> {
        let mut out = Vec::new();
        for p in &self.problems {
            let fam = family(p.name())?;
            let ns: Vec<usize> = if fam == pareto_trm::Family::T6 { vec![2] } else { self.n_values.clone() };
            for n in ns {
                let mut spec = TestProblemSpec::new(fam, n);
                if let Some(pat) = p.pattern() {
                    spec = spec.with_pattern(pat);
                }
                if !out.contains(&spec) {
                    out.push(spec);
                }
            }
        }
        Ok(out)
    }
}

/// A run that could not produce a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub problem: String,
    pub n: usize,
    pub model: String,
    pub step: String,
    pub start_index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub n: usize,
    pub model: String,
    pub step: String,
    pub mean_evals: f64,
    pub median_evals: f64,
    pub mean_final_omega: f64,
    pub solved_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub runs: Vec<RunOutput>,
    pub failures: Vec<FailedRun>,
    pub summary: Vec<SummaryRow>,
}

struct Job {
    spec: TestProblemSpec,
    model: String,
    step: String,
    start_index: usize,
    x0: Vec<f64>,
    seed: u64,
}

fn worker_threads() -> Option<usize> {
    std::env::var("PARETO_TRM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Runs every cell of the campaign; cells that fail are recorded, not fatal.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult, CliError> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    let mut failures = Vec::new();
    for spec in cfg.problem_specs()? {
        let starts = match pareto_trm::make_problem(&spec) {
            Ok(prob) => start_points(cfg.seed, spec.family, &prob, cfg.starts()),
            Err(e) => {
                for model in &cfg.model_specs {
                    for step in &cfg.step_methods {
                        failures.push(FailedRun {
                            problem: spec.family.name().into(),
                            n: spec.n_vars,
                            model: model.clone(),
                            step: step.clone(),
                            start_index: 0,
                            error: e.to_string(),
                        });
                    }
                }
                continue;
            }
        };
        for model in &cfg.model_specs {
            for step in &cfg.step_methods {
                for (i, x0) in starts.iter().enumerate() {
                    jobs.push(Job {
                        spec,
                        model: model.clone(),
                        step: step.clone(),
                        start_index: i,
                        x0: x0.clone(),
                        seed: cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64),
                    });
                }
            }
        }
    }
    let exec = |job: &Job| {
        execute(&RunRequest {
            problem: job.spec,
            model: &job.model,
            step: &job.step,
            algo: &cfg.algo,
            x0: &job.x0,
            seed: job.seed,
            start_index: job.start_index,
        })
        .map_err(|e| e.to_string())
    };
    let results: Vec<Result<RunOutput, String>> = match worker_threads() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?
            .install(|| jobs.par_iter().map(exec).collect()),
        None => jobs.par_iter().map(exec).collect(),
    };
    let mut runs = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        match res {
            Ok(r) => runs.push(r),
            Err(error) => failures.push(FailedRun {
                problem: job.spec.family.name().into(),
                n: job.spec.n_vars,
                model: job.model.clone(),
                step: job.step.clone(),
                start_index: job.start_index,
                error,
            }),
        }
    }
    let summary = summarize_runs(&runs);
    Ok(CampaignResult { runs, failures, summary })
}

fn run_dir(root: &Path, r: &RunOutput) -> PathBuf {
    root.join("runs")
        .join(format!("{}-n{}-{}-{}", r.problem, r.n_vars, r.model, r.step))
        .join(format!("start-{}", r.start_index))
}

/// Writes per-run reports, `summary.csv`, `failures.csv` and `plotdata/`.
pub fn write_campaign(root: &Path, result: &CampaignResult) -> Result<(), CliError> {
    fs::create_dir_all(root)?;
    for r in &result.runs {
        write_run(&run_dir(root, r), r)?;
    }
    write_tables(root, &result.summary)?;
    let mut w = csv::Writer::from_path(root.join("failures.csv"))?;
    w.write_record(["problem", "n", "model", "step", "start", "error"])?;
    for f in &result.failures {
        w.write_record([
            f.problem.clone(),
            f.n.to_string(),
            f.model.clone(),
            f.step.clone(),
            f.start_index.to_string(),
            f.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// Aggregates runs per (problem, n, model, step), rows in key order.
pub fn summarize_runs(runs: &[RunOutput]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(String, usize, String, String), Vec<&RunOutput>> = BTreeMap::new();
    for r in runs {
        cells
            .entry((r.problem.clone(), r.n_vars, r.model.clone(), r.step.clone()))
            .or_default()
            .push(r);
    }
    cells
        .into_iter()
        .map(|((problem, n, model, step), mut rs)| {
            rs.sort_by_key(|r| r.start_index);
            let count = rs.len() as f64;
            let mut evals: Vec<f64> = rs.iter().map(|r| r.report.total_expensive_evals as f64).collect();
            let mean_evals = evals.iter().sum::<f64>() / count;
            evals.sort_by(f64::total_cmp);
            let mean_final_omega = rs.iter().map(|r| r.omega_final).sum::<f64>() / count;
            let solved = rs.iter().filter(|r| r.omega_final <= SOLVED_THRESHOLD).count() as f64;
            SummaryRow {
                problem,
                n,
                model,
                step,
                mean_evals,
                median_evals: median(&evals),
                mean_final_omega,
                solved_frac: solved / count,
            }
        })
        .collect()
}

/// Writes `summary.csv` and one `plotdata/<problem>_<model>_<step>.csv`
/// series (`n,mean_evals`) per problem, model and step.
pub fn write_tables(root: &Path, rows: &[SummaryRow]) -> Result<(), CliError> {
    fs::create_dir_all(root)?;
    let mut w = csv::Writer::from_path(root.join("summary.csv"))?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            r.model.clone(),
            r.step.clone(),
            r.mean_evals.to_string(),
            r.median_evals.to_string(),
            r.mean_final_omega.to_string(),
            r.solved_frac.to_string(),
        ])?;
    }
    w.flush()?;
    let plot = root.join("plotdata");
    if plot.exists() {
        fs::remove_dir_all(&plot)?;
    }
    fs::create_dir_all(&plot)?;
    let mut series: BTreeMap<(String, String, String), Vec<(usize, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry((r.problem.clone(), r.model.clone(), r.step.clone()))
            .or_default()
            .push((r.n, r.mean_evals));
    }
    for ((problem, model, step), mut pts) in series {
        pts.sort_by_key(|p| p.0);
        let mut w = csv::Writer::from_path(plot.join(format!("{problem}_{model}_{step}.csv")))?;
        w.write_record(["n", "mean_evals"])?;
        for (n, y) in pts {
            w.write_record([n.to_string(), y.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn collect_reports(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.path());
    for e in entries {
        let path = e.path();
        if path.is_dir() {
            collect_reports(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "report.json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Recomputes the aggregate tables from every `report.json` below `dir`.
/// Unreadable reports are skipped with a warning on stderr.
pub fn summarize_dir(dir: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let mut paths = Vec::new();
    collect_reports(dir, &mut paths)?;
    let mut runs = Vec::new();
    for p in paths {
        match read_run(&p) {
            Ok(r) => runs.push(r),
            Err(e) => eprintln!("warning: skipping {}: {e}", p.display()),
        }
    }
    Ok(summarize_runs(&runs))
}
