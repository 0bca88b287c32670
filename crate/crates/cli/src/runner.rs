//! Single optimizer runs and their on-disk artifacts.

use std::fs;
use std::path::Path;

use pareto_trm::{make_problem, run, solution_quality, AlgoConfig, RunReport, TestProblemSpec};
use serde::{Deserialize, Serialize};

use crate::registry::{model_spec, step_kind};
use crate::CliError;

/// Contents of `report.json`: the driver report plus what is needed to
/// aggregate it later without re-running.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub problem: String,
    pub n_vars: usize,
    pub model: String,
    pub step: String,
    pub start_index: usize,
    /// Clamped true criticality at the final iterate, 0 where not differentiable.
    pub omega_final: f64,
    pub dist_to_pareto: Option<f64>,
    pub non_differentiable: bool,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct RunRequest<'a> {
    pub problem: TestProblemSpec,
    pub model: &'a str,
    pub step: &'a str,
    pub algo: &'a AlgoConfig,
    pub x0: &'a [f64],
    pub seed: u64,
    pub start_index: usize,
}

/// Resolves names, runs the optimizer and scores the final iterate.
pub fn execute(req: &RunRequest<'_>) -> Result<RunOutput, CliError> {
    let mut cfg = req.algo.clone();
    cfg.expensive_model = model_spec(req.model)?;
    cfg.step.kind = step_kind(req.step)?;
    let prob = make_problem(&req.problem)?;
    let report = run(&prob, &cfg, req.x0, req.seed)?;
    let quality = solution_quality(req.problem.family, &report.final_x, &prob)?;
    Ok(RunOutput {
        problem: req.problem.family.name().to_string(),
        n_vars: req.problem.n_vars,
        model: req.model.to_string(),
        step: req.step.to_string(),
        start_index: req.start_index,
        omega_final: quality.omega_final,
        dist_to_pareto: quality.dist_to_pareto,
        non_differentiable: quality.non_differentiable,
        report,
    })
}

/// Writes `report.json` and `iterations.csv` into `dir`.
pub fn write_run(dir: &Path, out: &RunOutput) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(out)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    let mut csv = Vec::new();
    out.report.write_iterations_csv(&mut csv)?;
    fs::write(dir.join("iterations.csv"), csv)?;
    Ok(())
}

pub fn read_run(path: &Path) -> Result<RunOutput, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
