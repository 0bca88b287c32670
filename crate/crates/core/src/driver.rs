//! The trust-region loop.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::criticality::{omega_of_gradients, true_omega, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::problem::{inf_norm, EvaluationDatabase, MOProblem};
use crate::steps::{compute_step, merit, StepConfig, StepResult};
use crate::surrogates::{build_bundle, default_specs, improve_model, BuildContext, ModelSpec, SurrogateBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// Ratio of the decreases of the componentwise maxima.
    Standard,
    /// Smallest per-objective ratio.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoppingConfig {
    pub max_iterations: usize,
    /// Cap on expensive evaluations per objective; `None` derives `1000·n²`.
    pub max_expensive: Option<usize>,
    pub max_crit_loops: usize,
    pub delta_min: f64,
    pub delta_crit: f64,
    pub eps_rel: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        StoppingConfig {
            max_iterations: 100,
            max_expensive: None,
            max_crit_loops: 10,
            delta_min: 1e-6,
            delta_crit: 1e-3,
            eps_rel: 1e-8,
        }
    }
}

impl StoppingConfig {
    pub fn expensive_budget(&self, n: usize) -> usize {
        self.max_expensive.unwrap_or(1000 * n * n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Diagnostics {
    /// Record invariant violations instead of only logging iterations.
    pub validate: bool,
    /// Compute the true criticality at every iterate (not charged to the budget).
    pub true_omega_each_iteration: bool,
    pub true_omega_final: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoConfig {
    pub eps_crit: f64,
    pub mu: f64,
    pub beta_c: f64,
    pub nu_p: f64,
    pub nu_pp: f64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub gamma_downdown: f64,
    pub delta_ub: f64,
    pub delta0: f64,
    pub crit_alpha: f64,
    pub acceptance: Acceptance,
    pub stopping: StoppingConfig,
    pub step: StepConfig,
    /// Model for expensive objectives; cheap objectives use their exact values.
    pub expensive_model: ModelSpec,
    /// Per-objective override of the model specs.
    pub model_specs: Option<Vec<ModelSpec>>,
    pub diagnostics: Diagnostics,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            eps_crit: 1e-3,
            mu: 2e3,
            beta_c: 1e3,
            nu_p: 0.0,
            nu_pp: 0.4,
            gamma_up: 2.0,
            gamma_down: 0.75,
            gamma_downdown: 0.51,
            delta_ub: 0.5,
            delta0: 0.1,
            crit_alpha: 0.5,
            acceptance: Acceptance::Standard,
            stopping: StoppingConfig::default(),
            step: StepConfig::default(),
            expensive_model: ModelSpec::rbf_cubic(),
            model_specs: None,
            diagnostics: Diagnostics::default(),
        }
    }
}

impl AlgoConfig {
    /// Small-budget setting for two-variable demonstrations:
    /// `ν+ = 0.1`, two criticality loops, `Δ_min = 1e-3`, 20 expensive evaluations.
    pub fn params1() -> Self {
        AlgoConfig {
            nu_p: 0.1,
            stopping: StoppingConfig {
                max_crit_loops: 2,
                delta_min: 1e-3,
                max_expensive: Some(20),
                ..StoppingConfig::default()
            },
            ..AlgoConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.eps_crit >= 0.0) {
            return bad("eps_crit must be non-negative");
        }
        if !(self.mu > self.beta_c && self.beta_c > 0.0) {
            return bad("need mu > beta_c > 0");
        }
        if !(self.nu_pp > 0.0 && self.nu_pp <= 1.0 && self.nu_p >= 0.0 && self.nu_p <= self.nu_pp) {
            return bad("need 0 ≤ nu_p ≤ nu_pp ≤ 1 and nu_pp > 0");
        }
        if !(self.gamma_up >= 1.0
            && self.gamma_down < 1.0
            && self.gamma_down >= self.gamma_downdown
            && self.gamma_downdown > 0.0)
        {
            return bad("need gamma_up ≥ 1 > gamma_down ≥ gamma_downdown > 0");
        }
        if !(self.delta_ub > 0.0 && self.delta0 > 0.0 && self.delta0 <= self.delta_ub) {
            return bad("need 0 < delta0 ≤ delta_ub");
        }
        if !(self.crit_alpha > 0.0 && self.crit_alpha < 1.0) {
            return bad("crit_alpha must lie in (0, 1)");
        }
        if self.stopping.max_crit_loops == 0 {
            return bad("max_crit_loops must be positive");
        }
        self.step.validate()?;
        self.expensive_model.validate()?;
        if let Some(specs) = &self.model_specs {
            for s in specs {
                s.validate()?;
            }
        }
        Ok(())
    }

    pub fn specs_for(&self, prob: &MOProblem) -> Result<Vec<ModelSpec>> {
        match &self.model_specs {
            Some(specs) if specs.len() != prob.n_objs() => Err(Error::DimensionMismatch {
                expected: prob.n_objs(),
                got: specs.len(),
            }),
            Some(specs) => Ok(specs.clone()),
            None => Ok(default_specs(prob, self.expensive_model)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Successful,
    ModelImproving,
    Acceptable,
    Inacceptable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Successful => "successful",
            Classification::ModelImproving => "model_improving",
            Classification::Acceptable => "acceptable",
            Classification::Inacceptable => "inacceptable",
        }
    }

    pub fn moves(self) -> bool {
        matches!(self, Classification::Successful | Classification::Acceptable)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustRegionState {
    /// Iterate in scaled coordinates.
    pub x: Vec<f64>,
    pub delta: f64,
    pub t: usize,
    pub last_was_model_improving: bool,
    pub phi_current: f64,
    pub f_current: Vec<f64>,
}

impl TrustRegionState {
    pub fn new(x: Vec<f64>, delta: f64, f: Vec<f64>) -> Self {
        TrustRegionState {
            x,
            delta,
            t: 0,
            last_was_model_improving: false,
            phi_current: merit(&f),
            f_current: f,
        }
    }
}

/// Serializes non-finite values as strings so reports stay valid JSON.
mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&format!("{v}"))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub classification: Classification,
    #[serde(with = "maybe_infinite")]
    pub rho: f64,
    pub omega_m_clamped: f64,
    pub omega_true_clamped: Option<f64>,
    pub delta_before: f64,
    pub delta_after: f64,
    pub step_norm: f64,
    pub expensive_evals_cum: usize,
    pub fully_linear: bool,
    pub criticality_loops: usize,
    /// `Φ` at the iterate before the step.
    pub phi: f64,
    pub model_decrease: f64,
    pub certificate_rhs: f64,
    pub step_fallback: bool,
    pub direction_ratio: Option<f64>,
    pub anomaly: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    BudgetExhausted,
    RadiusMin,
    RadiusCritSmallStep,
    CriticalityLoopCap,
    Error(String),
}

impl StopReason {
    pub fn is_error(&self) -> bool {
        matches!(self, StopReason::Error(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n_vars: usize,
    pub n_objs: usize,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
    /// Final iterate in original coordinates.
    pub final_x: Vec<f64>,
    pub final_f: Vec<f64>,
    pub final_delta: f64,
    pub final_omega_m: f64,
    pub final_omega_true: Option<f64>,
    /// True gradients were not finite at the final iterate; the true
    /// criticality was set to zero.
    pub final_omega_nondifferentiable: bool,
    pub expensive_evals: Vec<usize>,
    pub total_expensive_evals: usize,
    pub stop_reason: StopReason,
    pub violations: Vec<Violation>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One row per iteration: `t,class,rho,omega_m,delta,evals,step_norm`.
    pub fn write_iterations_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "class", "rho", "omega_m", "delta", "evals", "step_norm"])?;
        for r in &self.iterations {
            w.write_record([
                r.t.to_string(),
                r.classification.as_str().to_string(),
                format!("{}", r.rho),
                format!("{}", r.omega_m_clamped),
                format!("{}", r.delta_before),
                r.expensive_evals_cum.to_string(),
                format!("{}", r.step_norm),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ratio of actual to predicted decrease.
pub fn compute_rho(
    f_center: &[f64],
    f_trial: &[f64],
    m_center: &[f64],
    m_trial: &[f64],
    step_is_zero: bool,
    mode: Acceptance,
) -> Result<f64> {
    const TINY: f64 = 1e-15;
    if step_is_zero {
        return Ok(0.0);
    }
    match mode {
        Acceptance::Standard => {
            let den = merit(m_center) - merit(m_trial);
            if !(den > TINY) {
                return Err(Error::DegenerateDenominator(den));
            }
            Ok((merit(f_center) - merit(f_trial)) / den)
        }
        Acceptance::Strict => {
            let mut rho = f64::INFINITY;
            for l in 0..f_center.len() {
                let den = m_center[l] - m_trial[l];
                if !(den > TINY) {
                    return Err(Error::DegenerateDenominator(den));
                }
                rho = rho.min((f_center[l] - f_trial[l]) / den);
            }
            Ok(rho)
        }
    }
}

pub fn classify_iteration(rho: f64, fully_linear: bool, cfg: &AlgoConfig) -> Classification {
    if rho >= cfg.nu_pp {
        Classification::Successful
    } else if !fully_linear {
        Classification::ModelImproving
    } else if rho >= cfg.nu_p {
        Classification::Acceptable
    } else {
        Classification::Inacceptable
    }
}

/// Iterate and radius update after classification.
pub fn update_state(
    state: &TrustRegionState,
    class: Classification,
    rho: f64,
    trial: &[f64],
    f_trial: &[f64],
    cfg: &AlgoConfig,
) -> TrustRegionState {
    let mut next = state.clone();
    next.t += 1;
    next.last_was_model_improving = class == Classification::ModelImproving;
    next.delta = match class {
        Classification::ModelImproving => state.delta,
        Classification::Successful => (cfg.gamma_up * state.delta).min(cfg.delta_ub),
        _ if rho < cfg.nu_p => cfg.gamma_downdown * state.delta,
        _ => cfg.gamma_down * state.delta,
    };
    if class.moves() {
        next.x = trial.to_vec();
        next.f_current = f_trial.to_vec();
        next.phi_current = merit(f_trial);
    }
    next
}

/// Outcome of the criticality routine.
#[derive(Debug, Clone)]
pub struct CriticalityOutcome {
    pub bundle: SurrogateBundle,
    pub delta: f64,
    pub omega_clamped: f64,
    pub loops: usize,
    pub hit_loop_cap: bool,
}

fn model_omega(bundle: &SurrogateBundle, x: &[f64]) -> Result<f64> {
    Ok(omega_of_gradients(&bundle.gradients(x), x, bundle.domain())?.omega_clamped)
}

fn certify(
    mut bundle: SurrogateBundle,
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    max_rounds: usize,
) -> Result<SurrogateBundle> {
    let mut rounds = 0;
    while !bundle.fully_linear() && rounds < max_rounds {
        improve_model(&mut bundle, db, prob)?;
        rounds += 1;
    }
    Ok(bundle)
}

/// Shrinks the radius geometrically until it is small relative to the model
/// criticality, certifying full linearity on each shrunken region.
#[allow(clippy::too_many_arguments)]
pub fn criticality_routine(
    state: &TrustRegionState,
    bundle: SurrogateBundle,
    prob: &MOProblem,
    db: &mut EvaluationDatabase,
    specs: &[ModelSpec],
    cfg: &AlgoConfig,
    seed: u64,
) -> Result<CriticalityOutcome> {
    let delta_star = state.delta;
    let rounds = 3 * (prob.n_vars + 1);
    let mut current = bundle;
    let mut delta = delta_star;
    let mut omega = 0.0;
    let mut hit_loop_cap = false;
    let mut loops = 0;
    for j in 1..=cfg.stopping.max_crit_loops {
        loops = j;
        delta = cfg.crit_alpha.powi(j as i32 - 1) * delta_star;
        if !(j == 1 && current.fully_linear()) {
            let ctx = BuildContext {
                prob,
                center: &state.x,
                radius: delta,
                delta_ub: cfg.delta_ub,
                seed: seed.wrapping_add(j as u64),
            };
            let fresh = if j == 1 { current } else { build_bundle(db, specs, &ctx)? };
            current = certify(fresh, db, prob, rounds)?;
        }
        omega = model_omega(&current, &state.x)?;
        if delta <= cfg.mu * omega {
            break;
        }
        if j == cfg.stopping.max_crit_loops {
            hit_loop_cap = true;
        }
    }
    let delta = delta.max(cfg.beta_c * omega).min(delta_star);
    Ok(CriticalityOutcome {
        bundle: current,
        delta,
        omega_clamped: omega,
        loops,
        hit_loop_cap,
    })
}

/// Inputs to [`check_stopping`].
#[derive(Debug, Clone, Copy)]
pub struct StopCheck {
    pub t: usize,
    pub expensive_evals: usize,
    pub delta: f64,
    pub last_step_norm: Option<f64>,
    pub criticality_cap: bool,
}

pub fn check_stopping(check: &StopCheck, budget: usize, cfg: &AlgoConfig) -> Option<StopReason> {
    let s = &cfg.stopping;
    if check.t >= s.max_iterations {
        return Some(StopReason::MaxIterations);
    }
    if check.expensive_evals >= budget {
        return Some(StopReason::BudgetExhausted);
    }
    if check.delta <= s.delta_min {
        return Some(StopReason::RadiusMin);
    }
    if check.delta <= s.delta_crit && check.last_step_norm.is_some_and(|n| n <= s.eps_rel) {
        return Some(StopReason::RadiusCritSmallStep);
    }
    if check.criticality_cap {
        return Some(StopReason::CriticalityLoopCap);
    }
    None
}

fn stop_reason_for(err: &Error) -> StopReason {
    match err {
        Error::BudgetExhausted { .. } => StopReason::BudgetExhausted,
        other => StopReason::Error(other.to_string()),
    }
}

struct Runner<'a> {
    prob: &'a MOProblem,
    cfg: &'a AlgoConfig,
    specs: Vec<ModelSpec>,
    db: EvaluationDatabase,
    seed: u64,
    budget: usize,
    records: Vec<IterationRecord>,
    violations: Vec<Violation>,
    last_model_omega: f64,
}

impl Runner<'_> {
    fn violation(&mut self, t: usize, kind: &str, detail: String) {
        if self.cfg.diagnostics.validate {
            self.violations.push(Violation {
                t,
                kind: kind.to_string(),
                detail,
            });
        }
    }

    fn true_omega_at(&self, x: &[f64]) -> (Option<f64>, bool) {
        match true_omega(self.prob, x, DEFAULT_FD_STEP) {
            Ok(c) => (Some(c.omega_clamped), false),
            Err(Error::ObjectiveFailure { .. }) => (Some(0.0), true),
            Err(_) => (None, false),
        }
    }

    fn iterate(&mut self, state: &mut TrustRegionState, bundle: &mut Option<SurrogateBundle>) -> Result<Option<StopReason>> {
        let mut last_step_norm = None;
        let mut crit_cap = false;
        let mut mi_streak = 0usize;
        loop {
            let check = StopCheck {
                t: state.t,
                expensive_evals: self.db.expensive_evals(),
                delta: state.delta,
                last_step_norm,
                criticality_cap: crit_cap,
            };
            if let Some(reason) = check_stopping(&check, self.budget, self.cfg) {
                return Ok(Some(reason));
            }
            let t = state.t;
            let iter_seed = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(t as u64);
            let mut current = match bundle.take() {
                Some(mut prev) if state.last_was_model_improving => {
                    improve_model(&mut prev, &mut self.db, self.prob)?;
                    prev
                }
                _ => {
                    let ctx = BuildContext {
                        prob: self.prob,
                        center: &state.x,
                        radius: state.delta,
                        delta_ub: self.cfg.delta_ub,
                        seed: iter_seed,
                    };
                    build_bundle(&mut self.db, &self.specs, &ctx)?
                }
            };
            let delta_before = state.delta;
            let mut omega_m = model_omega(&current, &state.x)?;
            let mut loops = 0;
            if omega_m < self.cfg.eps_crit && (!current.fully_linear() || state.delta > self.cfg.mu * omega_m) {
                let out = criticality_routine(state, current, self.prob, &mut self.db, &self.specs, self.cfg, iter_seed)?;
                current = out.bundle;
                state.delta = out.delta;
                omega_m = out.omega_clamped;
                loops = out.loops;
                crit_cap = out.hit_loop_cap;
            }
            self.last_model_omega = omega_m;
            if crit_cap {
                *bundle = Some(current);
                continue;
            }
            let mut anomaly = None;
            let step = match compute_step(&current, &state.x, state.delta, &self.cfg.step, iter_seed) {
                Ok(s) => s,
                Err(Error::BacktrackExhausted(j)) => {
                    anomaly = Some(format!("backtracking exhausted after {j} reductions; zero step"));
                    zero_step(&current, &state.x)?
                }
                Err(e) => return Err(e),
            };
            let step_norm = inf_norm(&step.step);
            let f_trial = if step.is_zero() {
                state.f_current.clone()
            } else {
                self.db.evaluate_scaled(self.prob, &step.trial)?
            };
            let (rho, degenerate) = match compute_rho(
                &state.f_current,
                &f_trial,
                &step.model_at_center,
                &step.predicted,
                step.is_zero(),
                self.cfg.acceptance,
            ) {
                Ok(r) => (r, false),
                Err(Error::DegenerateDenominator(d)) => {
                    anomaly = Some(format!("degenerate predicted decrease {d:e}"));
                    (f64::NEG_INFINITY, true)
                }
                Err(e) => return Err(e),
            };
            let fully_linear = current.fully_linear();
            let class = if degenerate {
                Classification::Inacceptable
            } else {
                classify_iteration(rho, fully_linear, self.cfg)
            };
            if self.cfg.diagnostics.validate {
                self.check_invariants(t, state, &step, class, &f_trial);
            }
            let next = update_state(state, class, rho, &step.trial, &f_trial, self.cfg);
            mi_streak = if class == Classification::ModelImproving { mi_streak + 1 } else { 0 };
            if mi_streak > 3 * (self.prob.n_vars + 1) {
                self.violation(t, "model_improving_streak", format!("{mi_streak} consecutive model-improving iterations"));
            }
            let omega_true = if self.cfg.diagnostics.true_omega_each_iteration {
                self.true_omega_at(&state.x).0
            } else {
                None
            };
            self.records.push(IterationRecord {
                t,
                classification: class,
                rho,
                omega_m_clamped: omega_m,
                omega_true_clamped: omega_true,
                delta_before,
                delta_after: next.delta,
                step_norm,
                expensive_evals_cum: self.db.expensive_evals(),
                fully_linear,
                criticality_loops: loops,
                phi: state.phi_current,
                model_decrease: step.merit_decrease(),
                certificate_rhs: step.certificate_rhs,
                step_fallback: step.used_fallback,
                direction_ratio: step.direction_ratio,
                anomaly,
            });
            *state = next;
            last_step_norm = Some(step_norm);
            *bundle = if class == Classification::ModelImproving { Some(current) } else { None };
        }
    }

    fn check_invariants(&mut self, t: usize, state: &TrustRegionState, step: &StepResult, class: Classification, f_trial: &[f64]) {
        if !step.certificate_holds() {
            self.violation(
                t,
                "sufficient_decrease",
                format!("decrease {:e} below bound {:e}", step.merit_decrease(), step.certificate_rhs),
            );
        }
        if !self.prob.feasible.internal_domain().contains(&step.trial) {
            self.violation(t, "feasibility", format!("trial {:?} outside the domain", step.trial));
        }
        if state.delta > self.cfg.delta_ub * (1.0 + 1e-12) {
            self.violation(t, "radius_cap", format!("radius {} above cap", state.delta));
        }
        if class.moves() {
            let ok = match self.cfg.acceptance {
                Acceptance::Standard => merit(f_trial) <= state.phi_current,
                Acceptance::Strict => f_trial.iter().zip(&state.f_current).all(|(a, b)| a <= b),
            };
            if !ok {
                self.violation(t, "monotonicity", format!("objective increased on an accepted move at t={t}"));
            }
        }
    }
}

fn zero_step(bundle: &SurrogateBundle, x: &[f64]) -> Result<StepResult> {
    let values = bundle.values(x);
    let crit = omega_of_gradients(&bundle.gradients(x), x, bundle.domain())?;
    Ok(StepResult {
        step: vec![0.0; x.len()],
        trial: x.to_vec(),
        predicted: values.clone(),
        model_at_center: values,
        criticality: crit,
        sigma: 0.0,
        backtracks: 0,
        used_fallback: false,
        direction_ratio: None,
        certificate_rhs: 0.0,
    })
}

/// Runs the trust-region method from `x0` (original coordinates).
///
/// Errors raised after the start point was evaluated end the run with a
/// partial report; only invalid inputs are returned as `Err`.
pub fn run(prob: &MOProblem, cfg: &AlgoConfig, x0: &[f64], seed: u64) -> Result<RunReport> {
    let db = EvaluationDatabase::new(prob);
    run_with_database(prob, cfg, x0, seed, db)
}

/// Like [`run`] but starts from an existing database (e.g. imported samples).
pub fn run_with_database(
    prob: &MOProblem,
    cfg: &AlgoConfig,
    x0: &[f64],
    seed: u64,
    db: EvaluationDatabase,
) -> Result<RunReport> {
    prob.validate()?;
    cfg.validate()?;
    if !prob.feasible.contains(x0) {
        return Err(Error::InfeasiblePoint { site: x0.to_vec() });
    }
    let specs = cfg.specs_for(prob)?;
    let budget = cfg.stopping.expensive_budget(prob.n_vars);
    let mut runner = Runner {
        prob,
        cfg,
        specs,
        db: db.with_budget(Some(budget)),
        seed,
        budget,
        records: Vec::new(),
        violations: Vec::new(),
        last_model_omega: f64::NAN,
    };
    let u0 = prob.feasible.scale_to_unit(x0)?;
    let (state, reason) = match runner.db.evaluate_scaled(prob, &u0) {
        Ok(f0) => {
            let mut state = TrustRegionState::new(u0, cfg.delta0, f0);
            let mut bundle = None;
            let reason = match runner.iterate(&mut state, &mut bundle) {
                Ok(r) => r.unwrap_or(StopReason::MaxIterations),
                Err(e) => stop_reason_for(&e),
            };
            (state, reason)
        }
        Err(e) => {
            let f = prob.eval_all(x0).unwrap_or_else(|_| vec![f64::NAN; prob.n_objs()]);
            (TrustRegionState::new(u0, cfg.delta0, f), stop_reason_for(&e))
        }
    };
    let (final_omega_true, nondiff) = if cfg.diagnostics.true_omega_final {
        runner.true_omega_at(&state.x)
    } else {
        (None, false)
    };
    let final_omega_m = if runner.last_model_omega.is_finite() {
        runner.last_model_omega
    } else {
        f64::NAN
    };
    Ok(RunReport {
        n_vars: prob.n_vars,
        n_objs: prob.n_objs(),
        seed,
        x0: x0.to_vec(),
        iterations: runner.records,
        final_x: prob.feasible.unscale(&state.x)?,
        final_f: state.f_current.clone(),
        final_delta: state.delta,
        final_omega_m: if final_omega_m.is_nan() { 1.0 } else { final_omega_m },
        final_omega_true,
        final_omega_nondifferentiable: nondiff,
        expensive_evals: runner.db.eval_counts().to_vec(),
        total_expensive_evals: runner.db.expensive_evals(),
        stop_reason: reason,
        violations: runner.violations,
    })
}

#[cfg(test)]
mod tests;
