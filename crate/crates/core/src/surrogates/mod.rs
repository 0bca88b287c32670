//! Surrogate models of the objectives inside the trust region.
//!
//! All models live in scaled coordinates. Objectives that share a
//! [`ModelSpec`] share their interpolation geometry; only the fitted
//! coefficients differ.

mod exact;
mod kernels;
mod lagrange;
mod rbf;
mod taylor;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::problem::{EvaluationDatabase, FeasibleSet, MOProblem};
use crate::sampling::Halton;
use crate::subsolvers::DenseMatrix;

pub use exact::ExactModel;
pub use kernels::{adaptive_shape, RbfKernel};
pub use lagrange::{monomial_count, LagrangeGeometry, PolyModel};
pub use rbf::{RbfGeometry, RbfModel};
pub use taylor::LinearModel;

/// Default proportionality constant of the adaptive shape parameter.
pub const DEFAULT_C_ALPHA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ShapeParameter {
    Fixed { alpha: f64 },
    /// `α = clamp(c_alpha / Δ, alpha_lo, alpha_hi)`.
    Adaptive { c_alpha: f64, alpha_lo: f64, alpha_hi: f64 },
}

impl ShapeParameter {
    pub fn adaptive() -> Self {
        ShapeParameter::Adaptive {
            c_alpha: DEFAULT_C_ALPHA,
            alpha_lo: 1e-2,
            alpha_hi: 1e3,
        }
    }

    pub fn alpha(&self, radius: f64) -> f64 {
        match *self {
            ShapeParameter::Fixed { alpha } => alpha,
            ShapeParameter::Adaptive { c_alpha, alpha_lo, alpha_hi } => {
                adaptive_shape(radius, c_alpha, alpha_lo, alpha_hi)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// The true (cheap) objective.
    ExactCheap,
    /// Linear model from forward or central differences.
    TaylorFd1 { fd_step: f64 },
    /// Fully determined polynomial interpolation of degree 1 or 2.
    Lagrange { degree: u8 },
    Rbf {
        kernel: RbfKernel,
        tail_degree: u8,
        shape: ShapeParameter,
    },
}

/// How one objective is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Radius factor of the region searched for an affinely independent set.
    pub theta1: f64,
    /// Radius factor (relative to `Δ^ub`) of the region searched for extra points.
    pub theta2: f64,
    /// Target poisedness constant for polynomial models.
    pub lambda_poised: f64,
    /// Total interpolation-point cap for RBF models; `None` selects the
    /// dimension-dependent default.
    pub max_points: Option<usize>,
    pub pivot_threshold: f64,
    /// Allows RBF models built from points outside the `θ1·Δ` region, which
    /// are then flagged as not fully linear instead of being completed.
    pub relaxed: bool,
}

impl ModelSpec {
    fn with_kind(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            theta1: 2.0,
            theta2: 5.0,
            lambda_poised: 1.5,
            max_points: None,
            pivot_threshold: 1e-4,
            relaxed: false,
        }
    }

    pub fn exact() -> Self {
        Self::with_kind(ModelKind::ExactCheap)
    }

    pub fn taylor_fd1() -> Self {
        Self::with_kind(ModelKind::TaylorFd1 { fd_step: 1e-6 })
    }

    pub fn lagrange(degree: u8) -> Self {
        Self::with_kind(ModelKind::Lagrange { degree })
    }

    pub fn rbf(kernel: RbfKernel, tail_degree: u8, shape: ShapeParameter) -> Self {
        Self::with_kind(ModelKind::Rbf {
            kernel,
            tail_degree,
            shape,
        })
    }

    pub fn rbf_cubic() -> Self {
        Self::rbf(RbfKernel::Cubic, 1, ShapeParameter::Fixed { alpha: 1.0 })
    }

    pub fn relaxed(mut self, relaxed: bool) -> Self {
        self.relaxed = relaxed;
        self
    }

    /// Point cap of RBF models in dimension `n`.
    pub fn rbf_point_cap(&self, n: usize) -> usize {
        self.max_points.unwrap_or(if n <= 10 { (n + 1) * (n + 2) / 2 } else { 2 * n + 1 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.theta1 >= 1.0) || !(self.theta2 >= self.theta1) {
            return bad("need 1 ≤ theta1 ≤ theta2");
        }
        if !(self.lambda_poised > 1.0) {
            return bad("lambda_poised must exceed 1");
        }
        if !(self.pivot_threshold > 0.0) {
            return bad("pivot_threshold must be positive");
        }
        match self.kind {
            ModelKind::ExactCheap => Ok(()),
            ModelKind::TaylorFd1 { fd_step } => {
                if fd_step > 0.0 && fd_step < 1.0 {
                    Ok(())
                } else {
                    bad("fd_step must lie in (0, 1)")
                }
            }
            ModelKind::Lagrange { degree } => {
                if degree == 1 || degree == 2 {
                    Ok(())
                } else {
                    bad("Lagrange degree must be 1 or 2")
                }
            }
            ModelKind::Rbf {
                kernel,
                tail_degree,
                shape,
            } => {
                if tail_degree > 1 || tail_degree < kernel.min_tail_degree() {
                    return bad("unsupported RBF tail degree for this kernel");
                }
                if let ShapeParameter::Fixed { alpha } = shape {
                    if !(alpha > 0.0) {
                        return bad("shape parameter must be positive");
                    }
                }
                if let ShapeParameter::Adaptive { c_alpha, alpha_lo, alpha_hi } = shape {
                    if !(c_alpha > 0.0 && alpha_lo > 0.0 && alpha_hi >= alpha_lo) {
                        return bad("invalid adaptive shape parameters");
                    }
                }
                if let Some(m) = self.max_points {
                    if m == 0 {
                        return bad("max_points must be positive");
                    }
                }
                Ok(())
            }
        }
    }
}

/// Per-objective specs: exact models for cheap objectives, `expensive_spec`
/// for the rest.
pub fn default_specs(prob: &MOProblem, expensive_spec: ModelSpec) -> Vec<ModelSpec> {
    prob.objectives
        .iter()
        .map(|o| if o.expensive { expensive_spec } else { ModelSpec::exact() })
        .collect()
}

/// One scalar surrogate in scaled coordinates.
#[derive(Debug, Clone)]
pub enum ScalarModel {
    Exact(ExactModel),
    Linear(LinearModel),
    Poly(PolyModel),
    Rbf(RbfModel),
}

impl ScalarModel {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ScalarModel::Exact(m) => m.value(x),
            ScalarModel::Linear(m) => m.value(x),
            ScalarModel::Poly(m) => m.value(x),
            ScalarModel::Rbf(m) => m.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ScalarModel::Exact(m) => m.gradient(x),
            ScalarModel::Linear(m) => m.gradient.clone(),
            ScalarModel::Poly(m) => m.gradient(x),
            ScalarModel::Rbf(m) => m.gradient(x),
        }
    }

    pub fn hessian(&self, x: &[f64]) -> DenseMatrix {
        match self {
            ScalarModel::Exact(m) => m.hessian(x),
            ScalarModel::Linear(m) => DenseMatrix::zeros(m.gradient.len(), m.gradient.len()),
            ScalarModel::Poly(m) => m.hessian(),
            ScalarModel::Rbf(m) => m.hessian(x),
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            ScalarModel::Exact(_) => "exact",
            ScalarModel::Linear(_) => "linear",
            ScalarModel::Poly(_) => "polynomial",
            ScalarModel::Rbf(_) => "rbf",
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match self {
            ScalarModel::Exact(m) => json!({ "objective": m.objective_index() }),
            ScalarModel::Linear(m) => json!({
                "center": m.center,
                "value": m.value_at_center,
                "gradient": m.gradient,
            }),
            ScalarModel::Poly(m) => m.to_json(),
            ScalarModel::Rbf(m) => m.to_json(),
        };
        json!({ "kind": self.kind_name(), "model": body })
    }
}

#[derive(Debug, Clone)]
enum GroupGeometry {
    Exact,
    Taylor { sites: Vec<usize> },
    Lagrange(LagrangeGeometry),
    Rbf(RbfGeometry),
}

/// Objectives modeled with the same spec.
#[derive(Debug, Clone)]
struct ModelGroup {
    spec: ModelSpec,
    members: Vec<usize>,
    geometry: GroupGeometry,
}

impl ModelGroup {
    fn fully_linear(&self) -> bool {
        match &self.geometry {
            GroupGeometry::Exact | GroupGeometry::Taylor { .. } => true,
            GroupGeometry::Lagrange(g) => g.fully_linear,
            GroupGeometry::Rbf(g) => g.fully_linear,
        }
    }

    fn quality(&self) -> f64 {
        match &self.geometry {
            GroupGeometry::Exact | GroupGeometry::Taylor { .. } => 1.0,
            GroupGeometry::Lagrange(g) => 1.0 / g.lambda.max(1.0),
            GroupGeometry::Rbf(g) => g.min_pivot,
        }
    }

    fn training_sites(&self) -> Vec<usize> {
        match &self.geometry {
            GroupGeometry::Exact => Vec::new(),
            GroupGeometry::Taylor { sites } => sites.clone(),
            GroupGeometry::Lagrange(g) => g.db_idx.clone(),
            GroupGeometry::Rbf(g) => g.all_indices(),
        }
    }
}

/// Vector of scalar surrogates for all objectives at one trust-region center.
#[derive(Debug, Clone)]
pub struct SurrogateBundle {
    pub models: Vec<ScalarModel>,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Bound on the spectral norm of every model Hessian over the trust region,
    /// already floored and clamped for use in the sufficient-decrease certificate.
    pub hessian_bound: f64,
    /// Expensive evaluations spent on this bundle (build plus improvements).
    pub new_sites: usize,
    groups: Vec<ModelGroup>,
    domain: FeasibleSet,
    seed: u64,
}

impl SurrogateBundle {
    pub fn n_objs(&self) -> usize {
        self.models.len()
    }

    /// True when every model carries a fully-linear certificate.
    pub fn fully_linear(&self) -> bool {
        self.groups.iter().all(|g| g.fully_linear())
    }

    pub fn fully_linear_flags(&self) -> Vec<bool> {
        let mut flags = vec![true; self.models.len()];
        for g in &self.groups {
            for &m in &g.members {
                flags[m] = g.fully_linear();
            }
        }
        flags
    }

    /// Smallest geometry-quality score over all groups (larger is better).
    pub fn geometry_score(&self) -> f64 {
        self.groups.iter().map(|g| g.quality()).fold(f64::INFINITY, f64::min)
    }

    /// Database indices of all interpolation sites, sorted and deduplicated.
    pub fn training_indices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.groups.iter().flat_map(|g| g.training_sites()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.value(x)).collect()
    }

    pub fn gradients(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.models.iter().map(|m| m.gradient(x)).collect()
    }

    /// The scaled domain the models are defined on.
    pub fn domain(&self) -> &FeasibleSet {
        &self.domain
    }

    pub fn to_json(&self, db: &EvaluationDatabase) -> Value {
        let sites: Vec<&Vec<f64>> = self
            .training_indices()
            .into_iter()
            .map(|i| &db.entry(i).scaled)
            .collect();
        json!({
            "center": self.center,
            "radius": self.radius,
            "fully_linear": self.fully_linear(),
            "hessian_bound": self.hessian_bound,
            "training_sites": sites,
            "models": self.models.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Inputs shared by every model builder.
#[derive(Debug, Clone, Copy)]
pub struct BuildContext<'a> {
    pub prob: &'a MOProblem,
    /// Trust-region center in scaled coordinates.
    pub center: &'a [f64],
    pub radius: f64,
    pub delta_ub: f64,
    pub seed: u64,
}

/// Builds surrogates for every objective at `ctx.center`.
///
/// Expensive evaluations happen only inside `X ∩ B(center; θ1·Δ)`; existing
/// database points are reused whenever the geometry allows it.
pub fn build_bundle(
    db: &mut EvaluationDatabase,
    specs: &[ModelSpec],
    ctx: &BuildContext<'_>,
) -> Result<SurrogateBundle> {
    let prob = ctx.prob;
    if specs.len() != prob.n_objs() {
        return Err(Error::DimensionMismatch {
            expected: prob.n_objs(),
            got: specs.len(),
        });
    }
    if ctx.center.len() != prob.n_vars {
        return Err(Error::DimensionMismatch {
            expected: prob.n_vars,
            got: ctx.center.len(),
        });
    }
    if !(ctx.radius > 0.0) {
        return Err(Error::InvalidConfig("trust-region radius must be positive".into()));
    }
    let domain = prob.feasible.internal_domain();
    if !domain.contains(ctx.center) {
        return Err(Error::InfeasiblePoint {
            site: ctx.center.to_vec(),
        });
    }
    for (l, spec) in specs.iter().enumerate() {
        spec.validate()?;
        if spec.kind == ModelKind::ExactCheap && prob.objectives[l].expensive {
            return Err(Error::InvalidConfig(format!(
                "objective {l} is expensive and cannot use the exact model"
            )));
        }
    }
    let evals_before = db.expensive_evals();
    if db.has_expensive() {
        db.evaluate_scaled(prob, ctx.center)?;
    }

    let mut groups: Vec<ModelGroup> = Vec::new();
    for (l, spec) in specs.iter().enumerate() {
        match groups.iter_mut().find(|g| g.spec == *spec) {
            Some(g) => g.members.push(l),
            None => groups.push(ModelGroup {
                spec: *spec,
                members: vec![l],
                geometry: GroupGeometry::Exact,
            }),
        }
    }
    for (gi, group) in groups.iter_mut().enumerate() {
        let seed = ctx.seed.wrapping_add(gi as u64 * 7919);
        group.geometry = match group.spec.kind {
            ModelKind::ExactCheap => GroupGeometry::Exact,
            ModelKind::TaylorFd1 { fd_step } => GroupGeometry::Taylor {
                sites: taylor::fd_sites(db, prob, &domain, ctx.center, ctx.radius, fd_step)?,
            },
            ModelKind::Lagrange { degree } => GroupGeometry::Lagrange(lagrange::build_geometry(
                db, prob, &group.spec, degree, ctx, seed,
            )?),
            ModelKind::Rbf { .. } => {
                GroupGeometry::Rbf(rbf::select_points(db, prob, &group.spec, ctx)?)
            }
        };
    }

    let mut bundle = SurrogateBundle {
        models: Vec::new(),
        center: ctx.center.to_vec(),
        radius: ctx.radius,
        hessian_bound: 0.0,
        new_sites: 0,
        groups,
        domain,
        seed: ctx.seed,
    };
    refit(&mut bundle, db, prob)?;
    bundle.new_sites = db.expensive_evals() - evals_before;
    Ok(bundle)
}

/// Fits coefficients for all groups and recomputes the Hessian bound.
fn refit(bundle: &mut SurrogateBundle, db: &EvaluationDatabase, prob: &MOProblem) -> Result<()> {
    let k = prob.n_objs();
    let mut models: Vec<Option<ScalarModel>> = vec![None; k];
    for group in &mut bundle.groups {
        for &l in &group.members {
            let model = match &mut group.geometry {
                GroupGeometry::Exact => ScalarModel::Exact(ExactModel::new(prob, l)),
                GroupGeometry::Taylor { sites } => {
                    ScalarModel::Linear(taylor::fit(db, sites, &bundle.center, l))
                }
                GroupGeometry::Lagrange(g) => ScalarModel::Poly(g.fit(db, l)),
                GroupGeometry::Rbf(g) => ScalarModel::Rbf(g.fit(db, l)?),
            };
            models[l] = Some(model);
        }
    }
    bundle.models = models.into_iter().map(|m| m.expect("every objective belongs to a group")).collect();
    bundle.hessian_bound = hessian_bound(bundle, db);
    Ok(())
}

/// Outcome of one [`improve_model`] pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImproveOutcome {
    pub new_sites: usize,
    pub quality_before: f64,
    pub quality_after: f64,
    pub fully_linear: bool,
}

/// One model-improvement pass: at most `3(n+1)` geometry repair actions per
/// objective group that lacks a fully-linear certificate.
pub fn improve_model(
    bundle: &mut SurrogateBundle,
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
) -> Result<ImproveOutcome> {
    let quality_before = bundle.geometry_score();
    let evals_before = db.expensive_evals();
    let max_actions = 3 * (prob.n_vars + 1);
    let ctx_center = bundle.center.clone();
    for (gi, group) in bundle.groups.iter_mut().enumerate() {
        if group.fully_linear() {
            continue;
        }
        let seed = bundle.seed.wrapping_add(gi as u64 * 7919).wrapping_add(1);
        match &mut group.geometry {
            GroupGeometry::Exact | GroupGeometry::Taylor { .. } => {}
            GroupGeometry::Lagrange(g) => g.repair(db, prob, &group.spec, max_actions, seed)?,
            GroupGeometry::Rbf(g) => {
                let ctx = BuildContext {
                    prob,
                    center: &ctx_center,
                    radius: bundle.radius,
                    delta_ub: g.delta_ub,
                    seed,
                };
                *g = rbf::complete_points(db, prob, &group.spec, &ctx, max_actions)?;
            }
        }
    }
    refit(bundle, db, prob)?;
    let added = db.expensive_evals() - evals_before;
    bundle.new_sites += added;
    Ok(ImproveOutcome {
        new_sites: added,
        quality_before,
        quality_after: bundle.geometry_score(),
        fully_linear: bundle.fully_linear(),
    })
}

/// Minimum admissible Hessian bound before clamping.
pub const HESSIAN_FLOOR: f64 = 1e-8;

/// Upper estimate of `max_ℓ sup_{x ∈ B^t} ‖∇²m_ℓ(x)‖`, floored at
/// [`HESSIAN_FLOOR`] and raised to at least `1.01 / k`.
fn hessian_bound(bundle: &SurrogateBundle, db: &EvaluationDatabase) -> f64 {
    let region = bundle.domain.ball_bounds(&bundle.center, bundle.radius);
    let n = bundle.center.len();
    let mut bound: f64 = 0.0;
    let mut samples: Option<Vec<Vec<f64>>> = None;
    let mut sample_points = |count: usize, extra: &[usize]| -> Vec<Vec<f64>> {
        let base = samples.get_or_insert_with(|| {
            let mut h = Halton::new(n, bundle.seed ^ 0x5eed);
            (0..100).map(|_| h.next_in_box(&region.lower, &region.upper)).collect()
        });
        let mut pts = vec![bundle.center.clone()];
        pts.extend(base.iter().take(count).cloned());
        pts.extend(extra.iter().map(|&i| db.entry(i).scaled.clone()));
        pts
    };
    for group in &bundle.groups {
        for &l in &group.members {
            let h = match (&bundle.models[l], &group.geometry) {
                (ScalarModel::Linear(_), _) => 0.0,
                (ScalarModel::Poly(m), _) => m.hessian().frobenius_norm(),
                (ScalarModel::Rbf(m), GroupGeometry::Rbf(g)) => {
                    let pts = sample_points(100, &g.all_indices());
                    1.1 * pts
                        .iter()
                        .map(|p| m.hessian(p).frobenius_norm())
                        .fold(0.0, f64::max)
                }
                (model, _) => {
                    let pts = sample_points(20, &[]);
                    1.1 * pts
                        .iter()
                        .map(|p| model.hessian(p).frobenius_norm())
                        .filter(|v| v.is_finite())
                        .fold(0.0, f64::max)
                }
            };
            bound = bound.max(h);
        }
    }
    let k = bundle.models.len().max(1) as f64;
    bound.max(HESSIAN_FLOOR).max(1.01 / k)
}
