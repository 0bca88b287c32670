//! Problem definition, feasible sets and the evaluation database.
//!
//! Box-constrained problems are optimized in the unit hypercube: the driver and
//! the surrogate builders only ever see scaled coordinates, while objectives
//! and the database's public `sites` use the caller's original coordinates.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two scaled sites closer than this (∞-norm) are treated as the same point.
pub const CACHE_TOLERANCE: f64 = 1e-14;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Axis-aligned box `[lower, upper]`, used for subsolver domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| v.max(*lo).min(*hi))
            .collect()
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.max(*lo).min(*hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// Largest edge length.
    pub fn max_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    Unconstrained { n: usize },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    pub fn unconstrained(n: usize) -> Self {
        FeasibleSet::Unconstrained { n }
    }

    /// A box; every `upper[i] - lower[i]` must be finite and positive.
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidConfig("box must have at least one dimension".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || hi - lo <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "box bounds [{lo}, {hi}] in coordinate {i} are not a finite nonempty interval"
                )));
            }
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn unit_box(n: usize) -> Self {
        FeasibleSet::Box {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Unconstrained { n } => *n,
            FeasibleSet::Box { lower, .. } => lower.len(),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, FeasibleSet::Box { .. })
    }

    /// The domain the optimizer works in: `[0,1]^n` for boxes, unchanged otherwise.
    pub fn internal_domain(&self) -> FeasibleSet {
        match self {
            FeasibleSet::Unconstrained { n } => FeasibleSet::Unconstrained { n: *n },
            FeasibleSet::Box { lower, .. } => FeasibleSet::unit_box(lower.len()),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Edge lengths of the box (ones when unconstrained).
    pub fn widths(&self) -> Vec<f64> {
        match self {
            FeasibleSet::Unconstrained { n } => vec![1.0; *n],
            FeasibleSet::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(lo, hi)| hi - lo).collect()
            }
        }
    }

    pub fn scale_to_unit(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match self {
            FeasibleSet::Unconstrained { .. } => x.to_vec(),
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
                .collect(),
        })
    }

    /// Inverse of [`scale_to_unit`](Self::scale_to_unit). Images of points in
    /// `[0,1]^n` are clamped into the box so rounding never produces an
    /// infeasible site.
    pub fn unscale(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(u)?;
        Ok(match self {
            FeasibleSet::Unconstrained { .. } => u.to_vec(),
            FeasibleSet::Box { lower, upper } => u
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(t, (lo, hi))| {
                    let v = lo + t * (hi - lo);
                    if (0.0..=1.0).contains(t) {
                        v.max(*lo).min(*hi)
                    } else {
                        v
                    }
                })
                .collect(),
        })
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match self {
            FeasibleSet::Unconstrained { .. } => x.to_vec(),
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (lo, hi))| v.max(*lo).min(*hi))
                .collect(),
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            FeasibleSet::Unconstrained { .. } => true,
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi),
        }
    }

    /// `B(center; radius) ∩ X` for the ∞-norm ball, which is again a box.
    pub fn ball_bounds(&self, center: &[f64], radius: f64) -> Bounds {
        let mut lower: Vec<f64> = center.iter().map(|c| c - radius).collect();
        let mut upper: Vec<f64> = center.iter().map(|c| c + radius).collect();
        if let FeasibleSet::Box { lower: lo, upper: hi } = self {
            for i in 0..lower.len() {
                lower[i] = lower[i].max(lo[i]);
                upper[i] = upper[i].min(hi[i]);
            }
        }
        Bounds { lower, upper }
    }
}

/// One scalar component of the vector objective.
#[derive(Clone)]
pub struct Objective {
    pub name: String,
    pub eval: ScalarFn,
    pub expensive: bool,
    pub gradient: Option<GradientFn>,
}

impl Objective {
    pub fn expensive(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Objective {
            name: name.into(),
            eval: Arc::new(f),
            expensive: true,
            gradient: None,
        }
    }

    pub fn cheap(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Objective {
            name: name.into(),
            eval: Arc::new(f),
            expensive: false,
            gradient: None,
        }
    }

    /// Attaches an analytic gradient; only valid for cheap objectives.
    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("expensive", &self.expensive)
            .field("gradient", &self.gradient.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Heterogeneous,
    FullyExpensive,
    FullyCheap,
}

/// A heterogeneous multiobjective problem `min f(x), x ∈ X`.
#[derive(Debug, Clone)]
pub struct MOProblem {
    pub n_vars: usize,
    pub objectives: Vec<Objective>,
    pub feasible: FeasibleSet,
}

impl MOProblem {
    pub fn new(feasible: FeasibleSet, objectives: Vec<Objective>) -> Result<Self> {
        let prob = MOProblem {
            n_vars: feasible.dim(),
            objectives,
            feasible,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vars == 0 {
            return Err(Error::InvalidConfig("problem needs at least one variable".into()));
        }
        if self.objectives.is_empty() {
            return Err(Error::InvalidConfig("problem needs at least one objective".into()));
        }
        for (i, obj) in self.objectives.iter().enumerate() {
            if obj.expensive && obj.gradient.is_some() {
                return Err(Error::InvalidConfig(format!(
                    "objective {i} ({}) is expensive but has a gradient callback",
                    obj.name
                )));
            }
        }
        Ok(())
    }

    pub fn n_objs(&self) -> usize {
        self.objectives.len()
    }

    pub fn expensive_mask(&self) -> Vec<bool> {
        self.objectives.iter().map(|o| o.expensive).collect()
    }

    pub fn regime(&self) -> Regime {
        let n_exp = self.objectives.iter().filter(|o| o.expensive).count();
        if n_exp == 0 {
            Regime::FullyCheap
        } else if n_exp == self.n_objs() {
            Regime::FullyExpensive
        } else {
            Regime::Heterogeneous
        }
    }

    /// Evaluates every objective at the original-coordinate point `x`.
    pub fn eval_all(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.n_objs());
        for (l, obj) in self.objectives.iter().enumerate() {
            let v = (obj.eval)(x);
            if !v.is_finite() {
                return Err(Error::ObjectiveFailure {
                    objective: l,
                    site: x.to_vec(),
                });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Objective `l` as a function of scaled coordinates.
    pub fn eval_scaled(&self, l: usize, u: &[f64]) -> f64 {
        match self.feasible.unscale(u) {
            Ok(x) => (self.objectives[l].eval)(&x),
            Err(_) => f64::NAN,
        }
    }

    /// Analytic gradient of objective `l` with respect to scaled coordinates.
    pub fn gradient_scaled(&self, l: usize, u: &[f64]) -> Option<Vec<f64>> {
        let grad = self.objectives[l].gradient.as_ref()?;
        let x = self.feasible.unscale(u).ok()?;
        let g = grad(&x);
        let w = self.feasible.widths();
        Some(g.iter().zip(&w).map(|(gi, wi)| gi * wi).collect())
    }
}

/// One stored evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    /// Site in original coordinates.
    pub site: Vec<f64>,
    /// Site in internal (scaled) coordinates.
    pub scaled: Vec<f64>,
    pub values: Vec<f64>,
}

/// Append-only store of evaluated sites with an expensive-evaluation budget.
#[derive(Debug, Clone)]
pub struct EvaluationDatabase {
    feasible: FeasibleSet,
    expensive: Vec<bool>,
    entries: Vec<Entry>,
    eval_counts: Vec<usize>,
    budget: Option<usize>,
}

impl EvaluationDatabase {
    pub fn new(prob: &MOProblem) -> Self {
        EvaluationDatabase {
            feasible: prob.feasible.clone(),
            expensive: prob.expensive_mask(),
            entries: Vec::new(),
            eval_counts: vec![0; prob.n_objs()],
            budget: None,
        }
    }

    /// Caps the number of expensive evaluations; `None` removes the cap.
    pub fn with_budget(mut self, budget: Option<usize>) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Entry {
        &self.entries[i]
    }

    /// Per-objective counts of expensive evaluations (zero for cheap objectives).
    pub fn eval_counts(&self) -> &[usize] {
        &self.eval_counts
    }

    /// Largest per-objective expensive count.
    pub fn expensive_evals(&self) -> usize {
        self.eval_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn has_expensive(&self) -> bool {
        self.expensive.iter().any(|e| *e)
    }

    /// Number of new expensive sites that may still be evaluated.
    pub fn remaining_budget(&self) -> Option<usize> {
        if !self.has_expensive() {
            return None;
        }
        self.budget
            .map(|b| b.saturating_sub(self.expensive_evals()))
    }

    /// Index of a cached site matching the scaled point `u`.
    pub fn lookup_scaled(&self, u: &[f64]) -> Option<usize> {
        self.entries.iter().position(|e| {
            e.scaled
                .iter()
                .zip(u)
                .all(|(a, b)| (a - b).abs() <= CACHE_TOLERANCE)
        })
    }

    /// Evaluates at the original-coordinate point `x`, using the cache when possible.
    pub fn evaluate(&mut self, prob: &MOProblem, x: &[f64]) -> Result<Vec<f64>> {
        let u = self.feasible.scale_to_unit(x)?;
        self.evaluate_impl(prob, x.to_vec(), u)
    }

    /// Evaluates at the scaled point `u`.
    pub fn evaluate_scaled(&mut self, prob: &MOProblem, u: &[f64]) -> Result<Vec<f64>> {
        let x = self.feasible.unscale(u)?;
        self.evaluate_impl(prob, x, u.to_vec())
    }

    /// Like [`evaluate_scaled`](Self::evaluate_scaled) but also reports the entry index.
    pub fn evaluate_scaled_indexed(&mut self, prob: &MOProblem, u: &[f64]) -> Result<(usize, Vec<f64>)> {
        let values = self.evaluate_scaled(prob, u)?;
        let idx = self.lookup_scaled(u).expect("site was just stored");
        Ok((idx, values))
    }

    fn evaluate_impl(&mut self, prob: &MOProblem, x: Vec<f64>, u: Vec<f64>) -> Result<Vec<f64>> {
        if !self.feasible.contains(&x) {
            return Err(Error::InfeasiblePoint { site: x });
        }
        if let Some(i) = self.lookup_scaled(&u) {
            return Ok(self.entries[i].values.clone());
        }
        if let Some(0) = self.remaining_budget() {
            return Err(Error::BudgetExhausted {
                budget: self.budget.unwrap_or(0),
            });
        }
        let values = prob.eval_all(&x)?;
        for (count, exp) in self.eval_counts.iter_mut().zip(&self.expensive) {
            if *exp {
                *count += 1;
            }
        }
        self.entries.push(Entry {
            site: x,
            scaled: u,
            values: values.clone(),
        });
        Ok(values)
    }

    /// Indices of entries with `‖scaled − center‖∞ ≤ radius`, nearest first;
    /// ties keep insertion order.
    pub fn query_ball(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let tol = radius * (1.0 + 1e-12);
        let mut hits: Vec<(f64, usize)> = self
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                let d = inf_dist(&e.scaled, center);
                (d <= tol).then_some((d, i))
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        hits.into_iter().map(|(_, i)| i).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let n = self.feasible.dim();
        let k = self.eval_counts.len();
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = (1..=n)
            .map(|i| format!("x_{i}"))
            .chain((1..=k).map(|l| format!("f_{l}")))
            .collect();
        w.write_record(&header)?;
        for e in &self.entries {
            let row: Vec<String> = e.site.iter().chain(&e.values).map(|v| format!("{v:?}")).collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads prior evaluations. Imported rows do not count against the budget.
    pub fn read_csv<R: Read>(prob: &MOProblem, reader: R) -> Result<Self> {
        let mut db = EvaluationDatabase::new(prob);
        let n = prob.n_vars;
        let k = prob.n_objs();
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() != n + k {
            return Err(Error::Parse(format!(
                "expected {} columns, found {}",
                n + k,
                headers.len()
            )));
        }
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let nums: Vec<f64> = record
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: {e}", row + 1)))
                })
                .collect::<Result<_>>()?;
            let site = nums[..n].to_vec();
            if !db.feasible.contains(&site) {
                return Err(Error::InfeasiblePoint { site });
            }
            let scaled = db.feasible.scale_to_unit(&site)?;
            db.entries.push(Entry {
                site,
                scaled,
                values: nums[n..].to_vec(),
            });
        }
        Ok(db)
    }
}

pub fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn inf_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t6() -> MOProblem {
        let fs = FeasibleSet::new_box(vec![1e-12, 0.0], vec![30.0, 30.0]).unwrap();
        MOProblem::new(
            fs,
            vec![
                Objective::expensive("f1", |x: &[f64]| x[0] + x[0].ln() + x[1] * x[1]),
                Objective::cheap("f2", |x: &[f64]| x[0] * x[0] + x[1].powi(4)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn scale_examples() {
        let fs = FeasibleSet::new_box(vec![0.0], vec![10.0]).unwrap();
        assert_eq!(fs.scale_to_unit(&[5.0]).unwrap(), vec![0.5]);
        assert_eq!(fs.scale_to_unit(&[0.0]).unwrap(), vec![0.0]);

        let t6 = FeasibleSet::new_box(vec![1e-12, 0.0], vec![30.0, 30.0]).unwrap();
        let u = t6.scale_to_unit(&[15.0, 30.0]).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-12);
        assert_eq!(u[1], 1.0);

        let free = FeasibleSet::unconstrained(2);
        assert_eq!(free.scale_to_unit(&[3.0, -7.0]).unwrap(), vec![3.0, -7.0]);
        assert!(matches!(
            fs.scale_to_unit(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn project_examples() {
        let fs = FeasibleSet::unit_box(2);
        assert_eq!(fs.project(&[-1.0, 0.5]).unwrap(), vec![0.0, 0.5]);
        assert_eq!(fs.project(&[2.0, -3.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(fs.project(&[0.25, 0.75]).unwrap(), vec![0.25, 0.75]);
        assert!(fs.project(&[0.0]).is_err());
        let free = FeasibleSet::unconstrained(2);
        assert_eq!(free.project(&[5.0, -5.0]).unwrap(), vec![5.0, -5.0]);
    }

    #[test]
    fn box_validation() {
        assert!(FeasibleSet::new_box(vec![0.0], vec![0.0]).is_err());
        assert!(FeasibleSet::new_box(vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(FeasibleSet::new_box(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn expensive_objective_with_gradient_is_rejected() {
        let obj = Objective::expensive("f", |x: &[f64]| x[0]).with_gradient(|_| vec![1.0]);
        assert!(MOProblem::new(FeasibleSet::unit_box(1), vec![obj]).is_err());
    }

    #[test]
    fn evaluate_t6_and_cache() {
        let prob = t6();
        let mut db = EvaluationDatabase::new(&prob);
        let v = db.evaluate(&prob, &[1.0, 0.0]).unwrap();
        assert_eq!(v, vec![1.0, 1.0]);
        assert_eq!(db.eval_counts(), &[1, 0]);
        let again = db.evaluate(&prob, &[1.0, 0.0]).unwrap();
        assert_eq!(again, v);
        assert_eq!(db.eval_counts(), &[1, 0]);
        assert_eq!(db.len(), 1);
    }

    #[test]
    fn infeasible_point_rejected() {
        let fs = FeasibleSet::unit_box(2);
        let prob = MOProblem::new(fs, vec![Objective::expensive("f", |x: &[f64]| x[0])]).unwrap();
        let mut db = EvaluationDatabase::new(&prob);
        assert!(matches!(
            db.evaluate(&prob, &[-1e-9, 0.5]),
            Err(Error::InfeasiblePoint { .. })
        ));
        assert!(db.is_empty());
    }

    #[test]
    fn objective_failure_carries_site() {
        let prob = MOProblem::new(
            FeasibleSet::unconstrained(1),
            vec![Objective::expensive("f", |x: &[f64]| x[0].ln())],
        )
        .unwrap();
        let mut db = EvaluationDatabase::new(&prob);
        match db.evaluate(&prob, &[-1.0]) {
            Err(Error::ObjectiveFailure { objective, site }) => {
                assert_eq!(objective, 0);
                assert_eq!(site, vec![-1.0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_blocks_new_sites_only() {
        let prob = t6();
        let mut db = EvaluationDatabase::new(&prob).with_budget(Some(1));
        db.evaluate(&prob, &[1.0, 0.0]).unwrap();
        assert!(matches!(
            db.evaluate(&prob, &[2.0, 0.0]),
            Err(Error::BudgetExhausted { budget: 1 })
        ));
        assert!(db.evaluate(&prob, &[1.0, 0.0]).is_ok());
    }

    #[test]
    fn query_ball_orders_by_distance_then_insertion() {
        let prob = MOProblem::new(
            FeasibleSet::unconstrained(2),
            vec![Objective::expensive("f", |x: &[f64]| x[0] + x[1])],
        )
        .unwrap();
        let mut db = EvaluationDatabase::new(&prob);
        assert!(db.query_ball(&[0.0, 0.0], 1.0).is_empty());
        db.evaluate(&prob, &[0.0, 0.0]).unwrap();
        db.evaluate(&prob, &[0.3, 0.0]).unwrap();
        assert_eq!(db.query_ball(&[0.0, 0.0], 0.2), vec![0]);

        db.evaluate(&prob, &[0.1, 0.0]).unwrap();
        db.evaluate(&prob, &[0.0, -0.1]).unwrap();
        db.evaluate(&prob, &[-0.1, 0.05]).unwrap();
        assert_eq!(db.query_ball(&[0.0, 0.0], 0.2), vec![0, 2, 3, 4]);
    }

    #[test]
    fn csv_round_trip() {
        let prob = t6();
        let mut db = EvaluationDatabase::new(&prob);
        db.evaluate(&prob, &[1.0, 0.0]).unwrap();
        db.evaluate(&prob, &[2.5, 3.25]).unwrap();
        let mut buf = Vec::new();
        db.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_1,x_2,f_1,f_2\n"));
        let back = EvaluationDatabase::read_csv(&prob, buf.as_slice()).unwrap();
        assert_eq!(back.entries(), db.entries());
        assert_eq!(back.eval_counts(), &[0, 0]);
    }

    proptest! {
        #[test]
        fn unscale_inverts_scale(
            raw in proptest::collection::vec((-100.0f64..100.0, 0.001f64..50.0, 0.0f64..=1.0), 1..6)
        ) {
            let lower: Vec<f64> = raw.iter().map(|r| r.0).collect();
            let upper: Vec<f64> = raw.iter().map(|r| r.0 + r.1).collect();
            let x: Vec<f64> = raw.iter().map(|r| r.0 + r.2 * r.1).collect();
            let fs = FeasibleSet::new_box(lower, upper).unwrap();
            let back = fs.unscale(&fs.scale_to_unit(&x).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
            let u = fs.scale_to_unit(&x).unwrap();
            prop_assert!(u.iter().all(|t| (-1e-15..=1.0 + 1e-15).contains(t)));
        }

        #[test]
        fn projection_is_idempotent(x in proptest::collection::vec(-3.0f64..3.0, 3)) {
            let fs = FeasibleSet::new_box(vec![-1.0, 0.0, 0.5], vec![1.0, 2.0, 0.75]).unwrap();
            let p = fs.project(&x).unwrap();
            prop_assert!(fs.contains(&p));
            prop_assert_eq!(fs.project(&p).unwrap(), p);
        }
    }
}
