//! Scalable benchmark problems with known Pareto sets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criticality::{true_omega, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::problem::{FeasibleSet, MOProblem, Objective};

/// Lower bound of the first variable of T6, keeps `ln(x₁)` defined.
pub const T6_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    T6,
    ZDT1,
    ZDT2,
    ZDT3,
    DTLZ1,
    DTLZ6,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::T6,
        Family::ZDT1,
        Family::ZDT2,
        Family::ZDT3,
        Family::DTLZ1,
        Family::DTLZ6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::T6 => "T6",
            Family::ZDT1 => "ZDT1",
            Family::ZDT2 => "ZDT2",
            Family::ZDT3 => "ZDT3",
            Family::DTLZ1 => "DTLZ1",
            Family::DTLZ6 => "DTLZ6",
        }
    }

    /// Number of objectives for `n` variables.
    pub fn n_objs(self, n: usize) -> usize {
        match self {
            Family::T6 | Family::ZDT1 | Family::ZDT2 | Family::ZDT3 => 2,
            Family::DTLZ1 | Family::DTLZ6 => dtlz_objectives(n),
        }
    }

    /// The heterogeneity pattern used in the benchmarks: T6 has an expensive
    /// first objective, everything else a cheap first objective.
    pub fn default_pattern(self) -> ExpensivePattern {
        match self {
            Family::T6 => ExpensivePattern::FirstExpensiveRestCheap,
            _ => ExpensivePattern::FirstCheapRestExpensive,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::InvalidConfig(format!("unknown problem `{s}`; known: {}", names.join(", ")))
            })
    }
}

/// `k = max(2, n − 4)`.
pub fn dtlz_objectives(n: usize) -> usize {
    n.saturating_sub(4).max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExpensivePattern {
    FirstCheapRestExpensive,
    FirstExpensiveRestCheap,
    AllExpensive,
}

impl ExpensivePattern {
    fn is_expensive(self, l: usize) -> bool {
        match self {
            ExpensivePattern::FirstCheapRestExpensive => l > 0,
            ExpensivePattern::FirstExpensiveRestCheap => l == 0,
            ExpensivePattern::AllExpensive => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestProblemSpec {
    pub family: Family,
    pub n_vars: usize,
    pub pattern: ExpensivePattern,
}

impl TestProblemSpec {
    pub fn new(family: Family, n_vars: usize) -> Self {
        Self {
            family,
            n_vars,
            pattern: family.default_pattern(),
        }
    }

    pub fn with_pattern(mut self, pattern: ExpensivePattern) -> Self {
        self.pattern = pattern;
        self
    }

    pub fn n_objs(&self) -> usize {
        self.family.n_objs(self.n_vars)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars;
        let ok = match self.family {
            Family::T6 => n == 2,
            Family::ZDT1 | Family::ZDT2 | Family::ZDT3 => n >= 2,
            Family::DTLZ1 | Family::DTLZ6 => n >= 2 && n >= dtlz_objectives(n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(format!("{} with n = {n}", self.family)))
        }
    }
}

// Objective formulas in original coordinates.

pub fn t6(x: &[f64]) -> [f64; 2] {
    [x[0] + x[0].ln() + x[1] * x[1], x[0] * x[0] + x[1].powi(4)]
}

fn zdt_g(x: &[f64]) -> f64 {
    1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64
}

pub fn zdt(family: Family, x: &[f64]) -> [f64; 2] {
    let f1 = x[0];
    let g = zdt_g(x);
    let r = f1 / g;
    let h = match family {
        Family::ZDT1 => 1.0 - r.sqrt(),
        Family::ZDT2 => 1.0 - r * r,
        Family::ZDT3 => 1.0 - r.sqrt() - r * (10.0 * PI * f1).sin(),
        _ => unreachable!("not a ZDT family"),
    };
    [f1, g * h]
}

fn dtlz1_g(x: &[f64], m: usize) -> f64 {
    let tail = &x[m - 1..];
    let s: f64 = tail
        .iter()
        .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
        .sum();
    100.0 * (tail.len() as f64 + s)
}

/// Objective `l` (0-based) of DTLZ1 with `m` objectives.
pub fn dtlz1(x: &[f64], m: usize, l: usize) -> f64 {
    let g = dtlz1_g(x, m);
    let keep = m - 1 - l;
    let mut v = 0.5 * (1.0 + g);
    v *= x[..keep].iter().product::<f64>();
    if l > 0 {
        v *= 1.0 - x[keep];
    }
    v
}

fn dtlz1_f1_gradient(x: &[f64], m: usize) -> Vec<f64> {
    let g = dtlz1_g(x, m);
    let head = &x[..m - 1];
    let prod: f64 = head.iter().product();
    let mut grad = vec![0.0; x.len()];
    for i in 0..m - 1 {
        let others: f64 = head.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).product();
        grad[i] = 0.5 * (1.0 + g) * others;
    }
    for i in m - 1..x.len() {
        let d = x[i] - 0.5;
        grad[i] = 0.5 * prod * 100.0 * (2.0 * d + 20.0 * PI * (20.0 * PI * d).sin());
    }
    grad
}

/// Objective `l` (0-based) of DTLZ6 with `m` objectives.
pub fn dtlz6(x: &[f64], m: usize, l: usize) -> f64 {
    let g: f64 = x[m - 1..].iter().map(|v| v.powf(0.1)).sum();
    let theta = |i: usize| {
        if i == 0 {
            x[0] * PI / 2.0
        } else {
            PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[i])
        }
    };
    let keep = m - 1 - l;
    let mut v = 1.0 + g;
    for i in 0..keep {
        v *= theta(i).cos();
    }
    if l > 0 {
        v *= theta(keep).sin();
    }
    v
}

/// Build the problem instance for `spec`.
pub fn make_problem(spec: &TestProblemSpec) -> Result<MOProblem> {
    spec.validate()?;
    let n = spec.n_vars;
    let m = spec.n_objs();
    let pattern = spec.pattern;
    let family = spec.family;
    let feasible = match family {
        Family::T6 => FeasibleSet::new_box(vec![T6_EPS, 0.0], vec![30.0, 30.0])?,
        _ => FeasibleSet::unit_box(n),
    };
    let mut objectives = Vec::with_capacity(m);
    for l in 0..m {
        let name = format!("f{}", l + 1);
        let eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync> = match family {
            Family::T6 => Box::new(move |x: &[f64]| t6(x)[l]),
            Family::ZDT1 | Family::ZDT2 | Family::ZDT3 => Box::new(move |x: &[f64]| zdt(family, x)[l]),
            Family::DTLZ1 => Box::new(move |x: &[f64]| dtlz1(x, m, l)),
            Family::DTLZ6 => Box::new(move |x: &[f64]| dtlz6(x, m, l)),
        };
        let f = move |x: &[f64]| eval(x);
        if pattern.is_expensive(l) {
            objectives.push(Objective::expensive(name, f));
            continue;
        }
        let obj = Objective::cheap(name, f);
        let obj = match (family, l) {
            (Family::T6, 0) => obj.with_gradient(|x: &[f64]| vec![1.0 + 1.0 / x[0], 2.0 * x[1]]),
            (Family::T6, _) => obj.with_gradient(|x: &[f64]| vec![2.0 * x[0], 4.0 * x[1].powi(3)]),
            (Family::ZDT1 | Family::ZDT2 | Family::ZDT3, 0) => obj.with_gradient(move |_: &[f64]| {
                let mut g = vec![0.0; n];
                g[0] = 1.0;
                g
            }),
            (Family::DTLZ1, 0) => obj.with_gradient(move |x: &[f64]| dtlz1_f1_gradient(x, m)),
            _ => obj,
        };
        objectives.push(obj);
    }
    MOProblem::new(feasible, objectives)
}

/// Convex bi-objective helper `f₁ = ‖x‖², f₂ = ‖x − b‖²` with
/// `b = (1, 1/2, …, 1/n)`, unconstrained. The Pareto set is the segment `[0, b]`.
pub fn convex_pair(n: usize, cheap: bool) -> MOProblem {
    let b: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
    let mk = |name: &str, a: Vec<f64>| {
        let a2 = a.clone();
        let f = move |x: &[f64]| x.iter().zip(&a).map(|(xi, ai)| (xi - ai).powi(2)).sum::<f64>();
        if cheap {
            Objective::cheap(name, f)
                .with_gradient(move |x: &[f64]| x.iter().zip(&a2).map(|(xi, ai)| 2.0 * (xi - ai)).collect())
        } else {
            Objective::expensive(name, f)
        }
    };
    MOProblem::new(FeasibleSet::unconstrained(n), vec![mk("f1", vec![0.0; n]), mk("f2", b)])
        .expect("valid convex pair")
}

/// ∞-distance from `x` to the Euclidean projection of `x` onto the Pareto
/// segment of [`convex_pair`].
pub fn convex_pair_distance(x: &[f64]) -> f64 {
    let b: Vec<f64> = (0..x.len()).map(|i| 1.0 / (i + 1) as f64).collect();
    let bb: f64 = b.iter().map(|v| v * v).sum();
    let t = (x.iter().zip(&b).map(|(u, v)| u * v).sum::<f64>() / bb).clamp(0.0, 1.0);
    x.iter().zip(&b).map(|(u, v)| (u - t * v).abs()).fold(0.0, f64::max)
}

/// ∞-distance in original coordinates from `x` to the Pareto set, where the
/// set is known in closed form.
pub fn pareto_distance(family: Family, x: &[f64]) -> Option<f64> {
    let n = x.len();
    match family {
        Family::T6 => Some((x[0] - T6_EPS).abs().max(x[1].abs())),
        Family::ZDT1 | Family::ZDT2 => Some(x[1..].iter().fold(0.0, |a, v| a.max(v.abs()))),
        // The ZDT3 set is a disconnected subset of the ZDT1 set.
        Family::ZDT3 => None,
        Family::DTLZ1 => {
            let m = dtlz_objectives(n);
            Some(x[m - 1..].iter().fold(0.0, |a, v| a.max((v - 0.5).abs())))
        }
        Family::DTLZ6 => {
            let m = dtlz_objectives(n);
            Some(x[m - 1..].iter().fold(0.0, |a, v| a.max(v.abs())))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionQuality {
    /// `ω̃` of the true problem in scaled coordinates, 0 where not differentiable.
    pub omega_final: f64,
    pub dist_to_pareto: Option<f64>,
    pub non_differentiable: bool,
}

/// Final-solution quality of `x_final` (original coordinates).
pub fn solution_quality(family: Family, x_final: &[f64], prob: &MOProblem) -> Result<SolutionQuality> {
    let u = prob.feasible.scale_to_unit(x_final)?;
    let u = prob.feasible.internal_domain().project(&u)?;
    let (omega_final, non_differentiable) = match true_omega(prob, &u, DEFAULT_FD_STEP) {
        Ok(r) => (r.omega_clamped.max(0.0), false),
        Err(Error::ObjectiveFailure { .. }) => (0.0, true),
        Err(e) => return Err(e),
    };
    Ok(SolutionQuality {
        omega_final,
        dist_to_pareto: pareto_distance(family, x_final),
        non_differentiable,
    })
}
