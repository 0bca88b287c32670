//! Pareto criticality measure `ω(x) = −min β` of the steepest-descent LP and
//! its clamped variant `ω̃ = min{ω, 1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{FeasibleSet, MOProblem};
use crate::subsolvers::{solve_descent_lp, LpProblem};

/// Default finite-difference step in scaled coordinates.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityResult {
    pub direction: Vec<f64>,
    pub omega: f64,
    pub omega_clamped: f64,
}

impl CriticalityResult {
    pub fn is_critical(&self) -> bool {
        self.omega <= 0.0
    }
}

/// Direction bounds `[max(−1, lower − x), min(1, upper − x)]`.
pub fn direction_bounds(x: &[f64], fs: &FeasibleSet) -> (Vec<f64>, Vec<f64>) {
    match fs {
        FeasibleSet::Unconstrained { .. } => (vec![-1.0; x.len()], vec![1.0; x.len()]),
        FeasibleSet::Box { lower, upper } => {
            let lo = x
                .iter()
                .zip(lower)
                .map(|(xi, l)| (l - xi).max(-1.0).min(0.0))
                .collect();
            let hi = x
                .iter()
                .zip(upper)
                .map(|(xi, u)| (u - xi).min(1.0).max(0.0))
                .collect();
            (lo, hi)
        }
    }
}

/// Criticality at `x` for the given objective (or model) gradients.
pub fn omega_of_gradients(gradients: &[Vec<f64>], x: &[f64], fs: &FeasibleSet) -> Result<CriticalityResult> {
    if x.len() != fs.dim() {
        return Err(Error::DimensionMismatch {
            expected: fs.dim(),
            got: x.len(),
        });
    }
    let (lo, hi) = direction_bounds(x, fs);
    let lp = LpProblem::new(gradients.to_vec(), lo, hi)?;
    let sol = solve_descent_lp(&lp)?;
    let omega = -sol.beta;
    Ok(CriticalityResult {
        direction: sol.direction,
        omega,
        omega_clamped: omega.min(1.0),
    })
}

/// Finite-difference gradient of `f` at `x`; stencils that would leave the
/// box switch to one-sided differences.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], fs: &FeasibleSet, h: f64) -> Vec<f64> {
    let (lower, upper) = match fs {
        FeasibleSet::Box { lower, upper } => (Some(lower), Some(upper)),
        FeasibleSet::Unconstrained { .. } => (None, None),
    };
    let f0 = std::cell::OnceCell::new();
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let can_up = upper.map_or(true, |u| x[i] + h <= u[i]);
            let can_down = lower.map_or(true, |l| x[i] - h >= l[i]);
            let eval_at = |xp: &mut Vec<f64>, v: f64| {
                xp[i] = v;
                let r = f(xp);
                xp[i] = x[i];
                r
            };
            match (can_up, can_down) {
                (true, true) => (eval_at(&mut xp, x[i] + h) - eval_at(&mut xp, x[i] - h)) / (2.0 * h),
                (true, false) => (eval_at(&mut xp, x[i] + h) - *f0.get_or_init(|| f(x))) / h,
                (false, true) => (*f0.get_or_init(|| f(x)) - eval_at(&mut xp, x[i] - h)) / h,
                (false, false) => 0.0,
            }
        })
        .collect()
}

/// Gradients of the true objectives with respect to scaled coordinates:
/// callbacks where available, finite differences otherwise.
pub fn true_gradients(prob: &MOProblem, u: &[f64], fd_step: f64) -> Result<Vec<Vec<f64>>> {
    let domain = prob.feasible.internal_domain();
    let mut out = Vec::with_capacity(prob.n_objs());
    for l in 0..prob.n_objs() {
        let f0 = prob.eval_scaled(l, u);
        if !f0.is_finite() {
            return Err(Error::ObjectiveFailure {
                objective: l,
                site: prob.feasible.unscale(u)?,
            });
        }
        let g = match prob.gradient_scaled(l, u) {
            Some(g) => g,
            None => fd_gradient(|v| prob.eval_scaled(l, v), u, &domain, fd_step),
        };
        out.push(g);
    }
    Ok(out)
}

/// Criticality of the true problem at the scaled point `u` (diagnostics only).
pub fn true_omega(prob: &MOProblem, u: &[f64], fd_step: f64) -> Result<CriticalityResult> {
    let grads = true_gradients(prob, u, fd_step)?;
    if grads.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::ObjectiveFailure {
            objective: grads.iter().position(|g| g.iter().any(|v| !v.is_finite())).unwrap_or(0),
            site: prob.feasible.unscale(u)?,
        });
    }
    omega_of_gradients(&grads, u, &prob.feasible.internal_domain())
}
