use crate::criticality::{fd_gradient, DEFAULT_FD_STEP};
use crate::problem::{FeasibleSet, MOProblem, Objective};
use crate::subsolvers::DenseMatrix;

/// A cheap objective used directly as its own model.
#[derive(Debug, Clone)]
pub struct ExactModel {
    objective: Objective,
    index: usize,
    feasible: FeasibleSet,
    domain: FeasibleSet,
    widths: Vec<f64>,
}

const HESSIAN_FD_STEP: f64 = 1e-4;

impl ExactModel {
    pub fn new(prob: &MOProblem, index: usize) -> Self {
        ExactModel {
            objective: prob.objectives[index].clone(),
            index,
            feasible: prob.feasible.clone(),
            domain: prob.feasible.internal_domain(),
            widths: prob.feasible.widths(),
        }
    }

    pub fn objective_index(&self) -> usize {
        self.index
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        match self.feasible.unscale(u) {
            Ok(x) => (self.objective.eval)(&x),
            Err(_) => f64::NAN,
        }
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        match (&self.objective.gradient, self.feasible.unscale(u)) {
            (Some(g), Ok(x)) => g(&x).iter().zip(&self.widths).map(|(a, w)| a * w).collect(),
            _ => fd_gradient(|v| self.value(v), u, &self.domain, DEFAULT_FD_STEP),
        }
    }

    /// Finite-difference Hessian (of the gradient when a callback exists).
    pub fn hessian(&self, u: &[f64]) -> DenseMatrix {
        let n = u.len();
        let mut h = DenseMatrix::zeros(n, n);
        let step = HESSIAN_FD_STEP;
        if self.objective.gradient.is_some() {
            let mut up = u.to_vec();
            for j in 0..n {
                up[j] = u[j] + step;
                let gp = self.gradient(&up);
                up[j] = u[j] - step;
                let gm = self.gradient(&up);
                up[j] = u[j];
                for i in 0..n {
                    h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
                }
            }
        } else {
            let f0 = self.value(u);
            let mut up = u.to_vec();
            for i in 0..n {
                for j in i..n {
                    let mut at = |di: f64, dj: f64| {
                        up[i] += di;
                        up[j] += dj;
                        let v = self.value(&up);
                        up.copy_from_slice(u);
                        v
                    };
                    let v = if i == j {
                        (at(step, 0.0) - 2.0 * f0 + at(-step, 0.0)) / (step * step)
                    } else {
                        (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step))
                            / (4.0 * step * step)
                    };
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let s = 0.5 * (h[(i, j)] + h[(j, i)]);
                h[(i, j)] = s;
                h[(j, i)] = s;
            }
        }
        h
    }
}
