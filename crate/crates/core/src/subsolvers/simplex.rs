//! Steepest-descent direction LP
//!
//! ```text
//!   min β   s.t.  ⟨g_ℓ, d⟩ ≤ β  (ℓ = 1..k),   lo ≤ d ≤ hi
//! ```
//!
//! solved with a dense tableau simplex under Bland's rule. Writing
//! `d = d⁺ − d⁻` and `β = −w` with `d⁺ ≤ hi`, `d⁻ ≤ −lo`, `w ≥ 0` turns every
//! constraint into `≤` with a nonnegative right-hand side, so `d = 0` is the
//! starting vertex and no phase one is needed. Restricting `w ≥ 0` is harmless
//! since `d = 0` already attains `β = 0`.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    /// One row per objective gradient.
    pub gradients: Vec<Vec<f64>>,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

impl LpProblem {
    pub fn new(gradients: Vec<Vec<f64>>, box_lo: Vec<f64>, box_hi: Vec<f64>) -> Result<Self> {
        let n = box_lo.len();
        if box_hi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: box_hi.len(),
            });
        }
        for g in &gradients {
            if g.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::LpFailure("non-finite gradient entry".into()));
            }
        }
        for (lo, hi) in box_lo.iter().zip(&box_hi) {
            if !(*lo <= 0.0 && *hi >= 0.0 && *lo >= -1.0 && *hi <= 1.0) {
                return Err(Error::LpFailure(format!(
                    "direction bounds [{lo}, {hi}] must contain 0 and lie in [-1, 1]"
                )));
            }
        }
        Ok(LpProblem {
            gradients,
            box_lo,
            box_hi,
        })
    }

    pub fn n_dir(&self) -> usize {
        self.box_lo.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub direction: Vec<f64>,
    /// Optimal value, always `≤ 0`.
    pub beta: f64,
    pub pivots: usize,
}

pub fn solve_descent_lp(lp: &LpProblem) -> Result<LpSolution> {
    let n = lp.n_dir();
    let k = lp.gradients.len();
    let scale = lp
        .gradients
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if k == 0 || n == 0 || scale == 0.0 {
        return Ok(LpSolution {
            direction: vec![0.0; n],
            beta: 0.0,
            pivots: 0,
        });
    }

    // columns: d⁺ (n), d⁻ (n), w (1), slacks (m), rhs (1)
    let n_struct = 2 * n + 1;
    let m = k + 2 * n;
    let width = n_struct + m + 1;
    let rhs = width - 1;
    let mut tab = vec![0.0; (m + 1) * width];
    let at = |r: usize, c: usize| r * width + c;

    for (l, g) in lp.gradients.iter().enumerate() {
        for i in 0..n {
            let gi = g[i] / scale;
            tab[at(l, i)] = gi;
            tab[at(l, n + i)] = -gi;
        }
        tab[at(l, 2 * n)] = 1.0;
    }
    for i in 0..n {
        tab[at(k + i, i)] = 1.0;
        tab[at(k + i, rhs)] = lp.box_hi[i];
        tab[at(k + n + i, n + i)] = 1.0;
        tab[at(k + n + i, rhs)] = -lp.box_lo[i];
    }
    for r in 0..m {
        tab[at(r, n_struct + r)] = 1.0;
    }
    // cost row: minimize −w
    tab[at(m, 2 * n)] = -1.0;

    let mut basis: Vec<usize> = (n_struct..n_struct + m).collect();
    let max_pivots = 50 * (m + n_struct) + 100;
    let mut pivots = 0;
    loop {
        // Bland: lowest-index column with negative reduced cost
        let Some(enter) = (0..n_struct + m).find(|&c| tab[at(m, c)] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab[at(r, enter)];
            if a > PIVOT_TOL {
                let ratio = tab[at(r, rhs)].max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - 1e-15
                            || (ratio <= bratio + 1e-15 && basis[r] < basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
        }
        let Some((prow, _)) = leave else {
            return Err(Error::LpFailure("unbounded direction LP".into()));
        };
        let p = tab[at(prow, enter)];
        for c in 0..width {
            tab[at(prow, c)] /= p;
        }
        for r in 0..=m {
            if r == prow {
                continue;
            }
            let f = tab[at(r, enter)];
            if f == 0.0 {
                continue;
            }
            for c in 0..width {
                tab[at(r, c)] -= f * tab[at(prow, c)];
            }
        }
        basis[prow] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::LpFailure("simplex pivot limit reached".into()));
        }
    }

    let mut x = vec![0.0; n_struct];
    for (r, &b) in basis.iter().enumerate() {
        if b < n_struct {
            x[b] = tab[at(r, rhs)];
        }
    }
    let direction: Vec<f64> = (0..n)
        .map(|i| (x[i] - x[n + i]).max(lp.box_lo[i]).min(lp.box_hi[i]))
        .collect();
    let beta = lp
        .gradients
        .iter()
        .map(|g| g.iter().zip(&direction).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
        .min(0.0);
    if !beta.is_finite() {
        return Err(Error::LpFailure("non-finite optimal value".into()));
    }
    Ok(LpSolution {
        direction,
        beta,
        pivots,
    })
}
