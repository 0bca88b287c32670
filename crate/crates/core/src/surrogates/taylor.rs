use crate::error::Result;
use crate::problem::{EvaluationDatabase, FeasibleSet, MOProblem};

/// `m(x) = f(c) + gᵀ(x − c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub center: Vec<f64>,
    pub value_at_center: f64,
    pub gradient: Vec<f64>,
}

impl LinearModel {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_at_center
            + self
                .gradient
                .iter()
                .zip(x.iter().zip(&self.center))
                .map(|(g, (a, b))| g * (a - b))
                .sum::<f64>()
    }
}

/// Evaluates the difference stencil around `center` with step `fd_step·Δ`.
///
/// Returns database indices laid out as `[center, (plus_i, minus_i) for i]`;
/// at an active face the missing side repeats the center.
pub(super) fn fd_sites(
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    domain: &FeasibleSet,
    center: &[f64],
    radius: f64,
    fd_step: f64,
) -> Result<Vec<usize>> {
    let h = (fd_step * radius).max(1e-10);
    let (c_idx, _) = db.evaluate_scaled_indexed(prob, center)?;
    let mut sites = vec![c_idx];
    let mut p = center.to_vec();
    for i in 0..center.len() {
        let mut side = |v: f64, db: &mut EvaluationDatabase| -> Result<usize> {
            p[i] = v;
            let ok = domain.contains(&p);
            let r = if ok { db.evaluate_scaled_indexed(prob, &p).map(|r| r.0) } else { Ok(c_idx) };
            p[i] = center[i];
            r
        };
        let plus = side(center[i] + h, db)?;
        let minus = side(center[i] - h, db)?;
        sites.push(plus);
        sites.push(minus);
    }
    Ok(sites)
}

pub(super) fn fit(db: &EvaluationDatabase, sites: &[usize], center: &[f64], l: usize) -> LinearModel {
    let c_idx = sites[0];
    let f0 = db.entry(c_idx).values[l];
    let gradient = (0..center.len())
        .map(|i| {
            let (p, m) = (sites[1 + 2 * i], sites[2 + 2 * i]);
            let xp = db.entry(p).scaled[i];
            let xm = db.entry(m).scaled[i];
            if xp == xm {
                0.0
            } else {
                (db.entry(p).values[l] - db.entry(m).values[l]) / (xp - xm)
            }
        })
        .collect();
    LinearModel {
        center: center.to_vec(),
        value_at_center: f0,
        gradient,
    }
}
