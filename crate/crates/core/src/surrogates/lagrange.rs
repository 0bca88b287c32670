use serde_json::{json, Value};

use super::{BuildContext, ModelSpec};
use crate::error::{Error, Result};
use crate::problem::{Bounds, EvaluationDatabase, MOProblem};
use crate::sampling::Halton;
use crate::subsolvers::{maximize_abs_over_box, projected_gradient, DenseMatrix, QuadPoly};

/// Number of monomials of degree ≤ `degree` in `n` variables.
pub fn monomial_count(n: usize, degree: u8) -> usize {
    match degree {
        1 => n + 1,
        _ => (n + 1) * (n + 2) / 2,
    }
}

/// Natural basis `1, s_i, ½s_i², s_i s_j (i < j)` evaluated at `s`.
fn monomials(s: &[f64], degree: u8) -> Vec<f64> {
    let n = s.len();
    let mut out = Vec::with_capacity(monomial_count(n, degree));
    out.push(1.0);
    out.extend_from_slice(s);
    if degree == 2 {
        out.extend(s.iter().map(|v| 0.5 * v * v));
        for i in 0..n {
            for j in i + 1..n {
                out.push(s[i] * s[j]);
            }
        }
    }
    out
}

fn to_quad_poly(coef: &[f64], n: usize, degree: u8) -> QuadPoly {
    let mut p = QuadPoly::affine(coef[0], coef[1..=n].to_vec());
    if degree == 2 {
        let mut k = 2 * n + 1;
        for i in 0..n {
            p.hessian[(i, i)] = coef[n + 1 + i];
        }
        for i in 0..n {
            for j in i + 1..n {
                p.hessian[(i, j)] = coef[k];
                p.hessian[(j, i)] = coef[k];
                k += 1;
            }
        }
    }
    p
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Polynomial interpolant in local coordinates `s = (x − center) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyModel {
    pub center: Vec<f64>,
    pub scale: f64,
    pub poly: QuadPoly,
}

impl PolyModel {
    fn local(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) / self.scale).collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.poly.value(&self.local(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.poly.gradient(&self.local(x)).iter().map(|g| g / self.scale).collect()
    }

    pub fn hessian(&self) -> DenseMatrix {
        self.poly.scaled(1.0 / (self.scale * self.scale)).hessian
    }

    pub fn to_json(&self) -> Value {
        let n = self.poly.dim();
        let h: Vec<Vec<f64>> = (0..n).map(|i| self.poly.hessian.row(i).to_vec()).collect();
        json!({
            "center": self.center,
            "scale": self.scale,
            "constant": self.poly.constant,
            "linear": self.poly.linear,
            "hessian": h,
        })
    }
}

/// Interpolation set of a polynomial model group together with its Lagrange
/// basis (coefficient rows in the natural basis).
#[derive(Debug, Clone)]
pub struct LagrangeGeometry {
    pub degree: u8,
    pub center: Vec<f64>,
    pub scale: f64,
    pub region: Bounds,
    /// `region` in scaled coordinates, used to clamp away round-off.
    ball: Bounds,
    pub points: Vec<Vec<f64>>,
    pub db_idx: Vec<usize>,
    pub basis: Vec<Vec<f64>>,
    /// Estimated poisedness constant `max_j max_s |l_j(s)|`.
    pub lambda: f64,
    pub fully_linear: bool,
    /// Database sites in the region that are not interpolation points.
    spare: Vec<usize>,
    samples: Vec<Vec<f64>>,
    /// `sample_vals[j][m] = l_j(samples[m])`.
    sample_vals: Vec<Vec<f64>>,
}

impl LagrangeGeometry {
    fn n(&self) -> usize {
        self.center.len()
    }

    fn local(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.center).map(|(a, c)| (a - c) / self.scale).collect()
    }

    fn global(&self, s: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = s.iter().zip(&self.center).map(|(a, c)| c + a * self.scale).collect();
        self.ball.clamp(&y)
    }

    fn basis_poly(&self, j: usize) -> QuadPoly {
        to_quad_poly(&self.basis[j], self.n(), self.degree)
    }

    /// Places `phi = monomials(y)` at slot `i`: normalizes `l_i` and
    /// eliminates it from the other rows.
    fn pivot(&mut self, i: usize, phi: &[f64]) {
        let vals: Vec<f64> = self.basis.iter().map(|row| dot(row, phi)).collect();
        let v = vals[i];
        for c in self.basis[i].iter_mut() {
            *c /= v;
        }
        for m in self.sample_vals[i].iter_mut() {
            *m /= v;
        }
        let pivot_row = self.basis[i].clone();
        let pivot_samples = self.sample_vals[i].clone();
        for j in 0..self.basis.len() {
            if j == i || vals[j] == 0.0 {
                continue;
            }
            let f = vals[j];
            for (c, p) in self.basis[j].iter_mut().zip(&pivot_row) {
                *c -= f * p;
            }
            for (c, p) in self.sample_vals[j].iter_mut().zip(&pivot_samples) {
                *c -= f * p;
            }
        }
    }

    /// Approximate `argmax_{s ∈ region} |l_j(s)|` over all `j`.
    fn worst_basis(&self, seed: u64) -> (usize, Vec<f64>, f64) {
        if self.degree == 1 {
            let mut best = (0, self.region.midpoint(), -1.0);
            for j in 0..self.basis.len() {
                let (s, v) = maximize_abs_over_box(&self.basis_poly(j), &self.region, 0, seed);
                if v > best.2 {
                    best = (j, s, v);
                }
            }
            return best;
        }
        let mut best = (0, 0, -1.0);
        for (j, row) in self.sample_vals.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                if v.abs() > best.2 {
                    best = (j, m, v.abs());
                }
            }
        }
        let (j, m, _) = best;
        let p = self.basis_poly(j);
        let sign = if self.sample_vals[j][m] >= 0.0 { -1.0 } else { 1.0 };
        let obj = (
            |s: &[f64]| sign * p.value(s),
            |s: &[f64]| p.gradient(s).iter().map(|g| sign * g).collect::<Vec<f64>>(),
        );
        let run = projected_gradient(&obj, &self.region, &self.samples[m], 100);
        let v = p.value(&run.x).abs();
        (j, run.x, v)
    }

    /// Replaces interpolation points until the set is `Λ`-poised or
    /// `max_swaps` replacements have been made.
    pub(super) fn repair(
        &mut self,
        db: &mut EvaluationDatabase,
        prob: &MOProblem,
        spec: &ModelSpec,
        max_swaps: usize,
        seed: u64,
    ) -> Result<()> {
        let mut swaps = 0;
        loop {
            let (j, s_star, lam) = self.worst_basis(seed.wrapping_add(swaps as u64));
            self.lambda = lam;
            if lam <= spec.lambda_poised {
                self.fully_linear = true;
                return Ok(());
            }
            self.fully_linear = false;
            if swaps >= max_swaps {
                return Ok(());
            }
            let pj = self.basis_poly(j);
            let recycled = self
                .spare
                .iter()
                .enumerate()
                .map(|(pos, &i)| (pos, pj.value(&self.local(&db.entry(i).scaled)).abs()))
                .filter(|(_, v)| *v > spec.lambda_poised)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let (idx, s) = match recycled {
                Some((pos, _)) => {
                    let idx = self.spare.remove(pos);
                    (idx, self.local(&db.entry(idx).scaled))
                }
                None => {
                    let (idx, _) = db.evaluate_scaled_indexed(prob, &self.global(&s_star))?;
                    (idx, self.local(&db.entry(idx).scaled))
                }
            };
            let phi = monomials(&s, self.degree);
            if dot(&self.basis[j], &phi).abs() < spec.pivot_threshold {
                return Err(Error::PoisednessRepairStalled { iterations: swaps });
            }
            self.pivot(j, &phi);
            self.spare.push(self.db_idx[j]);
            self.db_idx[j] = idx;
            self.points[j] = s;
            swaps += 1;
        }
    }

    pub fn fit(&self, db: &EvaluationDatabase, l: usize) -> PolyModel {
        let p = self.basis.len();
        let mut coef = vec![0.0; p];
        for (row, &i) in self.basis.iter().zip(&self.db_idx) {
            let f = db.entry(i).values[l];
            for (c, r) in coef.iter_mut().zip(row) {
                *c += f * r;
            }
        }
        PolyModel {
            center: self.center.clone(),
            scale: self.scale,
            poly: to_quad_poly(&coef, self.n(), self.degree),
        }
    }
}

fn sample_set(region: &Bounds, p: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = region.dim();
    let mut out = vec![region.clamp(&vec![0.0; n])];
    for i in 0..n {
        for side in [region.lower[i], region.upper[i]] {
            let mut s = vec![0.0; n];
            s[i] = side;
            out.push(region.clamp(&s));
        }
    }
    out.push(region.lower.clone());
    out.push(region.upper.clone());
    let mut h = Halton::new(n, seed);
    for _ in 0..(3 * p).clamp(64, 400) {
        out.push(h.next_in_box(&region.lower, &region.upper));
    }
    out
}

/// Greedy selection of a poised set (database points first, then maximizers of
/// the current pivot polynomial), followed by `Λ`-poisedness repair.
pub(super) fn build_geometry(
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    spec: &ModelSpec,
    degree: u8,
    ctx: &BuildContext<'_>,
    seed: u64,
) -> Result<LagrangeGeometry> {
    let n = prob.n_vars;
    let p = monomial_count(n, degree);
    let scale = spec.theta1 * ctx.radius;
    let domain = prob.feasible.internal_domain();
    let ball = domain.ball_bounds(ctx.center, scale);
    let region = Bounds::new(
        ball.lower.iter().zip(ctx.center).map(|(b, c)| (b - c) / scale).collect(),
        ball.upper.iter().zip(ctx.center).map(|(b, c)| (b - c) / scale).collect(),
    );
    let (c_idx, _) = db.evaluate_scaled_indexed(prob, ctx.center)?;
    let samples = if degree == 2 { sample_set(&region, p, seed) } else { Vec::new() };
    let mut basis: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let sample_vals: Vec<Vec<f64>> = {
        let phis: Vec<Vec<f64>> = samples.iter().map(|s| monomials(s, degree)).collect();
        basis.iter().map(|row| phis.iter().map(|phi| dot(row, phi)).collect()).collect()
    };
    basis.shrink_to_fit();
    let mut geom = LagrangeGeometry {
        degree,
        center: ctx.center.to_vec(),
        scale,
        region: region.clone(),
        ball,
        points: Vec::with_capacity(p),
        db_idx: Vec::with_capacity(p),
        basis,
        lambda: f64::INFINITY,
        fully_linear: false,
        spare: Vec::new(),
        samples,
        sample_vals,
    };
    let mut pool: Vec<(usize, Vec<f64>, Vec<f64>)> = db
        .query_ball(ctx.center, scale)
        .into_iter()
        .filter(|&i| i != c_idx)
        .map(|i| {
            let s = geom.local(&db.entry(i).scaled);
            let phi = monomials(&s, degree);
            (i, s, phi)
        })
        .collect();

    for i in 0..p {
        let (idx, s) = if i == 0 {
            (c_idx, vec![0.0; n])
        } else {
            let best = pool
                .iter()
                .enumerate()
                .map(|(pos, (_, _, phi))| (pos, dot(&geom.basis[i], phi).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            match best {
                Some((pos, v)) if v >= spec.pivot_threshold => {
                    let (idx, s, _) = pool.remove(pos);
                    (idx, s)
                }
                _ => {
                    let poly = to_quad_poly(&geom.basis[i], n, degree);
                    let (s, v) = maximize_abs_over_box(&poly, &region, 4, seed.wrapping_add(i as u64));
                    if v < spec.pivot_threshold {
                        return Err(Error::DegenerateGeometry);
                    }
                    let (idx, _) = db.evaluate_scaled_indexed(prob, &geom.global(&s))?;
                    (idx, geom.local(&db.entry(idx).scaled))
                }
            }
        };
        let phi = monomials(&s, degree);
        if dot(&geom.basis[i], &phi).abs() < spec.pivot_threshold * 1e-3 {
            return Err(Error::DegenerateGeometry);
        }
        geom.pivot(i, &phi);
        geom.points.push(s);
        geom.db_idx.push(idx);
    }
    geom.spare = pool.into_iter().map(|(i, _, _)| i).collect();
    geom.repair(db, prob, spec, 10 * p, seed)?;
    Ok(geom)
}
