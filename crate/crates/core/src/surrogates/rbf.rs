use serde_json::{json, Value};

use super::kernels::RbfKernel;
use super::{BuildContext, ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::problem::{inf_dist, EvaluationDatabase, FeasibleSet, MOProblem};
use crate::subsolvers::{solve_linear, DenseMatrix};

/// Radial basis function interpolant with a polynomial tail of degree 0 or 1,
/// expressed in local coordinates `s = (x − center) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfModel {
    pub kernel: RbfKernel,
    /// Shape parameter in local coordinates.
    pub alpha_local: f64,
    pub tail_degree: u8,
    pub center: Vec<f64>,
    pub scale: f64,
    pub sites: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
    pub tail: Vec<f64>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl RbfModel {
    fn local(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) / self.scale).collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let s = self.local(x);
        let mut v = self.tail[0];
        if self.tail_degree == 1 {
            v += dot(&self.tail[1..], &s);
        }
        for (site, c) in self.sites.iter().zip(&self.coeffs) {
            let d: Vec<f64> = s.iter().zip(site).map(|(a, b)| a - b).collect();
            v += c * self.kernel.phi(norm2(&d), self.alpha_local);
        }
        v
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let s = self.local(x);
        let n = s.len();
        let mut g = if self.tail_degree == 1 {
            self.tail[1..].to_vec()
        } else {
            vec![0.0; n]
        };
        for (site, c) in self.sites.iter().zip(&self.coeffs) {
            let d: Vec<f64> = s.iter().zip(site).map(|(a, b)| a - b).collect();
            let w = c * self.kernel.dphi_over_r(norm2(&d), self.alpha_local);
            for i in 0..n {
                g[i] += w * d[i];
            }
        }
        g.iter().map(|v| v / self.scale).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> DenseMatrix {
        let s = self.local(x);
        let n = s.len();
        let mut h = DenseMatrix::zeros(n, n);
        for (site, c) in self.sites.iter().zip(&self.coeffs) {
            let d: Vec<f64> = s.iter().zip(site).map(|(a, b)| a - b).collect();
            let r = norm2(&d);
            let a = self.kernel.dphi_over_r(r, self.alpha_local);
            let radial = if r > 0.0 {
                (self.kernel.d2phi(r, self.alpha_local) - a) / (r * r)
            } else {
                0.0
            };
            for i in 0..n {
                h[(i, i)] += c * a;
                for j in 0..n {
                    h[(i, j)] += c * radial * d[i] * d[j];
                }
            }
        }
        let s2 = self.scale * self.scale;
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] /= s2;
            }
        }
        h
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kernel": self.kernel,
            "shape_local": self.alpha_local,
            "tail_degree": self.tail_degree,
            "center": self.center,
            "scale": self.scale,
            "sites_local": self.sites,
            "coefficients": self.coeffs,
            "tail": self.tail,
        })
    }
}

/// Interpolation set of an RBF model group.
#[derive(Debug, Clone)]
pub struct RbfGeometry {
    pub center: Vec<f64>,
    pub radius: f64,
    pub delta_ub: f64,
    pub kernel: RbfKernel,
    pub tail_degree: u8,
    pub alpha: f64,
    /// Center plus up to `n` affinely independent sites.
    pub affine_idx: Vec<usize>,
    pub extra_idx: Vec<usize>,
    pub fully_linear: bool,
    /// Smallest accepted pivot of the affine selection.
    pub min_pivot: f64,
}

impl RbfGeometry {
    pub fn all_indices(&self) -> Vec<usize> {
        self.affine_idx.iter().chain(&self.extra_idx).copied().collect()
    }

    fn local(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.center).map(|(a, c)| (a - c) / self.radius).collect()
    }

    fn tail_row(&self, s: &[f64]) -> Vec<f64> {
        let mut row = vec![1.0];
        if self.tail_degree == 1 {
            row.extend_from_slice(s);
        }
        row
    }

    fn alpha_local(&self) -> f64 {
        self.alpha * self.radius
    }

    /// Saddle-point matrix `[[0, Pᵀ], [P, Φ]]` for the given local sites.
    fn system(&self, sites: &[Vec<f64>]) -> DenseMatrix {
        let q = self.tail_row(&sites[0]).len();
        let m = sites.len();
        let a = self.alpha_local();
        let mut k = DenseMatrix::zeros(q + m, q + m);
        for (i, si) in sites.iter().enumerate() {
            let p = self.tail_row(si);
            for (t, v) in p.iter().enumerate() {
                k[(t, q + i)] = *v;
                k[(q + i, t)] = *v;
            }
            for (j, sj) in sites.iter().enumerate() {
                let d: Vec<f64> = si.iter().zip(sj).map(|(x, y)| x - y).collect();
                k[(q + i, q + j)] = self.kernel.phi(norm2(&d), a);
            }
        }
        k
    }

    fn fit_sites(&self, db: &EvaluationDatabase, idx: &[usize], l: usize) -> Result<RbfModel> {
        let sites: Vec<Vec<f64>> = idx.iter().map(|&i| self.local(&db.entry(i).scaled)).collect();
        let q = self.tail_row(&sites[0]).len();
        let k = self.system(&sites);
        let mut rhs = vec![0.0; q];
        rhs.extend(idx.iter().map(|&i| db.entry(i).values[l]));
        let sol = solve_linear(&k, &rhs)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        Ok(RbfModel {
            kernel: self.kernel,
            alpha_local: self.alpha_local(),
            tail_degree: self.tail_degree,
            center: self.center.clone(),
            scale: self.radius,
            sites,
            coeffs: sol[q..].to_vec(),
            tail: sol[..q].to_vec(),
        })
    }

    /// Fits objective `l`; falls back to the affine sites alone if the full
    /// system turns out to be numerically singular.
    pub fn fit(&mut self, db: &EvaluationDatabase, l: usize) -> Result<RbfModel> {
        match self.fit_sites(db, &self.all_indices(), l) {
            Ok(m) => Ok(m),
            Err(_) if !self.extra_idx.is_empty() => {
                self.extra_idx.clear();
                self.fit_sites(db, &self.affine_idx, l)
            }
            Err(e) => Err(e),
        }
    }
}

/// Greedy Gram-Schmidt selection of affinely independent displacements.
struct AffineSet {
    center: Vec<f64>,
    scale: f64,
    basis: Vec<Vec<f64>>,
    min_pivot: f64,
}

impl AffineSet {
    fn residual(&self, y: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = y.iter().zip(&self.center).map(|(a, c)| (a - c) / self.scale).collect();
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &r);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
        }
        r
    }

    fn push(&mut self, res: Vec<f64>) {
        let nrm = norm2(&res);
        self.min_pivot = self.min_pivot.min(nrm);
        self.basis.push(res.iter().map(|v| v / nrm).collect());
    }
}

/// Adds database points from `candidates` while their residual stays above the
/// threshold, always taking the largest residual first.
fn greedy_affine(
    aff: &mut AffineSet,
    db: &EvaluationDatabase,
    candidates: &[usize],
    chosen: &mut Vec<usize>,
    threshold: f64,
    n: usize,
) -> usize {
    let mut added = 0;
    let mut pool: Vec<usize> = candidates.iter().copied().filter(|i| !chosen.contains(i)).collect();
    while aff.basis.len() < n && !pool.is_empty() {
        let (best_pos, best_norm) = pool
            .iter()
            .enumerate()
            .map(|(p, &i)| (p, norm2(&aff.residual(&db.entry(i).scaled))))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm < threshold {
            break;
        }
        let idx = pool.remove(best_pos);
        let res = aff.residual(&db.entry(idx).scaled);
        aff.push(res);
        chosen.push(idx);
        added += 1;
    }
    added
}

/// Evaluates new points `center ± Δ·z` along directions orthogonal to the
/// current affine span until it has full dimension.
fn generate_affine(
    aff: &mut AffineSet,
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    domain: &FeasibleSet,
    radius: f64,
    chosen: &mut Vec<usize>,
    threshold: f64,
    max_new: usize,
) -> Result<usize> {
    let n = aff.center.len();
    let mut added = 0;
    while aff.basis.len() < n && added < max_new {
        let mut dirs: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|i| {
                let mut e = aff.center.clone();
                e[i] += aff.scale;
                let r = aff.residual(&e);
                (norm2(&r), r)
            })
            .collect();
        dirs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut placed = false;
        'dirs: for (nrm, z) in dirs {
            if nrm < 1e-8 {
                break;
            }
            let zinf = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for sign in [1.0, -1.0] {
                let p: Vec<f64> = aff
                    .center
                    .iter()
                    .zip(&z)
                    .map(|(c, zi)| c + sign * radius * zi / zinf)
                    .collect();
                let p = domain.project(&p)?;
                let res = aff.residual(&p);
                if norm2(&res) >= threshold {
                    let (idx, _) = db.evaluate_scaled_indexed(prob, &p)?;
                    aff.push(res);
                    chosen.push(idx);
                    added += 1;
                    placed = true;
                    break 'dirs;
                }
            }
        }
        if !placed {
            return Err(Error::DegenerateGeometry);
        }
    }
    Ok(added)
}

fn invert(k: &DenseMatrix) -> Result<DenseMatrix> {
    let m = k.rows();
    let mut inv = DenseMatrix::zeros(m, m);
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        let col = solve_linear(k, &e)?;
        e[j] = 0.0;
        for i in 0..m {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Adds database points within `θ2·Δ^ub` while the interpolation system stays
/// well conditioned, measured by the Schur complement of the bordered system.
fn add_extras(geom: &mut RbfGeometry, db: &EvaluationDatabase, spec: &ModelSpec, cap: usize) {
    let n = geom.center.len();
    let chosen = geom.affine_idx.clone();
    if chosen.len() >= cap {
        return;
    }
    let mut sites: Vec<Vec<f64>> = chosen.iter().map(|&i| geom.local(&db.entry(i).scaled)).collect();
    let Ok(mut kinv) = invert(&geom.system(&sites)) else {
        return;
    };
    let a = geom.alpha_local();
    let phi0 = geom.kernel.phi(0.0, a);
    let thr2 = spec.pivot_threshold * spec.pivot_threshold;
    // Nearest candidates first so that the fit stays local.
    let mut candidates: Vec<(f64, usize)> = db
        .query_ball(&geom.center, spec.theta2 * geom.delta_ub)
        .into_iter()
        .filter(|i| !chosen.contains(i))
        .map(|i| (inf_dist(&db.entry(i).scaled, &geom.center), i))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.truncate(4 * cap + n);
    let candidates: Vec<usize> = candidates.into_iter().map(|(_, i)| i).collect();
    for idx in candidates {
        if sites.len() >= cap {
            break;
        }
        let s = geom.local(&db.entry(idx).scaled);
        let mut b = geom.tail_row(&s);
        b.extend(sites.iter().map(|t| {
            let d: Vec<f64> = s.iter().zip(t).map(|(x, y)| x - y).collect();
            geom.kernel.phi(norm2(&d), a)
        }));
        let kb = kinv.mul_vec(&b);
        let schur = phi0 - dot(&b, &kb);
        if !(schur.is_finite() && schur >= thr2) {
            continue;
        }
        let m = kb.len();
        let mut next = DenseMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                next[(i, j)] = kinv[(i, j)] + kb[i] * kb[j] / schur;
            }
            next[(i, m)] = -kb[i] / schur;
            next[(m, i)] = -kb[i] / schur;
        }
        next[(m, m)] = 1.0 / schur;
        kinv = next;
        sites.push(s);
        geom.extra_idx.push(idx);
    }
}

fn rbf_params(spec: &ModelSpec) -> (RbfKernel, u8, super::ShapeParameter) {
    match spec.kind {
        ModelKind::Rbf {
            kernel,
            tail_degree,
            shape,
        } => (kernel, tail_degree, shape),
        _ => unreachable!("RBF builder called with a non-RBF spec"),
    }
}

fn select_impl(
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    spec: &ModelSpec,
    ctx: &BuildContext<'_>,
    relaxed: bool,
    max_new: usize,
) -> Result<RbfGeometry> {
    let n = prob.n_vars;
    let domain = prob.feasible.internal_domain();
    let (kernel, tail_degree, shape) = rbf_params(spec);
    let (c_idx, _) = db.evaluate_scaled_indexed(prob, ctx.center)?;
    let r1 = spec.theta1 * ctx.radius;
    let mut aff = AffineSet {
        center: ctx.center.to_vec(),
        scale: r1,
        basis: Vec::new(),
        min_pivot: f64::INFINITY,
    };
    let mut chosen = vec![c_idx];
    let near = db.query_ball(ctx.center, r1);
    greedy_affine(&mut aff, db, &near, &mut chosen, spec.pivot_threshold, n);
    let mut fully_linear = true;
    if aff.basis.len() < n && relaxed {
        let far = db.query_ball(ctx.center, spec.theta2 * ctx.delta_ub);
        if greedy_affine(&mut aff, db, &far, &mut chosen, spec.pivot_threshold, n) > 0 {
            fully_linear = false;
        }
    }
    if aff.basis.len() < n {
        generate_affine(&mut aff, db, prob, &domain, ctx.radius, &mut chosen, spec.pivot_threshold, max_new)?;
        if aff.basis.len() < n {
            fully_linear = false;
        }
    }
    let mut geom = RbfGeometry {
        center: ctx.center.to_vec(),
        radius: ctx.radius,
        delta_ub: ctx.delta_ub,
        kernel,
        tail_degree,
        alpha: shape.alpha(ctx.radius),
        affine_idx: chosen,
        extra_idx: Vec::new(),
        fully_linear,
        min_pivot: aff.min_pivot,
    };
    if tail_degree == 1 && geom.affine_idx.len() < n + 1 {
        return Err(Error::DegenerateGeometry);
    }
    add_extras(&mut geom, db, spec, spec.rbf_point_cap(n));
    Ok(geom)
}

/// Point selection for a fresh model.
pub(super) fn select_points(
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    spec: &ModelSpec,
    ctx: &BuildContext<'_>,
) -> Result<RbfGeometry> {
    select_impl(db, prob, spec, ctx, spec.relaxed, usize::MAX)
}

/// Rebuilds the point set without the relaxed search, generating at most
/// `max_new` sites so the result is certifiably fully linear.
pub(super) fn complete_points(
    db: &mut EvaluationDatabase,
    prob: &MOProblem,
    spec: &ModelSpec,
    ctx: &BuildContext<'_>,
    max_new: usize,
) -> Result<RbfGeometry> {
    select_impl(db, prob, spec, ctx, false, max_new)
}
