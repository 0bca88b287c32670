//! Descent steps on the surrogate bundle.
//!
//! All steps work on the merit `Φm(x) = max_ℓ m_ℓ(x)` and are certified by
//! the sufficient-decrease bound
//! `Φm(x) − Φm(x+s) ≥ κ·ω̃·min{ω̃ / (c·H), Δ}` with `κ = min{2b(1−a), a}`.

use serde::{Deserialize, Serialize};

use crate::criticality::{omega_of_gradients, CriticalityResult};
use crate::error::{Error, Result};
use crate::problem::{inf_norm, Bounds};
use crate::subsolvers::{box_multistart_minimize, projected_gradient, MultistartOptions};
use crate::surrogates::SurrogateBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Backtracking along the model steepest-descent direction on `Φm`.
    ModifiedParetoCauchy,
    /// Like the modified step but every model must decrease sufficiently.
    StrictParetoCauchy,
    /// Line minimization of `Φm` along the descent direction.
    ExactParetoCauchy,
    /// Scalarized step towards the local ideal point.
    PascolettiSerafini,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepConfig {
    pub kind: StepKind,
    /// Armijo constant `a`.
    pub armijo: f64,
    /// Backtracking factor `b`.
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Number of local starts for ideal-point and scalarized subproblems;
    /// `None` uses `10 + n`.
    pub local_starts: Option<usize>,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            kind: StepKind::ModifiedParetoCauchy,
            armijo: 0.1,
            backtrack: 0.5,
            max_backtracks: 30,
            local_starts: None,
        }
    }
}

impl StepConfig {
    pub fn with_kind(kind: StepKind) -> Self {
        StepConfig {
            kind,
            ..Self::default()
        }
    }

    /// `κ = min{2b(1−a), a}`.
    pub fn kappa(&self) -> f64 {
        (2.0 * self.backtrack * (1.0 - self.armijo)).min(self.armijo)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.armijo > 0.0 && self.armijo < 1.0 && self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidConfig("armijo and backtrack must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub step: Vec<f64>,
    pub trial: Vec<f64>,
    /// Model values at the trial point.
    pub predicted: Vec<f64>,
    /// Model values at the center.
    pub model_at_center: Vec<f64>,
    pub criticality: CriticalityResult,
    pub sigma: f64,
    pub backtracks: usize,
    /// The scalarized step was replaced by the strict Pareto-Cauchy step.
    pub used_fallback: bool,
    /// `min_ℓ r_ℓ / max_ℓ r_ℓ` of the scalarization direction.
    pub direction_ratio: Option<f64>,
    pub certificate_rhs: f64,
}

impl StepResult {
    pub fn merit_decrease(&self) -> f64 {
        merit(&self.model_at_center) - merit(&self.predicted)
    }

    pub fn is_zero(&self) -> bool {
        self.step.iter().all(|v| *v == 0.0)
    }

    /// Whether the merit decrease satisfies the sufficient-decrease bound,
    /// up to the rounding error of evaluating `Φm`.
    pub fn certificate_holds(&self) -> bool {
        let rounding = 4.0 * f64::EPSILON * merit(&self.model_at_center).abs().max(1.0);
        self.is_zero() || self.merit_decrease() >= self.certificate_rhs - rounding
    }
}

pub fn merit(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Step-length cap `σ̄` for a direction with ∞-norm `d_norm`.
pub fn bar_sigma(radius: f64, d_norm: f64) -> f64 {
    if d_norm < 1.0 || radius <= 1.0 {
        radius.min(d_norm)
    } else {
        radius
    }
}

/// Right-hand side `κ·ω̃·min{ω̃/(c·H), Δ}` with `c = k`.
pub fn certificate_rhs(kappa: f64, omega_clamped: f64, k: usize, hessian_bound: f64, radius: f64) -> f64 {
    let c = k.max(1) as f64;
    kappa * omega_clamped * (omega_clamped / (c * hessian_bound)).min(radius)
}

struct Ray<'a> {
    bundle: &'a SurrogateBundle,
    x: &'a [f64],
    unit: Vec<f64>,
    region: Bounds,
}

impl Ray<'_> {
    fn point(&self, sigma: f64) -> Vec<f64> {
        let p: Vec<f64> = self.x.iter().zip(&self.unit).map(|(a, d)| a + sigma * d).collect();
        self.region.clamp(&p)
    }
}

fn zero_result(x: &[f64], values: Vec<f64>, crit: CriticalityResult) -> StepResult {
    StepResult {
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
    }
}

fn finish(x: &[f64], trial: Vec<f64>, bundle: &SurrogateBundle, base: &StepResult, sigma: f64, backtracks: usize) -> StepResult {
    let step: Vec<f64> = trial.iter().zip(x).map(|(a, b)| a - b).collect();
    StepResult {
        step,
        predicted: bundle.values(&trial),
        trial,
        sigma,
        backtracks,
        ..base.clone()
    }
}

/// Computes a step of kind `cfg.kind` from the center `x` of the bundle.
pub fn compute_step(bundle: &SurrogateBundle, x: &[f64], radius: f64, cfg: &StepConfig, seed: u64) -> Result<StepResult> {
    cfg.validate()?;
    let domain = bundle.domain();
    let values = bundle.values(x);
    let crit = omega_of_gradients(&bundle.gradients(x), x, domain)?;
    let d_norm = inf_norm(&crit.direction);
    let mut base = zero_result(x, values, crit.clone());
    if crit.omega <= 0.0 || d_norm == 0.0 {
        return Ok(base);
    }
    base.certificate_rhs = certificate_rhs(cfg.kappa(), crit.omega_clamped, bundle.n_objs(), bundle.hessian_bound, radius);
    let ray = Ray {
        bundle,
        x,
        unit: crit.direction.iter().map(|d| d / d_norm).collect(),
        region: domain.ball_bounds(x, radius),
    };
    match cfg.kind {
        StepKind::ModifiedParetoCauchy => backtracking(&ray, &base, radius, cfg, false),
        StepKind::StrictParetoCauchy => backtracking(&ray, &base, radius, cfg, true),
        StepKind::ExactParetoCauchy => exact_cauchy(&ray, &base, radius, cfg),
        StepKind::PascolettiSerafini => {
            let ps = pascoletti_serafini(bundle, x, radius, cfg, seed)?;
            let fallback = |ratio| -> Result<StepResult> {
                let mut r = backtracking(&ray, &base, radius, cfg, true)?;
                r.used_fallback = true;
                r.direction_ratio = ratio;
                Ok(r)
            };
            match ps {
                None => fallback(None),
                Some((trial, ratio)) => {
                    let r = finish(x, trial, bundle, &base, 0.0, 0);
                    let r = StepResult {
                        sigma: inf_norm(&r.step),
                        direction_ratio: Some(ratio),
                        ..r
                    };
                    if r.merit_decrease() >= r.certificate_rhs && !r.is_zero() {
                        Ok(r)
                    } else {
                        fallback(Some(ratio))
                    }
                }
            }
        }
    }
}

fn backtracking(ray: &Ray<'_>, base: &StepResult, radius: f64, cfg: &StepConfig, strict: bool) -> Result<StepResult> {
    let d_norm = inf_norm(&base.criticality.direction);
    let sigma_bar = bar_sigma(radius, d_norm);
    let omega = base.criticality.omega;
    let m0 = &base.model_at_center;
    let phi0 = merit(m0);
    let mut sigma = sigma_bar;
    for j in 0..=cfg.max_backtracks {
        let trial = ray.point(sigma);
        let vals = ray.bundle.values(&trial);
        let required = cfg.armijo * sigma / d_norm * omega;
        let ok = if strict {
            vals.iter().zip(m0).all(|(v, c)| *v <= c - required)
        } else {
            merit(&vals) <= phi0 - required
        };
        if ok {
            return Ok(finish(ray.x, trial, ray.bundle, base, sigma, j));
        }
        sigma *= cfg.backtrack;
    }
    Err(Error::BacktrackExhausted(cfg.max_backtracks))
}

fn exact_cauchy(ray: &Ray<'_>, base: &StepResult, radius: f64, cfg: &StepConfig) -> Result<StepResult> {
    let d_norm = inf_norm(&base.criticality.direction);
    let sigma_bar = bar_sigma(radius, d_norm);
    let phi = |s: f64| merit(&ray.bundle.values(&ray.point(s)));
    let grid = 64;
    let mut candidates: Vec<(f64, f64)> = (0..=grid)
        .map(|i| {
            let s = sigma_bar * i as f64 / grid as f64;
            (s, phi(s))
        })
        .collect();
    let (best_i, _) = candidates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, c)| (i, *c))
        .expect("grid is non-empty");
    let lo = sigma_bar * best_i.saturating_sub(1) as f64 / grid as f64;
    let hi = sigma_bar * (best_i + 1).min(grid) as f64 / grid as f64;
    let (mut a, mut b) = (lo, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..60 {
        if (b - a) <= 1e-12 * sigma_bar.max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d);
        }
    }
    candidates.push((c, fc));
    candidates.push((d, fd));
    if let Ok(bt) = backtracking(ray, base, radius, cfg, false) {
        candidates.push((bt.sigma, merit(&bt.predicted)));
    }
    let (sigma, _) = candidates
        .into_iter()
        .filter(|c| c.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(b.0.total_cmp(&a.0)))
        .ok_or(Error::BacktrackExhausted(0))?;
    if sigma == 0.0 {
        return Err(Error::BacktrackExhausted(grid));
    }
    Ok(finish(ray.x, ray.point(sigma), ray.bundle, base, sigma, 0))
}

fn local_starts(cfg: &StepConfig, n: usize) -> usize {
    cfg.local_starts.unwrap_or(10 + n)
}

/// Componentwise minima of the models over `B(x; Δ) ∩ X`, each found by
/// multistart local minimization with `x` among the starts.
pub fn local_ideal_point(bundle: &SurrogateBundle, x: &[f64], radius: f64, cfg: &StepConfig, seed: u64) -> Vec<f64> {
    let region = bundle.domain().ball_bounds(x, radius);
    let starts = local_starts(cfg, x.len());
    bundle
        .models
        .iter()
        .enumerate()
        .map(|(l, m)| {
            let obj = (|y: &[f64]| m.value(y), |y: &[f64]| m.gradient(y));
            let opts = MultistartOptions::new(starts, seed.wrapping_add(l as u64)).with_start(x.to_vec());
            box_multistart_minimize(&obj, &region, &opts).value.min(m.value(x))
        })
        .collect()
}

/// Smoothed maximum `μ·log Σ exp(z_ℓ/μ)` and its softmax weights.
fn log_sum_exp(z: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let zmax = merit(z);
    let w: Vec<f64> = z.iter().map(|v| ((v - zmax) / mu).exp()).collect();
    let s: f64 = w.iter().sum();
    (zmax + mu * s.ln(), w.iter().map(|v| v / s).collect())
}

/// Minimizes `max_ℓ (m_ℓ(y) − m_ℓ(x)) / r_ℓ` over `B(x; Δ) ∩ X` with
/// `r = m(x) − i`. Returns `None` when the ideal point offers no improvement.
pub fn pascoletti_serafini(
    bundle: &SurrogateBundle,
    x: &[f64],
    radius: f64,
    cfg: &StepConfig,
    seed: u64,
) -> Result<Option<(Vec<f64>, f64)>> {
    let region = bundle.domain().ball_bounds(x, radius);
    let m0 = bundle.values(x);
    let ideal = local_ideal_point(bundle, x, radius, cfg, seed);
    let r: Vec<f64> = m0.iter().zip(&ideal).map(|(a, b)| (a - b).max(0.0)).collect();
    let r_max = merit(&r);
    if !(r_max > 1e-12) {
        return Ok(None);
    }
    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = r_min / r_max;
    let r_safe: Vec<f64> = r.iter().map(|v| v.max(1e-12 * r_max)).collect();
    let scaled = |y: &[f64]| -> Vec<f64> {
        bundle
            .values(y)
            .iter()
            .zip(&m0)
            .zip(&r_safe)
            .map(|((v, c), rl)| (v - c) / rl)
            .collect()
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let consider = |y: Vec<f64>, best: &mut Option<(Vec<f64>, f64)>| {
        let v = merit(&scaled(&y));
        if v.is_finite() && best.as_ref().map_or(true, |b| v < b.1) {
            *best = Some((y, v));
        }
    };
    let mut starts = vec![x.to_vec()];
    for mu in [1e-2, 1e-3, 1e-4] {
        let obj = (
            |y: &[f64]| log_sum_exp(&scaled(y), mu).0,
            |y: &[f64]| {
                let (_, w) = log_sum_exp(&scaled(y), mu);
                let mut g = vec![0.0; y.len()];
                for (l, m) in bundle.models.iter().enumerate() {
                    if w[l] == 0.0 {
                        continue;
                    }
                    for (gi, mi) in g.iter_mut().zip(m.gradient(y)) {
                        *gi += w[l] * mi / r_safe[l];
                    }
                }
                g
            },
        );
        if mu == 1e-2 {
            let mut opts = MultistartOptions::new(local_starts(cfg, x.len()), seed ^ 0xa5a5);
            opts.extra_starts = starts.clone();
            let res = box_multistart_minimize(&obj, &region, &opts);
            for run in res.runs {
                consider(run.x, &mut best);
            }
        } else {
            for s in &starts {
                let run = projected_gradient(&obj, &region, s, 400);
                consider(run.x, &mut best);
            }
        }
        starts = vec![best.as_ref().expect("at least one candidate").0.clone()];
    }
    let (trial, value) = best.expect("at least one candidate");
    if !(value < 0.0) {
        return Ok(None);
    }
    Ok(Some((trial, ratio)))
}
