//! Box-constrained multistart local minimization.
//!
//! Each local run is a monotone spectral projected gradient method: trial
//! steps use the Barzilai-Borwein length, the projection onto the box is a
//! clamp, and Armijo backtracking along the projected direction keeps the
//! objective sequence non-increasing.

use crate::problem::Bounds;
use crate::sampling::Halton;

/// A smooth scalar function with an analytic gradient.
pub trait SmoothObjective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

impl<F, G> SmoothObjective for (F, G)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.1)(x)
    }
}

#[derive(Debug, Clone)]
pub struct MultistartOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Start points tried before the quasi-random ones (clamped into the box).
    pub extra_starts: Vec<Vec<f64>>,
}

impl MultistartOptions {
    pub fn new(n_starts: usize, seed: u64) -> Self {
        MultistartOptions {
            n_starts: n_starts.max(1),
            seed,
            max_iters: 400,
            extra_starts: Vec::new(),
        }
    }

    pub fn with_start(mut self, x: Vec<f64>) -> Self {
        self.extra_starts.push(x);
        self
    }

    pub fn max_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }
}

#[derive(Debug, Clone)]
pub struct LocalRun {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective value after every accepted iterate, starting point first.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MultistartResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub runs: Vec<LocalRun>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One projected-gradient run from `start`.
pub fn projected_gradient<O: SmoothObjective + ?Sized>(
    obj: &O,
    bounds: &Bounds,
    start: &[f64],
    max_iters: usize,
) -> LocalRun {
    let width = bounds.max_width().max(f64::MIN_POSITIVE);
    let x_tol = 1e-12 * width.max(1e-300);
    let mut x = bounds.clamp(start);
    let mut f = obj.value(&x);
    let mut history = vec![f];
    if !f.is_finite() || width == 0.0 {
        return LocalRun { x, value: f, history };
    }
    let mut g = obj.gradient(&x);
    let gnorm = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut t = if gnorm > 0.0 { 0.25 * width / gnorm } else { 1.0 };

    for _ in 0..max_iters {
        if g.iter().any(|v| !v.is_finite()) {
            break;
        }
        let mut trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
        bounds.clamp_in_place(&mut trial);
        let d: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let dnorm = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if dnorm <= x_tol {
            break;
        }
        let slope = dot(&g, &d);
        if slope >= 0.0 {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + lambda * b).collect();
            bounds.clamp_in_place(&mut xn);
            let fn_ = obj.value(&xn);
            if fn_.is_finite() && fn_ <= f + 1e-4 * lambda * slope {
                accepted = Some((xn, fn_));
                break;
            }
            lambda *= 0.5;
        }
        let Some((xn, fn_)) = accepted else { break };
        let gn = obj.gradient(&xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let ss = dot(&s, &s);
        t = if sy > 0.0 {
            (ss / sy).clamp(1e-14 * width, 1e14 * width)
        } else {
            (t * 4.0).min(1e14 * width)
        };
        let decrease = f - fn_;
        x = xn;
        f = fn_;
        g = gn;
        history.push(f);
        if decrease <= 1e-16 * (1.0 + f.abs()) && ss.sqrt() <= 1e-10 * width {
            break;
        }
    }
    LocalRun { x, value: f, history }
}

/// Best of `n_starts` projected-gradient runs (plus any explicit starts) over
/// `bounds`. Start points come from a seeded Halton sequence, so results are
/// deterministic.
pub fn box_multistart_minimize<O: SmoothObjective + ?Sized>(
    obj: &O,
    bounds: &Bounds,
    opts: &MultistartOptions,
) -> MultistartResult {
    let mut starts: Vec<Vec<f64>> = opts.extra_starts.iter().map(|s| bounds.clamp(s)).collect();
    let mut halton = Halton::new(bounds.dim(), opts.seed);
    for _ in 0..opts.n_starts {
        starts.push(halton.next_in_box(&bounds.lower, &bounds.upper));
    }
    let mut runs = Vec::with_capacity(starts.len());
    for s in &starts {
        runs.push(projected_gradient(obj, bounds, s, opts.max_iters));
    }
    let best = runs
        .iter()
        .filter(|r| r.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .or_else(|| runs.first())
        .expect("at least one start");
    MultistartResult {
        x: best.x.clone(),
        value: best.value,
        runs: runs.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: Vec<f64>) -> impl SmoothObjective {
        let c2 = c.clone();
        (
            move |x: &[f64]| x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            move |x: &[f64]| x.iter().zip(&c2).map(|(a, b)| 2.0 * (a - b)).collect::<Vec<f64>>(),
        )
    }

    #[test]
    fn interior_quadratic_minimum() {
        let b = Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]);
        let r = box_multistart_minimize(&quad(vec![0.3, -0.2]), &b, &MultistartOptions::new(3, 1));
        assert!((r.x[0] - 0.3).abs() < 1e-6 && (r.x[1] + 0.2).abs() < 1e-6);
    }

    #[test]
    fn exterior_minimum_is_projected() {
        let b = Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]);
        let r = box_multistart_minimize(&quad(vec![2.0, -0.5]), &b, &MultistartOptions::new(3, 1));
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 0.5).abs() < 1e-6);
        assert!(b.contains(&r.x));
    }

    #[test]
    fn rosenbrock_twenty_starts() {
        let rosen = (
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            |x: &[f64]| {
                vec![
                    -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                    200.0 * (x[1] - x[0] * x[0]),
                ]
            },
        );
        let b = Bounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]);
        let opts = MultistartOptions::new(20, 5).max_iters(2000);
        let r = box_multistart_minimize(&rosen, &b, &opts);
        // dense-grid oracle: the grid minimum is 0 at (1, 1)
        let mut grid_min = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let x = [-2.0 + 0.01 * i as f64, -2.0 + 0.01 * j as f64];
                grid_min = grid_min.min(rosen.value(&x));
            }
        }
        assert!(grid_min < 1e-12);
        assert!(r.value <= 1e-4, "value {}", r.value);
        for run in &r.runs {
            assert!(run.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn best_value_not_above_any_start() {
        let b = Bounds::new(vec![0.0], vec![4.0]);
        let f = (|x: &[f64]| (3.0 * x[0]).sin() + 0.1 * x[0], |x: &[f64]| vec![3.0 * (3.0 * x[0]).cos() + 0.1]);
        let opts = MultistartOptions::new(6, 9).with_start(vec![2.0]);
        let r = box_multistart_minimize(&f, &b, &opts);
        for run in &r.runs {
            assert!(r.value <= run.history[0]);
        }
        assert!(r.value < -0.8);
    }
}
