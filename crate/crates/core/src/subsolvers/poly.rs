use super::dense::DenseMatrix;
use super::multistart::{box_multistart_minimize, MultistartOptions};
use crate::problem::Bounds;

/// Polynomial of degree at most two, `p(x) = c + gᵀx + ½ xᵀHx` with symmetric `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoly {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub hessian: DenseMatrix,
}

impl QuadPoly {
    pub fn zero(n: usize) -> Self {
        QuadPoly {
            constant: 0.0,
            linear: vec![0.0; n],
            hessian: DenseMatrix::zeros(n, n),
        }
    }

    pub fn affine(constant: f64, linear: Vec<f64>) -> Self {
        let n = linear.len();
        QuadPoly {
            constant,
            linear,
            hessian: DenseMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn is_affine(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.hessian[(i, j)] == 0.0))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let hx = self.hessian.mul_vec(x);
        let lin: f64 = self.linear.iter().zip(x).map(|(a, b)| a * b).sum();
        let quad: f64 = hx.iter().zip(x).map(|(a, b)| a * b).sum();
        self.constant + lin + 0.5 * quad
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let hx = self.hessian.mul_vec(x);
        self.linear.iter().zip(hx).map(|(g, h)| g + h).collect()
    }

    pub fn scaled(&self, factor: f64) -> QuadPoly {
        let mut h = self.hessian.clone();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] *= factor;
            }
        }
        QuadPoly {
            constant: self.constant * factor,
            linear: self.linear.iter().map(|v| v * factor).collect(),
            hessian: h,
        }
    }

    /// `self + factor · other`
    pub fn add_scaled(&mut self, other: &QuadPoly, factor: f64) {
        let n = self.dim();
        self.constant += factor * other.constant;
        for i in 0..n {
            self.linear[i] += factor * other.linear[i];
            for j in 0..n {
                self.hessian[(i, j)] += factor * other.hessian[(i, j)];
            }
        }
    }
}

/// Approximate maximizer of `|p|` over `region`.
///
/// Affine polynomials are maximized exactly: the optimum over a box sits at
/// the vertex selected by the signs of the linear coefficients. Quadratics use
/// multistart minimization of `−p` and `p`.
pub fn maximize_abs_over_box(
    p: &QuadPoly,
    region: &Bounds,
    n_starts: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let hi_vertex: Vec<f64> = p
        .linear
        .iter()
        .enumerate()
        .map(|(i, g)| if *g >= 0.0 { region.upper[i] } else { region.lower[i] })
        .collect();
    let lo_vertex: Vec<f64> = p
        .linear
        .iter()
        .enumerate()
        .map(|(i, g)| if *g >= 0.0 { region.lower[i] } else { region.upper[i] })
        .collect();
    let mut best = (hi_vertex.clone(), p.value(&hi_vertex).abs());
    let lo_val = p.value(&lo_vertex).abs();
    if lo_val > best.1 {
        best = (lo_vertex.clone(), lo_val);
    }
    if p.is_affine() {
        return best;
    }
    let mid = region.midpoint();
    let neg = p.scaled(-1.0);
    for (sign, poly) in [(1.0, &neg), (-1.0, p)] {
        let obj = (|x: &[f64]| poly.value(x), |x: &[f64]| poly.gradient(x));
        let opts = MultistartOptions::new(n_starts, seed)
            .with_start(mid.clone())
            .with_start(if sign > 0.0 { hi_vertex.clone() } else { lo_vertex.clone() })
            .max_iters(200);
        let r = box_multistart_minimize(&obj, region, &opts);
        let v = p.value(&r.x).abs();
        if v > best.1 {
            best = (r.x, v);
        }
    }
    best
}
