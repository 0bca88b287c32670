use serde::{Deserialize, Serialize};

/// Radial functions that are conditionally positive definite of order ≤ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfKernel {
    /// `r³`, order 2, needs a linear tail.
    Cubic,
    /// `−√(1 + (αr)²)`, order 1.
    Multiquadric,
    /// `exp(−(αr)²)`, order 0.
    Gaussian,
}

impl RbfKernel {
    /// Smallest admissible polynomial tail degree, `max{0, D − 1}`.
    pub fn min_tail_degree(self) -> u8 {
        match self {
            RbfKernel::Cubic => 1,
            RbfKernel::Multiquadric | RbfKernel::Gaussian => 0,
        }
    }

    pub fn uses_shape(self) -> bool {
        !matches!(self, RbfKernel::Cubic)
    }

    pub fn phi(self, r: f64, alpha: f64) -> f64 {
        match self {
            RbfKernel::Cubic => r * r * r,
            RbfKernel::Multiquadric => -(1.0 + (alpha * r).powi(2)).sqrt(),
            RbfKernel::Gaussian => (-(alpha * r).powi(2)).exp(),
        }
    }

    /// `φ'(r) / r`, finite at `r = 0` for all supported kernels.
    pub fn dphi_over_r(self, r: f64, alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        match self {
            RbfKernel::Cubic => 3.0 * r,
            RbfKernel::Multiquadric => -a2 / (1.0 + a2 * r * r).sqrt(),
            RbfKernel::Gaussian => -2.0 * a2 * (-a2 * r * r).exp(),
        }
    }

    pub fn d2phi(self, r: f64, alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        match self {
            RbfKernel::Cubic => 6.0 * r,
            RbfKernel::Multiquadric => -a2 / (1.0 + a2 * r * r).powf(1.5),
            RbfKernel::Gaussian => (4.0 * a2 * a2 * r * r - 2.0 * a2) * (-a2 * r * r).exp(),
        }
    }
}

/// Shape parameter inversely proportional to the radius, clamped to `[lo, hi]`.
pub fn adaptive_shape(radius: f64, c_alpha: f64, alpha_lo: f64, alpha_hi: f64) -> f64 {
    (c_alpha / radius).clamp(alpha_lo, alpha_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(RbfKernel::Cubic.phi(2.0, 1.0), 8.0);
        assert_eq!(RbfKernel::Gaussian.phi(0.0, 3.0), 1.0);
        assert_eq!(RbfKernel::Multiquadric.phi(0.0, 1.0), -1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for kernel in [RbfKernel::Cubic, RbfKernel::Multiquadric, RbfKernel::Gaussian] {
            for &r in &[0.3, 0.9, 1.7] {
                let h = 1e-5;
                let alpha = 1.3;
                let d1 = (kernel.phi(r + h, alpha) - kernel.phi(r - h, alpha)) / (2.0 * h);
                let d2 = (kernel.phi(r + h, alpha) - 2.0 * kernel.phi(r, alpha) + kernel.phi(r - h, alpha)) / (h * h);
                assert!((kernel.dphi_over_r(r, alpha) * r - d1).abs() < 1e-6, "{kernel:?}");
                assert!((kernel.d2phi(r, alpha) - d2).abs() < 1e-4, "{kernel:?}");
            }
        }
    }

    #[test]
    fn adaptive_shape_clamps() {
        assert!((adaptive_shape(0.1, 20.0, 1e-2, 1e3) - 200.0).abs() < 1e-9);
        assert_eq!(adaptive_shape(1e9, 20.0, 1e-2, 1e3), 1e-2);
        assert_eq!(adaptive_shape(1e-9, 20.0, 1e-2, 1e3), 1e3);
    }
}
