//! Deterministic quasi-random point sets.
//!
//! Multistart solvers, Hessian sampling and benchmark start points all draw
//! from a Halton sequence that is shifted modulo one by a seeded offset
//! (Cranley-Patterson rotation), so every point set is a pure function of
//! `(dimension, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut factor = inv_base;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * factor;
        index /= base;
        factor *= inv_base;
    }
    value
}

/// Seeded, shifted Halton sequence on `[0, 1)^dim`.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    next: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        // index 0 is the origin for every base; skip it
        Halton { shift, next: 1 }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let index = self.next;
        self.next += 1;
        self.shift
            .iter()
            .enumerate()
            .map(|(i, s)| {
                // dimensions beyond the prime table fall back to a scrambled base-2 stream
                let base = PRIMES.get(i).copied().unwrap_or(2) as u64;
                let offset = if i < PRIMES.len() { 0 } else { i as u64 * 7919 };
                (radical_inverse(index + offset, base) + s).fract()
            })
            .collect()
    }

    /// Maps the next point affinely onto the box `[lower, upper]`.
    pub fn next_in_box(&mut self, lower: &[f64], upper: &[f64]) -> Vec<f64> {
        let u = self.next_point();
        u.iter()
            .zip(lower.iter().zip(upper))
            .map(|(t, (lo, hi))| lo + t * (hi - lo))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_stay_in_unit_cube_and_repeat_per_seed() {
        let mut a = Halton::new(5, 42);
        let mut b = Halton::new(5, 42);
        for _ in 0..200 {
            let p = a.next_point();
            assert_eq!(p, b.next_point());
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
        let mut c = Halton::new(5, 43);
        assert_ne!(Halton::new(5, 42).next_point(), c.next_point());
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
