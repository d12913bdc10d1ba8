//! Seeded randomness shared by the solver, the catalog and the optimizer.

use core::f64::consts::TAU;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{C64, c};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (independent N(0, 1/2) parts, E|z|^2 = 1).
pub fn complex_gaussian(rng: &mut SeededRng) -> C64 {
    let s = Float::sqrt(0.5);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re * s, im * s)
}

pub fn real_gaussian(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform point on the unit circle.
pub fn unit_complex(rng: &mut SeededRng) -> C64 {
    let theta: f64 = rng.random::<f64>() * TAU;
    C64::from_polar(1.0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = seeded(5);
        let mut b = seeded(5);
        for _ in 0..10 {
            assert_eq!(complex_gaussian(&mut a), complex_gaussian(&mut b));
        }
        assert!((unit_complex(&mut a).norm() - 1.0).abs() < 1e-15);
    }
}
