#![allow(dead_code)]

use lossqfi_core::fock::CMatrix;
use lossqfi_core::{DensityOperator, FockVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> FockVector {
    let amps = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    FockVector::new(amps).unwrap()
}

/// `G G† / Tr` for a random `dim × rank` matrix `G`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DensityOperator {
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m / C64::new(tr, 0.0)).unwrap()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}
