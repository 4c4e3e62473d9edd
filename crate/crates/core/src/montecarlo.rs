//! Simulated photon-counting estimation of the loss with Fock probes.
//!
//! Each run sends `|n⟩` through the channel and counts survivors,
//! `k ~ Binomial(n, cos²φ)`. From the total `S` over `N` runs the maximum
//! likelihood estimate is `φ̂ = arccos √(S/(nN))`.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::channel::LossParameter;
use crate::error::{Error, Result};

pub const MIN_RUNS: u64 = 100;
pub const MIN_REPETITIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub n: u64,
    pub phi_true: f64,
    pub runs: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub phi_hat_mean: f64,
    pub empirical_variance: f64,
    /// `1/(4nN)`.
    pub crlb: f64,
    /// `empirical_variance · 4nN`.
    pub normalized_variance: f64,
    /// Repetitions whose estimate sat on a domain boundary and was clipped.
    pub clipped: usize,
}

/// Estimates per repetition, in repetition order.
pub fn fock_estimates(n: u64, phi: &LossParameter, runs: u64, repetitions: usize, seed: u64) -> Result<(Vec<f64>, usize)> {
    check(n, phi, runs, repetitions)?;
    let eta = phi.transmissivity();
    let counts = Binomial::new(n, eta).map_err(|e| Error::domain(e.to_string()))?;
    let lo = phi.phi_min();
    let hi = FRAC_PI_2 - phi.phi_min();
    let total = (n * runs) as f64;
    let mut clipped = 0;
    let estimates = (0..repetitions)
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let s: u64 = (0..runs).map(|_| counts.sample(&mut rng)).sum();
            let raw = (s as f64 / total).sqrt().acos();
            let est = raw.clamp(lo.max(f64::MIN_POSITIVE), hi);
            if s == 0 || s == n * runs || est != raw {
                clipped += 1;
            }
            est
        })
        .collect();
    Ok((estimates, clipped))
}

fn check(n: u64, phi: &LossParameter, runs: u64, repetitions: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("Fock probe needs n >= 1"));
    }
    if runs < MIN_RUNS {
        return Err(Error::domain(format!("need at least {MIN_RUNS} runs, got {runs}")));
    }
    if repetitions < MIN_REPETITIONS {
        return Err(Error::domain(format!(
            "need at least {MIN_REPETITIONS} repetitions, got {repetitions}"
        )));
    }
    let margin = 10.0 / (4.0 * n as f64 * runs as f64).sqrt();
    let p = phi.phi();
    if p - phi.phi_min() < margin || FRAC_PI_2 - phi.phi_min() - p < margin {
        return Err(Error::domain(format!(
            "phi {p} lies within {margin:.3e} of the domain guard"
        )));
    }
    Ok(())
}

pub fn simulate_fock_estimation(
    n: u64,
    phi: &LossParameter,
    runs: u64,
    repetitions: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let (est, clipped) = fock_estimates(n, phi, runs, repetitions, seed)?;
    let r = est.len() as f64;
    let mean = est.iter().sum::<f64>() / r;
    let var = est.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let scale = 4.0 * n as f64 * runs as f64;
    Ok(ExperimentReport {
        n,
        phi_true: phi.phi(),
        runs,
        repetitions,
        seed,
        phi_hat_mean: mean,
        empirical_variance: var,
        crlb: 1.0 / scale,
        normalized_variance: var * scale,
        clipped,
    })
}

/// Fisher information of the survivor count `Binomial(n, cos²φ)`.
pub fn binomial_fisher(n: u64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let dp = -2.0 * s * c;
    let p = c * c;
    n as f64 * dp * dp / (p * (1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn binomial_information_is_four_n() {
        for &(n, phi) in &[(1u64, 0.3), (3, 1.1), (7, FRAC_PI_4)] {
            assert!((binomial_fisher(n, phi) - 4.0 * n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn efficient_at_quarter_pi() {
        let r = simulate_fock_estimation(1, &LossParameter::new(FRAC_PI_4).unwrap(), 10_000, 200, 7).unwrap();
        assert!((0.85..=1.15).contains(&r.normalized_variance), "{}", r.normalized_variance);
        assert_eq!(r.clipped, 0);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let phi = LossParameter::new(FRAC_PI_3).unwrap();
        let a = simulate_fock_estimation(2, &phi, 1000, 20, 3).unwrap();
        let b = simulate_fock_estimation(2, &phi, 1000, 20, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate_fock_estimation(2, &phi, 1000, 20, 4).unwrap();
        assert_ne!(a.phi_hat_mean, c.phi_hat_mean);
    }

    #[test]
    fn rejects_small_experiments_and_guard() {
        let phi = LossParameter::new(0.5).unwrap();
        assert!(simulate_fock_estimation(1, &phi, 99, 20, 0).is_err());
        assert!(simulate_fock_estimation(1, &phi, 100, 9, 0).is_err());
        assert!(simulate_fock_estimation(0, &phi, 100, 10, 0).is_err());
        let edge = LossParameter::new(0.01).unwrap();
        assert!(simulate_fock_estimation(1, &edge, 100, 10, 0).is_err());
    }
}
