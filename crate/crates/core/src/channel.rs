//! Pure-loss bosonic channel `dρ/dφ = tan φ · L[a]ρ`.
//!
//! The loss parameter `φ` relates to the damping time by
//! `tan²φ = exp(γt) − 1`; the channel transmissivity is `cos²φ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, DensityOperator, FockVector, HermitianOperator, C64};

pub const DEFAULT_PHI_MIN: f64 = 1e-3;

/// Loss parameter `φ` restricted to `[φ_min, π/2 − φ_min]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossParameter {
    phi: f64,
    phi_min: f64,
}

impl LossParameter {
    pub fn new(phi: f64) -> Result<Self> {
        Self::with_guard(phi, DEFAULT_PHI_MIN)
    }

    pub fn with_guard(phi: f64, phi_min: f64) -> Result<Self> {
        if !(phi_min >= 0.0 && phi_min < FRAC_PI_4) {
            return Err(Error::domain(format!("phi_min {phi_min} must lie in [0, π/4)")));
        }
        if !phi.is_finite() || phi <= 0.0 || phi >= FRAC_PI_2 {
            return Err(Error::domain(format!("phi {phi} outside (0, π/2)")));
        }
        if phi < phi_min || phi > FRAC_PI_2 - phi_min {
            return Err(Error::domain(format!(
                "phi {phi} outside the guarded interval [{phi_min}, π/2 − {phi_min}]"
            )));
        }
        Ok(Self { phi, phi_min })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn gamma_t(&self) -> f64 {
        self.z().ln_1p()
    }

    pub fn z(&self) -> f64 {
        self.phi.tan().powi(2)
    }

    pub fn transmissivity(&self) -> f64 {
        self.phi.cos().powi(2)
    }

    pub fn tan(&self) -> f64 {
        self.phi.tan()
    }
}

/// The equivalent ways of stating the channel loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossCoordinate {
    Phi,
    GammaT,
    Z,
    Transmissivity,
}

impl FromStr for LossCoordinate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Self::Phi),
            "gamma_t" | "gammat" => Ok(Self::GammaT),
            "z" => Ok(Self::Z),
            "transmissivity" | "eta" => Ok(Self::Transmissivity),
            _ => Err(Error::parse(s, "expected phi, gamma_t, z or transmissivity")),
        }
    }
}

impl fmt::Display for LossCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Phi => "phi",
            Self::GammaT => "gamma_t",
            Self::Z => "z",
            Self::Transmissivity => "transmissivity",
        })
    }
}

/// Converts a loss value between coordinates. All domains are open.
pub fn loss_reparametrize(value: f64, from: LossCoordinate, to: LossCoordinate) -> Result<f64> {
    use LossCoordinate::*;
    if !value.is_finite() {
        return Err(Error::domain(format!("{from} value {value} is not finite")));
    }
    let phi = match from {
        Phi if value > 0.0 && value < FRAC_PI_2 => value,
        GammaT if value > 0.0 => value.exp_m1().sqrt().atan(),
        Z if value > 0.0 => value.sqrt().atan(),
        Transmissivity if value > 0.0 && value < 1.0 => value.sqrt().acos(),
        _ => return Err(Error::domain(format!("{from} value {value} outside its open domain"))),
    };
    Ok(match to {
        Phi => phi,
        GammaT => phi.tan().powi(2).ln_1p(),
        Z => phi.tan().powi(2),
        Transmissivity => phi.cos().powi(2),
    })
}

/// `ln k!` for `k = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// `√C(m, n) sinⁿφ cos^{m−n}φ`: the amplitude of `K_n|m⟩ = · |m−n⟩`.
fn kraus_weight(lnf: &[f64], m: usize, n: usize, sin: f64, cos: f64) -> f64 {
    let ln_binom = lnf[m] - lnf[n] - lnf[m - n];
    (ln_binom * 0.5).exp() * sin.powi(n as i32) * cos.powi((m - n) as i32)
}

/// `K_n = sinⁿφ/√(n!) · cos(φ)^{a†a} aⁿ` for `n = 0..D−1`.
pub fn kraus_operators(phi: &LossParameter, dim: usize) -> Result<Vec<CMatrix>> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (sin, cos) = phi.phi().sin_cos();
    let lnf = ln_factorials(dim);
    Ok((0..dim)
        .map(|n| {
            let mut k = CMatrix::zeros(dim, dim);
            for m in n..dim {
                k[(m - n, m)] = C64::new(kraus_weight(&lnf, m, n, sin, cos), 0.0);
            }
            k
        })
        .collect())
}

/// Output of the channel, `Σ_n K_n ρ K_n†`.
///
/// Each `K_n` shifts levels down by `n`, so the sum is accumulated
/// entrywise. Terms are added in ascending `n`; once `n` is past every
/// binomial mode the remaining terms only shrink, and the sum stops when one
/// drops below `1e-16` in trace.
pub fn evolve(rho: &DensityOperator, phi: &LossParameter) -> DensityOperator {
    DensityOperator::from_hermitian_unchecked(evolve_matrix(rho.matrix(), phi))
}

pub fn evolve_pure(psi: &FockVector, phi: &LossParameter) -> DensityOperator {
    evolve(&psi.density(), phi)
}

pub(crate) fn evolve_matrix(rho: &CMatrix, phi: &LossParameter) -> CMatrix {
    let d = rho.nrows();
    let (sin, cos) = phi.phi().sin_cos();
    let s2 = sin * sin;
    let lnf = ln_factorials(d);
    let mut out = CMatrix::zeros(d, d);
    let mut weights = vec![0.0; d];
    for n in 0..d {
        let len = d - n;
        for (i, w) in weights.iter_mut().take(len).enumerate() {
            *w = kraus_weight(&lnf, i + n, n, sin, cos);
        }
        let mut term_trace = 0.0;
        for j in 0..len {
            let wj = weights[j];
            if wj == 0.0 {
                continue;
            }
            for i in 0..len {
                let t = rho[(i + n, j + n)] * (weights[i] * wj);
                out[(i, j)] += t;
                if i == j {
                    term_trace += t.re.abs();
                }
            }
        }
        if n as f64 > d as f64 * s2 && term_trace < 1e-16 {
            break;
        }
    }
    crate::fock::symmetrize(&out)
}

/// Analytic `dρ/dφ = tan φ (2aρa† − a†aρ − ρa†a)` at the evolved state.
pub fn drho_dphi(rho_phi: &DensityOperator, phi: &LossParameter) -> HermitianOperator {
    let rho = rho_phi.matrix();
    let d = rho.nrows();
    let t = phi.tan();
    let m = CMatrix::from_fn(d, d, |i, j| {
        let jump = if i + 1 < d && j + 1 < d {
            rho[(i + 1, j + 1)] * (2.0 * (((i + 1) * (j + 1)) as f64).sqrt())
        } else {
            C64::new(0.0, 0.0)
        };
        (jump - rho[(i, j)] * (i + j) as f64) * t
    });
    HermitianOperator::from_symmetrized(crate::fock::symmetrize(&m))
}
