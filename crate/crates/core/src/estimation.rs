//! Symmetric logarithmic derivative, quantum Fisher information and the
//! measurements that attain it.
//!
//! Everything is computed in the eigenbasis of the output state
//! `ρ_φ = Σ_k w_k |ψ_k⟩⟨ψ_k|`. With `D = V† (dρ/dφ) V`:
//!
//! * `Λ_{qp} = 2 D_{qp} / (w_p + w_q)`
//! * `H = Σ_{pq} 2 |D_{qp}|² / (w_p + w_q)`
//!
//! where pairs with `w_p + w_q` below `1e-12·Tr ρ` are left out.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{drho_dphi, evolve, LossParameter};
use crate::error::{Error, Result};
use crate::fock::{congruence, hermitian_eig, matmul, CMatrix, CutoffPolicy, DensityOperator, FockVector, HermitianOperator, Spectrum, C64};
use crate::probes::{build_probe, ProbeSpec};
use crate::text::{parse_complex, parse_real};

/// Relative support threshold on `w_p + w_q`.
pub const RANK_EPS: f64 = 1e-12;

/// SLD `Λ(φ)` with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct SldOperator {
    pub matrix: HermitianOperator,
    pub spectrum: Spectrum,
    pub phi: LossParameter,
}

/// `ρ_φ` and `dρ/dφ` expressed in the eigenbasis of `ρ_φ`.
struct Eigenframe {
    rho: Spectrum,
    d: CMatrix,
    eps: f64,
}

impl Eigenframe {
    fn new(rho: &DensityOperator, drho: &HermitianOperator) -> Result<Self> {
        if rho.dim() != drho.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), drho.dim()));
        }
        let trace = rho.trace();
        if !(trace > 0.0) {
            return Err(Error::InvalidInput(format!("state trace {trace} is not positive")));
        }
        let spec = rho.spectrum();
        let d = congruence(&spec.vectors, drho.matrix());
        Ok(Self {
            rho: spec,
            d,
            eps: RANK_EPS * trace,
        })
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = &self.rho.values;
        let n = w.len();
        (0..n).flat_map(move |q| {
            (0..n).filter_map(move |p| {
                let s = w[p] + w[q];
                (s > self.eps).then_some((q, p, s))
            })
        })
    }

    fn pairwise_qfi(&self) -> f64 {
        self.pairs()
            .map(|(q, p, s)| 2.0 * self.d[(q, p)].norm_sqr() / s)
            .sum()
    }

    fn sld_matrix(&self) -> CMatrix {
        let n = self.rho.dim();
        let mut lam = CMatrix::zeros(n, n);
        for (q, p, s) in self.pairs() {
            lam[(q, p)] = self.d[(q, p)] * (2.0 / s);
        }
        matmul(&matmul(&self.rho.vectors, &lam), &self.rho.vectors.adjoint())
    }
}

/// SLD of the output state `ρ_φ` with derivative `dρ`.
pub fn sld(rho: &DensityOperator, drho: &HermitianOperator, phi: &LossParameter) -> Result<SldOperator> {
    let frame = Eigenframe::new(rho, drho)?;
    let matrix = HermitianOperator::new(frame.sld_matrix())?;
    let spectrum = matrix.spectrum();
    Ok(SldOperator {
        matrix,
        spectrum,
        phi: *phi,
    })
}

/// QFI of an input state by both routes: `(pairwise sum, Tr[ρ_φ Λ²])`.
pub fn qfi_routes(rho0: &DensityOperator, phi: &LossParameter) -> Result<(f64, f64)> {
    let rho = evolve(rho0, phi);
    let drho = drho_dphi(&rho, phi);
    let frame = Eigenframe::new(&rho, &drho)?;
    let pairwise = frame.pairwise_qfi();
    let lam = frame.sld_matrix();
    let trace = matmul(&matmul(rho.matrix(), &lam), &lam).trace().re;
    Ok((pairwise, trace))
}

/// QFI of a pure input by the pairwise route.
pub fn qfi_of_state(psi: &FockVector, phi: &LossParameter) -> Result<f64> {
    qfi_of_density(&psi.density(), phi)
}

pub fn qfi_of_density(rho0: &DensityOperator, phi: &LossParameter) -> Result<f64> {
    let rho = evolve(rho0, phi);
    let drho = drho_dphi(&rho, phi);
    Ok(Eigenframe::new(&rho, &drho)?.pairwise_qfi())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Numeric,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Numeric => "numeric",
            Method::ClosedForm => "closed_form",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimationReport {
    pub probe: String,
    pub phi: f64,
    pub nbar: f64,
    pub qfi: f64,
    /// Same quantity by `Tr[ρ_φ Λ²]`.
    pub qfi_trace_route: f64,
    pub ultimate_bound: f64,
    pub runs: u64,
    pub crlb_variance: f64,
    pub ultimate_variance: f64,
    pub cutoff: usize,
    pub method: Method,
}

/// Numeric QFI report for a probe after `runs` channel uses.
pub fn qfi(probe: &ProbeSpec, phi: &LossParameter, policy: &CutoffPolicy) -> Result<EstimationReport> {
    qfi_with_runs(probe, phi, policy, 1)
}

pub fn qfi_with_runs(
    probe: &ProbeSpec,
    phi: &LossParameter,
    policy: &CutoffPolicy,
    runs: u64,
) -> Result<EstimationReport> {
    let psi = build_probe(probe, policy)?;
    let nbar = psi.mean_photon();
    let (h, h_trace) = qfi_routes(&psi.density(), phi)?;
    let bounds = cramer_rao(h, runs, nbar)?;
    Ok(EstimationReport {
        probe: probe.to_string(),
        phi: phi.phi(),
        nbar,
        qfi: h,
        qfi_trace_route: h_trace,
        ultimate_bound: 4.0 * nbar,
        runs,
        crlb_variance: bounds.crlb_variance,
        ultimate_variance: bounds.ultimate_variance,
        cutoff: psi.cutoff(),
        method: Method::Numeric,
    })
}

/// Closed-form QFI families used as oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `H = 4n` for `|n⟩`.
    Fock { n: usize },
    /// `H = 4n̄[1 − (1 − n̄) cos²φ]`.
    Qubit { nbar: f64 },
    /// β = 0 qutrit, `H = 4n̄(1 + z²)/(1 + (2 − n̄)z + z²)`.
    Qutrit02 { nbar: f64 },
    /// Squeezed vacuum at vanishing energy,
    /// `H = 4n̄(1 + z²)/(1 + 2z(1 + n̄) + z²)`.
    GaussianSmallN { nbar: f64 },
    /// Output stays coherent with amplitude `α cos φ`: `H = 4|α|² sin²φ`.
    Coherent { alpha: C64 },
}

pub fn closed_form_qfi(family: &ClosedForm, phi: &LossParameter) -> Result<f64> {
    let z = phi.z();
    match *family {
        ClosedForm::Fock { n } => Ok(4.0 * n as f64),
        ClosedForm::Qubit { nbar } => {
            check_nbar(nbar, 1.0)?;
            Ok(4.0 * nbar * (1.0 - (1.0 - nbar) * phi.phi().cos().powi(2)))
        }
        ClosedForm::Qutrit02 { nbar } => {
            check_nbar(nbar, 2.0)?;
            Ok(4.0 * nbar * (1.0 + z * z) / (1.0 + (2.0 - nbar) * z + z * z))
        }
        ClosedForm::GaussianSmallN { nbar } => {
            check_nbar(nbar, f64::INFINITY)?;
            Ok(4.0 * nbar * (1.0 + z * z) / (1.0 + 2.0 * z * (1.0 + nbar) + z * z))
        }
        ClosedForm::Coherent { alpha } => Ok(4.0 * alpha.norm_sqr() * phi.phi().sin().powi(2)),
    }
}

fn check_nbar(nbar: f64, max: f64) -> Result<()> {
    if nbar >= 0.0 && nbar <= max {
        Ok(())
    } else {
        Err(Error::domain(format!("nbar {nbar} outside [0, {max}]")))
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    /// `fock:n=5`, `qubit:nbar=0.5`, `qutrit02:nbar=0.5`,
    /// `gaussian_small_n:nbar=0.1`, `coherent:alpha=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .unwrap_or(("", ""));
        let want = |k: &str| -> Result<&str> {
            if key == k {
                Ok(value)
            } else {
                Err(Error::parse(s, format!("expected `{k}=`")))
            }
        };
        match tag {
            "fock" => Ok(ClosedForm::Fock {
                n: want("n")?.parse().map_err(|_| Error::parse(s, "bad n"))?,
            }),
            "qubit" => Ok(ClosedForm::Qubit { nbar: parse_real(want("nbar")?)? }),
            "qutrit02" => Ok(ClosedForm::Qutrit02 { nbar: parse_real(want("nbar")?)? }),
            "gaussian_small_n" => Ok(ClosedForm::GaussianSmallN { nbar: parse_real(want("nbar")?)? }),
            "coherent" => Ok(ClosedForm::Coherent { alpha: parse_complex(want("alpha")?)? }),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Rank-one projector `|v⟩⟨v|` with its SLD eigenvalue.
#[derive(Debug, Clone)]
pub struct Projector {
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
}

impl Projector {
    pub fn matrix(&self) -> CMatrix {
        let n = self.vector.len();
        CMatrix::from_fn(n, n, |i, j| self.vector[i] * self.vector[j].conj())
    }
}

/// Eigenprojectors of `Λ`, by descending eigenvalue.
///
/// Degenerate eigenspaces are split along photon number, so a diagonal SLD
/// always yields photon counting.
pub fn optimal_measurement(sld: &SldOperator) -> Vec<Projector> {
    let spec = &sld.spectrum;
    let k = spec.dim();
    let scale = spec.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let full = &spec.vectors;

    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && (spec.values[start] - spec.values[end]).abs() <= 1e-9 * scale {
            end += 1;
        }
        let block = full.columns(start, end - start).into_owned();
        let vectors = if end - start > 1 {
            split_by_photon_number(&block)
        } else {
            block
        };
        for c in 0..vectors.ncols() {
            let v: Vec<C64> = vectors.column(c).iter().copied().collect();
            out.push(Projector {
                eigenvalue: spec.values[start + c],
                vector: FockVector::new(v).map(|f| f.canonical_phase().amplitudes().to_vec()).unwrap_or_default(),
            });
        }
        start = end;
    }
    out
}

fn split_by_photon_number(block: &CMatrix) -> CMatrix {
    let d = block.nrows();
    let number = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    let restricted = block.adjoint() * number * block;
    let spec = hermitian_eig(&crate::fock::symmetrize(&restricted)).expect("Hermitian");
    // ascending photon number
    let cols: Vec<usize> = (0..spec.dim()).rev().collect();
    let rotated = block * &spec.vectors;
    CMatrix::from_fn(d, cols.len(), |i, j| rotated[(i, cols[j])])
}

/// Photon-counting measurement `{|m⟩⟨m|}` on `dim` levels.
pub fn photon_counting(dim: usize) -> Vec<CMatrix> {
    (0..dim)
        .map(|m| {
            let mut p = CMatrix::zeros(dim, dim);
            p[(m, m)] = C64::new(1.0, 0.0);
            p
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalFisher {
    pub value: f64,
    /// Some outcome has vanishing probability but non-vanishing derivative.
    pub unbounded: bool,
}

/// Fisher information of the outcome law `p_x = Tr[Π_x ρ_φ]`.
pub fn classical_fisher(
    povm: &[CMatrix],
    probe: &ProbeSpec,
    phi: &LossParameter,
    policy: &CutoffPolicy,
) -> Result<ClassicalFisher> {
    let psi = build_probe(probe, policy)?;
    classical_fisher_of_density(povm, &psi.density(), phi)
}

pub fn classical_fisher_of_density(
    povm: &[CMatrix],
    rho0: &DensityOperator,
    phi: &LossParameter,
) -> Result<ClassicalFisher> {
    let rho = evolve(rho0, phi);
    let drho = drho_dphi(&rho, phi);
    let mut value = 0.0;
    let mut unbounded = false;
    for element in povm {
        let dim = element.nrows();
        if dim < rho.dim() || !element.is_square() {
            return Err(Error::DimensionMismatch(dim, rho.dim()));
        }
        let r = rho.padded(dim);
        let dr = pad(drho.matrix(), dim);
        let p = (element * r.matrix()).trace().re;
        let dp = (element * dr).trace().re;
        if p < 1e-14 {
            if dp.abs() >= 1e-12 {
                unbounded = true;
            }
            continue;
        }
        value += dp * dp / p;
    }
    Ok(ClassicalFisher { value, unbounded })
}

fn pad(m: &CMatrix, dim: usize) -> CMatrix {
    if m.nrows() == dim {
        return m.clone();
    }
    let mut out = CMatrix::zeros(dim, dim);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CramerRao {
    /// `1/(N H)`, infinite when `H = 0`.
    pub crlb_variance: f64,
    /// `1/(4 n̄ N)`.
    pub ultimate_variance: f64,
}

pub fn cramer_rao(h: f64, runs: u64, nbar: f64) -> Result<CramerRao> {
    if runs == 0 {
        return Err(Error::domain("run count must be at least 1"));
    }
    if !(h >= 0.0) || !(nbar >= 0.0) {
        return Err(Error::domain(format!("need H >= 0 and nbar >= 0, got H={h}, nbar={nbar}")));
    }
    let n = runs as f64;
    let inv = |x: f64| if x > 0.0 { 1.0 / (n * x) } else { f64::INFINITY };
    Ok(CramerRao {
        crlb_variance: inv(h),
        ultimate_variance: inv(4.0 * nbar),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn p() -> CutoffPolicy {
        CutoffPolicy::default()
    }

    fn fock_sld_oracle(n: usize, phi: f64) -> Vec<f64> {
        // Λ = tan φ Σ_k (g_k / f_{n−k}) |k⟩⟨k|
        let s2 = phi.sin().powi(2);
        let c2 = phi.cos().powi(2);
        let binom = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        let f = |k: isize| -> f64 {
            if k < 0 || k as usize > n {
                0.0
            } else {
                let k = k as usize;
                binom(n, k) * s2.powi(k as i32) * c2.powi((n - k) as i32)
            }
        };
        (0..=n)
            .map(|k| {
                let kk = k as isize;
                let top = if k == n { 0.0 } else { f(n as isize - kk - 1) * (k + 1) as f64 };
                let g = 2.0 * (top - f(n as isize - kk) * k as f64);
                phi.tan() * g / f(n as isize - kk)
            })
            .collect()
    }

    #[test]
    fn fock_sld_matches_printed_form() {
        for &(n, phi) in &[(1usize, 0.4), (2, 0.6), (3, 1.1), (5, FRAC_PI_4)] {
            let lp = LossParameter::new(phi).unwrap();
            let rho = evolve(&FockVector::basis(n, n + 1).unwrap().density(), &lp);
            let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
            let want = fock_sld_oracle(n, phi);
            for k in 0..=n {
                assert_abs_diff_eq!(s.matrix.matrix()[(k, k)].re, want[k], epsilon = 1e-9);
                for j in 0..=n {
                    if j != k {
                        assert!(s.matrix.matrix()[(k, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn single_photon_sld_at_quarter_pi() {
        let lp = LossParameter::new(FRAC_PI_4).unwrap();
        let rho = evolve(&FockVector::basis(1, 2).unwrap().density(), &lp);
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        assert_abs_diff_eq!(s.matrix.matrix()[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.matrix.matrix()[(1, 1)].re, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_has_zero_sld_and_qfi() {
        let lp = LossParameter::new(0.7).unwrap();
        let rho = DensityOperator::vacuum();
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        assert_eq!(s.matrix.matrix()[(0, 0)].norm(), 0.0);
        let r = qfi(&ProbeSpec::vacuum(), &lp, &p()).unwrap();
        assert_eq!(r.qfi, 0.0);
        let m = optimal_measurement(&s);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].eigenvalue, 0.0);
        assert_abs_diff_eq!(m[0].vector[0].re, 1.0);
    }

    #[test]
    fn fock_two_qfi_is_eight() {
        for &phi in &[0.1, 0.5, 1.0, 1.4] {
            let r = qfi(&ProbeSpec::Fock { n: 2 }, &LossParameter::new(phi).unwrap(), &p()).unwrap();
            assert_abs_diff_eq!(r.qfi, 8.0, epsilon = 1e-9);
            assert_abs_diff_eq!(r.ultimate_bound, 8.0);
        }
    }

    #[test]
    fn qubit_qfi_example() {
        let lp = LossParameter::new(FRAC_PI_3).unwrap();
        let r = qfi(&ProbeSpec::qubit(0.5).unwrap(), &lp, &p()).unwrap();
        assert_abs_diff_eq!(r.qfi, 1.75, epsilon = 1e-10);
        assert_abs_diff_eq!(r.qfi_trace_route, 1.75, epsilon = 1e-10);
    }

    #[test]
    fn closed_form_examples() {
        let lp = LossParameter::new(0.7).unwrap();
        assert_eq!(closed_form_qfi(&ClosedForm::Fock { n: 5 }, &lp).unwrap(), 20.0);
        let q = LossParameter::new(FRAC_PI_4).unwrap();
        let g = closed_form_qfi(&ClosedForm::GaussianSmallN { nbar: 0.1 }, &q).unwrap();
        assert_abs_diff_eq!(g, 0.190476, epsilon = 1e-6);
        let t = closed_form_qfi(&ClosedForm::Qutrit02 { nbar: 0.5 }, &q).unwrap();
        assert_abs_diff_eq!(t, 1.142857, epsilon = 1e-6);
        assert!(matches!("wigner:n=1".parse::<ClosedForm>(), Err(Error::UnknownFamily(_))));
        assert_eq!("fock:n=5".parse::<ClosedForm>().unwrap(), ClosedForm::Fock { n: 5 });
    }

    #[test]
    fn fock_measurement_is_photon_counting() {
        let lp = LossParameter::new(0.6).unwrap();
        let rho = evolve(&FockVector::basis(2, 3).unwrap().density(), &lp);
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        let m = optimal_measurement(&s);
        assert_eq!(m.len(), 3);
        let mut levels: Vec<usize> = m
            .iter()
            .map(|pr| {
                let k = pr.vector.iter().position(|c| (c.norm() - 1.0).abs() < 1e-9).unwrap();
                assert!(pr.vector.iter().enumerate().all(|(i, c)| i == k || c.norm() < 1e-9));
                k
            })
            .collect();
        levels.sort();
        assert_eq!(levels, vec![0, 1, 2]);
    }

    #[test]
    fn qubit_measurement_spans_two_levels() {
        let lp = LossParameter::new(FRAC_PI_4).unwrap();
        let psi = build_probe(&ProbeSpec::qubit(0.5).unwrap(), &p()).unwrap();
        let rho = evolve(&psi.density(), &lp);
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        let m = optimal_measurement(&s);
        assert_eq!(m.len(), 2);
        let overlap: C64 = m[0].vector.iter().zip(&m[1].vector).map(|(a, b)| a.conj() * b).sum();
        assert!(overlap.norm() < 1e-12);
    }

    #[test]
    fn single_photon_counting_fisher() {
        for &phi in &[0.2, 0.9, 1.4] {
            let lp = LossParameter::new(phi).unwrap();
            let f = classical_fisher(&photon_counting(2), &ProbeSpec::Fock { n: 1 }, &lp, &p()).unwrap();
            assert_abs_diff_eq!(f.value, 4.0, epsilon = 1e-9);
            assert!(!f.unbounded);
        }
    }

    #[test]
    fn trivial_measurement_has_no_information() {
        let lp = LossParameter::new(0.5).unwrap();
        let id = vec![CMatrix::identity(2, 2)];
        let f = classical_fisher(&id, &ProbeSpec::qubit(0.5).unwrap(), &lp, &p()).unwrap();
        assert_abs_diff_eq!(f.value, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sld_projectors_attain_qubit_qfi() {
        let lp = LossParameter::new(FRAC_PI_3).unwrap();
        let spec = ProbeSpec::qubit(0.5).unwrap();
        let psi = build_probe(&spec, &p()).unwrap();
        let rho = evolve(&psi.density(), &lp);
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        let povm: Vec<CMatrix> = optimal_measurement(&s).iter().map(Projector::matrix).collect();
        let f = classical_fisher(&povm, &spec, &lp, &p()).unwrap();
        assert_abs_diff_eq!(f.value, 1.75, epsilon = 1e-9);
    }

    // pure output: the informative direction lies outside the support of ρ_φ
    #[test]
    fn sld_projectors_attain_coherent_qfi() {
        let lp = LossParameter::new(0.1).unwrap();
        let spec = ProbeSpec::Coherent { alpha: C64::new(1.1, 0.4) };
        let psi = build_probe(&spec, &p()).unwrap();
        let rho = evolve(&psi.density(), &lp);
        let s = sld(&rho, &drho_dphi(&rho, &lp), &lp).unwrap();
        let povm: Vec<CMatrix> = optimal_measurement(&s).iter().map(Projector::matrix).collect();
        let f = classical_fisher(&povm, &spec, &lp, &p()).unwrap();
        let h = qfi(&spec, &lp, &p()).unwrap().qfi;
        assert!(!f.unbounded);
        assert!((f.value - h).abs() < 1e-6 * h, "{} vs {h}", f.value);
    }

    #[test]
    fn cramer_rao_examples() {
        let b = cramer_rao(8.0, 100, 2.0).unwrap();
        assert_abs_diff_eq!(b.crlb_variance, 0.00125, epsilon = 1e-15);
        assert_abs_diff_eq!(b.ultimate_variance, 0.00125, epsilon = 1e-15);
        let b = cramer_rao(2.0, 1, 1.0).unwrap();
        assert_eq!((b.crlb_variance, b.ultimate_variance), (0.5, 0.25));
        assert!(cramer_rao(0.0, 1, 1.0).unwrap().crlb_variance.is_infinite());
        assert!(cramer_rao(1.0, 0, 1.0).is_err());
    }
}
