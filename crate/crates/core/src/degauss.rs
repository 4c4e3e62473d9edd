//! Photon subtraction, level truncation and the map from Gaussian
//! parameters `(η, r)` to the qutrit coordinates `(n̄, β)` reached by the
//! truncated subtracted states.

use serde::Serialize;

use crate::channel::LossParameter;
use crate::error::{Error, Result};
use crate::fock::{annihilate, fidelity, norm_sqr, CutoffPolicy, FockVector};
use crate::optimizer::{optimize_qutrit, qutrit_qfi_profile};
use crate::probes::{photon_subtracted_gaussian, qutrit_coords, truncated_subtracted_coeffs};

/// `a|ψ⟩` renormalized.
pub fn photon_subtract(psi: &FockVector) -> Result<FockVector> {
    let raw = annihilate(psi.amplitudes());
    if norm_sqr(&raw) <= 1e-24 {
        return Err(Error::Degenerate("photon subtraction from the vacuum".into()));
    }
    FockVector::new(raw)
}

/// First `levels` amplitudes, renormalized.
pub fn truncate_levels(psi: &FockVector, levels: usize) -> Result<FockVector> {
    if levels == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let kept: Vec<_> = psi.amplitudes().iter().take(levels).copied().collect();
    if norm_sqr(&kept) <= 1e-12 {
        return Err(Error::Degenerate(format!(
            "no weight on the first {levels} levels"
        )));
    }
    FockVector::new(kept)
}

/// Overlap `|⟨ψ|ψ_L⟩|²` between a state and its `L`-level truncation.
pub fn truncation_fidelity(psi: &FockVector, levels: usize) -> Result<f64> {
    let t = truncate_levels(psi, levels)?;
    Ok(fidelity(psi, &t))
}

/// Photon-subtracted displaced squeezed vacuum with real `η ≥ 0`, real `r`
/// and zero relative phase.
pub fn subtracted_gaussian(eta: f64, r: f64, policy: &CutoffPolicy) -> Result<FockVector> {
    if !(eta >= 0.0) {
        return Err(Error::domain(format!("eta must be real and >= 0, got {eta}")));
    }
    photon_subtracted_gaussian(eta, r, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub eta: f64,
    pub r: f64,
    pub nbar: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionMap {
    pub eta_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    /// Ordered by `(η index, r index)`.
    pub points: Vec<RegionPoint>,
    /// Grid points with no usable subtracted state.
    pub skipped: usize,
}

/// Default `η` lattice over `[0, 2]`.
pub fn default_eta_grid() -> Vec<f64> {
    linspace(0.0, 2.0, 201)
}

/// Default `r` lattice over `[−1, 1]`.
pub fn default_r_grid() -> Vec<f64> {
    linspace(-1.0, 1.0, 201)
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// How the three-level truncation of the subtracted state is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionRoute {
    /// Closed-form coefficients.
    #[default]
    Analytic,
    /// Build the full subtracted state, then truncate.
    Numeric,
}

fn truncated_subtracted(eta: f64, r: f64, route: RegionRoute, policy: &CutoffPolicy) -> Result<FockVector> {
    match route {
        RegionRoute::Analytic => FockVector::from_real(&truncated_subtracted_coeffs(eta, r)?),
        RegionRoute::Numeric => truncate_levels(&photon_subtracted_gaussian(eta, r, policy)?, 3),
    }
}

/// Subtract a photon from `D(η)S(r)|0⟩`, keep three levels and record
/// `(n̄, β)` when `n̄ ≤ 1`.
pub fn region_map(
    eta_grid: &[f64],
    r_grid: &[f64],
    route: RegionRoute,
    policy: &CutoffPolicy,
) -> Result<RegionMap> {
    if eta_grid.is_empty() || r_grid.is_empty() {
        return Err(Error::InvalidInput("region grids must be nonempty".into()));
    }
    if let Some(&bad) = eta_grid.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(Error::domain(format!("eta grid value {bad} is not a finite real >= 0")));
    }
    if let Some(&bad) = r_grid.iter().find(|r| !r.is_finite()) {
        return Err(Error::domain(format!("r grid value {bad} is not finite")));
    }
    let mut points = Vec::new();
    let mut skipped = 0;
    for &eta in eta_grid {
        for &r in r_grid {
            let coords = truncated_subtracted(eta, r, route, policy).and_then(|t| qutrit_coords(&t));
            match coords {
                Ok((nbar, beta)) if nbar <= 1.0 => points.push(RegionPoint { eta, r, nbar, beta }),
                Ok(_) => {}
                Err(_) => skipped += 1,
            }
        }
    }
    if skipped > 0 {
        log::info!("region map skipped {skipped} degenerate grid points");
    }
    Ok(RegionMap {
        eta_grid: eta_grid.to_vec(),
        r_grid: r_grid.to_vec(),
        points,
        skipped,
    })
}

pub const COVER_DNBAR: f64 = 0.02;
pub const COVER_DBETA: f64 = 0.03;
/// Relative spread of the qutrit QFI over `β` below which every qutrit of
/// that energy performs alike.
pub const FLAT_SPREAD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEntry {
    pub phi: f64,
    pub nbar: f64,
    pub beta_star: f64,
    pub covered: bool,
    /// Uncovered, but the QFI is flat in `β` so the optimum is immaterial.
    pub exception: bool,
    /// Relative QFI spread over `β ∈ [0, π/2]`.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub entries: Vec<CoverageEntry>,
}

impl CoverageReport {
    /// Every entry is covered or flagged as an exception.
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.covered || e.exception)
    }
}

/// Checks whether the optimal qutrit `β*` is reachable by a truncated
/// subtracted state, by nearest-sample distance in `(n̄, β)`.
pub fn coverage_check(phis: &[LossParameter], nbars: &[f64], region: &RegionMap) -> Result<CoverageReport> {
    if region.points.is_empty() {
        return Err(Error::InvalidInput("region map has no points".into()));
    }
    let mut sorted = region.points.clone();
    sorted.sort_by(|a, b| a.nbar.total_cmp(&b.nbar));
    let mut entries = Vec::with_capacity(phis.len() * nbars.len());
    for phi in phis {
        for &nbar in nbars {
            let best = optimize_qutrit(nbar, phi)?;
            let beta_star = best.best_params[0];
            let lo = sorted.partition_point(|p| p.nbar < nbar - COVER_DNBAR);
            let covered = sorted[lo..]
                .iter()
                .take_while(|p| p.nbar <= nbar + COVER_DNBAR)
                .any(|p| (p.beta - beta_star).abs() <= COVER_DBETA);
            let profile = qutrit_qfi_profile(nbar, phi, 181)?;
            let (lo_h, hi_h) = profile
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, h)| (a.min(h), b.max(h)));
            let spread = if hi_h > 0.0 { (hi_h - lo_h) / hi_h } else { 0.0 };
            entries.push(CoverageEntry {
                phi: phi.phi(),
                nbar,
                beta_star,
                covered,
                exception: !covered && spread < FLAT_SPREAD,
                spread,
            });
        }
    }
    Ok(CoverageReport { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityRecord {
    pub eta: f64,
    pub r: f64,
    pub nbar: f64,
    pub levels: usize,
    pub fidelity: f64,
}

/// Fidelity of each subtracted state on the grid with its `levels`-level
/// truncation, for states with `n̄ ≤ nbar_max`.
pub fn fidelity_audit(
    eta_grid: &[f64],
    r_grid: &[f64],
    levels: usize,
    nbar_max: f64,
    policy: &CutoffPolicy,
) -> Result<Vec<FidelityRecord>> {
    let mut out = Vec::new();
    for &eta in eta_grid {
        for &r in r_grid {
            let Ok(s) = subtracted_gaussian(eta, r, policy) else {
                continue;
            };
            let nbar = s.mean_photon();
            if nbar > nbar_max {
                continue;
            }
            let Ok(f) = truncation_fidelity(&s, levels) else {
                continue;
            };
            out.push(FidelityRecord { eta, r, nbar, levels, fidelity: f });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, displaced_squeezed_vacuum, C64};
    use crate::probes::truncated_subtracted_coeffs;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn p() -> CutoffPolicy {
        CutoffPolicy::default()
    }

    #[test]
    fn subtract_basis_and_vacuum() {
        let out = photon_subtract(&FockVector::basis(1, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(out.amplitude(0).re, 1.0);
        assert!(matches!(photon_subtract(&FockVector::vacuum()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coherent_is_an_eigenstate() {
        let a = coherent(C64::new(1.0, 0.0), &p()).unwrap();
        let s = photon_subtract(&a).unwrap();
        assert!((fidelity(&a, &s) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn subtraction_flips_parity() {
        let sv = displaced_squeezed_vacuum(C64::new(0.0, 0.0), 0.5, 0.0, &p()).unwrap();
        let s = photon_subtract(&sv).unwrap();
        for (m, c) in s.amplitudes().iter().enumerate() {
            if m % 2 == 0 {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn truncation_examples() {
        let v = truncate_levels(&FockVector::vacuum(), 3).unwrap();
        assert_eq!(v.cutoff(), 1);
        let s = subtracted_gaussian(1.0, 0.0, &p()).unwrap();
        let t = truncate_levels(&s, 3).unwrap();
        let want = [0.632456, 0.632456, 0.447214];
        for m in 0..3 {
            assert_abs_diff_eq!(t.amplitude(m).re, want[m], epsilon = 1e-6);
        }
        assert!(truncate_levels(&FockVector::basis(4, 5).unwrap(), 3).is_err());
    }

    #[test]
    fn truncation_matches_closed_form_coefficients() {
        for &(eta, r) in &[(0.8, 0.3), (0.2, -0.7), (1.7, 0.9), (0.0, 0.4)] {
            let t = truncate_levels(&subtracted_gaussian(eta, r, &p()).unwrap(), 3).unwrap();
            let c = truncated_subtracted_coeffs(eta, r).unwrap();
            let f = fidelity(&t, &FockVector::from_real(&c).unwrap());
            assert!((f - 1.0).abs() < 1e-9, "({eta}, {r}) -> {f}");
        }
    }

    #[test]
    fn three_level_fidelity_example() {
        let s = subtracted_gaussian(0.8, 0.3, &p()).unwrap();
        assert!(truncation_fidelity(&s, 3).unwrap() > 0.92);
    }

    #[test]
    fn region_examples() {
        for route in [RegionRoute::Analytic, RegionRoute::Numeric] {
            let m = region_map(&[1.0], &[0.0], route, &p()).unwrap();
            assert_eq!(m.points.len(), 1);
            assert_abs_diff_eq!(m.points[0].nbar, 0.8, epsilon = 1e-9);
            assert_abs_diff_eq!(m.points[0].beta, 0.955317, epsilon = 1e-6);

            let m = region_map(&[0.0], &[0.5], route, &p()).unwrap();
            assert_abs_diff_eq!(m.points[0].beta, FRAC_PI_2, epsilon = 1e-12);

            let m = region_map(&[0.0], &[0.0], route, &p()).unwrap();
            assert_eq!((m.points.len(), m.skipped), (0, 1));
            assert!(region_map(&[], &[0.0], route, &p()).is_err());
        }
    }

    #[test]
    fn region_routes_agree() {
        let etas = linspace(0.0, 2.0, 7);
        let rs = linspace(-1.0, 1.0, 7);
        let a = region_map(&etas, &rs, RegionRoute::Analytic, &p()).unwrap();
        let n = region_map(&etas, &rs, RegionRoute::Numeric, &p()).unwrap();
        assert_eq!(a.points.len(), n.points.len());
        for (x, y) in a.points.iter().zip(&n.points) {
            assert_abs_diff_eq!(x.nbar, y.nbar, epsilon = 1e-9);
            assert_abs_diff_eq!(x.beta, y.beta, epsilon = 1e-9);
        }
    }

    #[test]
    fn coverage_examples() {
        let region = region_map(&default_eta_grid(), &default_r_grid(), RegionRoute::Analytic, &p()).unwrap();
        let phis = [
            LossParameter::new(FRAC_PI_4).unwrap(),
            LossParameter::new(FRAC_PI_4 / 4.0).unwrap(),
        ];
        let rep = coverage_check(&phis[..1], &[0.5], &region).unwrap();
        assert!(rep.entries[0].covered);
        let rep = coverage_check(&phis[1..], &[0.9], &region).unwrap();
        assert!(rep.entries[0].covered);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
    }
}
