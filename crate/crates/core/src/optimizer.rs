//! Fixed-energy QFI maximization over probe families.
//!
//! Constraints are built into the parametrizations so every evaluated
//! candidate is normalized and has the requested mean photon number.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::LossParameter;
use crate::error::{Error, Result};
use crate::estimation::qfi_of_state;
use crate::fock::{displaced_squeezed_vacuum, CutoffPolicy, FockVector, C64};
use crate::probes::{build_probe, ProbeSpec};
use crate::simplex::{minimize, SimplexOptions};

pub const QUTRIT_GRID: usize = 721;
pub const RESTARTS: usize = 32;
pub const MAX_SUPERPOSITION: usize = 8;
pub const GAUSSIAN_X_GRID: usize = 41;
pub const GAUSSIAN_THETA_GRID: usize = 17;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub family: String,
    pub param_names: Vec<String>,
    pub best_params: Vec<f64>,
    pub best_qfi: f64,
    pub nbar: f64,
    pub phi: f64,
    pub starts: usize,
    pub converged: bool,
    pub seed: Option<u64>,
    /// Candidates dropped because their state did not fit under the cutoff cap.
    pub skipped: usize,
}

impl OptimizationResult {
    /// Probe described by `best_params`.
    pub fn probe(&self) -> Result<ProbeSpec> {
        match self.family.as_str() {
            "qutrit" => Ok(ProbeSpec::qutrit(self.nbar, self.best_params[0])),
            "gaussian" => Ok(gaussian_spec(self.nbar, self.best_params[0], self.best_params[1])),
            "superposition" => {
                let k = (self.best_params.len() - 1) / 2;
                let mags = &self.best_params[..=k];
                let phases = &self.best_params[k + 1..];
                let coefficients = (0..=k)
                    .map(|m| C64::from_polar(mags[m], if m == 0 { 0.0 } else { phases[m - 1] }))
                    .collect();
                Ok(ProbeSpec::Superposition { coefficients })
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

fn check_phi_nbar(nbar: f64) -> Result<()> {
    if nbar.is_finite() && nbar > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("nbar must be positive, got {nbar}")))
    }
}

fn qutrit_qfi(nbar: f64, beta: f64, phi: &LossParameter) -> Result<f64> {
    let psi = build_probe(&ProbeSpec::qutrit(nbar, beta), &CutoffPolicy::default())?;
    qfi_of_state(&psi, phi)
}

/// `(β, H)` on `n` evenly spaced `β` over `[0, π/2]` for the μ = ν = π qutrit.
pub fn qutrit_qfi_profile(nbar: f64, phi: &LossParameter, n: usize) -> Result<Vec<(f64, f64)>> {
    check_qutrit_nbar(nbar)?;
    crate::degauss::linspace(0.0, FRAC_PI_2, n.max(2))
        .into_iter()
        .map(|b| Ok((b, qutrit_qfi(nbar, b, phi)?)))
        .collect()
}

fn check_qutrit_nbar(nbar: f64) -> Result<()> {
    if nbar > 0.0 && nbar <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("qutrit optimization needs nbar in (0, 1], got {nbar}")))
    }
}

/// Best `β` for the qutrit of mean photon number `nbar`.
pub fn optimize_qutrit(nbar: f64, phi: &LossParameter) -> Result<OptimizationResult> {
    let profile = qutrit_qfi_profile(nbar, phi, QUTRIT_GRID)?;
    let top = profile.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let i = profile
        .iter()
        .position(|p| p.1 >= top - TIE_TOL)
        .expect("nonempty profile");

    let lo = profile[i.saturating_sub(1)].0;
    let hi = profile[(i + 1).min(profile.len() - 1)].0;
    let (b, h) = golden_max(|b| qutrit_qfi(nbar, b, phi).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-6);
    let (beta, qfi) = if h > profile[i].1 + TIE_TOL { (b, h) } else { profile[i] };
    Ok(OptimizationResult {
        family: "qutrit".into(),
        param_names: vec!["beta".into()],
        best_params: vec![beta],
        best_qfi: qfi,
        nbar,
        phi: phi.phi(),
        starts: 1,
        converged: true,
        seed: None,
        skipped: 0,
    })
}

/// Golden-section maximization on `[a, b]` down to bracket width `tol`.
fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Vertices of `{p ≥ 0, Σp = 1, Σ m p_m = n̄}` over levels `0..=k`: two-level
/// mixtures straddling `n̄`, plus `|n̄⟩` when `n̄` is an integer.
fn energy_vertices(k: usize, nbar: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..=k {
        let fi = i as f64;
        if fi == nbar {
            let mut p = vec![0.0; k + 1];
            p[i] = 1.0;
            out.push(p);
            continue;
        }
        if fi > nbar {
            break;
        }
        for j in (i + 1)..=k {
            let fj = j as f64;
            if fj <= nbar {
                continue;
            }
            let mut p = vec![0.0; k + 1];
            p[i] = (fj - nbar) / (fj - fi);
            p[j] = (nbar - fi) / (fj - fi);
            out.push(p);
        }
    }
    out
}

/// Squared hyperspherical coordinates: `V − 1` angles to `V` weights summing to 1.
fn sphere_weights(angles: &[f64]) -> Vec<f64> {
    let mut w = Vec::with_capacity(angles.len() + 1);
    let mut rest = 1.0;
    for a in angles {
        let (s, c) = a.sin_cos();
        w.push(rest * c * c);
        rest *= s * s;
    }
    w.push(rest);
    w
}

fn sphere_angles(weights: &[f64]) -> Vec<f64> {
    let u: Vec<f64> = weights.iter().map(|w| w.max(0.0).sqrt()).collect();
    (0..u.len().saturating_sub(1))
        .map(|k| {
            let tail = u[k + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
            tail.atan2(u[k])
        })
        .collect()
}

/// Convex weights on `energy_vertices` reproducing the populations `p`.
fn vertex_weights(p: &[f64], nbar: f64, vertices: &[Vec<f64>]) -> Vec<f64> {
    let k = p.len() - 1;
    let mut weights = vec![0.0; vertices.len()];
    let index = |i: usize, j: Option<usize>| {
        vertices.iter().position(|v| match j {
            None => v[i] == 1.0,
            Some(j) => v[i] > 0.0 && v[j] > 0.0,
        })
    };
    let mut deficit: Vec<(usize, f64)> = Vec::new();
    let mut excess: Vec<(usize, f64)> = Vec::new();
    for (m, &pm) in p.iter().enumerate().take(k + 1) {
        let fm = m as f64;
        if fm == nbar {
            if let Some(v) = index(m, None) {
                weights[v] += pm;
            }
        } else if fm < nbar {
            deficit.push((m, pm * (nbar - fm)));
        } else {
            excess.push((m, pm * (fm - nbar)));
        }
    }
    let (mut a, mut b) = (0, 0);
    while a < deficit.len() && b < excess.len() {
        let flow = deficit[a].1.min(excess[b].1);
        let (i, j) = (deficit[a].0, excess[b].0);
        if flow > 0.0 {
            if let Some(v) = index(i, Some(j)) {
                let (fi, fj) = (i as f64, j as f64);
                weights[v] += flow * (fj - fi) / ((nbar - fi) * (fj - nbar));
            }
        }
        deficit[a].1 -= flow;
        excess[b].1 -= flow;
        if deficit[a].1 <= 1e-15 {
            a += 1;
        }
        if excess[b].1 <= 1e-15 {
            b += 1;
        }
    }
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    } else if let Some(w) = weights.first_mut() {
        *w = 1.0;
    }
    weights
}

struct SuperpositionSpace {
    k: usize,
    nbar: f64,
    vertices: Vec<Vec<f64>>,
}

impl SuperpositionSpace {
    fn n_angles(&self) -> usize {
        self.vertices.len() - 1
    }

    fn dim(&self) -> usize {
        self.n_angles() + self.k
    }

    fn coefficients(&self, x: &[f64]) -> Vec<C64> {
        let (angles, phases) = x.split_at(self.n_angles());
        let w = sphere_weights(angles);
        let mut p = vec![0.0; self.k + 1];
        for (wv, v) in w.iter().zip(&self.vertices) {
            for (pm, vm) in p.iter_mut().zip(v) {
                *pm += wv * vm;
            }
        }
        (0..=self.k)
            .map(|m| {
                let phase = if m == 0 { 0.0 } else { phases[m - 1] };
                C64::from_polar(p[m].max(0.0).sqrt(), phase)
            })
            .collect()
    }

    fn encode(&self, c: &[C64]) -> Vec<f64> {
        let mut p: Vec<f64> = (0..=self.k)
            .map(|m| c.get(m).map_or(0.0, |z| z.norm_sqr()))
            .collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let mut x = sphere_angles(&vertex_weights(&p, self.nbar, &self.vertices));
        let ref_phase = c.first().map_or(0.0, |z| z.arg());
        for m in 1..=self.k {
            x.push(c.get(m).map_or(0.0, |z| wrap(z.arg() - ref_phase)));
        }
        x
    }

    fn qfi(&self, x: &[f64], phi: &LossParameter) -> f64 {
        FockVector::new(self.coefficients(x))
            .and_then(|psi| qfi_of_state(&psi, phi))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// `[|c_0|..|c_k|, arg c_1..arg c_k]`.
    fn report_params(&self, x: &[f64]) -> Vec<f64> {
        let c = self.coefficients(x);
        let mut out: Vec<f64> = c.iter().map(|z| z.norm()).collect();
        out.extend(c.iter().skip(1).map(|z| if z.norm() > 0.0 { wrap(z.arg()) } else { 0.0 }));
        out
    }
}

fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// Best superposition of `|0⟩..|kmax⟩` with mean photon number `nbar`.
///
/// Multi-start simplex search, one seeded stream per restart. The first
/// start is the optimum for `kmax − 1` (and the optimal qutrit), so the
/// result never falls below the smaller family.
pub fn optimize_superposition(kmax: usize, nbar: f64, phi: &LossParameter, seed: u64) -> Result<OptimizationResult> {
    if kmax == 0 || kmax > MAX_SUPERPOSITION {
        return Err(Error::domain(format!("kmax must lie in 1..={MAX_SUPERPOSITION}, got {kmax}")));
    }
    if !(nbar >= 0.0) || nbar > kmax as f64 {
        return Err(Error::domain(format!("nbar {nbar} infeasible with levels up to {kmax}")));
    }
    let space = SuperpositionSpace {
        k: kmax,
        nbar,
        vertices: energy_vertices(kmax, nbar),
    };

    let mut warm: Vec<Vec<C64>> = Vec::new();
    if kmax >= 2 && nbar <= (kmax - 1) as f64 {
        let lower = optimize_superposition(kmax - 1, nbar, phi, seed)?;
        if let ProbeSpec::Superposition { coefficients } = lower.probe()? {
            warm.push(coefficients);
        }
    }
    if kmax >= 2 && nbar > 0.0 && nbar <= 1.0 {
        let q = optimize_qutrit(nbar, phi)?;
        warm.push(build_probe(&q.probe()?, &CutoffPolicy::default())?.amplitudes().to_vec());
    }

    let opts = SimplexOptions::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = true;
    let mut consider = |h: f64, params: Vec<f64>| {
        let better = match &best {
            None => true,
            Some((bh, bp)) => h > bh + TIE_TOL || (h >= bh - TIE_TOL && lex_less(&params, bp)),
        };
        if better {
            best = Some((h, params));
        }
    };

    for (start, x0) in starts(&space, &warm, seed).into_iter().enumerate() {
        let r = minimize(|x| -space.qfi(x, phi), &x0, &opts);
        converged &= r.converged;
        let h0 = space.qfi(&x0, phi);
        let (h, x) = if -r.value >= h0 { (-r.value, r.x) } else { (h0, x0) };
        log::debug!("superposition k={kmax} start {start}: H = {h}");
        consider(h, space.report_params(&x));
    }

    let (_, params) = best.expect("at least one start");
    let result = OptimizationResult {
        family: "superposition".into(),
        param_names: superposition_names(kmax),
        best_params: params,
        best_qfi: 0.0,
        nbar,
        phi: phi.phi(),
        starts: RESTARTS,
        converged,
        seed: Some(seed),
        skipped: 0,
    };
    let best_qfi = reevaluate(&result)?;
    Ok(OptimizationResult { best_qfi, ..result })
}

fn superposition_names(k: usize) -> Vec<String> {
    (0..=k)
        .map(|m| format!("abs_c{m}"))
        .chain((1..=k).map(|m| format!("arg_c{m}")))
        .collect()
}

/// Initial points: warm starts first, random ones to fill `RESTARTS`.
fn starts(space: &SuperpositionSpace, warm: &[Vec<C64>], seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = warm.iter().map(|c| space.encode(c)).collect();
    let mut index = 0u64;
    while out.len() < RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        index += 1;
        let mut x: Vec<f64> = (0..space.n_angles()).map(|_| rng.random_range(0.0..FRAC_PI_2)).collect();
        x.extend((0..space.k).map(|_| rng.random_range(-PI..PI)));
        debug_assert_eq!(x.len(), space.dim());
        out.push(x);
    }
    out.truncate(RESTARTS.max(warm.len()));
    out
}

/// QFI of the probe described by an optimization result.
pub fn reevaluate(result: &OptimizationResult) -> Result<f64> {
    let phi = LossParameter::with_guard(result.phi, 0.0)?;
    let psi = build_probe(&result.probe()?, &CutoffPolicy::default())?;
    qfi_of_state(&psi, &phi)
}

fn gaussian_spec(nbar: f64, x: f64, theta: f64) -> ProbeSpec {
    let x = x.clamp(0.0, 1.0);
    ProbeSpec::Gaussian {
        eta: C64::new(((1.0 - x) * nbar).sqrt(), 0.0),
        r: (x * nbar).sqrt().asinh(),
        theta_rel: theta,
    }
}

/// QFI of the displaced squeezed vacuum with squeezing fraction `x`
/// (`sinh²r = x n̄`) and squeezing phase `theta` relative to the displacement.
pub fn gaussian_qfi(nbar: f64, x: f64, theta: f64, phi: &LossParameter, policy: &CutoffPolicy) -> Result<f64> {
    let ProbeSpec::Gaussian { eta, r, theta_rel } = gaussian_spec(nbar, x, theta) else {
        unreachable!()
    };
    let psi = displaced_squeezed_vacuum(eta, r, theta_rel, policy)?;
    qfi_of_state(&psi, phi)
}

/// Best displaced squeezed vacuum with `|η|² + sinh²r = n̄`.
///
/// Candidates that need more levels than the cap allows are skipped and
/// counted in `skipped`.
pub fn optimize_gaussian(nbar: f64, phi: &LossParameter, policy: &CutoffPolicy) -> Result<OptimizationResult> {
    check_phi_nbar(nbar)?;
    let xs = crate::degauss::linspace(0.0, 1.0, GAUSSIAN_X_GRID);
    let thetas = crate::degauss::linspace(0.0, PI, GAUSSIAN_THETA_GRID);
    let mut skipped = 0usize;
    let mut best: Option<(f64, [f64; 2])> = None;
    for &x in &xs {
        for &t in &thetas {
            match gaussian_qfi(nbar, x, t, phi, policy) {
                Ok(h) => {
                    if best.is_none_or(|(bh, _)| h > bh + TIE_TOL) {
                        best = Some((h, [x, t]));
                    }
                }
                Err(Error::CutoffOverflow { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let Some((grid_h, grid_p)) = best else {
        return Err(Error::CutoffOverflow {
            cap: policy.cap,
            tail: 1.0,
            tol: policy.tail_tol,
        });
    };

    let mut refine_skips = 0usize;
    let r = minimize(
        |p| {
            if !(0.0..=1.0).contains(&p[0]) || !(0.0..=PI).contains(&p[1]) {
                return f64::INFINITY;
            }
            match gaussian_qfi(nbar, p[0], p[1], phi, policy) {
                Ok(h) => -h,
                Err(_) => {
                    refine_skips += 1;
                    f64::INFINITY
                }
            }
        },
        &grid_p,
        &SimplexOptions {
            step: 0.5 / (GAUSSIAN_X_GRID - 1) as f64,
            ..Default::default()
        },
    );
    skipped += refine_skips;
    let (h, p) = if -r.value > grid_h { (-r.value, [r.x[0], r.x[1]]) } else { (grid_h, grid_p) };
    Ok(OptimizationResult {
        family: "gaussian".into(),
        param_names: vec!["squeeze_fraction".into(), "theta_rel".into()],
        best_params: p.to_vec(),
        best_qfi: h,
        nbar,
        phi: phi.phi(),
        starts: 1,
        converged: r.converged,
        seed: None,
        skipped,
    })
}
