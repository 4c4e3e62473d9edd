//! Single-mode truncated Fock space: states, operators and spectra.
//!
//! Every state and operator lives on the span of `|0⟩ .. |D-1⟩`. Matrices are
//! dense `DMatrix<Complex64>`; the dimensions that matter here stay below a
//! few hundred.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Normalization tolerance for amplitude vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace and positivity tolerance for density operators.
pub const DENSITY_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// How large a truncated basis continuous-variable states get.
///
/// The cutoff is the smallest `D` whose neglected population is below
/// `tail_tol`. States needing more than `cap` levels are rejected.
/// `guard` extra levels are carried while exponentiating generators and then
/// cropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub tail_tol: f64,
    pub cap: usize,
    pub guard: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-10,
            cap: 200,
            guard: 10,
        }
    }
}

impl CutoffPolicy {
    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// Normalized pure state `Σ c_m |m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<C64>,
}

impl FockVector {
    /// Builds a state from raw amplitudes, renormalizing them.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm < 1e-300 {
            return Err(Error::Degenerate("all amplitudes vanish".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Fock state `|n⟩` in a space of dimension `dim`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if n >= dim {
            return Err(Error::DimensionMismatch(n + 1, dim));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn vacuum() -> Self {
        Self {
            amplitudes: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of level `m`, zero above the cutoff.
    pub fn amplitude(&self, m: usize) -> C64 {
        self.amplitudes.get(m).copied().unwrap_or(ZERO)
    }

    pub fn mean_photon(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(m, c)| m as f64 * c.norm_sqr())
            .sum()
    }

    /// `⟨self|other⟩`, treating missing levels as zero.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Zero-pads to `dim` levels. Never truncates.
    pub fn padded(&self, dim: usize) -> FockVector {
        let mut amplitudes = self.amplitudes.clone();
        if dim > amplitudes.len() {
            amplitudes.resize(dim, ZERO);
        }
        FockVector { amplitudes }
    }

    /// Highest level with population above `eps`.
    pub fn max_level(&self, eps: f64) -> usize {
        self.amplitudes
            .iter()
            .rposition(|c| c.norm_sqr() > eps)
            .unwrap_or(0)
    }

    pub fn density(&self) -> DensityOperator {
        let d = self.cutoff();
        let m = CMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityOperator::from_hermitian_unchecked(m)
    }

    /// Multiplies by a global phase so the first non-negligible amplitude is
    /// real and positive.
    pub fn canonical_phase(&self) -> FockVector {
        match self.amplitudes.iter().find(|c| c.norm() > 1e-12) {
            Some(c) => {
                let rot = c.conj() / c.norm();
                FockVector {
                    amplitudes: self.amplitudes.iter().map(|a| a * rot).collect(),
                }
            }
            None => self.clone(),
        }
    }
}

/// Hermitian matrix, symmetrized as `(M + M†)/2` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        Ok(Self {
            entries: symmetrize(&entries),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub(crate) fn from_symmetrized(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn spectrum(&self) -> Spectrum {
        spectrum_of_symmetrized(&self.entries)
    }
}

/// Unit-trace positive operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates trace and positivity after symmetrizing.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let matrix = symmetrize(&matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidInput(format!("trace {trace} differs from 1")));
        }
        let spec = spectrum_of_symmetrized(&matrix);
        let min = spec.values.last().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::InvalidInput(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_hermitian_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn vacuum() -> Self {
        FockVector::vacuum().density()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn mean_photon(&self) -> f64 {
        (0..self.dim())
            .map(|m| m as f64 * self.matrix[(m, m)].re)
            .sum()
    }

    pub fn spectrum(&self) -> Spectrum {
        spectrum_of_symmetrized(&self.matrix)
    }

    pub fn padded(&self, dim: usize) -> DensityOperator {
        if dim <= self.dim() {
            return self.clone();
        }
        let mut m = CMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.matrix);
        DensityOperator { matrix: m }
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues descend; the eigenvector in column `k` belongs to
/// `values[k]`. Each column is rotated so its first largest-magnitude entry
/// is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Annihilation, creation and number operators on `D` levels.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub annihilation: CMatrix,
    pub creation: CMatrix,
    pub number: CMatrix,
}

pub fn ladder_operators(dim: usize) -> Result<Ladder> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut annihilation = CMatrix::zeros(dim, dim);
    for m in 1..dim {
        annihilation[(m - 1, m)] = C64::new((m as f64).sqrt(), 0.0);
    }
    let creation = annihilation.adjoint();
    let number = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    });
    Ok(Ladder {
        annihilation,
        creation,
        number,
    })
}

/// Spectral decomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let scale = m.norm().max(1.0);
    let asym = (m - m.adjoint()).norm();
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (‖M − M†‖ = {asym:.3e})"
        )));
    }
    Ok(spectrum_of_symmetrized(&symmetrize(m)))
}

fn spectrum_of_symmetrized(m: &CMatrix) -> Spectrum {
    let d = m.nrows();
    if d == 0 {
        return Spectrum {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let (eigenvalues, eigenvectors) = if is_real(m) {
        // real symmetric input: cheaper solver, same conventions
        let eig = faer::Mat::<f64>::from_fn(d, d, |i, j| m[(i, j)].re)
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("symmetric eigensolver converges");
        let vals: Vec<f64> = (0..d).map(|k| eig.S().column_vector()[k]).collect();
        let u = eig.U();
        (vals, CMatrix::from_fn(d, d, |i, j| C64::new(u[(i, j)], 0.0)))
    } else {
        let eig = to_faer(m)
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("Hermitian eigensolver converges");
        let vals: Vec<f64> = (0..d).map(|k| eig.S().column_vector()[k].re).collect();
        (vals, from_faer(eig.U()))
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));

    let values = order.iter().map(|&k| eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        let v = eigenvectors.column(k);
        let peak = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let pivot = v
            .iter()
            .find(|c| c.norm() >= peak * (1.0 - 1e-9))
            .copied()
            .unwrap_or(C64::new(1.0, 0.0));
        let rot = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            vectors[(i, col)] = v[i] * rot;
        }
    }
    Spectrum { values, vectors }
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|c| c.im == 0.0)
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// `A B` through the blocked kernels of `faer`.
pub(crate) fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if is_real(a) && is_real(b) {
        let fa = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re);
        let fb = faer::Mat::<f64>::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)].re);
        let p = fa * fb;
        CMatrix::from_fn(p.nrows(), p.ncols(), |i, j| C64::new(p[(i, j)], 0.0))
    } else {
        from_faer((to_faer(a) * to_faer(b)).as_ref())
    }
}

/// `V† M V`.
pub(crate) fn congruence(v: &CMatrix, m: &CMatrix) -> CMatrix {
    matmul(&matmul(&v.adjoint(), m), v)
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Borrowed view of either kind of state, for functions accepting both.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a FockVector),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a FockVector> for StateRef<'a> {
    fn from(v: &'a FockVector) -> Self {
        StateRef::Pure(v)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(r: &'a DensityOperator) -> Self {
        StateRef::Mixed(r)
    }
}

pub fn mean_photon<'a>(x: impl Into<StateRef<'a>>) -> f64 {
    match x.into() {
        StateRef::Pure(v) => v.mean_photon(),
        StateRef::Mixed(r) => r.mean_photon(),
    }
}

/// Fidelity between two states; the smaller cutoff is zero-padded.
///
/// Pure/pure gives `|⟨x|y⟩|²`, pure/mixed gives `⟨ψ|ρ|ψ⟩`, mixed/mixed the
/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity<'a, 'b>(x: impl Into<StateRef<'a>>, y: impl Into<StateRef<'b>>) -> f64 {
    let f = match (x.into(), y.into()) {
        (StateRef::Pure(a), StateRef::Pure(b)) => a.inner(b).norm_sqr(),
        (StateRef::Pure(v), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(v)) => {
            expectation_pure(v, r)
        }
        (StateRef::Mixed(a), StateRef::Mixed(b)) => uhlmann(a, b),
    };
    f.clamp(0.0, 1.0)
}

fn expectation_pure(v: &FockVector, r: &DensityOperator) -> f64 {
    let d = v.cutoff().max(r.dim());
    let r = r.padded(d);
    let v = v.padded(d);
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += v.amplitude(i).conj() * r.matrix()[(i, j)] * v.amplitude(j);
        }
    }
    acc.re
}

fn uhlmann(a: &DensityOperator, b: &DensityOperator) -> f64 {
    let d = a.dim().max(b.dim());
    let a = a.padded(d);
    let b = b.padded(d);
    let sqrt_a = psd_sqrt(&a.spectrum());
    let inner = &sqrt_a * b.matrix() * &sqrt_a;
    let s = spectrum_of_symmetrized(&symmetrize(&inner));
    let tr: f64 = s.values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    tr * tr
}

fn psd_sqrt(s: &Spectrum) -> CMatrix {
    let clipped = Spectrum {
        values: s.values.iter().map(|&x| x.max(0.0).sqrt()).collect(),
        vectors: s.vectors.clone(),
    };
    clipped.reconstruct()
}

/// Result of building a state on an adaptively chosen cutoff.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub state: FockVector,
    /// Population dropped by the truncation, before renormalization.
    pub neglected: f64,
}

/// Chooses the smallest cutoff whose neglected population is below the
/// policy tolerance. `build(m)` must return the unnormalized state on `m`
/// levels; it is called with growing `m` until the tail is resolved.
pub(crate) fn truncate_adaptive(
    policy: &CutoffPolicy,
    mut build: impl FnMut(usize) -> Vec<C64>,
) -> Result<Truncated> {
    const MARGIN: usize = 8;
    let limit = policy.cap + MARGIN;
    let mut m = 24.min(limit);
    loop {
        let raw = build(m);
        let total = norm_sqr(&raw);
        if !(total > 1e-300) || !total.is_finite() {
            return Err(Error::Degenerate("state has no weight in the truncated basis".into()));
        }
        // suffix[d] = population of levels >= d
        let mut suffix = vec![0.0; raw.len() + 1];
        for d in (0..raw.len()).rev() {
            suffix[d] = suffix[d + 1] + raw[d].norm_sqr();
        }
        let cut = (1..=raw.len()).find(|&d| suffix[d] / total < policy.tail_tol);
        match cut {
            Some(d) if d > policy.cap => {
                return Err(Error::CutoffOverflow {
                    cap: policy.cap,
                    tail: suffix[policy.cap] / total,
                    tol: policy.tail_tol,
                })
            }
            Some(d) if d + MARGIN <= m || m >= limit => {
                let neglected = suffix[d] / total;
                let state = FockVector::new(raw[..d].to_vec())?;
                return Ok(Truncated { state, neglected });
            }
            _ if m >= limit => {
                return Err(Error::CutoffOverflow {
                    cap: policy.cap,
                    tail: suffix[policy.cap.min(raw.len())] / total,
                    tol: policy.tail_tol,
                })
            }
            _ => m = (2 * m).min(limit),
        }
    }
}

/// `exp(G) v` for a banded generator applied through `apply`, by scaled
/// Taylor steps. `bound` must dominate the operator norm of `G`.
fn exp_action(v: &mut Vec<C64>, bound: f64, apply: impl Fn(&[C64], &mut [C64])) {
    let steps = bound.ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let n = v.len();
    let mut term = vec![ZERO; n];
    let mut next = vec![ZERO; n];
    for _ in 0..steps {
        term.copy_from_slice(v);
        let mut acc = v.clone();
        for k in 1..=60 {
            apply(&term, &mut next);
            let f = h / k as f64;
            for (t, x) in term.iter_mut().zip(&next) {
                *t = x * f;
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if norm_sqr(&term) < 1e-36 * norm_sqr(&acc) {
                break;
            }
        }
        *v = acc;
    }
}

/// `S(ξ)|0⟩ = (cosh r)^{-1/2} Σ_k (−e^{iθ} tanh r)^k √((2k)!)/(2^k k!) |2k⟩`
/// on `n` levels.
fn squeezed_vacuum_raw(r: f64, theta: f64, n: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    let ratio = -C64::from_polar(r.tanh(), theta);
    let mut c = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut m = 0;
    while m < n {
        v[m] = c;
        let k = (m / 2 + 1) as f64;
        c *= ratio * ((2.0 * k * (2.0 * k - 1.0)).sqrt() / (2.0 * k));
        m += 2;
    }
    v
}

/// `D(η) S(ξ)|0⟩` on `dim` levels, computed on `dim + guard` levels and
/// cropped (not renormalized). `ξ = r e^{iθ}` with
/// `S(ξ) = exp[(ξ* a² − ξ a†²)/2]` and `D(η) = exp(η a† − η* a)`.
pub(crate) fn displaced_squeezed_raw(eta: C64, r: f64, theta: f64, dim: usize, guard: usize) -> Vec<C64> {
    let n = dim + guard;
    let mut v = squeezed_vacuum_raw(r, theta, n);
    if eta != ZERO {
        let ec = eta.conj();
        exp_action(&mut v, 2.0 * eta.norm() * (n as f64).sqrt(), |x, out| {
            for m in 0..n {
                let mut acc = ZERO;
                if m >= 1 {
                    acc += eta * (m as f64).sqrt() * x[m - 1];
                }
                if m + 1 < n {
                    acc -= ec * ((m + 1) as f64).sqrt() * x[m + 1];
                }
                out[m] = acc;
            }
        });
    }
    v.truncate(dim);
    v
}

/// Normalized `D(η) S(r e^{iθ})|0⟩` on the cutoff chosen by `policy`.
pub fn displaced_squeezed_vacuum(eta: C64, r: f64, theta: f64, policy: &CutoffPolicy) -> Result<FockVector> {
    Ok(displaced_squeezed_truncated(eta, r, theta, policy)?.state)
}

pub fn displaced_squeezed_truncated(
    eta: C64,
    r: f64,
    theta: f64,
    policy: &CutoffPolicy,
) -> Result<Truncated> {
    if !eta.re.is_finite() || !eta.im.is_finite() || !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidInput("non-finite Gaussian parameter".into()));
    }
    truncate_adaptive(policy, |m| displaced_squeezed_raw(eta, r, theta, m, policy.guard))
}

/// Coherent state `|α⟩`.
pub fn coherent(alpha: C64, policy: &CutoffPolicy) -> Result<FockVector> {
    displaced_squeezed_vacuum(alpha, 0.0, 0.0, policy)
}

/// `a|ψ⟩` without renormalization, one level shorter.
pub(crate) fn annihilate(v: &[C64]) -> Vec<C64> {
    (1..v.len())
        .map(|m| v[m] * (m as f64).sqrt())
        .collect()
}
