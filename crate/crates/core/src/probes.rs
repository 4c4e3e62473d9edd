//! Probe-state families and their canonical text form.
//!
//! The text form is `family:key=value,key=value`, for instance `fock:n=2`,
//! `qutrit:nbar=0.5,beta=0.3`, `subtracted:eta=1.0,r=0.4` or
//! `cat:alpha=1.2,sign=+`. Angles accept multiples of `pi`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{
    annihilate, displaced_squeezed_raw, truncate_adaptive, CutoffPolicy, FockVector, C64,
};
use crate::text::{parse_complex, parse_real};

/// Relative sign of a cat state `|α⟩ ± |−α⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatParity {
    Even,
    Odd,
}

impl CatParity {
    pub fn sign(self) -> f64 {
        match self {
            CatParity::Even => 1.0,
            CatParity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    Fock { n: usize },
    /// `cos θ|0⟩ + e^{iϕ} sin θ|1⟩`.
    Qubit { theta: f64, varphi: f64 },
    /// `cos α|0⟩ + e^{iμ} sin α sin β|1⟩ + e^{iν} sin α cos β|2⟩`, with `α`
    /// fixed by the mean photon number.
    Qutrit { nbar: f64, beta: f64, mu: f64, nu: f64 },
    Superposition { coefficients: Vec<C64> },
    Coherent { alpha: C64 },
    Cat { alpha: f64, parity: CatParity },
    /// `D(η) S(r e^{iθ})|0⟩`.
    Gaussian { eta: C64, r: f64, theta_rel: f64 },
    /// `a D(η) S(r)|0⟩`, renormalized.
    PhotonSubtracted { eta: f64, r: f64 },
    /// First `levels` Fock amplitudes of the photon-subtracted state.
    TruncatedSubtracted { eta: f64, r: f64, levels: usize },
}

impl ProbeSpec {
    pub fn vacuum() -> Self {
        ProbeSpec::Fock { n: 0 }
    }

    /// Qubit probe with mean photon number `nbar` and zero phase.
    pub fn qubit(nbar: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nbar) {
            return Err(Error::domain(format!("qubit nbar {nbar} outside [0, 1]")));
        }
        Ok(ProbeSpec::Qubit {
            theta: nbar.sqrt().asin(),
            varphi: 0.0,
        })
    }

    /// Qutrit probe with the phases at their optimum `μ = ν = π`.
    pub fn qutrit(nbar: f64, beta: f64) -> Self {
        ProbeSpec::Qutrit {
            nbar,
            beta,
            mu: PI,
            nu: PI,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ProbeSpec::Fock { .. } => "fock",
            ProbeSpec::Qubit { .. } => "qubit",
            ProbeSpec::Qutrit { .. } => "qutrit",
            ProbeSpec::Superposition { .. } => "superposition",
            ProbeSpec::Coherent { .. } => "coherent",
            ProbeSpec::Cat { .. } => "cat",
            ProbeSpec::Gaussian { .. } => "gaussian",
            ProbeSpec::PhotonSubtracted { .. } => "subtracted",
            ProbeSpec::TruncatedSubtracted { .. } => "truncsub",
        }
    }

    /// Mean photon number implied by the parameters, where a closed form
    /// exists.
    pub fn nominal_nbar(&self) -> Option<f64> {
        match *self {
            ProbeSpec::Fock { n } => Some(n as f64),
            ProbeSpec::Qubit { theta, .. } => Some(theta.sin().powi(2)),
            ProbeSpec::Qutrit { nbar, .. } => Some(nbar),
            ProbeSpec::Superposition { ref coefficients } => {
                let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
                (norm > 0.0).then(|| {
                    coefficients
                        .iter()
                        .enumerate()
                        .map(|(m, c)| m as f64 * c.norm_sqr())
                        .sum::<f64>()
                        / norm
                })
            }
            ProbeSpec::Coherent { alpha } => Some(alpha.norm_sqr()),
            ProbeSpec::Cat { alpha, parity } => Some(cat_nbar(alpha, parity)),
            ProbeSpec::Gaussian { eta, r, .. } => Some(eta.norm_sqr() + r.sinh().powi(2)),
            ProbeSpec::PhotonSubtracted { .. } | ProbeSpec::TruncatedSubtracted { .. } => None,
        }
    }
}

/// Builds the normalized probe state.
pub fn build_probe(spec: &ProbeSpec, policy: &CutoffPolicy) -> Result<FockVector> {
    match *spec {
        ProbeSpec::Fock { n } => {
            if n + 1 > policy.cap.max(1) {
                return Err(Error::CutoffOverflow {
                    cap: policy.cap,
                    tail: 1.0,
                    tol: policy.tail_tol,
                });
            }
            FockVector::basis(n, n + 1)
        }
        ProbeSpec::Qubit { theta, varphi } => {
            if !(0.0..=FRAC_PI_2).contains(&theta) || !varphi.is_finite() {
                return Err(Error::domain(format!("qubit theta {theta} outside [0, π/2]")));
            }
            FockVector::new(vec![
                C64::new(theta.cos(), 0.0),
                C64::from_polar(theta.sin(), varphi),
            ])
        }
        ProbeSpec::Qutrit { nbar, beta, mu, nu } => {
            let alpha = qutrit_alpha(nbar, beta)?;
            if !mu.is_finite() || !nu.is_finite() {
                return Err(Error::domain("qutrit phases must be finite"));
            }
            let (sa, ca) = alpha.sin_cos();
            FockVector::new(vec![
                C64::new(ca, 0.0),
                C64::from_polar(sa * beta.sin(), mu),
                C64::from_polar(sa * beta.cos(), nu),
            ])
        }
        ProbeSpec::Superposition { ref coefficients } => FockVector::new(coefficients.clone()),
        ProbeSpec::Coherent { alpha } => {
            truncate_adaptive(policy, |m| displaced_squeezed_raw(alpha, 0.0, 0.0, m, policy.guard))
                .map(|t| t.state)
        }
        ProbeSpec::Cat { alpha, parity } => {
            if !alpha.is_finite() || alpha == 0.0 {
                return Err(Error::Degenerate("cat state with alpha = 0".into()));
            }
            let sign = parity.sign();
            truncate_adaptive(policy, |m| {
                let mut v = displaced_squeezed_raw(C64::new(alpha, 0.0), 0.0, 0.0, m, policy.guard);
                for (k, c) in v.iter_mut().enumerate() {
                    let parity_sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *c *= 1.0 + sign * parity_sign;
                }
                v
            })
            .map(|t| t.state)
        }
        ProbeSpec::Gaussian { eta, r, theta_rel } => {
            crate::fock::displaced_squeezed_vacuum(eta, r, theta_rel, policy)
        }
        ProbeSpec::PhotonSubtracted { eta, r } => photon_subtracted_gaussian(eta, r, policy),
        ProbeSpec::TruncatedSubtracted { eta, r, levels } => {
            if levels == 0 {
                return Err(Error::InvalidDimension(0));
            }
            if levels == 3 {
                let c = truncated_subtracted_coeffs(eta, r)?;
                return FockVector::from_real(&c);
            }
            let full = photon_subtracted_gaussian(eta, r, policy)?;
            crate::degauss::truncate_levels(&full, levels)
        }
    }
}

/// `a D(η) S(r)|0⟩` renormalized, with the cutoff chosen on the subtracted
/// state itself.
pub(crate) fn photon_subtracted_gaussian(eta: f64, r: f64, policy: &CutoffPolicy) -> Result<FockVector> {
    if !eta.is_finite() || !r.is_finite() {
        return Err(Error::InvalidInput("non-finite subtraction parameters".into()));
    }
    if eta == 0.0 && r == 0.0 {
        return Err(Error::Degenerate("photon subtraction from the vacuum".into()));
    }
    truncate_adaptive(policy, |m| {
        annihilate(&displaced_squeezed_raw(C64::new(eta, 0.0), r, 0.0, m + 1, policy.guard))
    })
    .map(|t| t.state)
}

/// `α = arcsin √(2n̄/(cos 2β + 3))` for the fixed-energy qutrit.
pub fn qutrit_alpha(nbar: f64, beta: f64) -> Result<f64> {
    if !(nbar > 0.0 && nbar <= 2.0) {
        return Err(Error::domain(format!("qutrit nbar {nbar} outside (0, 2]")));
    }
    if !(0.0..=FRAC_PI_2).contains(&beta) {
        return Err(Error::domain(format!("qutrit beta {beta} outside [0, π/2]")));
    }
    let s2 = 2.0 * nbar / ((2.0 * beta).cos() + 3.0);
    if s2 > 1.0 + 1e-12 {
        return Err(Error::domain(format!(
            "qutrit (nbar={nbar}, beta={beta}) unattainable: sin²α = {s2} > 1"
        )));
    }
    Ok(s2.min(1.0).sqrt().asin())
}

/// Normalized 3-level truncation of `a D(η) S(r)|0⟩` in closed form.
pub fn truncated_subtracted_coeffs(eta: f64, r: f64) -> Result<[f64; 3]> {
    if !(eta >= 0.0) || !eta.is_finite() || !r.is_finite() {
        return Err(Error::domain(format!("need real eta >= 0 and finite r, got ({eta}, {r})")));
    }
    let t = r.tanh();
    let k0 = eta * (t + 1.0);
    let k1 = k0 * k0 - t;
    let k2 = k0 * (k0 * k0 - 3.0 * t) / 2f64.sqrt();
    let norm = (k0 * k0 + k1 * k1 + k2 * k2).sqrt();
    if norm < 1e-300 {
        return Err(Error::Degenerate("truncated subtracted state vanishes".into()));
    }
    Ok([k0 / norm, k1 / norm, k2 / norm])
}

/// `(n̄, β)` of a state supported on `|0⟩, |1⟩, |2⟩`.
pub fn qutrit_coords(state: &FockVector) -> Result<(f64, f64)> {
    if let Some(m) = (3..state.cutoff()).find(|&m| state.amplitude(m).norm() >= 1e-9) {
        return Err(Error::domain(format!("state has support on level {m} > 2")));
    }
    let c1 = state.amplitude(1).norm();
    let c2 = state.amplitude(2).norm();
    if c1 + c2 == 0.0 {
        return Err(Error::Degenerate("beta undefined for the vacuum".into()));
    }
    let nbar = c1 * c1 + 2.0 * c2 * c2;
    Ok((nbar, c1.atan2(c2)))
}

fn cat_nbar(alpha: f64, parity: CatParity) -> f64 {
    let u = alpha * alpha;
    match parity {
        CatParity::Even => u * u.tanh(),
        CatParity::Odd => {
            if u == 0.0 {
                1.0
            } else {
                u / u.tanh()
            }
        }
    }
}

/// Real `α > 0` giving a cat of the requested parity mean photon number
/// `nbar`. Odd cats need `nbar > 1`.
pub fn cat_alpha_for_nbar(nbar: f64, parity: CatParity) -> Result<f64> {
    let floor = match parity {
        CatParity::Even => 0.0,
        CatParity::Odd => 1.0,
    };
    if !(nbar > floor) || !nbar.is_finite() {
        return Err(Error::domain(format!(
            "no {parity:?} cat has mean photon number {nbar}"
        )));
    }
    // n̄(α) is increasing in α; bracket then bisect
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while cat_nbar(hi, parity) < nbar {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cat_nbar(mid, parity) < nbar {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl fmt::Display for ProbeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeSpec::Fock { n } => write!(f, "fock:n={n}"),
            ProbeSpec::Qubit { theta, varphi } => write!(f, "qubit:theta={theta},varphi={varphi}"),
            ProbeSpec::Qutrit { nbar, beta, mu, nu } => {
                write!(f, "qutrit:nbar={nbar},beta={beta},mu={mu},nu={nu}")
            }
            ProbeSpec::Superposition { coefficients } => {
                let parts: Vec<String> = coefficients.iter().map(|c| fmt_complex(*c)).collect();
                write!(f, "superposition:c={}", parts.join("/"))
            }
            ProbeSpec::Coherent { alpha } => write!(f, "coherent:alpha={}", fmt_complex(*alpha)),
            ProbeSpec::Cat { alpha, parity } => {
                let s = if *parity == CatParity::Even { "+" } else { "-" };
                write!(f, "cat:alpha={alpha},sign={s}")
            }
            ProbeSpec::Gaussian { eta, r, theta_rel } => {
                write!(f, "gaussian:eta={},r={r},theta={theta_rel}", fmt_complex(*eta))
            }
            ProbeSpec::PhotonSubtracted { eta, r } => write!(f, "subtracted:eta={eta},r={r}"),
            ProbeSpec::TruncatedSubtracted { eta, r, levels } => {
                write!(f, "truncsub:eta={eta},r={r},levels={levels}")
            }
        }
    }
}

fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

struct Params<'a> {
    input: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn parse(input: &'a str, body: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(input, format!("expected key=value, got `{item}`")))?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { input, pairs })
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(parse_real).transpose()
    }

    fn need_real(&self, key: &str) -> Result<f64> {
        self.real(key)?
            .ok_or_else(|| Error::parse(self.input, format!("missing `{key}`")))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(Error::parse(self.input, format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

impl FromStr for ProbeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, body) = s.split_once(':').unwrap_or((s, ""));
        let p = Params::parse(s, body)?;
        match family.trim() {
            "vacuum" => {
                p.check_keys(&[])?;
                Ok(ProbeSpec::vacuum())
            }
            "fock" => {
                p.check_keys(&["n"])?;
                let n = p
                    .raw("n")
                    .ok_or_else(|| Error::parse(s, "missing `n`"))?
                    .parse::<usize>()
                    .map_err(|_| Error::parse(s, "n must be a non-negative integer"))?;
                Ok(ProbeSpec::Fock { n })
            }
            "qubit" => {
                p.check_keys(&["nbar", "theta", "varphi"])?;
                let theta = match (p.real("nbar")?, p.real("theta")?) {
                    (Some(nbar), None) => {
                        if !(0.0..=1.0).contains(&nbar) {
                            return Err(Error::parse(s, "qubit nbar must lie in [0, 1]"));
                        }
                        nbar.sqrt().asin()
                    }
                    (None, Some(theta)) => theta,
                    _ => return Err(Error::parse(s, "give exactly one of nbar or theta")),
                };
                let varphi = p.real("varphi")?.unwrap_or(0.0);
                Ok(ProbeSpec::Qubit { theta, varphi })
            }
            "qutrit" => {
                p.check_keys(&["nbar", "beta", "mu", "nu"])?;
                Ok(ProbeSpec::Qutrit {
                    nbar: p.need_real("nbar")?,
                    beta: p.need_real("beta")?,
                    mu: p.real("mu")?.unwrap_or(PI),
                    nu: p.real("nu")?.unwrap_or(PI),
                })
            }
            "superposition" | "sup" => {
                p.check_keys(&["c"])?;
                let list = p.raw("c").ok_or_else(|| Error::parse(s, "missing `c`"))?;
                let coefficients = list
                    .split('/')
                    .map(parse_complex)
                    .collect::<Result<Vec<_>>>()?;
                Ok(ProbeSpec::Superposition { coefficients })
            }
            "coherent" => {
                p.check_keys(&["alpha"])?;
                let alpha = parse_complex(p.raw("alpha").ok_or_else(|| Error::parse(s, "missing `alpha`"))?)?;
                Ok(ProbeSpec::Coherent { alpha })
            }
            "cat" => {
                p.check_keys(&["alpha", "sign"])?;
                let parity = match p.raw("sign").unwrap_or("+") {
                    "+" | "+1" | "1" | "even" => CatParity::Even,
                    "-" | "-1" | "odd" => CatParity::Odd,
                    other => return Err(Error::parse(s, format!("bad cat sign `{other}`"))),
                };
                Ok(ProbeSpec::Cat {
                    alpha: p.need_real("alpha")?,
                    parity,
                })
            }
            "gaussian" | "squeezed" => {
                p.check_keys(&["eta", "r", "theta"])?;
                let eta = match p.raw("eta") {
                    Some(v) => parse_complex(v)?,
                    None => C64::new(0.0, 0.0),
                };
                Ok(ProbeSpec::Gaussian {
                    eta,
                    r: p.real("r")?.unwrap_or(0.0),
                    theta_rel: p.real("theta")?.unwrap_or(0.0),
                })
            }
            "subtracted" => {
                p.check_keys(&["eta", "r"])?;
                Ok(ProbeSpec::PhotonSubtracted {
                    eta: p.need_real("eta")?,
                    r: p.need_real("r")?,
                })
            }
            "truncsub" => {
                p.check_keys(&["eta", "r", "levels"])?;
                let levels = p
                    .raw("levels")
                    .unwrap_or("3")
                    .parse::<usize>()
                    .map_err(|_| Error::parse(s, "levels must be a positive integer"))?;
                Ok(ProbeSpec::TruncatedSubtracted {
                    eta: p.need_real("eta")?,
                    r: p.need_real("r")?,
                    levels,
                })
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}
