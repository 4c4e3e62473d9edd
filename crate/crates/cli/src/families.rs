//! Family lists such as `fock:n=2,qutrit:nbar=0.5,beta=1,qutrit_opt`.
//!
//! A comma-separated token without `:` that looks like `key=value` continues
//! the previous family's parameters; anything else starts a new family.

use lossqfi_core::optimizer::{optimize_gaussian, optimize_qutrit, optimize_superposition};
use lossqfi_core::probes::cat_alpha_for_nbar;
use lossqfi_core::{qfi, CatParity, CutoffPolicy, LossParameter, ProbeSpec, C64};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// Fully specified probe.
    Fixed(ProbeSpec),
    /// Probe whose energy parameter comes from the sweep.
    Energy(Template),
    QutritOpt,
    GaussianOpt,
    SuperpositionOpt(usize),
    /// Better of the two cat parities.
    CatOpt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Template {
    Fock,
    Qubit { varphi: f64 },
    Qutrit { beta: f64, mu: f64, nu: f64 },
    Coherent,
    Cat(CatParity),
    SqueezedVacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub label: String,
    pub kind: Kind,
}

impl Family {
    pub fn needs_energy(&self) -> bool {
        !matches!(self.kind, Kind::Fixed(_))
    }
}

pub struct Context<'a> {
    pub policy: &'a CutoffPolicy,
    pub seed: u64,
}

/// Splits a family list into per-family texts.
fn group(list: &str) -> Result<Vec<String>, CliError> {
    let mut out: Vec<String> = Vec::new();
    for token in list.split(',').map(str::trim) {
        if token.is_empty() {
            return Err(CliError::Usage(format!("empty entry in family list `{list}`")));
        }
        let continues = !token.contains(':') && token.contains('=') && !token.starts_with("superposition_k");
        match out.last_mut() {
            Some(prev) if continues => {
                prev.push(',');
                prev.push_str(token);
            }
            None if continues => {
                return Err(CliError::Usage(format!("`{token}` does not follow a family name")));
            }
            _ => out.push(token.to_string()),
        }
    }
    Ok(out)
}

fn keys(body: &str) -> Vec<&str> {
    body.split(',').filter_map(|kv| kv.split_once('=')).map(|(k, _)| k.trim()).collect()
}

fn usage(e: lossqfi_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_one(text: &str) -> Result<Family, CliError> {
    let (name, body) = text.split_once(':').unwrap_or((text, ""));
    let present = keys(body);
    let has = |k: &str| present.contains(&k);
    let with = |extra: &str| {
        if body.is_empty() {
            format!("{name}:{extra}")
        } else {
            format!("{name}:{body},{extra}")
        }
    };
    let probe = |s: &str| s.parse::<ProbeSpec>().map_err(usage);
    let kind = match name {
        "qutrit_opt" | "gaussian_opt" | "cat_opt" if !body.is_empty() => {
            return Err(CliError::Usage(format!("`{name}` takes no parameters")));
        }
        "qutrit_opt" => Kind::QutritOpt,
        "gaussian_opt" => Kind::GaussianOpt,
        "cat_opt" => Kind::CatOpt,
        _ if name.starts_with("superposition_k=") || (name == "superposition" && has("k")) => {
            let k = name
                .strip_prefix("superposition_k=")
                .or_else(|| body.trim().strip_prefix("k="))
                .and_then(|k| k.trim().parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| CliError::Usage(format!("bad superposition order in `{text}`")))?;
            Kind::SuperpositionOpt(k)
        }
        "fock" if !has("n") => {
            probe(&with("n=0"))?;
            Kind::Energy(Template::Fock)
        }
        "qubit" if !has("nbar") && !has("theta") => match probe(&with("nbar=0"))? {
            ProbeSpec::Qubit { varphi, .. } => Kind::Energy(Template::Qubit { varphi }),
            _ => unreachable!("qubit text parses to a qubit"),
        },
        "qutrit" if !has("nbar") => match probe(&with("nbar=0"))? {
            ProbeSpec::Qutrit { beta, mu, nu, .. } => Kind::Energy(Template::Qutrit { beta, mu, nu }),
            _ => unreachable!("qutrit text parses to a qutrit"),
        },
        "coherent" if !has("alpha") => {
            probe(&with("alpha=0"))?;
            Kind::Energy(Template::Coherent)
        }
        "cat" if !has("alpha") => match probe(&with("alpha=1"))? {
            ProbeSpec::Cat { parity, .. } => Kind::Energy(Template::Cat(parity)),
            _ => unreachable!("cat text parses to a cat"),
        },
        "squeezed" if body.is_empty() => Kind::Energy(Template::SqueezedVacuum),
        _ => Kind::Fixed(probe(text)?),
    };
    Ok(Family {
        label: text.to_string(),
        kind,
    })
}

pub fn parse_families(list: &str) -> Result<Vec<Family>, CliError> {
    let groups = group(list)?;
    if groups.is_empty() {
        return Err(CliError::Usage("family list is empty".into()));
    }
    groups.iter().map(|g| parse_one(g)).collect()
}

fn template_probe(t: &Template, nbar: f64) -> Result<ProbeSpec, lossqfi_core::Error> {
    let domain = |msg: String| lossqfi_core::Error::Domain(msg);
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(domain(format!("nbar {nbar} must be a finite non-negative number")));
    }
    Ok(match *t {
        Template::Fock => {
            let n = nbar.round();
            if (n - nbar).abs() > 1e-12 {
                return Err(domain(format!("Fock probe needs an integer nbar, got {nbar}")));
            }
            ProbeSpec::Fock { n: n as usize }
        }
        Template::Qubit { varphi } => match ProbeSpec::qubit(nbar)? {
            ProbeSpec::Qubit { theta, .. } => ProbeSpec::Qubit { theta, varphi },
            _ => unreachable!("qubit constructor"),
        },
        Template::Qutrit { beta, mu, nu } => ProbeSpec::Qutrit { nbar, beta, mu, nu },
        Template::Coherent => ProbeSpec::Coherent {
            alpha: C64::new(nbar.sqrt(), 0.0),
        },
        Template::Cat(parity) => ProbeSpec::Cat {
            alpha: cat_alpha_for_nbar(nbar, parity)?,
            parity,
        },
        Template::SqueezedVacuum => ProbeSpec::Gaussian {
            eta: C64::new(0.0, 0.0),
            r: nbar.sqrt().asinh(),
            theta_rel: 0.0,
        },
    })
}

fn require(nbar: Option<f64>, label: &str) -> Result<f64, CliError> {
    nbar.ok_or_else(|| CliError::Usage(format!("family `{label}` needs --nbar")))
}

/// QFI of a family at `(nbar, φ)`, returning the probe's mean photon number
/// alongside.
pub fn evaluate(
    family: &Family,
    nbar: Option<f64>,
    phi: &LossParameter,
    ctx: &Context,
) -> Result<(f64, f64), CliError> {
    let numeric = |spec: &ProbeSpec| -> Result<(f64, f64), CliError> {
        let r = qfi(spec, phi, ctx.policy)?;
        Ok((r.nbar, r.qfi))
    };
    match &family.kind {
        Kind::Fixed(spec) => numeric(spec),
        Kind::Energy(t) => {
            let n = require(nbar, &family.label)?;
            let (_, h) = numeric(&template_probe(t, n)?)?;
            Ok((n, h))
        }
        Kind::QutritOpt => {
            let n = require(nbar, &family.label)?;
            Ok((n, optimize_qutrit(n, phi)?.best_qfi))
        }
        Kind::GaussianOpt => {
            let n = require(nbar, &family.label)?;
            Ok((n, optimize_gaussian(n, phi, ctx.policy)?.best_qfi))
        }
        Kind::SuperpositionOpt(k) => {
            let n = require(nbar, &family.label)?;
            Ok((n, optimize_superposition(*k, n, phi, ctx.seed)?.best_qfi))
        }
        Kind::CatOpt => {
            let n = require(nbar, &family.label)?;
            let mut best: Option<f64> = None;
            let mut last_err = None;
            for parity in [CatParity::Even, CatParity::Odd] {
                match cat_alpha_for_nbar(n, parity) {
                    Ok(alpha) => {
                        let h = qfi(&ProbeSpec::Cat { alpha, parity }, phi, ctx.policy)?.qfi;
                        best = Some(best.map_or(h, |b: f64| b.max(h)));
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            match (best, last_err) {
                (Some(h), _) => Ok((n, h)),
                (None, Some(e)) => Err(e.into()),
                (None, None) => unreachable!("two parities tried"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(list: &str) -> Vec<String> {
        parse_families(list).unwrap().into_iter().map(|f| f.label).collect()
    }

    #[test]
    fn grouping_follows_colons() {
        assert_eq!(labels("fock:n=2,coherent:alpha=1"), ["fock:n=2", "coherent:alpha=1"]);
        assert_eq!(
            labels("qutrit:nbar=0.5,beta=1,qutrit_opt,superposition_k=3"),
            ["qutrit:nbar=0.5,beta=1", "qutrit_opt", "superposition_k=3"]
        );
    }

    #[test]
    fn kinds() {
        let f = parse_families("qubit,qutrit:beta=0,cat:sign=-,squeezed,superposition:k=4,gaussian_opt").unwrap();
        assert_eq!(f[0].kind, Kind::Energy(Template::Qubit { varphi: 0.0 }));
        assert!(matches!(f[1].kind, Kind::Energy(Template::Qutrit { beta, .. }) if beta == 0.0));
        assert_eq!(f[2].kind, Kind::Energy(Template::Cat(CatParity::Odd)));
        assert_eq!(f[3].kind, Kind::Energy(Template::SqueezedVacuum));
        assert_eq!(f[4].kind, Kind::SuperpositionOpt(4));
        assert_eq!(f[5].kind, Kind::GaussianOpt);
        assert!(matches!(parse_families("fock:n=3").unwrap()[0].kind, Kind::Fixed(ProbeSpec::Fock { n: 3 })));
    }

    #[test]
    fn rejects_bad_lists() {
        for bad in ["", "beta=1", "fock:n=2,,qubit", "nosuch:x=1", "superposition_k=0", "qutrit_opt:x=1"] {
            assert!(matches!(parse_families(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn energy_templates_hit_requested_energy() {
        let policy = CutoffPolicy::default();
        let ctx = Context { policy: &policy, seed: 0 };
        let phi = LossParameter::new(0.7).unwrap();
        for f in parse_families("qubit,qutrit:beta=0.4,coherent,cat,squeezed").unwrap() {
            let (n, h) = evaluate(&f, Some(0.6), &phi, &ctx).unwrap();
            assert_eq!(n, 0.6);
            assert!(h > 0.0 && h <= 4.0 * 0.6 * (1.0 + 1e-6), "{}", f.label);
        }
        let fock = &parse_families("fock").unwrap()[0];
        assert!(matches!(evaluate(fock, Some(0.5), &phi, &ctx), Err(CliError::Engine(_))));
        assert!(matches!(evaluate(fock, None, &phi, &ctx), Err(CliError::Usage(_))));
    }
}
