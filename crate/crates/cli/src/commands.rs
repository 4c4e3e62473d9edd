use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fs;
use std::path::PathBuf;

use lossqfi_core::channel::DEFAULT_PHI_MIN;
use lossqfi_core::degauss::{coverage_check, region_map, RegionRoute};
use lossqfi_core::estimation::{cramer_rao, qfi_with_runs};
use lossqfi_core::montecarlo::simulate_fock_estimation;
use lossqfi_core::optimizer::{optimize_gaussian, optimize_qutrit, optimize_superposition};
use lossqfi_core::{
    build_probe, evolve_pure, drho_dphi, optimal_measurement, sld, closed_form_qfi, ClosedForm, CutoffPolicy,
    LossParameter, OptimizationResult, ProbeSpec,
};

use crate::error::CliError;
use crate::families::{evaluate, parse_families, Context, Family, Kind};
use crate::output::{extension, Cell, Format, Table};
use crate::range::Grid;

pub struct Settings {
    pub policy: CutoffPolicy,
    pub phi_min: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Settings {
    pub fn loss(&self, phi: f64) -> Result<LossParameter, CliError> {
        Ok(LossParameter::with_guard(phi, self.phi_min)?)
    }

    fn ctx(&self) -> Context<'_> {
        Context {
            policy: &self.policy,
            seed: self.seed,
        }
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        table.emit(self.format, self.out.as_deref()).map_err(|source| CliError::Io {
            path: self.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
            source,
        })
    }

    /// Default loss grid: 50 points strictly inside the guard band.
    pub fn default_phi_grid(&self) -> Grid {
        let lo = self.phi_min.max(DEFAULT_PHI_MIN);
        Grid {
            start: lo,
            stop: FRAC_PI_2 - lo,
            count: 50,
        }
    }
}

fn sweep_grid(grid: &Grid, what: &str) -> Result<Vec<f64>, CliError> {
    if grid.count < 2 {
        return Err(CliError::Usage(format!("{what} sweep needs at least 2 points")));
    }
    Ok(grid.points())
}

pub fn qfi(s: &Settings, probe: &str, phi: &Grid, runs: u64, closed_form: bool) -> Result<(), CliError> {
    let mut t = Table::new([
        "probe",
        "phi",
        "nbar",
        "H",
        "H_trace",
        "ultimate_bound",
        "runs",
        "crlb_variance",
        "ultimate_variance",
        "cutoff",
        "method",
    ]);
    if closed_form {
        let form: ClosedForm = probe.parse().map_err(|e: lossqfi_core::Error| CliError::Usage(e.to_string()))?;
        let nbar = match form {
            ClosedForm::Fock { n } => n as f64,
            ClosedForm::Qubit { nbar } | ClosedForm::Qutrit02 { nbar } | ClosedForm::GaussianSmallN { nbar } => nbar,
            ClosedForm::Coherent { alpha } => alpha.norm_sqr(),
        };
        for p in phi.points() {
            let h = closed_form_qfi(&form, &s.loss(p)?)?;
            let cr = cramer_rao(h, runs, nbar)?;
            t.push(vec![
                probe.into(),
                p.into(),
                nbar.into(),
                h.into(),
                Cell::Empty,
                (4.0 * nbar).into(),
                runs.into(),
                cr.crlb_variance.into(),
                cr.ultimate_variance.into(),
                Cell::Empty,
                "closed_form".into(),
            ]);
        }
    } else {
        let spec: ProbeSpec = probe.parse().map_err(|e: lossqfi_core::Error| CliError::Usage(e.to_string()))?;
        for p in phi.points() {
            let r = qfi_with_runs(&spec, &s.loss(p)?, &s.policy, runs)?;
            t.push(vec![
                r.probe.into(),
                r.phi.into(),
                r.nbar.into(),
                r.qfi.into(),
                r.qfi_trace_route.into(),
                r.ultimate_bound.into(),
                r.runs.into(),
                r.crlb_variance.into(),
                r.ultimate_variance.into(),
                r.cutoff.into(),
                r.method.to_string().into(),
            ]);
        }
    }
    s.emit(&t)
}

fn check_energy(families: &[Family], nbar: Option<f64>) -> Result<(), CliError> {
    match families.iter().find(|f| f.needs_energy()) {
        Some(f) if nbar.is_none() => Err(CliError::Usage(format!("family `{}` needs --nbar", f.label))),
        _ => Ok(()),
    }
}

pub fn sweep_phi(s: &Settings, families: &str, phi: Option<&Grid>, nbar: Option<f64>) -> Result<(), CliError> {
    let families = parse_families(families)?;
    check_energy(&families, nbar)?;
    let grid = phi.cloned().unwrap_or_else(|| s.default_phi_grid());
    let phis = sweep_grid(&grid, "phi")?;
    let losses = phis.iter().map(|&p| s.loss(p)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(["family", "phi", "nbar", "H", "ultimate_bound"]);
    for f in &families {
        for lp in &losses {
            let (n, h) = evaluate(f, nbar, lp, &s.ctx())?;
            t.push(vec![f.label.as_str().into(), lp.phi().into(), n.into(), h.into(), (4.0 * n).into()]);
        }
    }
    s.emit(&t)
}

pub fn sweep_energy(s: &Settings, families: &str, phi: f64, nbar: &Grid) -> Result<(), CliError> {
    let families = parse_families(families)?;
    if let Some(f) = families.iter().find(|f| !f.needs_energy()) {
        return Err(CliError::Usage(format!(
            "family `{}` fixes its own energy; give it without the energy parameter",
            f.label
        )));
    }
    let nbars = sweep_grid(nbar, "nbar")?;
    let lp = s.loss(phi)?;
    let mut t = Table::new(["family", "nbar", "phi", "H", "ultimate_bound"]);
    for f in &families {
        for &n in &nbars {
            let (n, h) = evaluate(f, Some(n), &lp, &s.ctx())?;
            t.push(vec![f.label.as_str().into(), n.into(), phi.into(), h.into(), (4.0 * n).into()]);
        }
    }
    s.emit(&t)
}

pub fn optimize(s: &Settings, family: &str, nbar: &Grid, phi: &Grid) -> Result<(), CliError> {
    let parsed = parse_families(family)?;
    let [f] = parsed.as_slice() else {
        return Err(CliError::Usage("optimize takes exactly one family".into()));
    };
    let run = |n: f64, lp: &LossParameter| -> Result<OptimizationResult, CliError> {
        Ok(match f.kind {
            Kind::QutritOpt => optimize_qutrit(n, lp)?,
            Kind::GaussianOpt => optimize_gaussian(n, lp, &s.policy)?,
            Kind::SuperpositionOpt(k) => optimize_superposition(k, n, lp, s.seed)?,
            _ => {
                return Err(CliError::Usage(format!(
                    "`{}` is not an optimizable family (qutrit_opt, gaussian_opt, superposition_k=K)",
                    f.label
                )))
            }
        })
    };
    let mut results = Vec::new();
    for n in nbar.points() {
        for p in phi.points() {
            results.push(run(n, &s.loss(p)?)?);
        }
    }
    let names = results.first().map(|r| r.param_names.clone()).unwrap_or_default();
    let mut columns: Vec<String> = ["family", "nbar", "phi", "H", "ultimate_bound", "starts", "converged", "skipped"]
        .map(String::from)
        .to_vec();
    columns.extend(names);
    let mut t = Table::new(columns);
    for r in results {
        let mut row: Vec<Cell> = vec![
            f.label.as_str().into(),
            r.nbar.into(),
            r.phi.into(),
            r.best_qfi.into(),
            (4.0 * r.nbar).into(),
            r.starts.into(),
            r.converged.into(),
            r.skipped.into(),
        ];
        row.extend(r.best_params.iter().map(|&x| Cell::Num(x)));
        t.push(row);
    }
    s.emit(&t)
}

pub fn default_region_phis(phi_min: f64) -> Vec<f64> {
    vec![PI / 16.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2 - phi_min.max(DEFAULT_PHI_MIN)]
}

pub fn region(
    s: &Settings,
    eta: &Grid,
    r: &Grid,
    phis: &[f64],
    nbar: &Grid,
    route: RegionRoute,
) -> Result<(), CliError> {
    let dir = s
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("region writes several files; give an --out directory".into()))?;
    if phis.is_empty() {
        return Err(CliError::Usage("no phi values for the optimal-beta curves".into()));
    }
    let losses = phis.iter().map(|&p| s.loss(p)).collect::<Result<Vec<_>, _>>()?;
    let map = region_map(&eta.points(), &r.points(), route, &s.policy)?;
    let nbars = nbar.points();
    let report = coverage_check(&losses, &nbars, &map)?;

    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let ext = extension(s.format);
    let write = |name: String, table: &Table| -> Result<(), CliError> {
        let path = dir.join(name);
        table.emit(s.format, Some(&path)).map_err(|source| CliError::Io { path, source })
    };

    let mut region = Table::new(["eta", "r", "nbar", "beta"]);
    for p in &map.points {
        region.push(vec![p.eta.into(), p.r.into(), p.nbar.into(), p.beta.into()]);
    }
    write(format!("region.{ext}"), &region)?;

    for (k, lp) in losses.iter().enumerate() {
        let mut curve = Table::new(["phi", "nbar", "beta_opt", "H_opt"]);
        for &n in &nbars {
            let best = optimize_qutrit(n, lp)?;
            curve.push(vec![lp.phi().into(), n.into(), best.best_params[0].into(), best.best_qfi.into()]);
        }
        write(format!("curve_{}.{ext}", k + 1), &curve)?;
    }

    let mut cov = Table::new(["phi", "nbar", "beta_opt", "covered", "exception", "spread"]);
    for e in &report.entries {
        cov.push(vec![
            e.phi.into(),
            e.nbar.into(),
            e.beta_star.into(),
            e.covered.into(),
            e.exception.into(),
            e.spread.into(),
        ]);
    }
    write(format!("coverage.{ext}"), &cov)?;

    if report.passes() {
        Ok(())
    } else {
        let missed = report.entries.iter().filter(|e| !e.covered && !e.exception).count();
        Err(CliError::Check(format!(
            "{missed} optimal-beta points fall outside the attainable region (see coverage.{ext})"
        )))
    }
}

pub fn sld_dump(s: &Settings, probe: &str, phi: f64) -> Result<(), CliError> {
    let spec: ProbeSpec = probe.parse().map_err(|e: lossqfi_core::Error| CliError::Usage(e.to_string()))?;
    let lp = s.loss(phi)?;
    let psi = build_probe(&spec, &s.policy)?;
    let rho = evolve_pure(&psi, &lp);
    let l = sld(&rho, &drho_dphi(&rho, &lp), &lp)?;
    let povm = optimal_measurement(&l);
    let dim = rho.dim();
    let mut columns = vec!["index".to_string(), "eigenvalue".to_string()];
    for m in 0..dim {
        columns.push(format!("re_{m}"));
        columns.push(format!("im_{m}"));
    }
    let mut t = Table::new(columns);
    for (k, e) in povm.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into(), e.eigenvalue.into()];
        for c in &e.vector {
            row.push(c.re.into());
            row.push(c.im.into());
        }
        t.push(row);
    }
    s.emit(&t)
}

pub fn simulate(s: &Settings, n: u64, phi: f64, runs: u64, reps: usize) -> Result<(), CliError> {
    let r = simulate_fock_estimation(n, &s.loss(phi)?, runs, reps, s.seed)?;
    let mut t = Table::new([
        "n",
        "phi_true",
        "runs",
        "repetitions",
        "seed",
        "phi_hat_mean",
        "empirical_variance",
        "crlb",
        "normalized_variance",
        "clipped",
    ]);
    t.push(vec![
        r.n.into(),
        r.phi_true.into(),
        r.runs.into(),
        r.repetitions.into(),
        r.seed.into(),
        r.phi_hat_mean.into(),
        r.empirical_variance.into(),
        r.crlb.into(),
        r.normalized_variance.into(),
        r.clipped.into(),
    ]);
    s.emit(&t)
}
