//! `lossqfi`: QFI sweeps, optimizations, region maps and simulated
//! experiments for single-mode loss estimation.

mod commands;
mod error;
mod families;
mod output;
mod range;

use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lossqfi_core::channel::DEFAULT_PHI_MIN;
use lossqfi_core::degauss::RegionRoute;
use lossqfi_core::text::parse_real;
use lossqfi_core::CutoffPolicy;

use commands::Settings;
use error::CliError;
use output::Format;
use range::{parse_list, Grid};

#[derive(Parser, Debug)]
#[command(name = "lossqfi", version, about = "Quantum Fisher information for loss estimation")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Largest Fock cutoff a probe may use.
    #[arg(long, global = true, default_value_t = 200)]
    cutoff_cap: usize,

    /// Largest neglected tail population when truncating a probe.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tail_tol: f64,

    /// Guard band: φ must lie in [phi_min, π/2 − phi_min].
    #[arg(long, global = true, default_value_t = DEFAULT_PHI_MIN, value_parser = real)]
    phi_min: f64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file (directory for `region`); standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    Analytic,
    Numeric,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// QFI and Cramér–Rao bounds of one probe.
    Qfi {
        /// Probe text form, e.g. `fock:n=2`, `qutrit:nbar=0.5,beta=1`.
        probe: String,
        #[arg(long, value_parser = grid)]
        phi: Grid,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Read PROBE as a closed form (`fock`, `qubit`, `qutrit02`,
        /// `gaussian_small_n`, `coherent`).
        #[arg(long)]
        closed_form: bool,
    },
    /// QFI against φ for a list of families.
    SweepPhi {
        #[arg(long)]
        families: String,
        /// `start:stop:count`; defaults to 50 points inside the guard band.
        #[arg(long, value_parser = grid)]
        phi: Option<Grid>,
        /// Energy for energy-parametrized and optimized families.
        #[arg(long, value_parser = real)]
        nbar: Option<f64>,
    },
    /// QFI against mean photon number at fixed φ.
    SweepEnergy {
        #[arg(long)]
        families: String,
        #[arg(long, value_parser = real)]
        phi: f64,
        #[arg(long, value_parser = grid, default_value = "0.05:1:20")]
        nbar: Grid,
    },
    /// Fixed-energy QFI maximization for one family.
    Optimize {
        /// `qutrit_opt`, `gaussian_opt` or `superposition_k=K`.
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = grid)]
        nbar: Grid,
        #[arg(long, value_parser = grid)]
        phi: Grid,
    },
    /// Attainable (n̄, β) region of truncated photon-subtracted states,
    /// optimal-β curves and their coverage.
    Region {
        #[arg(long, value_parser = grid, default_value = "0:2:201")]
        eta: Grid,
        #[arg(long, value_parser = grid, default_value = "-1:1:201")]
        r: Grid,
        /// Comma-separated φ values for the curves; defaults to
        /// π/16, π/8, π/4, 3π/8 and π/2 − phi_min.
        #[arg(long, value_parser = parse_list)]
        phis: Option<Vec<f64>>,
        #[arg(long, value_parser = grid, default_value = "0.05:0.95:19")]
        nbar: Grid,
        #[arg(long, value_enum, default_value_t = Route::Analytic)]
        route: Route,
    },
    /// SLD eigenvalues and eigenvectors (the optimal measurement).
    SldDump {
        probe: String,
        #[arg(long, value_parser = real)]
        phi: f64,
    },
    /// Simulated Fock-probe photon-counting experiment.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = real)]
        phi: f64,
        /// Channel uses per repetition.
        #[arg(long, default_value_t = 10_000)]
        runs: u64,
        #[arg(long, default_value_t = 200)]
        reps: usize,
    },
}

fn real(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

fn grid(s: &str) -> Result<Grid, String> {
    s.parse()
}

fn settings(g: &Global) -> Result<Settings, CliError> {
    if !(g.tail_tol > 0.0 && g.tail_tol < 1.0) {
        return Err(CliError::Usage(format!("--tail-tol {} must lie in (0, 1)", g.tail_tol)));
    }
    if g.cutoff_cap == 0 {
        return Err(CliError::Usage("--cutoff-cap must be at least 1".into()));
    }
    if !(g.phi_min >= 0.0 && g.phi_min < FRAC_PI_4) {
        return Err(CliError::Usage(format!("--phi-min {} must lie in [0, π/4)", g.phi_min)));
    }
    Ok(Settings {
        policy: CutoffPolicy::default().with_cap(g.cutoff_cap).with_tail_tol(g.tail_tol),
        phi_min: g.phi_min,
        seed: g.seed,
        out: g.out.clone(),
        format: g.format,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let s = settings(&cli.global)?;
    match cli.command {
        Command::Qfi {
            probe,
            phi,
            runs,
            closed_form,
        } => commands::qfi(&s, &probe, &phi, runs, closed_form),
        Command::SweepPhi { families, phi, nbar } => commands::sweep_phi(&s, &families, phi.as_ref(), nbar),
        Command::SweepEnergy { families, phi, nbar } => commands::sweep_energy(&s, &families, phi, &nbar),
        Command::Optimize { family, nbar, phi } => commands::optimize(&s, &family, &nbar, &phi),
        Command::Region {
            eta,
            r,
            phis,
            nbar,
            route,
        } => {
            let phis = phis.unwrap_or_else(|| commands::default_region_phis(s.phi_min));
            let route = match route {
                Route::Analytic => RegionRoute::Analytic,
                Route::Numeric => RegionRoute::Numeric,
            };
            commands::region(&s, &eta, &r, &phis, &nbar, route)
        }
        Command::SldDump { probe, phi } => commands::sld_dump(&s, &probe, phi),
        Command::Simulate { n, phi, runs, reps } => commands::simulate(&s, n, phi, runs, reps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "lossqfi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
