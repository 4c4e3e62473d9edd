//! Quantum estimation of loss in single-mode bosonic channels.
//!
//! Probe states on a truncated Fock space are sent through the pure-loss
//! channel, and the precision with which the loss parameter `φ` can be
//! estimated is quantified by the quantum Fisher information (QFI) computed
//! from the symmetric logarithmic derivative.
//!
//! * [`fock`]: states, operators, spectra and Gaussian state constructors
//! * [`probes`]: named probe families and their text form
//! * [`channel`]: Kraus evolution and the derivative `dρ/dφ`
//! * [`estimation`]: SLD, QFI, optimal measurements and Cramér–Rao bounds
//! * [`optimizer`]: fixed-energy QFI maximization
//! * [`degauss`]: photon subtraction, truncation and attainable-region maps
//! * [`montecarlo`]: simulated photon-counting experiments

pub mod channel;
pub mod degauss;
pub mod error;
pub mod estimation;
pub mod fock;
pub mod montecarlo;
pub mod optimizer;
pub mod probes;
pub mod simplex;
pub mod text;

pub use channel::{drho_dphi, evolve, evolve_pure, kraus_operators, loss_reparametrize, LossCoordinate, LossParameter};
pub use error::{Error, Result};
pub use estimation::{
    classical_fisher, closed_form_qfi, cramer_rao, optimal_measurement, qfi, sld, ClosedForm, EstimationReport,
    SldOperator,
};
pub use fock::{
    displaced_squeezed_vacuum, fidelity, hermitian_eig, ladder_operators, mean_photon, CutoffPolicy, DensityOperator,
    FockVector, HermitianOperator, Spectrum, C64,
};
pub use optimizer::{optimize_gaussian, optimize_qutrit, optimize_superposition, OptimizationResult};
pub use probes::{build_probe, qutrit_coords, truncated_subtracted_coeffs, CatParity, ProbeSpec};
