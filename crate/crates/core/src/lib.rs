//! Quantum model of a scattering near-field microscope (s-SNOM) probe.
//!
//! The AFM tip is a two-level electric dipole held at height `R` above a
//! lossless dielectric. Image theory replaces the sample with a second
//! two-level dipole whose charges and energies are scaled by the
//! dielectric-air coefficient `alpha = (eps - 1)/(eps + 1)`. The
//! instantaneous dipole-dipole (van der Waals) coupling between the two
//! dipoles is the perturbation; a single Fock mode carries the incident and
//! scattered photon.
//!
//! The crate offers two independent routes to the perturbed state:
//!
//! * [`closed_form`] evaluates the published closed-form coefficients,
//!   energy shift and scattered frequency exactly as written;
//! * [`perturbation`] runs generic second-order Rayleigh-Schrodinger theory
//!   on the dense Hamiltonians from [`hamiltonian`], checked against exact
//!   diagonalization.
//!
//! [`inversion`] turns an observed scattered frequency back into a sample
//! permittivity, and [`sweep`] / [`harness`] drive parameter studies and the
//! `qsnom` command line tool.
//!
//! Units: energies in eV, lengths in nm, `hbar = 1` so frequencies are
//! reported in eV/hbar.

pub mod closed_form;
pub mod dipole;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod inversion;
pub mod perturbation;
pub mod sweep;
pub mod tensor;

pub use closed_form::{
    consistency_report, paper_beta, paper_density_matrix, paper_energy_shift,
    paper_scattered_amplitude, scattered_frequency, scattered_photon, BetaCoefficients,
    ConsistencyParams, ConsistencyReport, InitialCoefficients, ScatteredPhotonReport,
};
pub use dipole::{
    derive_image, image_alpha, near_field_check, DielectricSample, ImageDipole, NearFieldCheck,
    TipDipole, UnitContract,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_delta_h, build_h0, build_hamiltonians, coupling_constant, HamiltonianPair, ModelConfig,
    RegimeWarning,
};
pub use inversion::{forward, invert_permittivity, ForwardPath, ForwardResult, InversionProblem};
pub use perturbation::{rs_pt2, validate_against_exact, ExactComparison, PerturbationResult};
pub use sweep::{run_sweep, ModelParams, SweepAxis, SweepSpec, SweepTable, SweepValues};
pub use tensor::{
    eigh, kron, outer, partial_trace, EigenDecomposition, OperatorMatrix, StateVector,
};

/// Numerical thresholds shared by the linear algebra and the perturbation
/// engine. Matrix tolerances are relative to `max|M|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `max|M - M^dagger| <= hermitian * max|M|`
    pub hermitian: f64,
    /// allowed `| ||psi||^2 - 1 |` before a state counts as unnormalized
    pub normalization: f64,
    /// smallest coupled gap, relative to `max|H0|`
    pub degeneracy: f64,
    /// minimum squared overlap for adiabatic state tracking
    pub overlap_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            normalization: 1e-9,
            degeneracy: 1e-12,
            overlap_threshold: 0.5,
        }
    }
}
