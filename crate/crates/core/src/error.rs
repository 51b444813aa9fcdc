use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max|M - M^dagger| = {deviation:e} exceeds {limit:e}")]
    NotHermitian { deviation: f64, limit: f64 },

    #[error("state is not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },

    #[error("partial trace needs at least one subsystem to keep")]
    EmptySubsystemSelection,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not diagonal: off-diagonal magnitude {0:e}")]
    NotDiagonal(f64),

    #[error("relative permittivity {0} is unsupported (epsilon_d must be >= 1)")]
    UnsupportedPermittivity(f64),

    #[error("invalid {field} = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state index {index} out of range for dimension {dim}")]
    StateIndexOutOfRange { index: usize, dim: usize },

    #[error(
        "degenerate gap between states {state} and {partner}: |gap| = {gap:e} below {limit:e}"
    )]
    DegenerateGap {
        state: usize,
        partner: usize,
        gap: f64,
        limit: f64,
    },

    #[error("cannot track state {state}: best eigenvector overlap {overlap} < {threshold}")]
    AmbiguousMatching {
        state: usize,
        overlap: f64,
        threshold: f64,
    },

    #[error("degenerate denominator Omega*(1 - alpha^2) at alpha = {alpha}")]
    DegenerateDenominator { alpha: f64 },

    #[error("coefficient vector has zero norm")]
    ZeroState,

    #[error("energy shift |{delta_e}| eV reaches the gap {omega} eV (non-perturbative)")]
    ShiftExceedsGap { delta_e: f64, omega: f64 },

    #[error("observed omega_s = {observed} outside attainable range [{lowest}, {highest}]")]
    OutOfBracket {
        observed: f64,
        lowest: f64,
        highest: f64,
    },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Errors caused by bad input values rather than by the model itself.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedPermittivity(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidSweep(_)
                | Error::BadSubsystemIndex { .. }
                | Error::EmptySubsystemSelection
                | Error::StateIndexOutOfRange { .. }
        )
    }
}
