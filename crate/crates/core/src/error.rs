use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("irrelevant block is singular (min |eigenvalue| = {min_abs_eig:.3e}, threshold {threshold:.3e})")]
    SingularBlock { min_abs_eig: f64, threshold: f64 },

    #[error("matrix is not positive definite (min eigenvalue = {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("adjacent levels {index} and {} are degenerate; photon direction undefined", index + 1)]
    DegenerateAdjacentLevels { index: usize },

    #[error("invalid level ladder: {0}")]
    InvalidLadder(String),

    #[error("invalid partition plan: {0}")]
    IndexError(String),

    #[error("unsupported Markov order: {0}")]
    UnsupportedOrder(String),

    #[error("picture-shift search failed: every sampled shift was singular")]
    SearchFailed,

    #[error("initial state has weight {weight:.3e} on irrelevant states")]
    InitialStateOutsideRelevant { weight: f64 },

    #[error("initial state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("time grid too coarse for the irrelevant block (h * |Delta|_op = {h_norm:.3e} > 1)")]
    GridTooCoarse { h_norm: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trajectories are not comparable: {0}")]
    GridMismatch(String),

    #[error("elimination stage {stage}: {source}")]
    AtStage { stage: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_stage(self, stage: usize) -> Self {
        Error::AtStage { stage, source: Box::new(self) }
    }

    /// Short machine-readable tag of the innermost error.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NoConvergence { .. } => "no_convergence",
            Error::SingularBlock { .. } => "singular_block",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::DegenerateAdjacentLevels { .. } => "degenerate_levels",
            Error::InvalidLadder(_) => "invalid_ladder",
            Error::IndexError(_) => "index_error",
            Error::UnsupportedOrder(_) => "unsupported_order",
            Error::SearchFailed => "search_failed",
            Error::InitialStateOutsideRelevant { .. } => "initial_state_outside_relevant",
            Error::NotNormalized { .. } => "not_normalized",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::AtStage { .. } => unreachable!("root strips stage annotations"),
        }
    }

    /// The innermost error, with any stage annotations removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStage { source, .. } => source.root(),
            other => other,
        }
    }
}
