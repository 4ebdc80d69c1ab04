use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: state has {state} amplitudes, operator expects {operator}")]
    DimensionMismatch { state: usize, operator: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver did not converge in sector n_up = {n_up} (dim {dim})")]
    EigenNonConvergence { n_up: usize, dim: usize },

    #[error("state has support in sector n_up = {0}, which was not diagonalized")]
    MissingSector(usize),

    #[error(
        "doubled-state WRE needs 2^(2L) amplitudes; L = {n_sites} exceeds the cap of {cap} \
         (use the naive subset-sum path instead)"
    )]
    StateTooLarge { n_sites: usize, cap: usize },

    #[error("r-normalization refused: |S(inf) - S(0)| = {0:e} is below 1e-12")]
    DegenerateNormalization(f64),

    #[error("GGE fit did not converge after {iterations} iterations (residual {residual:e})")]
    FitNonConvergence { iterations: usize, residual: f64 },

    #[error("all importance weights vanished")]
    ZeroWeights,

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("cache mismatch: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether this error is a numerical-invariant violation rather than bad
    /// input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_)
                | Error::EigenNonConvergence { .. }
                | Error::FitNonConvergence { .. }
                | Error::ZeroWeights
        )
    }
}
