use thiserror::Error;

#[derive(Debug, Error)]
pub enum TbsfError {
    /// The full contraction of the pre/post tensor vanishes: no intermediate
    /// operation can make the postselection pass.
    #[error("postselection probability is zero for every intermediate operation (trace {0:e})")]
    TrivialPostselection(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A state or tensor broke one of its structural invariants.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("coupling is not unitary (deviation {0:e})")]
    NonUnitaryCoupling(f64),

    #[error("POVM effects do not sum to identity (deviation {0:e})")]
    IncompletePovm(f64),

    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),

    #[error("postselection probability vanishes ({0:e})")]
    ZeroPostselection(f64),

    #[error("pre- and postselected states are orthogonal (denominator {0:e})")]
    OrthogonalPrePost(f64),

    #[error("quadrature grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("measurement data is not informationally complete: {0}")]
    NotInformationallyComplete(String),

    #[error("optimizer did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("linear system is singular (smallest singular value {0:e})")]
    SingularSystem(f64),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, TbsfError>;

impl TbsfError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            TbsfError::NonConvergence(_) => 3,
            TbsfError::Io(_) | TbsfError::Json(_) | TbsfError::Csv(_) => 1,
            TbsfError::InvalidInput(_) => 1,
            _ => 2,
        }
    }
}
