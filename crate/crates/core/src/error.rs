use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("gate is not unitary (max deviation {0:.3e})")]
    NonUnitaryGate(f64),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("malformed gate: {0}")]
    MalformedGate(String),
    #[error("{requested} qubits exceeds the cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("procedure has {0} outcomes, expected 2")]
    NotTwoOutcome(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("not a projector (residual {0:.3e})")]
    NotProjector(f64),
    #[error("invalid iterative plan: {0}")]
    PlanInvalid(String),
    #[error("shot count must be positive")]
    ShotsZero,
    #[error("gap too small: {0}")]
    GapTooSmall(String),
    #[error("e-map synthesis failed: {0}")]
    SynthesisFailed(String),
    #[error("degenerate linear system (condition estimate {0:.3e})")]
    DegenerateSystem(f64),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("procedures are not jointly diagonalizable (commutator norm {0:.3e})")]
    NotJointlyDiagonalizable(f64),
    #[error("witness space would need {requested} qubits, cap is {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("wrong outcome alphabet: {0}")]
    WrongAlphabet(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("random tape of {0} bits is too long for exact enumeration")]
    TapeTooLong(usize),
    #[error("witness of {0} bits is too long for exhaustive enumeration")]
    WitnessTooLong(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("invalid reduction: {0}")]
    InvalidReduction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the error describes malformed or out-of-range input rather
    /// than a computation that ran and did not certify.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::GapTooSmall(_) | Error::SynthesisFailed(_) | Error::DegenerateSystem(_) | Error::NotMonotone(_) | Error::NotJointlyDiagonalizable(_)
        )
    }
}
