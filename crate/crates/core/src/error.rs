use alloc::string::String;

/// Every failure the core can report.
///
/// The variant names double as machine-readable reason strings (see
/// [`Error::reason`]), which the CLI forwards verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("conflicting weights supplied for edge {0}-{1}")]
    NonSymmetricWeight(String, String),
    #[error("weight or measure must be positive and finite: {0}")]
    NonPositiveWeightOrMeasure(String),
    #[error("graph is not connected ({0} components)")]
    DisconnectedGraph(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(String),
    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("function is bound to a different graph")]
    GraphMismatch,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at vertex index {0}")]
    NonFinite(usize),
    #[error("exponent r = {0} is outside [2, ∞]")]
    BadExponent(f64),
    #[error("potential must be strictly positive (vertex index {0})")]
    NonPositivePotential(usize),
    #[error("eigen solver failed: {0}")]
    EigenSolverFailure(String),

    #[error("coefficient out of range: {0}")]
    CoefficientOutOfRange(String),
    #[error("nonlinearity metadata missing: {0}")]
    MissingMetadata(String),
    #[error("second partials unavailable and finite-difference fallback disabled")]
    MissingSecondPartials,

    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular Jacobian at iteration {0}")]
    SingularJacobian(usize),
    #[error("could not reach a far point with negative energy")]
    BadFarPoint,
    #[error("antipode fails the residual check ({0:e})")]
    SymmetryViolated(f64),
}

impl Error {
    /// Stable identifier for the error kind.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::NonSymmetricWeight(..) => "NonSymmetricWeight",
            Error::NonPositiveWeightOrMeasure(_) => "NonPositiveWeightOrMeasure",
            Error::DisconnectedGraph(_) => "DisconnectedGraph",
            Error::SelfLoop(_) => "SelfLoop",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::DuplicateVertex(_) => "DuplicateVertex",
            Error::BadParams(_) => "BadParams",
            Error::GraphMismatch => "GraphMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::BadExponent(_) => "BadExponent",
            Error::NonPositivePotential(_) => "NonPositivePotential",
            Error::EigenSolverFailure(_) => "EigenSolverFailure",
            Error::CoefficientOutOfRange(_) => "CoefficientOutOfRange",
            Error::MissingMetadata(_) => "MissingMetadata",
            Error::MissingSecondPartials => "MissingSecondPartials",
            Error::NoConvergence(_) => "NoConvergence",
            Error::SingularJacobian(_) => "SingularJacobian",
            Error::BadFarPoint => "BadFarPoint",
            Error::SymmetryViolated(_) => "SymmetryViolated",
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
