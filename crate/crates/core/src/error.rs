use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("integration failed at node {node} (t = {time}): non-finite state")]
    IntegrationFailure { node: usize, time: f64 },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("initial state is not on the polydiagonal (membership defect {defect:e})")]
    OffPolydiagonal { defect: f64 },

    #[error(
        "endpoints share a classification: R({lo}) = {r_lo}, R({hi}) = {r_hi} (both {})",
        if *.coherent { "coherent" } else { "incoherent" }
    )]
    SameClassification {
        lo: f64,
        hi: f64,
        r_lo: f64,
        r_hi: f64,
        coherent: bool,
    },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    PowerIterationStalled { iterations: usize, estimate: f64 },

    #[error("at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn at_lambda(self, lambda: f64) -> Self {
        match self {
            e @ Error::AtLambda { .. } => e,
            e => Error::AtLambda {
                lambda,
                source: Box::new(e),
            },
        }
    }

    /// Strips any `AtLambda` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLambda { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
