use thiserror::Error;

/// Errors raised while evaluating, transforming or certifying solutions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error at z = {at}: {what}")]
    Domain { what: String, at: f64 },

    #[error("jet point mismatch: expected {expected}, found {found}")]
    PointMismatch { expected: f64, found: f64 },

    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("jet of order {have} is too short, need order {need}")]
    InsufficientOrder { have: usize, need: usize },

    #[error("critical point at z = {at}: |f'| = {derivative:e} is below threshold")]
    CriticalPoint { at: f64, derivative: f64 },

    #[error("pole at z = {at}")]
    Pole { at: f64 },

    #[error("duplicate exponent n = {0} in structure function")]
    DuplicateExponent(i32),

    #[error("map derivative f'({at}) = {value} is not positive")]
    NegativeDerivative { at: f64, value: f64 },

    #[error("map sends z = {at} to {image}, outside the source solution's domain")]
    DomainEscape { at: f64, image: f64 },

    #[error("no real positive seed amplitude: {0}")]
    NoRealSeed(String),

    #[error("degenerate map: {0}")]
    DegenerateMap(String),

    #[error("solution left the positive half-line at z = {at} (y = {value})")]
    SolutionEscape { at: f64, value: f64 },

    #[error("step size {step:e} underflowed at z = {at}")]
    StepUnderflow { at: f64, step: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("at z = {z}: {source}")]
    AtPoint { z: f64, source: Box<Error> },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn domain(what: impl Into<String>, at: f64) -> Self {
        Error::Domain { what: what.into(), at }
    }

    /// Attaches the grid point at which the error happened, unless the
    /// error already names it.
    pub fn at_point(self, z: f64) -> Self {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint { z, source: Box::new(e) },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
