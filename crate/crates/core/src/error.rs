use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {t} is not in the time scale")]
    PointNotInScale { t: f64 },

    #[error("empty interval: t0 = {t0} must be strictly less than t1 = {t1}")]
    EmptyInterval { t0: f64, t1: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("delta derivative undefined at {t}: left-scattered maximum of the scale")]
    AtScaleMaximum { t: f64 },

    #[error("reversed integration bounds: {c} > {d}")]
    ReversedBounds { c: f64, d: f64 },

    #[error("grid function has {got} values but the scale has {expected} points")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at t = {t}")]
    NonFiniteValue { t: f64, value: f64 },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("domain error in `{node}`: {msg}")]
    Domain { node: String, msg: String },

    #[error("`{node}` is not differentiable at this point")]
    NonDifferentiable { node: String },

    #[error("need at least 3 scale points in [t0, t1], found {found}")]
    InsufficientPoints { found: usize },

    #[error("discrete scales only: [t0, t1] contains a dense interval")]
    DenseScale,

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        /// Best iterate found, one value per point of [t0, t1].
        best: Vec<f64>,
    },

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("invalid spike location: {0}")]
    InvalidSpikeLocation(String),
}
