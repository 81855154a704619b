use alloc::string::String;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid GIT data: {0}")]
    InvalidData(String),
    #[error("input too large: {what} = {value} exceeds bound {bound}")]
    InputTooLarge { what: &'static str, value: u64, bound: u64 },
    #[error("stability condition {0} lies on a wall (chamber is not full-dimensional)")]
    NotFullDimensional(String),
    #[error("quotient is not proper: {0}")]
    NotProper(String),
    #[error("wall is crepant: sum of D_j . e vanishes")]
    CrepantWall,
    #[error("omega_plus . e = {0} is negative; swap the two stability conditions")]
    LabelingError(String),
    #[error("no admissible p-basis found with coordinates bounded by {bound}")]
    BasisSearchFailed { bound: i64 },
    #[error("supplied p-basis rejected: {0}")]
    BasisRejected(String),
    #[error("sector {0} is not in the fan")]
    SectorNotInFan(String),
    #[error("characters indexed by the sector do not span: {0}")]
    SpanFailure(String),
    #[error("series tags do not match: {0}")]
    TagMismatch(String),
    #[error("division by a pure nilpotent factor (u_{0} + 0 z)")]
    DivisionByPureNilpotent(usize),
    #[error("pairing E_{index} . k = {value} is not a non-negative integer")]
    NonIntegralPairing { index: usize, value: String },
    #[error("Gamma ratio did not reduce: {0}")]
    NonCancellingGamma(String),
    #[error("Laplace Gamma factor does not cancel the stored denominator: {0}")]
    GammaMismatch(String),
    #[error("Gamma pole at {0}")]
    PoleError(String),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("series evaluation did not converge within degree {0}")]
    NoConvergence(u32),
    #[error("least-squares system is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("entry not representable in the z-degree window: {0}")]
    WindowExceeded(String),
}

pub type Result<T> = core::result::Result<T, Error>;
