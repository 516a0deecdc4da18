use thiserror::Error;

/// Errors raised while constructing or evaluating curves, profiles and surfaces.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    /// A function was evaluated outside the set where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction parameter violates its invariant.
    #[error("parameter error: {0}")]
    Param(String),

    /// A non-positive step was requested for an integrator or difference scheme.
    #[error("step error: {0}")]
    Step(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    /// The tangent vectors are (numerically) linearly dependent.
    #[error("degenerate immersion: {0}")]
    Degenerate(String),

    #[error("flat point at (u, v) = ({u}, {v}): L = M = N = 0")]
    FlatPoint { u: f64, v: f64 },

    /// The mean curvature vector vanishes and the geometric frame is undefined.
    #[error("minimal point at (u, v) = ({u}, {v}): mean curvature vector vanishes")]
    MinimalPoint { u: f64, v: f64 },

    /// A surface specification document is malformed or inconsistent.
    #[error("invalid surface spec: {0}")]
    Spec(String),

    #[error("surface is not of the general class: {0}")]
    NotGeneralClass(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
