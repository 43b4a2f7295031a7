use thiserror::Error;

use crate::dynamics::OrbitTrace;

/// Broad failure category, used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("surface meets the symmetry axis at r = {r} (R = 0)")]
    SingularAxis { r: f64 },

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("energy {energy} lies below the potential minimum {minimum}")]
    NoMotion { energy: f64, minimum: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("radial motion is forbidden near r = {r}")]
    ForbiddenRegion { r: f64 },

    #[error("|p_theta| = {p} exceeds the smallest profile radius {r_min} on the segment")]
    ForbiddenMomentum { p: f64, r_min: f64 },

    #[error("momentum {0} has no radial turning point")]
    NoTurningPoint(f64),

    #[error("closed geodesic {label} does not exist: {reason}")]
    Nonexistent { label: String, reason: String },

    #[error("{label} is not primitive; it retraces {primitive}")]
    NonPrimitive { label: String, primitive: String },

    #[error("operation unsupported on this surface family: {0}")]
    UnsupportedFamily(String),

    #[error("circular orbit at r = {0} is unstable")]
    UnstableOrbit(f64),

    #[error("integration failed at lambda = {lambda}: {reason}")]
    Integration {
        lambda: f64,
        reason: String,
        partial: Box<OrbitTrace>,
    },

    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("secant refinement did not converge; best iterate {best}")]
    Refine { best: f64 },

    #[error("no two-point solution found; searched {0}")]
    NotFound(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Integration { .. }
            | Error::Quadrature { .. }
            | Error::Root(_)
            | Error::Refine { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
