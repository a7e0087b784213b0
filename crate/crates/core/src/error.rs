use thiserror::Error;

use crate::kinematics::Channel;

/// Errors raised by the phase-shift engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature order must be at least 1")]
    ZeroQuadratureOrder,

    #[error("{what} = {value} is outside its domain ({domain})")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("Legendre Q_l is undefined at z = {0} (requires z > 1)")]
    BranchPoint(f64),

    #[error("{0} is not a half-integer")]
    NotHalfInteger(f64),

    #[error("projection {m} is not allowed for angular momentum {j}")]
    InvalidProjection { j: f64, m: f64 },

    #[error("angular momenta l = {l}, s = {s}, J = {j} violate the triangle rule")]
    TriangleRule { l: u32, s: u32, j: u32 },

    #[error("forward singularity in the {channel:?} propagator at x = {x} (unscreened, alpha = 0)")]
    ForwardSingularity { channel: Channel, x: f64 },

    #[error("screening parameter alpha must be > 0 for phase shifts (alpha = 0 puts the forward singularity on the integration path)")]
    ZeroScreening,

    #[error(
        "projection did not converge for l = {l}: order {order} gave {value:e}, order doubling changed it by {change:e}"
    )]
    NonConvergence {
        l: u32,
        order: usize,
        value: f64,
        change: f64,
    },

    #[error("imaginary residual {residual:e} exceeds {limit:e} for l = {l}")]
    ImaginaryResidual { l: u32, residual: f64, limit: f64 },

    #[error("invalid term mask {0:#x}: only the low 11 bits are defined")]
    InvalidTermMask(u32),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
