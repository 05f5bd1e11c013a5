//! Noise stability of partitions under correlated noise.
//!
//! The crate computes how likely two positively (or negatively) correlated
//! samples are to land in the same cell of a partition, in three settings
//! that share one spectral backbone:
//!
//! * **spherical** — partitions of the circle inside a correlated Gaussian
//!   plane, conditioned on the radii.  The conditional kernel is
//!   `e^{a cos(angle)}/I_0(a)` with `a = rho r s/(1-rho^2)`; its eigenvalues
//!   are modified-Bessel ratios ([`spherical`]).
//! * **gaussian** — full planar stability of radial "profile" partitions
//!   (three angular cells whose widths vary with the radius) against the
//!   Mehler kernel, including the exact three-sector value ([`gaussian`],
//!   [`profile`]).
//! * **discrete** — plurality/majority votes on correlated categorical
//!   strings, exact by enumeration or estimated by reproducible Monte Carlo
//!   ([`discrete`]).
//!
//! On top of these sit grid-certified inequality checks with explicit margin
//! reports ([`checks`]) and the optimal-rounding constants they support
//! ([`constants`]).
//!
//! Every deterministic routine is pure `f64` arithmetic with fixed summation
//! order, so results are bit-identical across runs and thread counts; Monte
//! Carlo routines derive each sample from a counter-based stream of a seeded
//! generator and are likewise reproducible.

pub mod checks;
pub mod constants;
pub mod discrete;
pub mod gaussian;
pub mod profile;
pub mod quadrature;
pub mod special;
pub mod spherical;

/// Errors for domain violations and resource caps.
///
/// Every fallible routine validates its inputs up front and reports the
/// first violated precondition; no routine returns NaN for bad input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("correlation {value} outside {expected}")]
    CorrelationOutOfRange { value: f64, expected: &'static str },
    #[error(
        "correlation {rho} not in (0, 1): this quantity is only defined in the positive regime"
    )]
    PositiveCorrelationRequired { rho: f64 },
    #[error("Bessel order {order} and argument {arg} must be finite and nonnegative")]
    BesselDomain { order: f64, arg: f64 },
    #[error("Hermite degree {degree} exceeds the supported maximum {max}")]
    HermiteDegree { degree: usize, max: usize },
    #[error("radial argument {value} must be positive and finite")]
    RadialArgument { value: f64 },
    #[error("only the circle (dimension 2) is supported, got dimension {dim}")]
    UnsupportedDimension { dim: usize },
    #[error("angle {theta} outside [0, 2*pi]")]
    AngleOutOfRange { theta: f64 },
    #[error("points {x} and {y} must have the same finite dimension")]
    DimensionMismatch { x: usize, y: usize },
    #[error("radial resolution {points} below the minimum {min}")]
    ResolutionTooCoarse { points: usize, min: usize },
    #[error("profiles are defined on different radial grids")]
    GridMismatch,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid voting rule: {0}")]
    InvalidRule(String),
    #[error("unknown check name {name:?}")]
    UnknownCheck { name: String },
    #[error("state space of {states} configurations exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { states: u128, cap: u128 },
    #[error("{samples} samples below the minimum {min}")]
    InsufficientSamples { samples: u64, min: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_correlation_open(rho: f64, expected: &'static str) -> Result<()> {
    if rho.is_finite() && rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::CorrelationOutOfRange {
            value: rho,
            expected,
        })
    }
}

pub(crate) fn require_radius(value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::RadialArgument { value })
    }
}
