use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the kinematics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A plane was requested with a zero (or non-finite) normal.
    #[error("plane normal must be a finite nonzero vector")]
    DegenerateNormal,

    /// The three midjoints do not span a plane, so the midplane is undetermined.
    #[error("midjoints are colinear (|cross| = {cross_norm:e}, threshold {threshold:e})")]
    Colinear { cross_norm: f64, threshold: f64 },

    /// A point handed to `base_angle` is not on the leg's midcircle.
    #[error("point is off midcircle {leg} (radial error {radial:e}, planar error {planar:e})")]
    OffCircle { leg: usize, radial: f64, planar: f64 },

    #[error("invalid joint design: {0}")]
    InvalidDesign(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The target coincides with its reflected image; infinitely many planes qualify.
    #[error("target and reflected point coincide; the midplane is not unique")]
    Degenerate,

    /// The distal normal field is undefined at the origin.
    #[error("distal normal field is undefined at the origin")]
    Origin,

    /// The request needs a finite plunge distance.
    #[error("infinite plunge distance only admits the straight-down distal normal")]
    InfinitePlunge,
}
