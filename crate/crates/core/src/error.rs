use thiserror::Error;

/// Errors produced by the geometry, series, quadrature and lab layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point y = {y} lies beyond the mirror rim (|y| <= {y_rim})")]
    OutsideRim { y: f64, y_rim: f64 },

    #[error("reflected ray at theta' = {theta_prime} does not intersect the mirror (discriminant {discriminant} < 0)")]
    NoIntersection { theta_prime: f64, discriminant: f64 },

    #[error("mirror is sub-critical (xi0 = {xi0}): no conjugate ray pairs exist below the pi/3 rim angle")]
    SubCritical { xi0: f64 },

    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("series order {requested} exceeds available coefficients ({available})")]
    OrderTooHigh { requested: usize, available: usize },

    #[error("incompatible observable kinds: cannot derive {to_kind} from {from_kind}")]
    IncompatibleKinds { from_kind: String, to_kind: String },

    #[error("distance a = {a} cm is below the plasma-wavelength floor {floor} cm; geometric optics is not valid there")]
    BelowPlasmaFloor { a: f64, floor: f64 },

    #[error("path difference is zero: coincident rays give a divergent frequency moment")]
    CoincidentRays,

    #[error("degenerate mirror segment: {0}")]
    DegenerateSegment(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
