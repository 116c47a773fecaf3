//! Ray geometry for a parabola with its focus at the origin.
//!
//! The mirror is `x = (b^2 - y^2) / (2b)`: vertex at `x = b/2`, focus at the
//! origin, latus rectum through the focal plane at `y = +-b`. Angles are
//! measured from the +x axis; the canonical reflection branch is the upper
//! half-plane (`y_i > 0`), with the lower half handled by symmetry.

use crate::error::{Error, Result};

/// Ratio a/b above which the first-order formulas are flagged as unreliable.
pub const FIRST_ORDER_VALIDITY: f64 = 1e-2;

/// Residual tolerance (relative to b) for the on-parabola invariant.
pub const ON_PARABOLA_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorKind {
    Revolution,
    Cylinder,
}

impl std::fmt::Display for MirrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MirrorKind::Revolution => write!(f, "revolution"),
            MirrorKind::Cylinder => write!(f, "cylinder"),
        }
    }
}

/// A parabolic mirror with focal parameter `b`, subtending rim angle
/// `pi/3 + xi0` from the axis.
#[derive(Clone, Copy, Debug)]
pub struct ParabolicMirror {
    pub b: f64,
    pub xi0: f64,
    pub kind: MirrorKind,
}

impl ParabolicMirror {
    pub fn new(b: f64, xi0: f64, kind: MirrorKind) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::InvalidParameter(format!("focal parameter b must be positive, got {b}")));
        }
        if !(0.0..2.0 * std::f64::consts::FRAC_PI_3).contains(&xi0) {
            return Err(Error::InvalidParameter(format!(
                "rim offset xi0 must satisfy 0 <= xi0 < 2pi/3, got {xi0}"
            )));
        }
        Ok(Self { b, xi0, kind })
    }

    /// Rim angle theta' = pi/3 + xi0.
    pub fn rim_angle(&self) -> f64 {
        std::f64::consts::FRAC_PI_3 + self.xi0
    }

    /// y-coordinate of the rim, from the focal polar form r = b/(1 + cos theta').
    pub fn y_rim(&self) -> f64 {
        let t = self.rim_angle();
        self.b * t.sin() / (1.0 + t.cos())
    }
}

/// An observation point on the symmetry axis, a distance `a` from the focus
/// toward the vertex.
#[derive(Clone, Copy, Debug)]
pub struct AxialPoint {
    pub a: f64,
}

impl AxialPoint {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("axial distance a must be positive, got {a}")));
        }
        Ok(Self { a })
    }

    /// True when a/b exceeds the validity threshold for the first-order
    /// formulas. A warning condition, not an error: the expansion only
    /// assumes a << b.
    pub fn outside_first_order_validity(&self, mirror: &ParabolicMirror) -> bool {
        self.a / mirror.b > FIRST_ORDER_VALIDITY
    }
}

/// Exact solution of one reflection: angles, reflection point, and the path
/// segments of the reflected/incident legs.
#[derive(Clone, Copy, Debug)]
pub struct ReflectionSolution {
    pub theta_prime: f64,
    pub theta: f64,
    pub x_i: f64,
    pub y_i: f64,
    /// Tangent angle alpha at the reflection point, tan(alpha) = b / y_i.
    pub alpha_t: f64,
    pub s1: f64,
    pub s2: f64,
    pub ell: f64,
}

/// x-coordinate of the parabola at height y.
pub fn parabola_point(mirror: &ParabolicMirror, y: f64) -> Result<f64> {
    let y_rim = mirror.y_rim();
    if y.abs() > y_rim * (1.0 + 1e-12) {
        return Err(Error::OutsideRim { y, y_rim });
    }
    Ok((mirror.b * mirror.b - y * y) / (2.0 * mirror.b))
}

/// Reflection point of the ray that leaves the mirror at angle theta' and
/// crosses the axis at x = a. Exact quadratic solution, upper branch.
pub fn reflection_point(mirror: &ParabolicMirror, point: &AxialPoint, theta_prime: f64) -> Result<(f64, f64)> {
    let rim = mirror.rim_angle();
    if !(theta_prime > 0.0 && theta_prime <= rim * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "theta' = {theta_prime} outside (0, rim angle = {rim}]"
        )));
    }
    let (b, a) = (mirror.b, point.a);
    let st = theta_prime.sin();
    let ct = theta_prime.cos();
    // Distance s from (a, 0) to the mirror along direction theta':
    // s^2 sin^2 + 2 b (a + s cos) - b^2 = 0, positive root. The discriminant
    // below equals cos^2 (sec^2 - 2 (a/b) tan^2), the paper's condition.
    let disc = 1.0 - 2.0 * (a / b) * st * st;
    if disc < 0.0 {
        return Err(Error::NoIntersection {
            theta_prime,
            discriminant: disc,
        });
    }
    let s = b * (disc.sqrt() - ct) / (st * st);
    Ok((a + s * ct, s * st))
}

/// First-order incident angle, Eq.-level contract:
/// theta = (a/b) sin^3(theta') sec(theta') / (sec(theta') - 1).
pub fn incident_angle_first_order(mirror: &ParabolicMirror, point: &AxialPoint, theta_prime: f64) -> Result<f64> {
    if !(theta_prime > 0.0 && theta_prime < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "theta' = {theta_prime} outside (0, pi); theta' -> 0 is singular"
        )));
    }
    let st = theta_prime.sin();
    let ct = theta_prime.cos();
    // sin^3 sec / (sec - 1) = sin^3 / (1 - cos), stable for theta' near pi/2.
    Ok((point.a / mirror.b) * st * st * st / (1.0 - ct))
}

/// Exact incident angle from the specular reflection law at the exact
/// reflection point: theta = theta' - pi + 2 alpha, tan(alpha) = b / y_i.
pub fn exact_incident_angle(mirror: &ParabolicMirror, point: &AxialPoint, theta_prime: f64) -> Result<f64> {
    let (_, y_i) = reflection_point(mirror, point, theta_prime)?;
    let alpha = (mirror.b / y_i).atan();
    Ok(theta_prime - std::f64::consts::PI + 2.0 * alpha)
}

/// Full exact reflection solution for one ray.
pub fn solve_reflection(mirror: &ParabolicMirror, point: &AxialPoint, theta_prime: f64) -> Result<ReflectionSolution> {
    let (x_i, y_i) = reflection_point(mirror, point, theta_prime)?;
    let alpha = (mirror.b / y_i).atan();
    let theta = theta_prime - std::f64::consts::PI + 2.0 * alpha;
    let s1 = ((x_i - point.a).powi(2) + y_i * y_i).sqrt();
    let s2 = (x_i - point.a) / theta.cos();
    Ok(ReflectionSolution {
        theta_prime,
        theta,
        x_i,
        y_i,
        alpha_t: alpha,
        s1,
        s2,
        ell: s1 + s2,
    })
}

/// First-order path length after the ray first crosses x = a:
/// ell = b - a (1 + cos theta'), with the s1, s2 split.
pub fn path_length(mirror: &ParabolicMirror, point: &AxialPoint, theta_prime: f64) -> Result<(f64, f64, f64)> {
    // Existence check matches the exact solver.
    reflection_point(mirror, point, theta_prime)?;
    let (b, a) = (mirror.b, point.a);
    let st2 = theta_prime.sin().powi(2);
    let ct = theta_prime.cos();
    let s1 = b / st2 * (1.0 - ct - (a / b) * st2);
    let s2 = b * ct / st2 * (1.0 - ct - (a / b) * st2);
    Ok((b - a * (1.0 + ct), s1, s2))
}

/// Path length difference of two reflected rays reaching the same axial
/// point: Delta ell = a (cos theta1' - cos theta2').
pub fn path_difference(point: &AxialPoint, theta1_prime: f64, theta2_prime: f64) -> f64 {
    point.a * (theta1_prime.cos() - theta2_prime.cos())
}
