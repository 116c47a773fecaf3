//! Two attached flat mirror segments seen from a point: classify incident
//! directions by how many rays (incident + reflected) reach the point, and
//! check the mode-counting conservation that underpins the renormalization
//! by subtraction.
//!
//! Convention (fixed here once): the observation point is the origin; the
//! mirror occupies polar bearings [0, theta2'] with segment 1 spanning
//! [0, theta1'] and segment 2 spanning [theta1', theta2']. Segment
//! orientations alpha1, alpha2 are measured clockwise from the +x axis, and
//! the incident-ray angle theta is the clockwise angle of its travel
//! direction, so that the six classification bands come out as
//!   (-pi, 2a1-pi)                       incident only
//!   (2a1-pi, t1'+2a2-pi)                incident + 1 reflected
//!   (t1'+2a2-pi, t1'+2a1-pi)            incident + 2 reflected
//!   (t1'+2a1-pi, t2'+2a2-pi)            incident + 1 reflected
//!   (t2'+2a2-pi, pi-t2')                incident only
//!   (pi-t2', pi]                        blocked.
//! Segments reflect on both faces; the classifier traces rays exactly and
//! never consults the table above (the table is what the tests check).

use crate::error::{Error, Result};

/// Intersection/containment tolerance for the exact tracer, in the length
/// units of the construction (outer endpoint of segment 1 at distance 1).
const GEOM_TOL: f64 = 1e-9;

type Point = [f64; 2];

#[derive(Clone, Copy, Debug)]
pub struct SegmentMirror {
    pub alpha1: f64,
    pub alpha2: f64,
    pub theta1_prime: f64,
    pub theta2_prime: f64,
    /// Endpoints of the polyline: q0 (bearing 0), q1 (bearing theta1'),
    /// q2 (bearing theta2'); segment 1 is q0-q1, segment 2 is q1-q2.
    q0: Point,
    q1: Point,
    q2: Point,
}

/// Rays reaching the observation point from one incident direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RayClassification {
    pub incident: u8,
    pub reflected: u8,
}

/// Angular measure of each classification class over the full circle.
#[derive(Clone, Copy, Debug, Default)]
pub struct RayCensus {
    pub blocked: f64,
    pub incident_only: f64,
    pub one_reflected: f64,
    pub two_reflected: f64,
}

impl RayCensus {
    /// Census with the mirror removed: every direction is incident-only.
    pub fn free_space() -> Self {
        RayCensus {
            incident_only: 2.0 * std::f64::consts::PI,
            ..Default::default()
        }
    }

    pub fn total(&self) -> f64 {
        self.blocked + self.incident_only + self.one_reflected + self.two_reflected
    }

    /// Total ray count integrated over direction, with multiplicity: the
    /// bands with reflected rays also receive the incident ray.
    pub fn weighted_ray_total(&self) -> f64 {
        self.incident_only + 2.0 * self.one_reflected + 3.0 * self.two_reflected
    }

    /// Reflected measure with multiplicity; conservation says this equals
    /// the blocked measure.
    pub fn reflected_measure(&self) -> f64 {
        self.one_reflected + 2.0 * self.two_reflected
    }

    fn add(&mut self, class: RayClassification, measure: f64) {
        match (class.incident, class.reflected) {
            (0, _) => self.blocked += measure,
            (_, 0) => self.incident_only += measure,
            (_, 1) => self.one_reflected += measure,
            _ => self.two_reflected += measure,
        }
    }
}

fn unit(bearing: f64) -> Point {
    [bearing.cos(), bearing.sin()]
}

/// Intersection of the ray origin + t*dir (t > tol) with the chord p-q,
/// returning t, or None if it misses.
fn ray_segment_intersection(origin: Point, dir: Point, p: Point, q: Point) -> Option<f64> {
    let e = [q[0] - p[0], q[1] - p[1]];
    let denom = dir[0] * e[1] - dir[1] * e[0];
    if denom.abs() < 1e-14 {
        return None;
    }
    let w = [p[0] - origin[0], p[1] - origin[1]];
    let t = (w[0] * e[1] - w[1] * e[0]) / denom;
    let s = (w[0] * dir[1] - w[1] * dir[0]) / denom;
    if t > GEOM_TOL && (-GEOM_TOL..=1.0 + GEOM_TOL).contains(&s) {
        Some(t)
    } else {
        None
    }
}

impl SegmentMirror {
    /// Build the two-segment mirror. Segment 1 starts at unit distance on
    /// bearing 0 and runs at clockwise tilt alpha1 up to the bearing-theta1'
    /// ray; segment 2 continues at tilt alpha2 to the bearing-theta2' ray.
    pub fn new(alpha1: f64, alpha2: f64, theta1_prime: f64, theta2_prime: f64) -> Result<Self> {
        if !(0.0 < theta1_prime && theta1_prime < theta2_prime) {
            return Err(Error::InvalidParameter(format!(
                "subtended angles must satisfy 0 < theta1' < theta2', got {theta1_prime}, {theta2_prime}"
            )));
        }
        if !(alpha1 > 0.0 && alpha2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "segment tilts must be positive, got alpha1 = {alpha1}, alpha2 = {alpha2}"
            )));
        }
        if theta1_prime + alpha1 >= std::f64::consts::PI
            || theta2_prime + alpha2 >= std::f64::consts::PI
        {
            return Err(Error::DegenerateSegment(format!(
                "segment does not meet its bounding ray (theta1' + alpha1 = {}, theta2' + alpha2 = {})",
                theta1_prime + alpha1,
                theta2_prime + alpha2
            )));
        }
        // Segment 1: from q0 = (1, 0) along standard direction pi - alpha1
        // to the bearing-theta1' ray. Sine-rule form of the intersection.
        let q0 = [1.0, 0.0];
        let r1 = alpha1.sin() / (theta1_prime + alpha1).sin();
        let q1 = [r1 * theta1_prime.cos(), r1 * theta1_prime.sin()];
        // Segment 2: from q1 along pi - alpha2 to the bearing-theta2' ray.
        let r2 = r1 * (theta1_prime + alpha2).sin() / (theta2_prime + alpha2).sin();
        let q2 = [r2 * theta2_prime.cos(), r2 * theta2_prime.sin()];
        let len1 = ((q1[0] - q0[0]).powi(2) + (q1[1] - q0[1]).powi(2)).sqrt();
        let len2 = ((q2[0] - q1[0]).powi(2) + (q2[1] - q1[1]).powi(2)).sqrt();
        if len1 < 1e-6 || len2 < 1e-6 {
            return Err(Error::DegenerateSegment(format!(
                "zero-length segment (lengths {len1:.2e}, {len2:.2e})"
            )));
        }
        Ok(SegmentMirror {
            alpha1,
            alpha2,
            theta1_prime,
            theta2_prime,
            q0,
            q1,
            q2,
        })
    }

    fn segment(&self, i: usize) -> (Point, Point) {
        if i == 0 {
            (self.q0, self.q1)
        } else {
            (self.q1, self.q2)
        }
    }

    /// First mirror hit along origin + t*dir, if any.
    fn first_hit(&self, origin: Point, dir: Point) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..2 {
            let (p, q) = self.segment(i);
            if let Some(t) = ray_segment_intersection(origin, dir, p, q) {
                if best.map_or(true, |(_, tb)| t < tb) {
                    best = Some((i, t));
                }
            }
        }
        best
    }

    /// Exact ray count for the incident direction theta (clockwise angle of
    /// the travel direction, theta in (-pi, pi]).
    pub fn classify_incident(&self, theta: f64) -> Result<RayClassification> {
        if !(theta > -std::f64::consts::PI - GEOM_TOL && theta <= std::f64::consts::PI + GEOM_TOL) {
            return Err(Error::InvalidParameter(format!(
                "incident angle {theta} outside (-pi, pi]"
            )));
        }
        // Clockwise angle theta -> standard travel direction -theta.
        let v = [theta.cos(), -theta.sin()];
        // The incident ray reaches the origin unless a segment sits upstream.
        let upstream = [-v[0], -v[1]];
        let incident = if self.first_hit([0.0, 0.0], upstream).is_some() {
            0
        } else {
            1
        };

        let mut reflected = 0u8;
        for i in 0..2 {
            let alpha = if i == 0 { self.alpha1 } else { self.alpha2 };
            // Mirror law: travel direction -theta reflects off a line of
            // standard orientation pi - alpha into theta - 2 alpha, so the
            // reflection point must sit on the bearing theta - 2 alpha + pi.
            let bearing = theta - 2.0 * alpha + std::f64::consts::PI;
            let toward = unit(bearing);
            let (p, q) = self.segment(i);
            let Some(t) = ray_segment_intersection([0.0, 0.0], toward, p, q) else {
                continue;
            };
            let hit = [t * toward[0], t * toward[1]];
            // The candidate must be the first thing the outgoing leg meets
            // (otherwise the other segment shadows the path to the point).
            match self.first_hit([0.0, 0.0], toward) {
                Some((j, tj)) if j == i && (tj - t).abs() < GEOM_TOL => {}
                _ => continue,
            }
            // The incoming leg from infinity must be unobstructed.
            let back = [hit[0] - GEOM_TOL * 10.0 * v[0], hit[1] - GEOM_TOL * 10.0 * v[1]];
            if self.first_hit(back, upstream).is_some() {
                continue;
            }
            reflected += 1;
        }
        Ok(RayClassification {
            incident,
            reflected,
        })
    }

    /// Analytic class boundaries from the reflected-bearing windows, sorted
    /// within (-pi, pi].
    pub fn class_boundaries(&self) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let mut b = vec![
            -pi,
            2.0 * self.alpha1 - pi,
            self.theta1_prime + 2.0 * self.alpha2 - pi,
            self.theta1_prime + 2.0 * self.alpha1 - pi,
            self.theta2_prime + 2.0 * self.alpha2 - pi,
            pi - self.theta2_prime,
            pi,
        ];
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        b
    }

    /// Census by uniform midpoint sampling of the direction circle.
    pub fn census_sampled(&self, resolution: usize) -> Result<RayCensus> {
        if resolution < 1000 {
            return Err(Error::InvalidParameter(format!(
                "census resolution must be >= 1000, got {resolution}"
            )));
        }
        let pi = std::f64::consts::PI;
        let dtheta = 2.0 * pi / resolution as f64;
        let mut census = RayCensus::default();
        for j in 0..resolution {
            let theta = -pi + (j as f64 + 0.5) * dtheta;
            census.add(self.classify_incident(theta)?, dtheta);
        }
        Ok(census)
    }

    /// Census by exact interval arithmetic: the class is constant between
    /// consecutive analytic boundaries, so one traced midpoint per interval
    /// fixes the whole band and the measures are exact widths.
    pub fn census_intervals(&self) -> Result<RayCensus> {
        let bounds = self.class_boundaries();
        let mut census = RayCensus::default();
        for w in bounds.windows(2) {
            let width = w[1] - w[0];
            if width <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            census.add(self.classify_incident(mid)?, width);
        }
        Ok(census)
    }
}

/// Free-function form of the classifier (tracer-based, not table-based).
pub fn classify_incident(mirror: &SegmentMirror, theta: f64) -> Result<RayClassification> {
    mirror.classify_incident(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sample_mirror() -> SegmentMirror {
        SegmentMirror::new(0.20, 0.12, 0.7, 1.3).unwrap()
    }

    #[test]
    fn six_band_table() {
        let m = sample_mirror();
        let b = [
            -PI,
            2.0 * m.alpha1 - PI,
            m.theta1_prime + 2.0 * m.alpha2 - PI,
            m.theta1_prime + 2.0 * m.alpha1 - PI,
            m.theta2_prime + 2.0 * m.alpha2 - PI,
            PI - m.theta2_prime,
            PI,
        ];
        let expected = [(1, 0), (1, 1), (1, 2), (1, 1), (1, 0), (0, 0)];
        for (k, &(inc, refl)) in expected.iter().enumerate() {
            let mid = 0.5 * (b[k] + b[k + 1]);
            let c = m.classify_incident(mid).unwrap();
            assert_eq!(
                (c.incident, c.reflected),
                (inc, refl),
                "band {k} at theta = {mid}"
            );
        }
        // theta = pi itself is in the blocked band.
        let c = m.classify_incident(PI).unwrap();
        assert_eq!((c.incident, c.reflected), (0, 0));
    }

    #[test]
    fn single_segment_limit() {
        // alpha1 = alpha2: effectively one flat segment; no two-reflected
        // band, and reflected measure equals blocked measure.
        let m = SegmentMirror::new(0.15, 0.15, 0.6, 1.1).unwrap();
        let c = m.census_intervals().unwrap();
        assert_eq!(c.two_reflected, 0.0);
        assert_relative_eq!(c.reflected_measure(), c.blocked, epsilon = 1e-12);
        assert_relative_eq!(c.total(), 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn conservation_interval_mode() {
        let m = sample_mirror();
        let c = m.census_intervals().unwrap();
        assert_relative_eq!(c.total(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(c.weighted_ray_total(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(c.reflected_measure(), c.blocked, epsilon = 1e-12);
        // Blocked measure is exactly the subtended angle theta2'.
        assert_relative_eq!(c.blocked, m.theta2_prime, epsilon = 1e-12);
        // Double-counted band delta theta = 2 (alpha1 - alpha2).
        assert_relative_eq!(
            c.two_reflected,
            2.0 * (m.alpha1 - m.alpha2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn conservation_sampled_mode() {
        let m = sample_mirror();
        let n = 4000;
        let c = m.census_sampled(n).unwrap();
        assert_relative_eq!(c.total(), 2.0 * PI, epsilon = 1e-9);
        let tol = 2.0 * PI / n as f64 * 6.0; // one bin slack per boundary
        assert!((c.weighted_ray_total() - 2.0 * PI).abs() < tol);
        let ci = m.census_intervals().unwrap();
        assert!((c.blocked - ci.blocked).abs() < tol);
        assert!((c.two_reflected - ci.two_reflected).abs() < tol);
    }

    #[test]
    fn sampled_matches_intervals_randomized() {
        // Deterministic pseudo-random sweep over valid configurations.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand01 = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..25 {
            let t1 = 0.4 + 0.6 * rand01();
            let t2 = t1 + 0.3 + 0.5 * rand01();
            let a2 = 0.05 + 0.10 * rand01();
            let a1 = a2 + 0.10 * rand01();
            let m = SegmentMirror::new(a1, a2, t1, t2).unwrap();
            let ci = m.census_intervals().unwrap();
            assert_relative_eq!(ci.weighted_ray_total(), 2.0 * PI, epsilon = 1e-11);
            assert_relative_eq!(ci.reflected_measure(), ci.blocked, epsilon = 1e-11);
        }
    }

    #[test]
    fn free_space_census() {
        let c = RayCensus::free_space();
        assert_eq!(c.incident_only, 2.0 * PI);
        assert_eq!(c.total(), 2.0 * PI);
        assert_eq!(c.weighted_ray_total(), 2.0 * PI);
    }

    #[test]
    fn invalid_configurations() {
        assert!(SegmentMirror::new(0.2, 0.1, 1.3, 0.7).is_err()); // t1 > t2
        assert!(SegmentMirror::new(0.0, 0.1, 0.7, 1.3).is_err()); // flat tilt
        assert!(matches!(
            SegmentMirror::new(0.2, 2.0, 0.7, 1.3),
            Err(Error::DegenerateSegment(_))
        )); // theta2' + alpha2 >= pi
        let m = sample_mirror();
        assert!(m.classify_incident(4.0).is_err());
    }
}
