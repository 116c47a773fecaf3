//! Conjugate reflected-ray pairs: the two reflection angles that share one
//! incident direction near the critical rim angle pi/3.
//!
//! The scaled incident-angle function here is Eq.-level dimensionless: the
//! first-order incident angle with the a/b factor removed,
//! `f(xi) = sin^3(pi/3 + xi) / (1 - cos(pi/3 + xi))`.
//! Its maximum sits at xi = 0 (theta' = pi/3), so a conjugate partner
//! exists on the other side of the peak for every xi in (0, xi0].

use crate::algebra::{PowerSeries, Sqrt3Rational};
use crate::error::{Error, Result};

/// Root-finder tolerance for conjugate angles, in radians.
pub const ROOT_TOL: f64 = 1e-14;

/// Critical rim angle pi/3: below it no conjugate pairs (and no anomalous
/// focusing) exist.
pub fn critical_angle() -> f64 {
    std::f64::consts::FRAC_PI_3
}

/// The scaled incident angle theta * (b/a) as a function of xi = theta' - pi/3.
pub fn theta_scaled(xi: f64) -> f64 {
    let tp = std::f64::consts::FRAC_PI_3 + xi;
    let s = tp.sin();
    s * s * s / (1.0 - tp.cos())
}

/// A conjugate pair of reflection angles sharing one incident direction.
#[derive(Clone, Copy, Debug)]
pub struct ConjugateRayPair {
    /// xi1 > 0: theta1' = pi/3 + xi1.
    pub xi1: f64,
    /// xi2 in (-xi1, 0): theta2' = pi/3 + xi2.
    pub xi2: f64,
    /// Shared incident angle in units of a/b.
    pub theta_shared: f64,
    /// Delta ell / a = cos(pi/3 + xi1) - cos(pi/3 + xi2).
    pub delta_ell_over_a: f64,
}

impl ConjugateRayPair {
    pub fn solve(xi1: f64, xi0: f64) -> Result<Self> {
        let xi2 = conjugate_angle(xi1, xi0)?;
        let p3 = std::f64::consts::FRAC_PI_3;
        Ok(Self {
            xi1,
            xi2,
            theta_shared: theta_scaled(xi1),
            delta_ell_over_a: (p3 + xi1).cos() - (p3 + xi2).cos(),
        })
    }
}

/// Bracketed bisection refined by secant steps. The bracket must straddle a
/// sign change.
fn solve_bracketed<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..200 {
        // Secant candidate, fall back to bisection if it leaves the bracket.
        let mut mid = if (fhi - flo).abs() > 0.0 {
            hi - fhi * (hi - lo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let fmid = f(mid);
        if fmid == 0.0 || (hi - lo) < tol {
            return Ok(mid);
        }
        if flo * fmid < 0.0 {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
        // Stall guard: force a bisection step when the secant end sticks.
        if (hi - lo) > tol && (fmid.abs() >= flo.abs().min(fhi.abs())) {
            let m = 0.5 * (lo + hi);
            let fm = f(m);
            if flo * fm < 0.0 {
                hi = m;
                fhi = fm;
            } else {
                lo = m;
                flo = fm;
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The conjugate angle xi2 in (-xi1, 0) with theta_scaled(xi2) =
/// theta_scaled(xi1). Reports sub-critical mirrors (xi0 = 0) instead of
/// fabricating a root.
pub fn conjugate_angle(xi1: f64, xi0: f64) -> Result<f64> {
    if xi0 <= 0.0 {
        return Err(Error::SubCritical { xi0 });
    }
    if !(xi1 > 0.0 && xi1 <= xi0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "xi1 = {xi1} outside (0, xi0 = {xi0}]"
        )));
    }
    conjugate_of(xi1)
}

/// Conjugate partner for any nonzero xi in the two-ray band, positive or
/// negative. Used by the quadrature path, which continues the integrand to
/// negative xi1 through the involution.
pub fn conjugate_of(xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::InvalidParameter("xi = 0 has no distinct conjugate".into()));
    }
    let target = theta_scaled(xi);
    let g = |x: f64| theta_scaled(x) - target;
    if xi > 0.0 {
        // xi2 in (-xi1, 0); exclude both endpoints (the trivial root xi2=xi1
        // maps to 0 here only in the xi1 -> 0 limit).
        let lo = -xi * (1.0 - 1e-12);
        let hi = -1e-18 * xi.max(1e-3);
        solve_bracketed(g, lo, hi, ROOT_TOL)
    } else {
        // Partner is positive with magnitude slightly above |xi|.
        let mut lo = -xi * (1.0 + 1e-12);
        let mut hi = -xi * 1.5;
        // Expand until the bracket straddles the root.
        let mut tries = 0;
        while g(lo) * g(hi) > 0.0 && tries < 60 {
            lo = hi;
            hi *= 1.5;
            tries += 1;
        }
        solve_bracketed(g, lo, hi, ROOT_TOL)
    }
}

/// Exact series coefficients: the expansion of the scaled incident angle in
/// xi (constant term 3 sqrt(3)/4) and its conjugate reversion xi2(xi1).
#[derive(Clone, Debug)]
pub struct SeriesCoefficients {
    /// Coefficients of theta*(b/a) = sum theta[k] xi^k.
    pub theta: Vec<Sqrt3Rational>,
    /// Coefficients of xi2 = sum xi2[k] xi1^k (xi2[0] = 0).
    pub xi2: Vec<Sqrt3Rational>,
}

/// Series of theta_scaled around xi = 0, exact in Q(sqrt 3).
pub fn theta_series(order: usize) -> PowerSeries {
    let cos = PowerSeries::cos(order);
    let sin = PowerSeries::sin(order);
    // sin(pi/3 + xi) = (sqrt3/2) cos xi + (1/2) sin xi
    let sin_tp = cos
        .scale(&Sqrt3Rational::sqrt3_ratio(1, 2))
        .add(&sin.scale(&Sqrt3Rational::from_ratio(1, 2)));
    // cos(pi/3 + xi) = (1/2) cos xi - (sqrt3/2) sin xi
    let cos_tp = cos
        .scale(&Sqrt3Rational::from_ratio(1, 2))
        .sub(&sin.scale(&Sqrt3Rational::sqrt3_ratio(1, 2)));
    let one = PowerSeries::constant(Sqrt3Rational::one(), order);
    let denom = one.sub(&cos_tp); // constant term 1/2, invertible
    sin_tp.powi(3).mul(&denom.reciprocal())
}

/// Series for the cosine difference driver: cos(pi/3 + s(xi)) for a given
/// inner series s with s(0) = 0.
pub(crate) fn cos_pi3_compose(inner: &PowerSeries) -> PowerSeries {
    let order = inner.order();
    let cos = PowerSeries::cos(order).compose(inner);
    let sin = PowerSeries::sin(order).compose(inner);
    cos.scale(&Sqrt3Rational::from_ratio(1, 2))
        .sub(&sin.scale(&Sqrt3Rational::sqrt3_ratio(1, 2)))
}

/// Reversion: the series xi2(xi1) with theta(xi2(xi1)) = theta(xi1),
/// xi2 = -xi1 + ... Solved order by order; each unknown coefficient enters
/// the matching condition linearly, so two exact evaluations pin it down.
pub fn conjugate_series_exact(order: usize) -> PowerSeries {
    let work = order + 2;
    let theta = theta_series(work);
    let mut xi2 = PowerSeries::zero(work);
    xi2.coeffs[1] = Sqrt3Rational::from_integer(-1);
    for n in 2..=order {
        // Matching condition at order n+1 of theta(xi2) = theta(xi1).
        let target = theta.coeffs[n + 1].clone();
        let at = |c: &Sqrt3Rational| -> Sqrt3Rational {
            let mut trial = xi2.clone();
            trial.coeffs[n] = c.clone();
            theta.compose(&trial).coeffs[n + 1].clone()
        };
        let f0 = at(&Sqrt3Rational::zero());
        let f1 = at(&Sqrt3Rational::one());
        let slope = &f1 - &f0;
        assert!(!slope.is_zero(), "degenerate reversion step at order {n}");
        xi2.coeffs[n] = &(&target - &f0) / &slope;
    }
    let mut out = PowerSeries::zero(order);
    out.coeffs.clone_from_slice(&xi2.coeffs[..=order]);
    out
}

/// Derive the exact theta expansion and its reversion, truncated at `order`
/// powers of xi.
pub fn derive_series_coefficients(order: usize) -> Result<SeriesCoefficients> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!(
            "series order must be >= 2, got {order}"
        )));
    }
    let theta = theta_series(order);
    let xi2 = conjugate_series_exact(order);
    Ok(SeriesCoefficients {
        theta: theta.coeffs,
        xi2: xi2.coeffs,
    })
}

/// Truncated conjugate series evaluated in floating point:
/// xi2 ~= -xi1 + (sqrt3/9) xi1^2 - ...
pub fn conjugate_series(xi1: f64, order: usize) -> Result<f64> {
    const MAX_ORDER: usize = 12;
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh {
            requested: order,
            available: MAX_ORDER,
        });
    }
    let series = conjugate_series_exact(order);
    Ok(series.eval_f64(xi1))
}
