//! Runtime verification suites: the same analytic identities the test suite
//! pins down, packaged as machine-readable pass/fail reports for the CLI.

use crate::algebra::Sqrt3Rational;
use crate::error::{Error, Result};
use crate::geometry::{self, AxialPoint, MirrorKind, ParabolicMirror};
use crate::multiray;
use crate::observables;
use crate::quadrature;
use crate::segments::SegmentMirror;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Series,
    Integrals,
    Census,
    Geometry,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Series, Suite::Integrals, Suite::Census, Suite::Geometry];
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Suite::Series => "series",
            Suite::Integrals => "integrals",
            Suite::Census => "census",
            Suite::Geometry => "geometry",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Suite::Series),
            "integrals" => Ok(Suite::Integrals),
            "census" => Ok(Suite::Census),
            "geometry" => Ok(Suite::Geometry),
            other => Err(Error::Config(format!(
                "unknown verify suite '{other}' (expected series, integrals, census or geometry)"
            ))),
        }
    }
}

/// One verified identity: measured vs expected within tolerance
/// (tolerance 0 means an exact-arithmetic comparison).
#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn relative(suite: Suite, name: &str, measured: f64, expected: f64, tol: f64) -> Self {
        let scale = expected.abs().max(f64::MIN_POSITIVE);
        CheckResult {
            suite: suite.to_string(),
            name: name.to_string(),
            passed: ((measured - expected) / scale).abs() <= tol,
            measured,
            expected,
            tolerance: tol,
        }
    }

    /// Pass when |measured| <= tol (an error-bound check, expected 0).
    fn bound(suite: Suite, name: &str, measured: f64, tol: f64) -> Self {
        CheckResult {
            suite: suite.to_string(),
            name: name.to_string(),
            passed: measured.abs() <= tol,
            measured,
            expected: 0.0,
            tolerance: tol,
        }
    }

    fn exact(suite: Suite, name: &str, measured: &Sqrt3Rational, expected: &Sqrt3Rational) -> Self {
        CheckResult {
            suite: suite.to_string(),
            name: name.to_string(),
            passed: measured == expected,
            measured: measured.to_f64(),
            expected: expected.to_f64(),
            tolerance: 0.0,
        }
    }
}

pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn run_suite(suite: Suite) -> Result<Vec<CheckResult>> {
    match suite {
        Suite::Series => series_suite(),
        Suite::Integrals => integrals_suite(),
        Suite::Census => census_suite(),
        Suite::Geometry => geometry_suite(),
    }
}

pub fn run_all() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        out.extend(run_suite(suite)?);
    }
    Ok(out)
}

fn series_suite() -> Result<Vec<CheckResult>> {
    let s = Suite::Series;
    let mut checks = Vec::new();
    let coeffs = multiray::derive_series_coefficients(6)?;
    let theta_expected = [
        Sqrt3Rational::sqrt3_ratio(3, 4),
        Sqrt3Rational::zero(),
        Sqrt3Rational::sqrt3_ratio(-3, 4),
        Sqrt3Rational::from_ratio(1, 4),
        Sqrt3Rational::sqrt3_ratio(3, 16),
        Sqrt3Rational::from_ratio(-1, 16),
        Sqrt3Rational::sqrt3_ratio(-11, 480),
    ];
    for (k, expected) in theta_expected.iter().enumerate() {
        checks.push(CheckResult::exact(
            s,
            &format!("theta_series[{k}]"),
            &coeffs.theta[k],
            expected,
        ));
    }
    // The second reversion coefficient is sqrt(3)/9 = 1/(3 sqrt 3), fixed by
    // -t3/t2 of the theta series; the value confirms B4 below.
    let xi2_expected = [
        Sqrt3Rational::zero(),
        Sqrt3Rational::from_integer(-1),
        Sqrt3Rational::sqrt3_ratio(1, 9),
        Sqrt3Rational::from_ratio(-1, 27),
        Sqrt3Rational::sqrt3_ratio(35, 972),
        Sqrt3Rational::from_ratio(-97, 2916),
    ];
    for (k, expected) in xi2_expected.iter().enumerate() {
        checks.push(CheckResult::exact(
            s,
            &format!("xi2_series[{k}]"),
            &coeffs.xi2[k],
            expected,
        ));
    }
    let ec = observables::expansion_coefficients(4)?;
    checks.push(CheckResult::exact(
        s,
        "A2",
        &ec.a[2],
        &Sqrt3Rational::from_ratio(23, 324),
    ));
    checks.push(CheckResult::exact(
        s,
        "B4",
        &ec.b[4],
        &Sqrt3Rational::from_ratio(4051, 524_880),
    ));
    // Independent float oracle (complex Cauchy extraction, no reversion).
    let (oa, ob) = observables::taylor_fit_oracle(5, 0.2);
    checks.push(CheckResult::relative(s, "A2_oracle", oa[2], 23.0 / 324.0, 1e-10));
    checks.push(CheckResult::relative(
        s,
        "B4_oracle",
        ob[4],
        4051.0 / 524_880.0,
        1e-10,
    ));
    Ok(checks)
}

fn integrals_suite() -> Result<Vec<CheckResult>> {
    let s = Suite::Integrals;
    let mut checks = Vec::new();
    let dl = 0.5;
    let (m1, _) = quadrature::omega_moment_numeric(1, dl, &quadrature::DEFAULT_ALPHA_SCHEDULE)?;
    checks.push(CheckResult::relative(s, "omega_moment_n1", m1, -1.0 / (dl * dl), 1e-6));
    let (m3, _) = quadrature::omega_moment_numeric(3, dl, &quadrature::DEFAULT_ALPHA_SCHEDULE)?;
    checks.push(CheckResult::relative(s, "omega_moment_n3", m3, 6.0 / dl.powi(4), 1e-6));
    let beta = 2.0;
    let (b1, _) = quadrature::bessel_moment_numeric(1, beta, &quadrature::DEFAULT_DELTA_SCHEDULE)?;
    checks.push(CheckResult::relative(s, "bessel_moment_p1", b1, 1.0 / (3.0 * beta * beta), 1e-5));
    let (b2, _) = quadrature::bessel_moment_numeric(2, beta, &quadrature::DEFAULT_DELTA_SCHEDULE)?;
    checks.push(CheckResult::relative(s, "bessel_moment_p2", b2, 4.0 / (15.0 * beta.powi(3)), 1e-5));
    // Log-kernel IBP vs direct epsilon-excision on a taper-compliant test
    // function f(x) = (1 + x + x^2) T(x).
    let interval = (-1.0, 1.0);
    let taper = quadrature::Taper::fractional(interval.0, interval.1, 0.15)?;
    let poly = |x: f64| 1.0 + x + x * x;
    let poly_d = |x: f64, k: usize| match k {
        0 => 1.0 + x + x * x,
        1 => 1.0 + 2.0 * x,
        2 => 2.0,
        _ => 0.0,
    };
    let f = move |x: f64| poly(x) * taper.value(x);
    let fd = move |x: f64, order: usize| {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=order {
            if j > 0 {
                binom *= (order - j + 1) as f64 / j as f64;
            }
            acc += binom * poly_d(x, j) * taper.derivative(x, order - j);
        }
        acc
    };
    for &n in &[2u8, 4u8] {
        let integrand = quadrature::SmoothIntegrand::with_analytic(&f, &fd, true)
            .with_breaks(taper.breakpoints());
        let ibp = quadrature::log_kernel_integral(&integrand, n, interval)?;
        let excised = quadrature::excision_finite_part(&integrand, n, interval)?;
        checks.push(CheckResult::relative(
            s,
            &format!("log_kernel_ibp_vs_excision_n{n}"),
            ibp,
            excised,
            1e-6,
        ));
    }
    Ok(checks)
}

fn census_suite() -> Result<Vec<CheckResult>> {
    let s = Suite::Census;
    let mut checks = Vec::new();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mirror = SegmentMirror::new(0.20, 0.12, 0.7, 1.3)?;
    let ci = mirror.census_intervals()?;
    checks.push(CheckResult::relative(s, "interval_total", ci.total(), two_pi, 1e-12));
    checks.push(CheckResult::relative(
        s,
        "interval_weighted_total",
        ci.weighted_ray_total(),
        two_pi,
        1e-12,
    ));
    checks.push(CheckResult::relative(
        s,
        "interval_compensation",
        ci.reflected_measure(),
        ci.blocked,
        1e-12,
    ));
    let cs = mirror.census_sampled(10_000)?;
    checks.push(CheckResult::relative(
        s,
        "sampled_weighted_total",
        cs.weighted_ray_total(),
        two_pi,
        1e-3,
    ));
    Ok(checks)
}

fn geometry_suite() -> Result<Vec<CheckResult>> {
    let s = Suite::Geometry;
    let mut checks = Vec::new();
    // Critical angle: argmax of sin^3 theta' / (1 - cos theta'), located by
    // bisection on the symmetric difference quotient (noise-tolerant across
    // the flat maximum), against pi/3.
    let f = |tp: f64| tp.sin().powi(3) / (1.0 - tp.cos());
    let df = |t: f64| (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
    let (mut lo, mut hi) = (0.9f64, 1.2f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if df(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    checks.push(CheckResult::relative(
        s,
        "critical_angle_argmax",
        0.5 * (lo + hi),
        multiray::critical_angle(),
        1e-8,
    ));
    // Sub-critical mirrors report rather than fabricate a conjugate.
    let sub = multiray::conjugate_angle(0.05, 0.0);
    checks.push(CheckResult::relative(
        s,
        "sub_critical_reported",
        matches!(sub, Err(Error::SubCritical { .. })) as u8 as f64,
        1.0,
        0.0,
    ));
    // First-order incident angle converges at O((a/b)^2): shrinking a/b by
    // 10 shrinks the worst-case error by at least 8x.
    let b = 1.0;
    let mirror = ParabolicMirror::new(b, 1.0, MirrorKind::Revolution)?;
    let max_err = |a: f64| -> Result<f64> {
        let point = AxialPoint::new(a)?;
        let mut worst: f64 = 0.0;
        for k in 0..50 {
            let tp = std::f64::consts::FRAC_PI_6
                + (std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_6) * k as f64 / 49.0;
            let exact = geometry::exact_incident_angle(&mirror, &point, tp)?;
            let first = geometry::incident_angle_first_order(&mirror, &point, tp)?;
            worst = worst.max((exact - first).abs());
        }
        Ok(worst)
    };
    let e2 = max_err(1e-2 * b)?;
    let e3 = max_err(1e-3 * b)?;
    checks.push(CheckResult::relative(s, "first_order_convergence", e2 / e3, 100.0, 0.2));
    // Path length ell = b - a (1 + cos theta') to O((a/b)^2) b.
    let a = 1e-3 * b;
    let point = AxialPoint::new(a)?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let tp = std::f64::consts::FRAC_PI_6
            + (std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_6) * k as f64 / 49.0;
        let exact = geometry::solve_reflection(&mirror, &point, tp)?.ell;
        let (approx, _, _) = geometry::path_length(&mirror, &point, tp)?;
        worst = worst.max((exact - approx).abs());
    }
    // Pass when the residual is O((a/b)^2) b with a modest constant.
    checks.push(CheckResult::bound(
        s,
        "path_length_first_order",
        worst / ((a / b).powi(2) * b),
        5.0,
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let checks = run_all().unwrap();
        for c in &checks {
            assert!(
                c.passed,
                "{}::{} failed: measured {} expected {} tol {}",
                c.suite, c.name, c.measured, c.expected, c.tolerance
            );
        }
        assert!(checks.len() >= 20);
        assert!(all_passed(&checks));
    }

    #[test]
    fn suite_parsing() {
        assert_eq!("series".parse::<Suite>().unwrap(), Suite::Series);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
