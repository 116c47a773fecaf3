//! Renormalized vacuum expectation values near the focus: <phi^2> and
//! <E^2> (plus the related densities) for the parabola of revolution and
//! the parabolic cylinder, by closed-form leading terms in xi0 and by
//! numeric quadrature over the conjugate-pair band.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::algebra::{PowerSeries, Sqrt3Rational};
use crate::error::{Error, Result};
use crate::multiray;
use crate::quadrature::{self, Taper};

/// Which squared-field (or density) is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    PhiSq,
    PhidotSq,
    ESq,
    BSq,
    RhoScalar,
    RhoEm,
}

impl std::fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ObservableKind::PhiSq => "phi_sq",
            ObservableKind::PhidotSq => "phidot_sq",
            ObservableKind::ESq => "E_sq",
            ObservableKind::BSq => "B_sq",
            ObservableKind::RhoScalar => "rho_scalar",
            ObservableKind::RhoEm => "rho_EM",
        };
        write!(f, "{s}")
    }
}

impl ObservableKind {
    /// Weight in the chain E^2 = B^2 = rho_EM = 2 phidot^2 = 2 rho_scalar,
    /// relative to E^2. phi^2 sits outside the chain (different units).
    fn chain_factor(&self) -> Option<f64> {
        match self {
            ObservableKind::PhiSq => None,
            ObservableKind::ESq | ObservableKind::BSq | ObservableKind::RhoEm => Some(1.0),
            ObservableKind::PhidotSq | ObservableKind::RhoScalar => Some(0.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Revolution,
    Cylinder,
    FlatPlate,
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Geometry::Revolution => "revolution",
            Geometry::Cylinder => "cylinder",
            Geometry::FlatPlate => "flat_plate",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    NumericQuadrature,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::ClosedForm => write!(f, "closed_form"),
            Method::NumericQuadrature => write!(f, "numeric_quadrature"),
        }
    }
}

/// One computed observable, in hbar = c = 1 units (a^-2 for phi_sq,
/// a^-4 for the E^2 class).
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct VacuumObservable {
    pub kind: ObservableKind,
    pub geometry: Geometry,
    pub a: f64,
    pub xi0: f64,
    pub value: f64,
    /// Estimated error: dropped higher-order terms (closed form) or
    /// quadrature/taper sensitivity (numeric).
    pub error: f64,
    pub method: Method,
    /// Set when xi0 = 0: the mirror is below the critical size, no conjugate
    /// pairs exist, and the anomalous terms vanish identically.
    pub sub_critical: bool,
}

/// Exact Taylor coefficients of the two conjugate-pair integrands
/// A(xi1) = xi1^2 / [cos(pi/3+xi1) - cos(pi/3+xi2(xi1))]^2 and
/// B(xi1) = xi1^4 / [...]^4, in Q(sqrt 3).
#[derive(Clone, Debug)]
pub struct ExpansionCoefficients {
    pub a: Vec<Sqrt3Rational>,
    pub b: Vec<Sqrt3Rational>,
}

/// Highest expansion order served; bounds the exact-arithmetic cost.
pub const MAX_EXPANSION_ORDER: usize = 24;

/// Series order used by the numeric quadrature integrand. At xi0 <= 0.3 the
/// truncation error is below 1e-12.
const SERIES_ORDER: usize = 18;

/// Largest xi0 accepted by the numeric path (series-domain margin).
pub const MAX_NUMERIC_XI0: f64 = 0.3;

/// The difference of cosines driving Delta ell, as an exact series in xi1:
/// D(xi1) = cos(pi/3 + xi1) - cos(pi/3 + xi2(xi1)); D = -sqrt(3) xi1 + ...
fn delta_cos_series(order: usize) -> PowerSeries {
    let id = PowerSeries::identity(order);
    let xi2 = multiray::conjugate_series_exact(order);
    multiray::cos_pi3_compose(&id).sub(&multiray::cos_pi3_compose(&xi2))
}

/// Exact A- and B-series through `order` powers of xi1.
pub fn expansion_coefficients(order: usize) -> Result<ExpansionCoefficients> {
    if order > MAX_EXPANSION_ORDER {
        return Err(Error::OrderTooHigh {
            requested: order,
            available: MAX_EXPANSION_ORDER,
        });
    }
    // Work two orders high: shift_down and the xi2 reversion both lose
    // top-coefficient accuracy.
    let work = order + 2;
    let d = delta_cos_series(work);
    // D = xi * e with e(0) = -sqrt(3) != 0, so A = 1/e^2, B = 1/e^4.
    let e_inv = d.shift_down(1).reciprocal();
    let truncate = |s: PowerSeries| s.coeffs[..=order].to_vec();
    Ok(ExpansionCoefficients {
        a: truncate(e_inv.powi(2)),
        b: truncate(e_inv.powi(4)),
    })
}

/// Float A- and B-coefficients at the working order, computed once.
fn float_series() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| {
        let ec = expansion_coefficients(SERIES_ORDER).expect("fixed order is in range");
        (
            ec.a.iter().map(|c| c.to_f64()).collect(),
            ec.b.iter().map(|c| c.to_f64()).collect(),
        )
    })
}

/// n-th derivative of the polynomial with the given Taylor coefficients.
fn polynomial_derivative(coeffs: &[f64], n: usize) -> Vec<f64> {
    if n >= coeffs.len() {
        return vec![0.0];
    }
    coeffs[n..]
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let mut f = 1.0;
            for j in 1..=n {
                f *= (k + j) as f64;
            }
            c * f
        })
        .collect()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Tunables for the numeric-quadrature path.
#[derive(Clone, Copy, Debug)]
pub struct NumericSettings {
    /// Endpoint taper window as a fraction of the interval length at each
    /// end; 0 disables the taper. The taper multiplies the differentiated
    /// integrand (a reflectivity window on the rim band): differentiating
    /// through the window would reinstate exactly the surface terms the
    /// regularization discards.
    pub taper_fraction: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self { taper_fraction: 0.0 }
    }
}

/// The log-kernel integral (-1/2 or -1/12) int ln(xi^2) G^(n)(xi) T(xi) dxi
/// over [-xi0, xi0], with G the A- or B-integrand.
fn log_kernel_value(use_b: bool, xi0: f64, taper_fraction: f64) -> Result<f64> {
    let (a_coeffs, b_coeffs) = float_series();
    let coeffs = if use_b { b_coeffs } else { a_coeffs };
    let (order, pref) = if use_b { (4, -1.0 / 12.0) } else { (2, -0.5) };
    let deriv = polynomial_derivative(coeffs, order);
    let (h, breaks): (Box<dyn Fn(f64) -> f64>, Vec<f64>) = if taper_fraction > 0.0 {
        let taper = Taper::fractional(-xi0, xi0, taper_fraction)?;
        let breaks = taper.breakpoints();
        (
            Box::new(move |x: f64| horner(&deriv, x) * taper.value(x)),
            breaks,
        )
    } else {
        (Box::new(move |x: f64| horner(&deriv, x)), Vec::new())
    };
    Ok(pref * quadrature::integrate_log_weighted(&h, -xi0, xi0, &breaks)?)
}

struct Prefactors {
    closed: f64,
    numeric: f64,
    geometry_factor: f64,
}

fn prefactors(kind: ObservableKind, geometry: Geometry, a: f64) -> Result<Prefactors> {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let (closed, numeric) = match kind {
        ObservableKind::PhiSq => {
            // closed: -(A2 / 2 pi^2 a^2) xi0 (1 - ln xi0) = -23/(648 pi^2 a^2) ...
            let a2 = 23.0 / 324.0;
            (-a2 / (2.0 * pi2 * a * a), -1.0 / (8.0 * pi2 * a * a))
        }
        ObservableKind::ESq => {
            // closed: (12 B4 / pi^2 a^4) xi0 (1 - ln xi0) = 4051/(2^2 3^7 5 pi^2 a^4) ...
            let b4 = 4051.0 / 524_880.0;
            (12.0 * b4 / (pi2 * a.powi(4)), 3.0 / (2.0 * pi2 * a.powi(4)))
        }
        other => {
            return Err(Error::IncompatibleKinds {
                from_kind: other.to_string(),
                to_kind: "direct evaluation (use related_quantity)".into(),
            })
        }
    };
    let geometry_factor = match (geometry, kind) {
        (Geometry::Revolution, _) => 1.0,
        (Geometry::Cylinder, ObservableKind::PhiSq) => 4.0 / (3.0 * std::f64::consts::PI),
        (Geometry::Cylinder, _) => 16.0 / (15.0 * std::f64::consts::PI),
        (Geometry::FlatPlate, _) => {
            return Err(Error::InvalidParameter(
                "flat-plate values come from flat_plate_E_sq, not the parabolic-mirror path".into(),
            ))
        }
    };
    Ok(Prefactors {
        closed,
        numeric,
        geometry_factor,
    })
}

fn evaluate(
    kind: ObservableKind,
    geometry: Geometry,
    a: f64,
    xi0: f64,
    method: Method,
    settings: &NumericSettings,
) -> Result<VacuumObservable> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("distance a must be positive, got {a}")));
    }
    if !(xi0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("xi0 must be nonnegative, got {xi0}")));
    }
    let pf = prefactors(kind, geometry, a)?;
    if xi0 == 0.0 {
        // Below the critical rim angle there are no conjugate pairs and the
        // anomalous contribution vanishes identically.
        return Ok(VacuumObservable {
            kind,
            geometry,
            a,
            xi0,
            value: 0.0,
            error: 0.0,
            method,
            sub_critical: true,
        });
    }
    let (value, error) = match method {
        Method::ClosedForm => {
            let x = xi0 * (1.0 - xi0.ln());
            let v = pf.closed * x;
            // Dropped correction is O(xi0^3 ln xi0) in the integral, i.e.
            // a relative O(xi0^2) against the leading term.
            (v, v.abs() * 3.0 * xi0 * xi0)
        }
        Method::NumericQuadrature => {
            if xi0 > MAX_NUMERIC_XI0 {
                return Err(Error::InvalidParameter(format!(
                    "numeric path is limited to xi0 <= {MAX_NUMERIC_XI0}, got {xi0}"
                )));
            }
            let use_b = kind == ObservableKind::ESq;
            let lk = log_kernel_value(use_b, xi0, settings.taper_fraction)?;
            let v = pf.numeric * lk;
            let base_err = v.abs() * 1e-8;
            let err = if settings.taper_fraction > 0.0 {
                // Taper sensitivity measured directly: halve the window.
                let lk_half = log_kernel_value(use_b, xi0, 0.5 * settings.taper_fraction)?;
                base_err.max(2.0 * (pf.numeric * (lk - lk_half)).abs())
            } else {
                base_err
            };
            (v, err)
        }
    };
    Ok(VacuumObservable {
        kind,
        geometry,
        a,
        xi0,
        value: value * pf.geometry_factor,
        error: error * pf.geometry_factor,
        method,
        sub_critical: false,
    })
}

/// Renormalized <phi^2> near the focus.
pub fn phi_sq(geometry: Geometry, a: f64, xi0: f64, method: Method) -> Result<VacuumObservable> {
    phi_sq_with(geometry, a, xi0, method, &NumericSettings::default())
}

pub fn phi_sq_with(
    geometry: Geometry,
    a: f64,
    xi0: f64,
    method: Method,
    settings: &NumericSettings,
) -> Result<VacuumObservable> {
    evaluate(ObservableKind::PhiSq, geometry, a, xi0, method, settings)
}

/// Renormalized <E^2> near the focus (equals <B^2> and rho_EM).
pub fn e_sq(geometry: Geometry, a: f64, xi0: f64, method: Method) -> Result<VacuumObservable> {
    e_sq_with(geometry, a, xi0, method, &NumericSettings::default())
}

pub fn e_sq_with(
    geometry: Geometry,
    a: f64,
    xi0: f64,
    method: Method,
    settings: &NumericSettings,
) -> Result<VacuumObservable> {
    evaluate(ObservableKind::ESq, geometry, a, xi0, method, settings)
}

/// <E^2> at distance z from a perfectly conducting flat plate: 3/(16 pi^2 z^4).
pub fn flat_plate_e_sq(z: f64) -> Result<VacuumObservable> {
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!("plate distance z must be positive, got {z}")));
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(VacuumObservable {
        kind: ObservableKind::ESq,
        geometry: Geometry::FlatPlate,
        a: z,
        xi0: 0.0,
        value: 3.0 / (16.0 * pi2 * z.powi(4)),
        error: 0.0,
        method: Method::ClosedForm,
        sub_critical: false,
    })
}

/// Derive another member of the E^2 = B^2 = rho_EM = 2 phidot^2 =
/// 2 rho_scalar chain from a computed observable.
pub fn related_quantity(base: &VacuumObservable, kind: ObservableKind) -> Result<VacuumObservable> {
    if kind == base.kind {
        return Ok(VacuumObservable { kind, ..*base });
    }
    let (Some(from), Some(to)) = (base.kind.chain_factor(), kind.chain_factor()) else {
        return Err(Error::IncompatibleKinds {
            from_kind: base.kind.to_string(),
            to_kind: kind.to_string(),
        });
    };
    let scale = to / from;
    Ok(VacuumObservable {
        kind,
        value: base.value * scale,
        error: base.error * scale,
        ..*base
    })
}

// ---------------------------------------------------------------------------
// Independent floating-point oracle for the expansion coefficients
// ---------------------------------------------------------------------------

fn f_scaled_c(z: Complex64) -> Complex64 {
    let tp = Complex64::new(std::f64::consts::FRAC_PI_3, 0.0) + z;
    let s = tp.sin();
    s * s * s / (Complex64::new(1.0, 0.0) - tp.cos())
}

fn f_scaled_c_prime(z: Complex64) -> Complex64 {
    // d/dz [ s^3 / (1-c) ] = [3 s^2 c (1-c) - s^4] / (1-c)^2
    let tp = Complex64::new(std::f64::consts::FRAC_PI_3, 0.0) + z;
    let s = tp.sin();
    let c = tp.cos();
    let one = Complex64::new(1.0, 0.0);
    (3.0 * s * s * c * (one - c) - s.powu(4)) / (one - c).powu(2)
}

/// Conjugate angle continued to complex xi, via Newton on the deflated
/// equation H(w) = (f(w) - f(z)) / (w - z) = 0, which removes the trivial
/// root w = z.
fn conjugate_c(z: Complex64) -> Complex64 {
    let fz = f_scaled_c(z);
    let h = |w: Complex64| (f_scaled_c(w) - fz) / (w - z);
    let hp = |w: Complex64| {
        let d = w - z;
        (f_scaled_c_prime(w) * d - (f_scaled_c(w) - fz)) / (d * d)
    };
    let mut w = -z;
    for _ in 0..80 {
        let step = h(w) / hp(w);
        w -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    w
}

/// Float Taylor coefficients of the A- and B-integrands by Cauchy-integral
/// extraction on a circle of radius r in the complex xi1 plane, with the
/// conjugate map evaluated by root finding (no series reversion involved).
pub fn taylor_fit_oracle(n_coeffs: usize, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let n = 256usize;
    let r = radius;
    let mut a = vec![0.0; n_coeffs];
    let mut b = vec![0.0; n_coeffs];
    let p3 = Complex64::new(std::f64::consts::FRAC_PI_3, 0.0);
    for j in 0..n {
        let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let z = Complex64::from_polar(r, th);
        let w = conjugate_c(z);
        let d = (p3 + z).cos() - (p3 + w).cos();
        let ga = z * z / (d * d);
        let gb = ga * ga;
        for k in 0..n_coeffs {
            let phase = Complex64::from_polar(1.0, -(k as f64) * th);
            a[k] += (ga * phase).re;
            b[k] += (gb * phase).re;
        }
    }
    for k in 0..n_coeffs {
        let scale = 1.0 / (n as f64 * r.powi(k as i32));
        a[k] *= scale;
        b[k] *= scale;
    }
    (a, b)
}
