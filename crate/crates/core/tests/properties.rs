//! Randomized property suites over the public API.

use proptest::prelude::*;

use vacuum_focus::geometry::{self, AxialPoint};
use vacuum_focus::lab::{self, AtomSpec, LabSettings, LambdaCoefficient};
use vacuum_focus::multiray;
use vacuum_focus::observables::{self, Geometry, Method, NumericSettings};
use vacuum_focus::segments::SegmentMirror;

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_sq_scales_as_inverse_square(
        a in 0.2f64..8.0,
        xi0 in 0.01f64..0.25,
    ) {
        let base = observables::phi_sq(Geometry::Revolution, 1.0, xi0, Method::ClosedForm).unwrap();
        let scaled = observables::phi_sq(Geometry::Revolution, a, xi0, Method::ClosedForm).unwrap();
        prop_assert!(rel(scaled.value, base.value / (a * a)) < 1e-12);
        prop_assert!(base.value < 0.0);
    }

    #[test]
    fn e_sq_scales_as_inverse_fourth(
        a in 0.2f64..8.0,
        xi0 in 0.01f64..0.25,
    ) {
        let base = observables::e_sq(Geometry::Cylinder, 1.0, xi0, Method::ClosedForm).unwrap();
        let scaled = observables::e_sq(Geometry::Cylinder, a, xi0, Method::ClosedForm).unwrap();
        prop_assert!(rel(scaled.value, base.value / a.powi(4)) < 1e-12);
        prop_assert!(base.value > 0.0);
    }

    #[test]
    fn deflection_scales_as_inverse_sixth(
        a_um in 0.3f64..5.0,
        factor in 1.2f64..4.0,
    ) {
        let s = LabSettings::default();
        let na = AtomSpec::sodium();
        let l = LambdaCoefficient {
            geometry: Geometry::Revolution,
            xi0: 0.1,
            value: 1e-3,
        };
        let a = a_um * 1e-4;
        let d1 = lab::deflection_ratio(&s, &na, &l, a, 1e-3).unwrap();
        let d2 = lab::deflection_ratio(&s, &na, &l, factor * a, 1e-3).unwrap();
        prop_assert!(rel(d1 / d2, factor.powi(6)) < 1e-10);
    }

    #[test]
    fn delta_ell_antisymmetric_and_linear(
        a in 0.01f64..5.0,
        t1 in 1.05f64..1.5,
        t2 in 0.6f64..1.04,
        scale in 1.1f64..7.0,
    ) {
        let p = AxialPoint::new(a).unwrap();
        let dl = geometry::path_difference(&p, t1, t2);
        prop_assert!((dl + geometry::path_difference(&p, t2, t1)).abs() < 1e-15);
        let ps = AxialPoint::new(scale * a).unwrap();
        prop_assert!(rel(geometry::path_difference(&ps, t1, t2), scale * dl) < 1e-12);
    }

    #[test]
    fn conjugacy_is_an_involution(xi in 0.005f64..0.28) {
        let xi2 = multiray::conjugate_of(xi).unwrap();
        prop_assert!(xi2 < 0.0 && xi2 > -xi);
        let back = multiray::conjugate_of(xi2).unwrap();
        prop_assert!((back - xi).abs() < 1e-9);
    }

    #[test]
    fn census_compensation(
        t1 in 0.4f64..1.0,
        dt in 0.3f64..0.8,
        a2 in 0.05f64..0.15,
        da in 0.001f64..0.1,
    ) {
        let m = SegmentMirror::new(a2 + da, a2, t1, t1 + dt).unwrap();
        let c = m.census_intervals().unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        prop_assert!((c.total() - two_pi).abs() < 1e-11);
        prop_assert!((c.weighted_ray_total() - two_pi).abs() < 1e-11);
        prop_assert!((c.reflected_measure() - c.blocked).abs() < 1e-11);
    }
}

proptest! {
    // The numeric path is costly; fewer cases.
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn taper_halving_within_quoted_error(xi0 in 0.03f64..0.15) {
        let full = NumericSettings { taper_fraction: 0.1 };
        let half = NumericSettings { taper_fraction: 0.05 };
        let v = observables::e_sq_with(
            Geometry::Revolution, 1.0, xi0, Method::NumericQuadrature, &full,
        ).unwrap();
        let vh = observables::e_sq_with(
            Geometry::Revolution, 1.0, xi0, Method::NumericQuadrature, &half,
        ).unwrap();
        prop_assert!((v.value - vh.value).abs() <= v.error);
        prop_assert!(v.error < 0.2 * v.value.abs());
    }
}
