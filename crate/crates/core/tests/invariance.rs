use std::f64::consts::TAU;

use g2_bergman::automorphism::{apply_automorphism, normalize, DiscAutomorphism};
use g2_bergman::chainrule::phi;
use g2_bergman::geometry::{hsc_extrema, FrameCurvatures, Geometry, Route, ScanOptions};
use g2_bergman::point::ComplexPoint2;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Sectional extrema over directions and the scalar curvature.
fn invariants(geo: &Geometry) -> [f64; 3] {
    let opts = ScanOptions {
        s_steps: 21,
        phase_steps: 32,
        ..ScanOptions::default()
    };
    let e = hsc_extrema(&FrameCurvatures::from_geometry(geo).unwrap(), &opts);
    [e.min.value, e.max.value, geo.scalar_curvature()]
}

fn disc(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_is_invariant_under_normalization(z1 in disc(0.95), z2 in disc(0.95)) {
        prop_assume!((z1 - z2).norm() > 1e-2);
        let w = phi(ComplexPoint2::new(z1, z2));
        let x = normalize(w).unwrap().x;
        let base = invariants(&Geometry::at_auto(x).unwrap());
        for route in [Route::ChainRule, Route::FiniteDifference] {
            let here = invariants(&Geometry::at_point(w, route).unwrap());
            for (a, b) in here.iter().zip(&base) {
                prop_assert!(rel(*a, *b) < 1e-4, "{route:?} at {w}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn curvature_agrees_along_an_orbit(z1 in disc(0.8), z2 in disc(0.8), a in disc(0.6), t in 0.0..TAU) {
        prop_assume!((z1 - z2).norm() > 5e-2);
        let w = phi(ComplexPoint2::new(z1, z2));
        let image = apply_automorphism(&DiscAutomorphism::new(a, t).unwrap(), w).unwrap();
        prop_assume!(normalize(image).unwrap().x > 1e-2);
        let p = invariants(&Geometry::at_point(w, Route::ChainRule).unwrap());
        let q = invariants(&Geometry::at_point(image, Route::ChainRule).unwrap());
        for (a, b) in p.iter().zip(&q) {
            prop_assert!(rel(*a, *b) < 1e-4, "{w} -> {image}: {a} vs {b}");
        }
    }
}
