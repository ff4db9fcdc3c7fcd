use std::f64::consts::TAU;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qcharm::geometry::{
    distortion, ehat_frame, ehat_range, energy_density, hyperbolic_distance, jacobian,
    lemma2_residual, moebius, qc_pointwise, tension_norm, tension_ratio_bound,
};
use qcharm::{ball_radius, Jet};

fn disk_point(rmax: f64) -> impl Strategy<Value = Complex64> {
    (0.0..rmax, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn harmonic_jet() -> impl Strategy<Value = Jet> {
    (
        disk_point(0.95),
        disk_point(0.9),
        disk_point(2.0),
        disk_point(2.0),
    )
        .prop_map(|(z, u, a, b)| Jet::from_wirtinger(z, u, a, b))
}

/// Sense-preserving harmonic jet with `|∂̄u| <= 0.9 |∂u|`.
fn qc_jet() -> impl Strategy<Value = Jet> {
    (
        disk_point(0.95),
        disk_point(0.9),
        0.2..2.0,
        0.0..0.9,
        0.0..TAU,
        0.0..TAU,
    )
        .prop_map(|(z, u, a, k, s, t)| {
            Jet::from_wirtinger(
                z,
                u,
                Complex64::from_polar(a, s),
                Complex64::from_polar(a * k, t),
            )
        })
}

proptest! {
    #[test]
    fn distance_symmetric_and_triangle(a in disk_point(0.99), b in disk_point(0.99), c in disk_point(0.99)) {
        let ab = hyperbolic_distance(a, b).unwrap();
        let ba = hyperbolic_distance(b, a).unwrap();
        let bc = hyperbolic_distance(b, c).unwrap();
        let ac = hyperbolic_distance(a, c).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(hyperbolic_distance(a, a).unwrap(), 0.0);
    }

    #[test]
    fn distance_moebius_invariant(w1 in disk_point(0.9), w2 in disk_point(0.9), a in disk_point(0.8), alpha in 0.0..TAU) {
        let d = hyperbolic_distance(w1, w2).unwrap();
        let dm = hyperbolic_distance(moebius(a, alpha, w1), moebius(a, alpha, w2)).unwrap();
        prop_assert!((d - dm).abs() <= 1e-9 * (1.0 + d), "{} vs {}", d, dm);
    }

    #[test]
    fn distance_from_origin(r in 0.0..0.999f64) {
        let d = hyperbolic_distance(Complex64::new(0.0, 0.0), Complex64::new(r, 0.0)).unwrap();
        prop_assert!((d - ((1.0 + r) / (1.0 - r)).ln()).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn ball_radius_inverts_distance(big_r in 0.01..6.0f64) {
        let rho = ball_radius(big_r).unwrap();
        prop_assert!(rho < 1.0);
        prop_assert!((2.0 * rho.atanh() - big_r).abs() < 1e-10);
    }

    #[test]
    fn tension_identity_on_harmonic_jets(j in harmonic_jet()) {
        let chk = lemma2_residual(&j).unwrap();
        prop_assert!(chk.relative_residual < 1e-10, "{:?}", chk);
        prop_assert!(chk.cross_term_residual < 1e-10, "{:?}", chk);
    }

    #[test]
    fn density_invariants(j in harmonic_jet(), alpha in 0.0..TAU) {
        let e = energy_density(&j).unwrap();
        let jac = jacobian(&j).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!(e + 1e-12 >= 2.0 * jac.abs());
        // target rotation is a hyperbolic isometry
        let r = j.rotate_target(alpha);
        prop_assert!((energy_density(&r).unwrap() - e).abs() <= 1e-12 * (1.0 + e));
        prop_assert!((tension_norm(&r).unwrap() - tension_norm(&j).unwrap()).abs() <= 1e-10 * (1.0 + e));
    }

    #[test]
    fn frame_density_within_bracket(j in harmonic_jet(), theta in 0.0..TAU) {
        let (lo, hi) = ehat_range(&j).unwrap();
        let v = ehat_frame(&j, theta).unwrap();
        let tol = 1e-9 * (1.0 + hi);
        prop_assert!(lo - tol <= v && v <= hi + tol, "{} not in [{}, {}]", v, lo, hi);
    }

    #[test]
    fn qc_ratio_and_chain(j in qc_jet()) {
        let q = qc_pointwise(&j).unwrap();
        prop_assert!(q.relation_residual < 1e-12);
        let d = distortion(&j).unwrap();
        prop_assert!(q.ratio >= 2.0 * d / (d * d + 1.0) - 1e-12);
        let b = tension_ratio_bound(energy_density(&j).unwrap(), jacobian(&j).unwrap());
        prop_assert!((b - (d * d - 1.0)).abs() <= 1e-8 * (1.0 + d * d), "{} vs {}", b, d * d - 1.0);
    }
}

#[test]
fn identity_jet_values() {
    let z = Complex64::new(0.3, -0.4);
    let j = Jet::identity(z);
    assert_relative_eq!(energy_density(&j).unwrap(), 2.0, epsilon = 1e-14);
    assert_relative_eq!(jacobian(&j).unwrap(), 1.0, epsilon = 1e-14);
    assert_relative_eq!(distortion(&j).unwrap(), 1.0, epsilon = 1e-14);
    assert!(tension_norm(&j).unwrap() < 1e-14);
}
