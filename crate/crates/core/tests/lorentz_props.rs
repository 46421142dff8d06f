use maxsurf::lorentz::{inverse_stereographic, stereographic, ExtComplex};
use maxsurf::{causal_character, dist_to_lightcone, minkowski_inner, CausalClass, Complex64, LVec3};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = LVec3> {
    (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(a, b, c)| LVec3::new(a, b, c))
}

fn off_circle() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(a, b)| Complex64::new(a, b))
        .prop_filter("away from the unit circle", |z| (z.norm() - 1.0).abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn sigma_lands_on_hyperbolic_sphere(z in off_circle()) {
        let p = stereographic(ExtComplex::Finite(z)).unwrap();
        // Relative to the size of the components, which grow near |z| = 1.
        let scale = p.x3 * p.x3;
        prop_assert!((minkowski_inner(p, p) + 1.0).abs() < 1e-12 * scale.max(1.0));
        prop_assert_eq!(p.x3 < 0.0, z.norm() < 1.0);
    }

    #[test]
    fn sigma_inverts(r in 0.0..0.999f64, t in 0.0..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, t);
        match inverse_stereographic(stereographic(ExtComplex::Finite(z)).unwrap()) {
            ExtComplex::Finite(w) => prop_assert!((w - z).norm() <= 1e-12 * z.norm().max(1e-3)),
            ExtComplex::Infinity => prop_assert!(false, "finite point mapped to infinity"),
        }
    }

    #[test]
    fn reflected_euclidean_product(a in vec3(), b in vec3()) {
        let lhs = minkowski_inner(a, b);
        let rhs = a.euclid_dot(b.reflect_x3());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert_eq!(minkowski_inner(a, b), minkowski_inner(b, a));
    }

    #[test]
    fn lightcone_distance_is_lipschitz(a in vec3(), b in vec3()) {
        let d = (dist_to_lightcone(a) - dist_to_lightcone(b)).abs();
        prop_assert!(d <= (a - b).euclid_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn cone_points_have_zero_distance(r in 0.0..20.0f64, t in 0.0..std::f64::consts::TAU, up in any::<bool>()) {
        // Integer-valued components keep the inner product exact.
        let (x, y) = ((r * t.cos()).round(), (r * t.sin()).round());
        let h = (x * x + y * y).sqrt();
        if h.fract() == 0.0 {
            let p = LVec3::new(x, y, if up { h } else { -h });
            prop_assert_eq!(dist_to_lightcone(p), 0.0);
            prop_assert!(p == LVec3::ZERO || causal_character(p) == CausalClass::Lightlike);
        }
    }

    #[test]
    fn zero_distance_means_cone(p in vec3()) {
        if dist_to_lightcone(p) == 0.0 {
            prop_assert!(p == LVec3::ZERO || causal_character(p) == CausalClass::Lightlike);
        }
        if causal_character(p) == CausalClass::Lightlike {
            prop_assert!(dist_to_lightcone(p) < 1e-12 * (1.0 + p.euclid_norm()));
        }
    }
}

#[test]
fn sigma_at_infinity() {
    assert_eq!(stereographic(ExtComplex::Infinity).unwrap(), LVec3::new(0.0, 0.0, 1.0));
    assert_eq!(inverse_stereographic(LVec3::new(0.0, 0.0, 1.0)), ExtComplex::Infinity);
}
