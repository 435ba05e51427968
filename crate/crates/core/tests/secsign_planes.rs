use nalgebra::{Vector3, Vector4};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use einstein4::models::{catalog, Params};
use einstein4::secsign::{
    certify_sec_sign, plane_form, plane_vectors, q_form, sec_of_plane, CertifyConfig, Method, Verdict,
};
use einstein4::testing;
use einstein4::CurvatureOperator;

fn model(name: &str, pairs: &[(&str, f64)]) -> CurvatureOperator {
    let p: Params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog(name, &p).unwrap().operator
}

fn vec4(v: [f64; 4]) -> Vector4<f64> {
    Vector4::from(v)
}

#[test]
fn coordinate_planes_of_a_surface_product() {
    let op = model("surfaceProduct", &[("a", 1.0), ("b", 2.0)]);
    let e = |i: usize| Vector4::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
    assert_eq!(sec_of_plane(&op, &e(0), &e(1)).unwrap(), 1.0);
    assert_eq!(sec_of_plane(&op, &e(2), &e(3)).unwrap(), 2.0);
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        assert_eq!(sec_of_plane(&op, &e(i), &e(j)).unwrap(), 0.0);
    }
    // Plane spanned by (e1 + e3)/√2 and e2: half of the first factor.
    let x = vec4([1.0, 0.0, 1.0, 0.0]);
    assert!((sec_of_plane(&op, &x, &e(1)).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn degenerate_plane_is_rejected() {
    let op = CurvatureOperator::identity();
    let x = vec4([1.0, 2.0, 3.0, 4.0]);
    assert!(sec_of_plane(&op, &x, &(x * 2.0)).is_err());
    assert!(sec_of_plane(&op, &x, &Vector4::zeros()).is_err());
}

#[test]
fn non_unit_inputs_are_rejected() {
    let op = CurvatureOperator::identity();
    let u = Vector3::x();
    assert!(q_form(&op, &(u * 2.0), &u).is_err());
    assert_eq!(q_form(&op, &u, &u).unwrap(), 2.0);
}

#[test]
fn surface_product_certificate() {
    let op = model("surfaceProduct", &[("a", 1.0), ("b", 2.0)]);
    let c = certify_sec_sign(&op, &CertifyConfig::default()).unwrap();
    assert_eq!(c.method, Method::AlternatingTRS);
    assert_eq!(c.verdict, Verdict::NonNegative);
    assert!((c.q_max_lower - 4.0).abs() < 1e-12);
    assert!((c.q_max_upper - 4.0).abs() < 1e-12);
    assert!(c.q_min_upper.abs() < 1e-12);
    assert!(c.q_min_lower >= -1e-8);
    assert!((c.sec_bounds().1 - 2.0).abs() < 1e-12);
}

#[test]
fn hyperbolic_product_certificate() {
    let op = model("surfaceProduct", &[("a", -1.0), ("b", -1.0)]);
    let c = certify_sec_sign(&op, &CertifyConfig::default()).unwrap();
    assert_eq!(c.method, Method::EinsteinExact);
    assert_eq!(c.verdict, Verdict::NonPositive);
    assert_eq!(c.sec_bounds(), (-1.0, 0.0));
}

#[test]
fn indefinite_model() {
    let op = model("surfaceProduct", &[("a", 1.0), ("b", -3.0)]);
    let c = certify_sec_sign(&op, &CertifyConfig::default()).unwrap();
    assert_eq!(c.verdict, Verdict::Indefinite);
    assert!((c.q_max_lower - 2.0).abs() < 1e-12);
    assert!((c.q_min_upper + 6.0).abs() < 1e-12);
}

#[test]
fn witnesses_reproduce_their_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let op = testing::random_unit_norm(&mut rng);
        let c = certify_sec_sign(&op, &CertifyConfig::default()).unwrap();
        for w in [c.max_witness, c.min_witness] {
            let q = q_form(&op, &w.plus(), &w.minus()).unwrap();
            assert!((q - w.q_value).abs() <= 1e-12, "{q} vs {}", w.q_value);
            let (x, y) = plane_vectors(&w.form());
            let sec = sec_of_plane(&op, &x, &y).unwrap();
            assert!((sec - w.sec_value).abs() <= 1e-10);
        }
        assert!(c.q_max_lower <= c.q_max_upper && c.q_min_lower <= c.q_min_upper);
    }
}

#[test]
fn seed_changes_nothing_for_well_separated_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let op = testing::random_unit_norm(&mut rng);
    let base = certify_sec_sign(&op, &CertifyConfig::default()).unwrap();
    let other = certify_sec_sign(
        &op,
        &CertifyConfig {
            seed: 99,
            ..CertifyConfig::default()
        },
    )
    .unwrap();
    assert!((base.q_max_lower - other.q_max_lower).abs() < 1e-9);
    assert!((base.q_min_upper - other.q_min_upper).abs() < 1e-9);
}

fn unit3() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("non-zero", |v| Vector3::from(*v).norm() > 1e-3)
        .prop_map(|v| Vector3::from(v).normalize())
}

proptest! {
    #[test]
    fn q_is_twice_the_sectional_curvature(seed in any::<u64>(), p in unit3(), m in unit3()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = testing::random_admissible(&mut rng);
        let (x, y) = plane_vectors(&plane_form(&p, &m));
        let q = q_form(&op, &p, &m).unwrap();
        let sec = sec_of_plane(&op, &x, &y).unwrap();
        prop_assert!((q - 2.0 * sec).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn sec_ignores_the_choice_of_spanning_vectors(
        seed in any::<u64>(),
        x in prop::array::uniform4(-1.0f64..1.0),
        y in prop::array::uniform4(-1.0f64..1.0),
        t in -3.0f64..3.0,
        k in 0.1f64..10.0,
    ) {
        let (x, y) = (vec4(x), vec4(y));
        let gram = x.norm_squared() * y.norm_squared() - x.dot(&y).powi(2);
        prop_assume!(gram > 1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = testing::random_admissible(&mut rng);
        let a = sec_of_plane(&op, &x, &y).unwrap();
        let b = sec_of_plane(&op, &(x * k + y * t), &y).unwrap();
        let c = sec_of_plane(&op, &y, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn negation_swaps_the_intervals(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = testing::random_unit_norm(&mut rng);
        let config = CertifyConfig { restarts: 4, grid_size: 16, ..CertifyConfig::default() };
        let c = certify_sec_sign(&op, &config).unwrap();
        let n = certify_sec_sign(&op.scaled(-1.0), &config).unwrap();
        prop_assert_eq!(c.q_max_lower, -n.q_min_upper);
        prop_assert_eq!(c.q_max_upper, -n.q_min_lower);
        prop_assert_eq!(c.q_min_lower, -n.q_max_upper);
        prop_assert_eq!(c.q_min_upper, -n.q_max_lower);
    }
}
