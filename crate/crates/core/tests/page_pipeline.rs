use einstein4::page::{
    certify_negative_curvature, chebyshev_radii, integrate_char_numbers, page_metric, round_s4, verify_einstein,
};

#[test]
fn page_metric_is_einstein_with_positive_lambda() {
    let m = page_metric();
    let radii = chebyshev_radii(&m, 32);
    let c = verify_einstein(&m, &radii).unwrap();
    eprintln!(
        "residual {:e} lambda {} spread {:e}",
        c.max_residual, c.lambda, c.lambda_spread
    );
    assert!(c.max_residual <= 1e-6);
    assert!(c.lambda > 0.0);
    assert!((c.lambda - 1.0).abs() < 1e-6);
    assert!(c.lambda_spread <= 1e-5);
}

#[test]
fn perturbed_page_metric_is_not_einstein() {
    let m = page_metric().with_v_scaled(1.01);
    let c = verify_einstein(&m, &chebyshev_radii(&m, 8)).unwrap();
    assert!(c.max_residual > 1e-3, "{}", c.max_residual);
}

#[test]
fn page_metric_has_negative_sectional_curvature() {
    let m = page_metric();
    let n = certify_negative_curvature(&m, &chebyshev_radii(&m, 32)).unwrap();
    eprintln!("{n:?}");
    assert!(n.min_sec < 0.0);
}

#[test]
fn page_characteristic_numbers() {
    let m = page_metric();
    let c = integrate_char_numbers(&m, 32).unwrap();
    eprintln!("{c:?}");
    assert!((c.chi - 4.0).abs() <= 1e-2);
    assert!(c.tau.abs() <= 1e-2);
    let f = integrate_char_numbers(&m.orientation_flipped(), 32).unwrap();
    assert!((f.chi - c.chi).abs() < 1e-9);
    assert!((f.tau + c.tau).abs() < 1e-9);
}

#[test]
fn round_s4_characteristic_numbers() {
    let c = integrate_char_numbers(&round_s4(), 32).unwrap();
    assert!((c.chi - 2.0).abs() <= 1e-3, "{c:?}");
    assert!(c.tau.abs() <= 1e-3);
}
