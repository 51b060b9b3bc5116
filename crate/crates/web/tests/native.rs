use relaxsim_web::{compare_with_limit, eddington_samples};

#[test]
fn euler_comparison_is_close_and_entropy_decreases() {
    let c = compare_with_limit("euler-friction-desk", 1e-3, 0.005).unwrap();
    assert_eq!(c.x().len(), 100);
    assert_eq!(c.label(), "rho");
    assert!(c.relative_l1() < 0.05);
    let s = c.entropy();
    assert!(s.windows(2).all(|w| w[1] <= w[0] + 1e-10 * w[0].abs()));
    assert!(c.steps() > 0);
}

#[test]
fn m1_has_no_entropy_trace() {
    let c = compare_with_limit("m1-gaussian", 1e-2, 0.001).unwrap();
    assert!(c.entropy().is_empty());
    assert_eq!(c.label(), "u");
}

#[test]
fn bad_requests_are_refused() {
    assert!(compare_with_limit("nope", 1e-3, 0.01).is_err());
    assert!(compare_with_limit("euler-friction-desk", -1.0, 0.01).is_err());
    assert!(compare_with_limit("euler-friction-desk", 1e-3, 1.0).is_err());
    assert!(eddington_samples(1).is_err());
}

#[test]
fn eddington_curve_spans_its_range() {
    let v = eddington_samples(201).unwrap();
    assert_eq!(v[100], 1.0 / 3.0);
    assert!((v[0] - 1.0).abs() < 1e-14 && (v[200] - 1.0).abs() < 1e-14);
}
