use satshare::market::quadrature::*;

#[test]
fn exact_on_cubics() {
    let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
    assert!((v - 2.0).abs() < 1e-12);
}

#[test]
fn smooth_integrands() {
    let v = adaptive_simpson(&f64::sin, 0.0, std::f64::consts::PI, 1e-10);
    assert!((v - 2.0).abs() < 1e-9);
    let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-11);
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9);
}

#[test]
fn handles_kinks() {
    let v = adaptive_simpson(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-10);
    assert!((v - (0.045 + 0.245)).abs() < 1e-9);
}

#[test]
fn empty_interval() {
    assert_eq!(adaptive_simpson(&|_| 1.0, 2.0, 2.0, 1e-9), 0.0);
}
