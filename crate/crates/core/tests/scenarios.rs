use qmetro::fisher::qfi;
use qmetro::metrology::{crb_consistency, error_propagation, gradient_scenario, Scenario};
use qmetro::spin::Representation;
use qmetro::states::SqueezingSpec;

fn scenarios() -> Vec<Scenario> {
    let mut out = vec![
        Scenario::ramsey(5, Representation::Full(5)).unwrap(),
        Scenario::ramsey(40, Representation::Symmetric(40)).unwrap(),
        Scenario::ghz_parity(4, Representation::Full(4)).unwrap(),
        Scenario::ghz_parity(7, Representation::Symmetric(7)).unwrap(),
        Scenario::dicke(6, Representation::Symmetric(6)).unwrap(),
        Scenario::dicke(4, Representation::Full(4)).unwrap(),
        Scenario::gradient(4).unwrap(),
    ];
    for lambda in [0.5, 3.0, 20.0] {
        out.push(Scenario::squeezed(SqueezingSpec::new(10, lambda).unwrap()).unwrap());
    }
    out
}

const GRID: [f64; 6] = [0.0, 0.05, 0.17, 0.29, 0.41, 0.53];

#[test]
fn analytic_derivative_matches_finite_differences() {
    for s in scenarios() {
        for theta in GRID {
            let e = error_propagation(&s.clone().at(theta)).unwrap();
            assert!(e.fd_mismatch < 1e-6, "{} at {theta}: {e:?}", s.id);
        }
    }
}

#[test]
fn cramer_rao_holds_on_every_scenario() {
    for s in scenarios() {
        for theta in GRID {
            let r = crb_consistency(&s.clone().at(theta)).unwrap();
            assert!(r.holds, "{} at {theta}: {r:?}", s.id);
        }
    }
}

#[test]
fn noiseless_runs_stay_below_heisenberg() {
    for s in scenarios() {
        let n = s.n() as f64;
        for theta in GRID {
            let e = error_propagation(&s.clone().at(theta)).unwrap();
            assert!(e.precision_inv() <= n * n + 1e-6, "{} at {theta}", s.id);
        }
    }
}

#[test]
fn working_point_from_field_and_time() {
    let s = Scenario::ghz_parity(3, Representation::Full(3)).unwrap().at_time(2.0, 0.05);
    assert_eq!(s.gamma_b, Some(2.0));
    assert!((s.theta0 - 0.1).abs() < 1e-15);
    let e = error_propagation(&s).unwrap();
    assert!((e.mean - (3.0f64 * 0.1).cos()).abs() < 1e-12);
}

#[test]
fn gradient_sensitivity_does_not_depend_on_a_field_offset() {
    // a homogeneous rotation leaves the singlet unchanged, so only the gradient matters
    let r = gradient_scenario(4, 0.0).unwrap();
    let s = Scenario::gradient(4).unwrap();
    let f = qfi(&s.probe, &s.generator).unwrap().value;
    let d = r.gradient.delta_theta_sq.unwrap();
    assert!(d >= 1.0 / f - 1e-8);
    assert!(!r.homogeneous.sensitive());
}
