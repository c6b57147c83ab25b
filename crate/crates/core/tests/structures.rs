use nalgebra::DVector;
use slant_core::contact::{AlmostContactStructure, CURVATURE_TOLERANCE};
use slant_core::sampling::Sampler;
use slant_core::{linalg, load_scenario, load_scenario_unchecked, Point, VectorField};

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn structure(name: &str) -> AlmostContactStructure {
    load_scenario(name).unwrap().structure
}

#[test]
fn flat_models_pass_every_structure_check() {
    for n in 1..=3 {
        let s = structure(&format!("r2n1-cosymplectic({n})"));
        let report = s.check_structure(100, 42).unwrap();
        for c in report.checks.iter() {
            assert!(c.passed(), "n={n}: {c}");
        }
        let alg = s.check_almost_contact(100, 42);
        for c in alg.checks.iter() {
            assert!(c.max_defect < 1e-12, "n={n}: {c}");
        }
    }
}

#[test]
fn kim_structure_is_cosymplectic() {
    let s = structure("kim-r5");
    let report = s.check_structure(100, 42).unwrap();
    for c in report.checks.iter() {
        assert!(c.passed(), "{c}");
    }
}

#[test]
fn kim_fundamental_form() {
    let s = structure("kim-r5");
    let p = s.model().point(&[0.3, -0.2, 0.5, 0.1, 0.0]).unwrap();
    let e = |i: usize| DVector::from_fn(5, |k, _| if k == i { 1.0 } else { 0.0 });
    // g(∂1, φ∂2) with φ∂2 = −∂1 − τ∂5
    let phi12 = s.fundamental_two_form(&p, &e(0), &e(1));
    assert!((phi12.abs() - 1.0).abs() < 1e-12);
    assert!((phi12 + s.fundamental_two_form(&p, &e(1), &e(0))).abs() < 1e-12);
    assert!((s.fundamental_two_form(&p, &e(2), &e(3)) - phi12).abs() < 1e-12);
    assert!(s.fundamental_two_form(&p, &e(0), &e(2)).abs() < 1e-12);
    let xi = e(4);
    let x = v(&[0.3, 0.1, -0.4, 0.2, 0.7]);
    assert!(s.fundamental_two_form(&p, &xi, &x).abs() < 1e-12);
}

#[test]
fn kim_nijenhuis_on_adapted_frame() {
    let s = structure("kim-r5");
    let p = s.model().point(&[0.2, 0.1, -0.3, 0.4, 0.0]).unwrap();
    // E1 = ∂1 + τ∂5, E2 = ∂3 + τ∂5: orthonormal, orthogonal to ξ.
    let e1 = VectorField::new(5, |x| v(&[1.0, 0.0, 0.0, 0.0, (x[0] + x[2]).sin()]));
    let e2 = VectorField::new(5, |x| v(&[0.0, 0.0, 1.0, 0.0, (x[0] + x[2]).sin()]));
    assert!(s.nijenhuis_defect(&p, &e1, &e2).unwrap().amax() < 1e-7);
    let g = s.metric_at(p.coords());
    let (a, b) = (e1.at(p.coords()), e2.at(p.coords()));
    assert!((linalg::inner(&g, &a, &a) - 1.0).abs() < 1e-12);
    assert!(linalg::inner(&g, &a, &b).abs() < 1e-12);
    assert!(s.eta_at(p.coords()).dot(&b).abs() < 1e-12);
}

#[test]
fn broken_fixtures_fail_their_targeted_checks() {
    let eta = load_scenario_unchecked("broken-eta-r5").unwrap().structure;
    let closed = eta.check_closed(100, 42).unwrap();
    let d_eta = closed.check("d eta = 0").unwrap();
    assert!((d_eta.max_defect - 1.0).abs() < 1e-8);
    assert!(!d_eta.passed());
    assert!(load_scenario("broken-eta-r5").is_err());

    let phi = load_scenario_unchecked("broken-phi-r5").unwrap().structure;
    let alg = phi.check_almost_contact(100, 42);
    assert!(alg.check("phi^2 = -I + eta(x)xi").unwrap().max_defect >= 1.0);
    assert!(load_scenario("broken-phi-r5").is_err());
}

#[test]
fn sasakian_perturbation_is_not_cosymplectic() {
    let s = structure("sasakian-r3");
    let report = s.check_cosymplectic(50, 42).unwrap();
    let c = report.check("nabla_E xi = 0").unwrap();
    assert!(c.max_defect > 0.1);
    assert!(!report.passed());
    // not closed either, while normal
    assert!(!s.check_closed(20, 1).unwrap().passed());
    assert!(s.check_normal(20, 1).unwrap().passed());
}

#[test]
fn normality_and_closedness_match_cosymplectic() {
    for name in ["r2n1-cosymplectic(2)", "kim-r5", "sasakian-r3", "hyperbolic-line(-1)"] {
        let s = structure(name);
        let joint = s.check_closed(30, 5).unwrap().passed() && s.check_normal(30, 5).unwrap().passed();
        assert_eq!(joint, s.check_cosymplectic(30, 5).unwrap().passed(), "{name}");
    }
    let broken = load_scenario_unchecked("broken-eta-r5").unwrap().structure;
    assert!(!broken.check_closed(30, 5).unwrap().passed());
    assert!(!broken.check_cosymplectic(30, 5).unwrap().passed());
}

#[test]
fn phi_sectional_on_flat_and_hyperbolic_models() {
    let flat = structure("r2n1-cosymplectic(2)");
    let p = flat.model().point(&[0.1, 0.2, -0.3, 0.4, 0.0]).unwrap();
    let e = v(&[0.6, 0.0, 0.0, 0.8, 0.0]);
    assert!(flat.phi_sectional(&p, &e).unwrap().abs() < 1e-6);

    for c in [-1.0, -4.0] {
        let s = structure(&format!("hyperbolic-line({c})"));
        let p = s.model().point(&[0.2, -0.1, 0.3]).unwrap();
        let g = s.metric_at(p.coords());
        let raw = v(&[0.7, 0.4, 0.0]);
        let e = &raw / linalg::norm(&g, &raw);
        let h = s.phi_sectional(&p, &e).unwrap();
        assert!((h - c).abs() < 1e-4, "c={c}: {h}");
        let phi_e = s.phi_at(p.coords()) * &e;
        assert!((s.phi_sectional(&p, &phi_e).unwrap() - h).abs() < 1e-6);
        assert!(s.phi_sectional(&p, &raw).is_err());
        assert!(s.phi_sectional(&p, &v(&[0.0, 0.0, 1.0])).is_err());
    }
}

#[test]
fn space_form_formula_matches_numeric_curvature() {
    for c in [-1.0, -4.0] {
        let s = structure(&format!("hyperbolic-line({c})"));
        let mut rng = Sampler::new(11);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let x = rng.point(s.model().domain());
            let p = Point::from_coords(x);
            let r = s.connection().riemann_tensor(&p).unwrap();
            let (a, b, d) = (rng.vector(3), rng.vector(3), rng.vector(3));
            let numeric = r.apply(&a, &b, &d);
            let closed = s.space_form_curvature(c, &p, &a, &b, &d);
            let scale = 1.0 + numeric.amax();
            worst = worst.max((numeric - closed).amax() / scale);
        }
        assert!(worst < CURVATURE_TOLERANCE, "c={c}: {worst}");
    }
}
