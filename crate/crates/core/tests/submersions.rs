use nalgebra::{DMatrix, DVector};
use slant_core::sampling::Sampler;
use slant_core::submersion::IdentityOptions;
use slant_core::{linalg, load_scenario, Point, SubmersionMap};

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn map(name: &str) -> SubmersionMap {
    load_scenario(name).unwrap().submersion.unwrap()
}

fn point(xs: &[f64]) -> Point {
    Point::from_coords(v(xs))
}

#[test]
fn e3_differential_and_split() {
    let f = map("e3");
    let p = point(&[0.1, -0.3, 0.2, 0.4, -0.5]);
    let s2 = 0.5f64.sqrt();
    let expected = DMatrix::from_row_slice(2, 5, &[s2, -s2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    assert!((f.differential(&p).unwrap() - expected).amax() < 1e-15);
    let split = f.split(&p).unwrap();
    assert_eq!(split.vertical_dim(), 3);
    assert_eq!(split.horizontal_dim(), 2);
    let xi = v(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!((split.vertical_part(&xi) - &xi).amax() < 1e-12);
    // the listed kernel vectors lie in the computed kernel
    for k in [v(&[0.0, 0.0, 1.0, 0.0, 0.0]), v(&[s2, s2, 0.0, 0.0, 0.0])] {
        assert!(split.horizontal_part(&k).amax() < 1e-12);
    }
    assert!(split.invariant_defect() < 1e-12);
    let r = f.check_axioms(100, 42);
    assert!(r.passed());
    assert!(r.check("g_N(F_*X, F_*Y) = g_M(X, Y)").unwrap().max_defect < 1e-10);
}

#[test]
fn e4_and_hor_axioms() {
    let r = map("e4").check_axioms(100, 42);
    assert!(r.passed(), "{:?}", r);
    assert!(r.check("g_N(F_*X, F_*Y) = g_M(X, Y)").unwrap().max_defect < 1e-10);
    let f = map("hor");
    let split = f.split(&point(&[0.1, 0.2, 0.3, 0.4, 0.5])).unwrap();
    assert_eq!(split.vertical_dim(), 2);
    let xi = v(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!((split.horizontal_part(&xi) - &xi).amax() < 1e-10);
}

#[test]
fn projector_invariants_on_every_map_scenario() {
    for name in ["e3", "e4", "hor", "mixed-r7", "anti-invariant-r5", "sphere-radius", "hyperbolic-line", "sasakian-r3"] {
        let r = map(name).check_axioms(100, 42);
        assert!(r.passed(), "{name}: {:?}", r);
    }
}

#[test]
fn sphere_radius_differential() {
    let f = map("sphere-radius");
    let j = f.differential(&point(&[1.0, 0.0, 0.0])).unwrap();
    assert!((j - DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0])).amax() < 1e-14);
}

#[test]
fn flat_linear_scenarios_have_vanishing_tensors() {
    let f = map("e3");
    let p = point(&[0.1, -0.3, 0.2, 0.4, -0.5]);
    let sample = f.oneill_sample(&p).unwrap();
    assert!(sample.max_component() < 1e-8);
    assert!(f.mean_curvature(&p).unwrap().amax() < 1e-8);
    let xi = v(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    let u = v(&[0.0, 0.0, 1.0, 0.0, 0.0]);
    assert!(f.oneill_t(&p, &u, &xi).unwrap().amax() < 1e-8);
    let fibre = f.fibre_curvature(&p).unwrap();
    assert!(fibre.scalar_intrinsic.abs() < 1e-6);
    assert!(fibre.scalar_ambient.abs() < 1e-6);
    assert!((&fibre.induced_metric - DMatrix::identity(3, 3)).amax() < 1e-10);
    let x = split_horizontal(&f, &p);
    assert!(f.second_fundamental_form_map(&p, &x[0], &x[1]).unwrap().amax() < 1e-8);
    assert!(f.tension_field(&p).unwrap().amax() < 1e-8);
    let e4 = map("e4");
    assert!(e4.tension_field(&point(&[0.1, 0.2, -0.3, 0.1, 0.2])).unwrap().amax() < 1e-8);
}

fn split_horizontal(f: &SubmersionMap, p: &Point) -> Vec<DVector<f64>> {
    f.split(p).unwrap().horizontal
}

#[test]
fn sphere_radius_extrinsic_geometry() {
    let f = map("sphere-radius");
    for r in [1.0, 2.0] {
        let p = point(&[r, 0.0, 0.0]);
        let radial = v(&[1.0, 0.0, 0.0]);
        let u = v(&[0.0, 1.0, 0.0]);
        let w = v(&[0.0, 0.6, 0.8]);
        let tuu = f.oneill_t(&p, &u, &u).unwrap();
        assert!((&tuu + &radial / r).amax() < 1e-5, "r={r}");
        let h = f.mean_curvature(&p).unwrap();
        assert!((h.norm() - 1.0 / r).abs() < 1e-5);
        // umbilical: T_U W = g(U, W) H
        let tuw = f.oneill_t(&p, &u, &w).unwrap();
        assert!((tuw - &h * u.dot(&w)).amax() < 1e-5);
        // A vanishes on a line of horizontal vectors
        assert!(f.oneill_a(&p, &radial, &u).unwrap().amax() < 1e-6);
        assert!(f.oneill_a(&p, &radial, &radial).unwrap().amax() < 1e-6);
        // (∇F_*)(U, U) = −F_*(T_U U)
        let sff = f.second_fundamental_form_map(&p, &u, &u).unwrap();
        let j = f.differential(&p).unwrap();
        assert!((&sff + &j * &tuu).amax() < 1e-5);
        assert!((sff.norm() - 1.0 / r).abs() < 1e-5);
        let tension = f.tension_field(&p).unwrap();
        assert!((tension.norm() - 2.0 / r).abs() < 1e-4);
        let fibre = f.fibre_curvature(&p).unwrap();
        let (_, ka) = fibre.sectional_ambient[0];
        let (_, kb) = fibre.sectional_intrinsic[0];
        assert!((ka - 1.0 / (r * r)).abs() < 1e-4, "route a {ka}");
        assert!((kb - 1.0 / (r * r)).abs() < 1e-4, "route b {kb}");
    }
}

#[test]
fn sphere_radius_off_axis_point() {
    let f = map("sphere-radius");
    let p = point(&[1.2, -0.5, 0.7]);
    let r = p.coords().norm();
    let fibre = f.fibre_curvature(&p).unwrap();
    assert!(fibre.route_disagreement() < 1e-4);
    assert!((fibre.scalar_intrinsic - 1.0 / (r * r)).abs() < 1e-4);
    assert!((fibre.mean_curvature.norm() - 1.0 / r).abs() < 1e-5);
    assert!(fibre.sectional_intrinsic.len() == 1);
}

#[test]
fn tension_is_frame_independent() {
    let f = map("sphere-radius");
    let p = point(&[1.2, -0.5, 0.7]);
    let g = DMatrix::identity(3, 3);
    let mut rng = Sampler::new(9);
    let frame_a = linalg::gram_schmidt(&g, &[rng.vector(3), rng.vector(3), rng.vector(3)]).unwrap();
    let frame_b = linalg::gram_schmidt(&g, &[rng.vector(3), rng.vector(3), rng.vector(3)]).unwrap();
    let a = f.tension_field_in_frame(&p, &frame_a).unwrap();
    let b = f.tension_field_in_frame(&p, &frame_b).unwrap();
    assert!((a - b).amax() < 1e-6);
}

#[test]
fn o_neill_identities_on_sphere_radius() {
    let f = map("sphere-radius");
    let report = f.verify_curvature_identities(10, 42).unwrap();
    for c in report.checks.iter() {
        assert!(c.passed(), "{c}");
    }
    assert!(report.check("Gauss equation").unwrap().max_defect < 1e-4);
    assert!(report.check("mixed curvature identity").is_some());
}

#[test]
fn mis_signed_gauss_equation_is_caught() {
    let f = map("sphere-radius");
    let r: f64 = 1.5;
    let p = point(&[r, 0.0, 0.0]);
    let u = v(&[0.0, 1.0, 0.0]);
    let w = v(&[0.0, 0.0, 1.0]);
    let good = f.gauss_residual(&p, [&u, &w, &w, &u], 1.0).unwrap();
    let bad = f.gauss_residual(&p, [&u, &w, &w, &u], -1.0).unwrap();
    assert!(good.abs() < 1e-4);
    assert!(bad.abs() >= 2.0 / (r * r) - 1e-4, "{bad}");
    let opts = IdentityOptions {
        gauss_sign: -1.0,
        include_mixed: false,
    };
    let report = f.verify_curvature_identities_with(5, 1, &opts).unwrap();
    assert!(!report.check("Gauss equation").unwrap().passed());
}

#[test]
fn o_neill_identities_on_flat_and_twisted_scenarios() {
    for name in ["e3", "e4", "hor", "mixed-r7", "anti-invariant-r5", "hyperbolic-line", "sasakian-r3"] {
        let f = map(name);
        let report = f.verify_curvature_identities(5, 42).unwrap();
        for c in report.checks.iter() {
            assert!(c.passed(), "{name}: {c}");
        }
    }
    let e3 = map("e3").verify_curvature_identities(5, 42).unwrap();
    for c in e3.checks.iter() {
        assert!(c.max_defect < 1e-6, "e3: {c}");
    }
}

#[test]
fn sasakian_projection_has_nonzero_a() {
    let f = map("sasakian-r3");
    let p = point(&[0.1, 0.3, -0.2]);
    let split = f.split(&p).unwrap();
    let (x, y) = (&split.horizontal[0], &split.horizontal[1]);
    let xi = v(&[0.0, 0.0, 1.0]);
    let a = f.oneill_a(&p, x, y).unwrap();
    assert!(a.norm() > 0.1);
    let g = f.source().metric_at(p.coords());
    let axi = f.oneill_a(&p, x, &xi).unwrap();
    assert!((linalg::inner(&g, &axi, &axi) - 0.25).abs() < 1e-6);
    let k = f.source_connection().sectional_curvature(&p, x, &xi).unwrap();
    assert!((k - 0.25).abs() < 1e-4);
}

#[test]
fn hyperbolic_line_fibres_are_totally_geodesic() {
    let f = map("hyperbolic-line");
    let p = point(&[0.2, -0.3, 0.1]);
    assert!(f.oneill_sample(&p).unwrap().max_component() < 1e-6);
    let fibre = f.fibre_curvature(&p).unwrap();
    let (_, k) = fibre.sectional_intrinsic[0];
    assert!((k + 1.0).abs() < 1e-4, "{k}");
    assert!(fibre.route_disagreement() < 1e-4);
}

#[test]
fn out_of_domain_points_are_rejected() {
    let f = map("e3");
    let edge = point(&[0.9, 0.0, 0.0, 0.0, 0.0]);
    assert!(f.oneill_t(&edge, &v(&[1.0, 0.0, 0.0, 0.0, 0.0]), &v(&[1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
    assert!(f.differential(&point(&[1.5, 0.0, 0.0, 0.0, 0.0])).is_err());
}
