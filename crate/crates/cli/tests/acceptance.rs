//! Acceptance criteria 1-9. Prints one line per criterion and exits non-zero
//! if any is red.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use slant_cli::{run, ReportDocument};
use slant_core::sampling::Sampler;
use slant_core::slant::{InequalityCase, InequalityReport, TTable};
use slant_core::submersion::IdentityOptions;
use slant_core::{linalg, load_scenario, Point, SubmersionMap};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_slantsub");

fn map(name: &str) -> SubmersionMap {
    load_scenario(name).unwrap().submersion.unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Runs the binary, returning (exit code, stdout, wall time).
fn binary(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), start.elapsed())
}

fn document(args: &[&str]) -> (i32, ReportDocument) {
    let mut argv = vec!["slantsub"];
    argv.extend_from_slice(args);
    let o = run(argv);
    (o.code, o.document.expect("command produced a report"))
}

fn json_of(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn max_defect(doc: &ReportDocument, name: &str) -> Result<f64, String> {
    doc.check(name)
        .and_then(|c| c.max_defect)
        .ok_or_else(|| format!("{}: no finite check {name:?}", doc.scenario))
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for (name, theta, verdict, xi) in [
        ("e3", FRAC_PI_4, Some("proper-slant"), Some("vertical")),
        ("e4", 0.0, Some("invariant"), None),
        ("hor", FRAC_PI_4, None, Some("horizontal")),
    ] {
        let (code, out, elapsed) = binary(&["slant-angle", name, "--format", "json"]);
        let v = json_of(&out);
        let got = v["theta_mean"].as_f64().ok_or("theta_mean missing")?;
        ensure(code == 0, format!("{name}: exit {code}"))?;
        ensure((got - theta).abs() <= 1e-8, format!("{name}: theta {got}"))?;
        if let Some(verdict) = verdict {
            ensure(v["verdict"] == verdict, format!("{name}: verdict {}", v["verdict"]))?;
        }
        if let Some(xi) = xi {
            ensure(v["xi_position"] == xi, format!("{name}: xi {}", v["xi_position"]))?;
        }
        ensure(elapsed < Duration::from_secs(5), format!("{name}: {elapsed:?}"))?;
        notes.push(format!("{name} theta={got:.10} ({} ms)", elapsed.as_millis()));
    }
    Ok(notes.join(", "))
}

fn criterion_2() -> Outcome {
    for name in ["r2n1-cosymplectic(1)", "r2n1-cosymplectic(2)", "r2n1-cosymplectic(3)", "kim-r5"] {
        let (code, doc) = document(&["check-structure", name]);
        let failing: Vec<_> = doc.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        ensure(code == 0 && doc.checks.len() >= 12, format!("{name}: exit {code}, failing {failing:?}"))?;
    }
    let targeted = [
        ("broken-eta-r5", ["eta o phi = 0", "eta(X) = g(X, xi)"]),
        ("broken-phi-r5", ["phi^2 = -I + eta(x)xi", "g(phi X, phi Y) = g - eta eta"]),
    ];
    for (name, checks) in targeted {
        let (code, doc) = document(&["check-structure", name]);
        ensure(code == 1, format!("{name}: exit {code}"))?;
        for check in checks {
            let rec = doc.check(check).ok_or(format!("{name}: no check {check}"))?;
            ensure(!rec.pass, format!("{name}: {check} passed"))?;
        }
    }
    Ok("4 valid structures pass, both broken fixtures fail their targeted checks".into())
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for c in [-1.0, -4.0] {
        let s = load_scenario(&format!("hyperbolic-line({c})")).unwrap().structure;
        let mut rng = Sampler::new(3);
        let mut worst: f64 = 0.0;
        let mut worst_h: f64 = 0.0;
        for _ in 0..50 {
            let p = Point::from_coords(rng.point(s.model().domain()));
            let r = s.connection().riemann_tensor(&p).map_err(|e| e.to_string())?;
            let (a, b, d) = (rng.vector(3), rng.vector(3), rng.vector(3));
            let numeric = r.apply(&a, &b, &d);
            let closed = s.space_form_curvature(c, &p, &a, &b, &d);
            worst = worst.max((numeric - closed).amax());
            let g = s.metric_at(p.coords());
            let raw = DVector::from_vec(vec![rng.unit() - 0.5, rng.unit() - 0.5, 0.0]);
            let e = &raw / linalg::norm(&g, &raw);
            let h = s.phi_sectional(&p, &e).map_err(|e| e.to_string())?;
            worst_h = worst_h.max((h - c).abs());
        }
        ensure(worst <= 1e-4, format!("c={c}: curvature defect {worst:e}"))?;
        ensure(worst_h <= 1e-4, format!("c={c}: phi-sectional defect {worst_h:e}"))?;
        notes.push(format!("c={c}: R {worst:.1e}, H {worst_h:.1e}"));
    }
    Ok(notes.join(", "))
}

fn criterion_4() -> Outcome {
    let f = map("sphere-radius");
    let ids = f.verify_curvature_identities(100, 42).map_err(|e| e.to_string())?;
    let gauss = ids.check("Gauss equation").ok_or("no Gauss check")?.max_defect;
    let sectional = ids.check("fibre sectional curvature").ok_or("no sectional check")?.max_defect;
    ensure(gauss < 1e-4, format!("Gauss residual {gauss:e}"))?;
    ensure(sectional < 1e-4, format!("sectional residual {sectional:e}"))?;

    let mut rng = Sampler::new(4);
    let (mut k_err, mut h_err, mut umb, mut tau_err): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..20 {
        let x = rng.point(f.source().model().domain());
        let p = Point::from_coords(x.clone());
        let r = x.norm();
        let fibre = f.fibre_curvature(&p).map_err(|e| e.to_string())?;
        for (_, k) in fibre.sectional_ambient.iter().chain(&fibre.sectional_intrinsic) {
            k_err = k_err.max((k - 1.0 / (r * r)).abs());
        }
        let h = f.mean_curvature(&p).map_err(|e| e.to_string())?;
        h_err = h_err.max((h.norm() - 1.0 / r).abs());
        let vs = f.split(&p).map_err(|e| e.to_string())?.vertical;
        for a in &vs {
            for b in &vs {
                let t = f.oneill_t(&p, a, b).map_err(|e| e.to_string())?;
                umb = umb.max((t - &h * a.dot(b)).amax());
            }
        }
        let tau = f.tension_field(&p).map_err(|e| e.to_string())?;
        tau_err = tau_err.max((tau.norm() - 2.0 / r).abs());
    }
    ensure(k_err <= 1e-4, format!("fibre K {k_err:e}"))?;
    ensure(h_err <= 1e-5, format!("|H| {h_err:e}"))?;
    ensure(umb < 1e-5, format!("umbilicity {umb:e}"))?;
    ensure(tau_err <= 1e-4, format!("tension {tau_err:e}"))?;

    let options = IdentityOptions {
        include_mixed: false,
        ..IdentityOptions::default()
    };
    let all = ["e3", "e4", "hor", "mixed-r7(pi/3)", "anti-invariant-r5", "sphere-radius", "hyperbolic-line(-1)", "sasakian-r3"];
    let mut worst: f64 = 0.0;
    for name in all {
        let r = map(name).verify_curvature_identities_with(100, 42, &options).map_err(|e| e.to_string())?;
        for check in ["T skew-adjoint", "A skew-adjoint", "T_U W = T_W U", "A_X Y = -A_Y X"] {
            let d = r.check(check).ok_or(format!("{name}: no {check}"))?.max_defect;
            ensure(d < 1e-6, format!("{name}: {check} {d:e}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "Gauss {gauss:.1e}, sectional {sectional:.1e}, K {k_err:.1e}, |H| {h_err:.1e}, umbilic {umb:.1e}, tension {tau_err:.1e}, symmetries {worst:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let mut worst = [0.0f64; 4];
    for name in ["e3", "hor", "mixed-r7(pi/6)", "mixed-r7(pi/4)", "mixed-r7(pi/3)"] {
        let f = map(name);
        let slant = f.slant_constancy(100, 20, 42);
        let err = |e: slant_core::GeometryError| format!("{name}: {e}");
        let psi = f.check_psi_square(&slant, 42).map_err(err)?;
        let norms = f.check_norm_relations(&slant, 42).map_err(err)?;
        let derivs = f.check_slant_derivatives(&slant, 42).map_err(err)?;
        let frames = f.check_frames(&slant).map_err(err)?;
        let m = |r: &slant_core::Report| r.checks.iter().map(|c| c.max_defect).fold(0.0, f64::max);
        let dq = derivs.check("(nabla_U Q)V = 0").unwrap().max_defect;
        let ortho = frames.check("adapted frame orthonormal").unwrap().max_defect;
        let count = frames.check("dim ker F_* = 2k + 1 (xi vertical) or 2k (xi horizontal)").unwrap();
        ensure(m(&psi) < 1e-6, format!("{name}: psi^2 {:e}", m(&psi)))?;
        ensure(m(&norms) < 1e-6, format!("{name}: norms {:e}", m(&norms)))?;
        ensure(dq < 1e-5, format!("{name}: nabla Q {dq:e}"))?;
        ensure(ortho < 1e-8, format!("{name}: frame {ortho:e}"))?;
        ensure(count.passed() && count.max_defect == 0.0, format!("{name}: bookkeeping"))?;
        for (w, v) in worst.iter_mut().zip([m(&psi), m(&norms), dq, ortho]) {
            *w = w.max(v);
        }
    }
    Ok(format!(
        "psi^2 {:.1e}, norms {:.1e}, nabla Q {:.1e}, frames {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for alpha in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let f = map(&format!("mixed-r7({alpha})"));
        let slant = f.slant_constancy(20, 20, 42);
        for x in &slant.points {
            let mu = f.mu_distribution(&slant, &Point::from_coords(x.clone())).map_err(|e| e.to_string())?;
            ensure(mu.dim == 2 && mu.expected_dim == Some(2), format!("alpha={alpha}: dim {}", mu.dim))?;
            ensure(mu.invariance_defect < 1e-8, format!("alpha={alpha}: defect {:e}", mu.invariance_defect))?;
        }
    }
    notes.push("mixed-r7 dim mu = 2".to_string());
    for name in ["e3", "hor"] {
        let f = map(name);
        let slant = f.slant_constancy(20, 20, 42);
        let mu = f.mu_distribution(&slant, &Point::from_coords(slant.points[0].clone())).map_err(|e| e.to_string())?;
        ensure(mu.dim == 0 && mu.expected_dim == Some(0), format!("{name}: dim {}", mu.dim))?;
        notes.push(format!("{name} dim mu = 0"));
    }
    Ok(notes.join(", "))
}

fn criterion_7() -> Outcome {
    for (name, case) in [("e3", "vertical"), ("hor", "horizontal")] {
        let (code, doc) = document(&["verify-inequality", name, "--case", case, "--c", "0"]);
        ensure(code == 0, format!("{name}: exit {code} {:?}", doc.errors))?;
        let lo = doc.extras["slack_min"].as_f64().unwrap();
        let hi = doc.extras["slack_max"].as_f64().unwrap();
        ensure(lo >= -1e-6 && hi <= 1e-6, format!("{name}: slack in [{lo:e}, {hi:e}]"))?;
        let flags = doc.extras["equality_flags"].as_object().unwrap();
        ensure(!flags.is_empty() && flags.values().all(|b| b == true), format!("{name}: flags {flags:?}"))?;
    }
    let cases = [
        (InequalityCase::Vertical, vec![((1, 1, 4), 3.0), ((2, 2, 4), 1.0)], 0.0),
        (InequalityCase::Vertical, vec![((1, 1, 4), 1.0), ((2, 2, 4), 1.0)], 4.0 / 9.0),
        (InequalityCase::Horizontal, vec![((1, 1, 4), 1.0), ((2, 2, 4), -1.0)], 0.25),
        (InequalityCase::Horizontal, vec![((1, 1, 3), 1.0)], 0.25),
    ];
    for (case, entries, slack) in cases {
        let r = InequalityReport::synthetic(case, &TTable::from_entries(&entries), 0.0, FRAC_PI_4);
        ensure((r.slack - slack).abs() <= 1e-12, format!("{entries:?}: slack {} vs {slack}", r.slack))?;
    }
    Ok("e3/hor slack 0 with all flags; synthetic slacks 0, 4/9, 1/4, 1/4".into())
}

fn criterion_8() -> Outcome {
    let (code, doc) = document(&["anti-invariant", "anti-invariant-r5"]);
    ensure(code == 0, format!("exit {code}: {:?}", doc.errors))?;
    let mut worst = 0.0f64;
    for name in ["T_U phi E = phi T_U E", "A_X phi E = phi A_X E", "A_X phi Y = -A_Y phi X", "A_X = 0"] {
        let d = max_defect(&doc, name)?;
        ensure(d < 1e-7, format!("{name}: {d:e}"))?;
        worst = worst.max(d);
    }
    let mut worst_h = 0.0f64;
    for name in ["H(V) from T = phi-sectional curvature", "H(X) from T = phi-sectional curvature"] {
        let d = max_defect(&doc, name)?;
        ensure(d <= 1e-6, format!("{name}: {d:e}"))?;
        worst_h = worst_h.max(d);
    }
    Ok(format!("tensor residuals {worst:.1e}, phi-sectional agreement {worst_h:.1e}, note {}", doc.extras["note"]))
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 9] = [
        &["check-structure", "kim-r5"],
        &["check-submersion", "e3"],
        &["slant-angle", "mixed-r7(pi/6)"],
        &["slant-angle", "e4", "--seed", "7"],
        &["verify-identities", "sphere-radius", "--samples", "20"],
        &["verify-inequality", "hor", "--case", "horizontal"],
        &["verify-inequality", "e4", "--case", "vertical"],
        &["tension", "sphere-radius"],
        &["anti-invariant", "anti-invariant-r5"],
    ];
    for args in commands {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let (c1, a, _) = binary(&full);
        let (c2, b, _) = binary(&full);
        ensure(c1 == c2 && a == b && !a.is_empty(), format!("{args:?} differs between runs"))?;
        json_of(&a);
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example reproduction", criterion_1),
        ("structure suite", criterion_2),
        ("curvature oracle", criterion_3),
        ("O'Neill identity suite", criterion_4),
        ("slant identity suite", criterion_5),
        ("mu-invariance", criterion_6),
        ("inequality suite", criterion_7),
        ("anti-invariant suite", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut red = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                red += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if red > 0 {
        println!("{red} acceptance criteria failed");
        std::process::exit(1);
    }
}
