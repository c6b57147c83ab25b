use slant_cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn go(args: &[&str]) -> slant_cli::Outcome {
    let mut argv = vec!["slantsub"];
    argv.extend_from_slice(args);
    run(argv)
}

#[test]
fn json_report_has_the_documented_keys() {
    let o = go(&["slant-angle", "e3", "--format", "json"]);
    assert_eq!(o.code, EXIT_PASS);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    for key in ["scenario", "command", "seed", "samples", "checks", "pass"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["seed"], 42);
    assert_eq!(v["samples"], 100);
    let check = &v["checks"][0];
    for key in ["name", "max_defect", "tolerance", "pass"] {
        assert!(check.get(key).is_some(), "{key}");
    }
    assert!((v["theta_mean"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    assert_eq!(v["provenance"]["theta"], "source:worked-example");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(go(&["slant-angle"]).code, EXIT_USAGE);
    assert_eq!(go(&["frobnicate", "e3"]).code, EXIT_USAGE);
    assert_eq!(go(&["verify-inequality", "e3"]).code, EXIT_USAGE);
    assert_eq!(go(&["slant-angle", "e3", "--samples", "0"]).code, EXIT_USAGE);
    assert_eq!(go(&["slant-angle", "e3", "--tolerance-scale", "-1"]).code, EXIT_USAGE);
    let o = go(&["slant-angle", "no-such-scenario"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert_eq!(o.document.unwrap().error_kinds(), ["UnknownBuiltin"]);
    assert_eq!(go(&["--help"]).code, EXIT_PASS);
}

#[test]
fn scenario_file_with_bad_shape_is_a_parse_error() {
    let dir = std::env::temp_dir().join(format!("slantsub-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    let row = r#"["1","0","0","0","0"]"#;
    let text = format!(
        r#"{{"name":"bad","dimension":5,"metric":[{row},{row},{row},{row}],
        "phi":[{row},{row},{row},{row},{row}],"xi":["0","0","0","0","1"],"eta":["0","0","0","0","1"]}}"#
    );
    std::fs::write(&path, text).unwrap();
    let o = go(&["check-structure", path.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_USAGE);
    assert_eq!(o.document.unwrap().error_kinds(), ["ShapeMismatch"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precondition_failures_exit_one_with_an_error_record() {
    let o = go(&["verify-inequality", "e4", "--case", "vertical"]);
    assert_eq!(o.code, EXIT_FAIL);
    assert_eq!(o.document.unwrap().error_kinds(), ["NotProperSlant"]);
    let o = go(&["anti-invariant", "e3"]);
    assert_eq!(o.code, EXIT_FAIL);
    let o = go(&["check-structure", "broken-eta-r5"]);
    assert_eq!(o.code, EXIT_FAIL);
}

#[test]
fn tolerance_scale_multiplies_every_tolerance() {
    let base = go(&["check-submersion", "e3"]).document.unwrap();
    let scaled = go(&["check-submersion", "e3", "--tolerance-scale", "10"]).document.unwrap();
    for (a, b) in base.checks.iter().zip(&scaled.checks) {
        assert_eq!(a.tolerance * 10.0, b.tolerance);
        assert_eq!(a.max_defect, b.max_defect);
    }
    // a tiny scale turns a passing structure red
    assert_eq!(go(&["check-structure", "kim-r5", "--tolerance-scale", "1e-12"]).code, EXIT_FAIL);
}

#[test]
fn out_path_is_reported_and_seed_changes_samples() {
    let o = go(&["tension", "e4", "--out", "report.txt", "--seed", "9", "--samples", "5"]);
    assert_eq!(o.out.as_deref(), Some(std::path::Path::new("report.txt")));
    let doc = o.document.unwrap();
    assert_eq!((doc.seed, doc.samples), (9, 5));
    assert_eq!(doc.extras["harmonic"], true);
    assert!(o.stdout.contains("result: PASS"));
}
