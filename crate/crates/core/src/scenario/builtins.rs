//! Builtin scenario catalog.
//!
//! Coordinates of the flat models R^{2n+1} are ordered
//! `(x_1..x_n, y_1..y_n, z)` = `x1 .. x(2n+1)`, with φ∂y_i = ∂x_i,
//! φ∂x_i = −∂y_i, ξ = ∂z and η = dz.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

use serde_json::json;

use super::{Expected, ScenarioError, ScenarioResult, ScenarioSpec, TargetSpec};
use crate::expr::parse_expression;

const BUILTINS: &[&str] = &[
    "r2n1-cosymplectic(n)",
    "kim-r5",
    "e3",
    "e4",
    "hor",
    "mixed-r7(alpha)",
    "anti-invariant-r5",
    "sphere-radius",
    "hyperbolic-line(c)",
    "sasakian-r3",
    "broken-eta-r5",
    "broken-phi-r5",
];

/// Names of the builtin scenarios, with their parameter slots.
pub fn builtin_names() -> &'static [&'static str] {
    BUILTINS
}

/// Document of a builtin, e.g. `e3`, `mixed-r7(pi/6)` or `hyperbolic-line(-4)`.
pub fn builtin_spec(name: &str) -> ScenarioResult<ScenarioSpec> {
    let name = name.trim();
    let (base, arg) = match name.find('(') {
        Some(open) if name.ends_with(')') => (&name[..open], Some(&name[open + 1..name.len() - 1])),
        _ => (name, None),
    };
    let param = |default: f64| -> ScenarioResult<f64> {
        match arg {
            None => Ok(default),
            Some(text) => parse_expression(text)
                .ok()
                .and_then(|e| e.eval(&[]).ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| ScenarioError::InvalidParameter(format!("{name}: {text:?} is not a number"))),
        }
    };
    let no_param = || match arg {
        None => Ok(()),
        Some(_) => Err(ScenarioError::InvalidParameter(format!("{base} takes no parameters"))),
    };
    match base {
        "r2n1-cosymplectic" => {
            let n = param(2.0)?;
            if n.fract() != 0.0 || !(1.0..=10.0).contains(&n) {
                return Err(ScenarioError::InvalidParameter(format!("n = {n} must be an integer in 1..=10")));
            }
            let mut spec = flat(n as usize);
            spec.name = format!("r2n1-cosymplectic({n})");
            Ok(spec)
        }
        "kim-r5" => {
            no_param()?;
            Ok(kim())
        }
        "e3" => {
            no_param()?;
            let mut spec = flat(2);
            spec.name = "e3".into();
            spec.map = Some(strings(&["(x1-x2)/sqrt(2)", "x4"]));
            spec.expected = expected(&[
                ("theta", json!(FRAC_PI_4), "source:worked-example"),
                ("verdict", json!("proper-slant"), "source:worked-example"),
                ("xi_position", json!("vertical"), "source:worked-example"),
                ("mu_dim", json!(0), "derived:dimension-count"),
            ]);
            Ok(spec)
        }
        "e4" => {
            no_param()?;
            let mut spec = kim();
            spec.name = "e4".into();
            spec.map = Some(strings(&["(x1-x3)/sqrt(2)", "(x2-x4)/sqrt(2)"]));
            spec.expected = expected(&[
                ("theta", json!(0.0), "source:worked-example"),
                ("verdict", json!("invariant"), "source:worked-example"),
                ("xi_position", json!("vertical"), "derived:kernel-computation"),
            ]);
            Ok(spec)
        }
        "hor" => {
            no_param()?;
            let mut spec = flat(2);
            spec.name = "hor".into();
            spec.map = Some(strings(&["(x1-x2)/sqrt(2)", "x4", "x5"]));
            spec.expected = expected(&[
                ("theta", json!(FRAC_PI_4), "source:worked-example"),
                ("verdict", json!("proper-slant"), "source:worked-example"),
                ("xi_position", json!("horizontal"), "source:worked-example"),
                ("mu_dim", json!(0), "derived:dimension-count"),
            ]);
            Ok(spec)
        }
        "mixed-r7" => {
            let alpha = param(FRAC_PI_3)?;
            let mut spec = flat(3);
            spec.name = format!("mixed-r7({alpha})");
            spec.constants.insert("alpha".into(), alpha);
            spec.map = Some(strings(&["-sin(alpha)*x1+cos(alpha)*x5", "x6", "x2", "x3"]));
            spec.expected = expected(&[
                ("theta", json!(alpha), "derived:brute-force-projection"),
                ("xi_position", json!("vertical"), "derived:kernel-computation"),
                ("mu_dim", json!(2), "derived:brute-force-projection"),
            ]);
            Ok(spec)
        }
        "anti-invariant-r5" => {
            no_param()?;
            let mut spec = flat(2);
            spec.name = "anti-invariant-r5".into();
            spec.map = Some(strings(&["x1", "x2", "x5"]));
            spec.expected = expected(&[
                ("theta", json!(FRAC_PI_2), "derived:brute-force-projection"),
                ("verdict", json!("anti-invariant"), "derived:brute-force-projection"),
                ("xi_position", json!("horizontal"), "derived:kernel-computation"),
            ]);
            Ok(spec)
        }
        "sphere-radius" => {
            no_param()?;
            let mut spec = flat(1);
            spec.name = "sphere-radius".into();
            spec.domain = Some(vec![[0.5, 2.5], [-1.0, 1.0], [-1.0, 1.0]]);
            spec.map = Some(strings(&["sqrt(x1^2+x2^2+x3^2)"]));
            spec.target = Some(TargetSpec {
                dimension: 1,
                domain: Some(vec![[0.1, 5.0]]),
                metric: Some(vec![strings(&["1"])]),
            });
            Ok(spec)
        }
        "hyperbolic-line" => {
            let c = param(-1.0)?;
            if c >= 0.0 {
                return Err(ScenarioError::InvalidParameter(format!("c = {c} must be negative")));
            }
            let factor = "(-4/c)/(1-x1^2-x2^2)^2";
            Ok(ScenarioSpec {
                name: format!("hyperbolic-line({c})"),
                dimension: 3,
                domain: Some(vec![[-0.6, 0.6], [-0.6, 0.6], [-0.9, 0.9]]),
                constants: BTreeMap::from([("c".to_string(), c)]),
                metric: vec![strings(&[factor, "0", "0"]), strings(&["0", factor, "0"]), strings(&["0", "0", "1"])],
                phi: vec![strings(&["0", "-1", "0"]), strings(&["1", "0", "0"]), strings(&["0", "0", "0"])],
                xi: strings(&["0", "0", "1"]),
                eta: strings(&["0", "0", "1"]),
                map: Some(strings(&["x3"])),
                target: Some(TargetSpec {
                    dimension: 1,
                    domain: Some(vec![[-1.0, 1.0]]),
                    metric: None,
                }),
                expected: expected(&[("phi_sectional", json!(c), "derived:product-metric-curvature")]),
            })
        }
        "sasakian-r3" => {
            no_param()?;
            Ok(ScenarioSpec {
                name: "sasakian-r3".into(),
                dimension: 3,
                domain: None,
                constants: BTreeMap::new(),
                metric: vec![strings(&["1+x2^2", "0", "-x2"]), strings(&["0", "1", "0"]), strings(&["-x2", "0", "1"])],
                phi: vec![strings(&["0", "-1", "0"]), strings(&["1", "0", "0"]), strings(&["0", "-x2", "0"])],
                xi: strings(&["0", "0", "1"]),
                eta: strings(&["-x2", "0", "1"]),
                map: Some(strings(&["x1", "x2"])),
                target: None,
                expected: BTreeMap::new(),
            })
        }
        "broken-eta-r5" => {
            no_param()?;
            let mut spec = flat(2);
            spec.name = "broken-eta-r5".into();
            spec.eta[1] = "x1".into();
            Ok(spec)
        }
        "broken-phi-r5" => {
            no_param()?;
            let mut spec = flat(2);
            spec.name = "broken-phi-r5".into();
            for row in &mut spec.phi {
                for entry in row.iter_mut() {
                    if entry != "0" {
                        *entry = format!("2*{entry}");
                    }
                }
            }
            Ok(spec)
        }
        _ => Err(ScenarioError::UnknownBuiltin(name.to_string())),
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn expected(items: &[(&str, serde_json::Value, &str)]) -> BTreeMap<String, Expected> {
    items
        .iter()
        .map(|(k, v, p)| {
            (
                k.to_string(),
                Expected {
                    value: v.clone(),
                    provenance: p.to_string(),
                },
            )
        })
        .collect()
}

/// R^{2n+1} with the flat cosymplectic structure.
fn flat(n: usize) -> ScenarioSpec {
    let dim = 2 * n + 1;
    let unit = |i: usize| (0..dim).map(|k| if k == i { "1" } else { "0" }.to_string()).collect::<Vec<_>>();
    let mut phi = vec![vec!["0".to_string(); dim]; dim];
    for i in 0..n {
        phi[i][n + i] = "1".into();
        phi[n + i][i] = "-1".into();
    }
    ScenarioSpec {
        name: format!("r2n1-cosymplectic({n})"),
        dimension: dim,
        domain: None,
        constants: BTreeMap::new(),
        metric: (0..dim).map(unit).collect(),
        phi,
        xi: unit(dim - 1),
        eta: unit(dim - 1),
        map: None,
        target: None,
        expected: BTreeMap::new(),
    }
}

/// R^5 with η = dx5 − τ(dx1 + dx3), τ = sin(x1 + x3), and
/// g = Σ_{i≤4} dx_i² + η⊗η.
fn kim() -> ScenarioSpec {
    let diag = "1+sin(x1+x3)^2";
    let cross = "sin(x1+x3)^2";
    let mixed = "-sin(x1+x3)";
    ScenarioSpec {
        name: "kim-r5".into(),
        dimension: 5,
        domain: None,
        constants: BTreeMap::new(),
        metric: vec![
            strings(&[diag, "0", cross, "0", mixed]),
            strings(&["0", "1", "0", "0", "0"]),
            strings(&[cross, "0", diag, "0", mixed]),
            strings(&["0", "0", "0", "1", "0"]),
            strings(&[mixed, "0", mixed, "0", "1"]),
        ],
        phi: vec![
            strings(&["0", "-1", "0", "0", "0"]),
            strings(&["1", "0", "0", "0", "0"]),
            strings(&["0", "0", "0", "-1", "0"]),
            strings(&["0", "0", "1", "0", "0"]),
            strings(&["0", mixed, "0", mixed, "0"]),
        ],
        xi: strings(&["0", "0", "0", "0", "1"]),
        eta: strings(&[mixed, "0", mixed, "0", "1"]),
        map: None,
        target: None,
        expected: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        assert_eq!(builtin_spec("r2n1-cosymplectic(3)").unwrap().dimension, 7);
        assert!((builtin_spec("mixed-r7(pi/6)").unwrap().constants["alpha"] - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
        assert!(builtin_spec("r2n1-cosymplectic(1.5)").is_err());
        assert!(builtin_spec("hyperbolic-line(2)").is_err());
        assert!(builtin_spec("e3(1)").is_err());
        assert!(matches!(builtin_spec("nope"), Err(ScenarioError::UnknownBuiltin(_))));
    }
}
