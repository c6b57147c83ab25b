//! Scenario documents: a JSON description of a chart, an almost contact
//! metric structure and optionally a submersion, with every component given
//! as an expression string in the coordinates `x1 .. xn`.
//!
//! ```json
//! {
//!   "name": "example",
//!   "dimension": 3,
//!   "domain": [[-0.9, 0.9], [-0.9, 0.9], [-0.9, 0.9]],
//!   "constants": {"a": 0.5},
//!   "metric": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
//!   "phi":    [["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]],
//!   "xi":  ["0", "0", "1"],
//!   "eta": ["0", "0", "1"],
//!   "map": ["x1", "x2"],
//!   "target": {"dimension": 2, "domain": [[-5, 5], [-5, 5]], "metric": [["1", "0"], ["0", "1"]]},
//!   "expected": {"theta": {"value": 0.5, "provenance": "derived:hand-computation"}}
//! }
//! ```
//!
//! `phi[i][j]` is the i-th component of φ(∂_j); `eta` lists the components
//! η(∂_j). `domain`, `constants`, `map`, `target` and `expected` are
//! optional; unknown keys are rejected.

mod builtins;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::AlmostContactStructure;
use crate::error::GeometryError;
use crate::expr::{parse_with_constants, Expr, SyntaxError};
use crate::manifold::{DomainBox, EndomorphismField, ManifoldModel, MetricField, OneFormField, VectorField};
use crate::submersion::SubmersionMap;

pub use builtins::{builtin_names, builtin_spec};

/// Default chart half-width when a document has no `domain`.
pub const DEFAULT_HALF_WIDTH: f64 = 0.9;
/// Default target half-width when a target has no `domain`.
pub const DEFAULT_TARGET_HALF_WIDTH: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    pub metric: Vec<Vec<String>>,
    pub phi: Vec<Vec<String>>,
    pub xi: Vec<String>,
    pub eta: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, Expected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
}

/// Expected outcome with a note on where the value comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub value: serde_json::Value,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid scenario document: {0}")]
    Json(String),
    #[error("in {field}: {error}")]
    Syntax { field: String, error: SyntaxError },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown builtin scenario {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid builtin parameters: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl ScenarioError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "Io",
            Self::Json(_) => "Json",
            Self::Syntax { .. } => "SyntaxError",
            Self::ShapeMismatch(_) => "ShapeMismatch",
            Self::UnknownBuiltin(_) => "UnknownBuiltin",
            Self::InvalidParameter(_) => "InvalidParameter",
            Self::Geometry(e) => e.kind(),
        }
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

/// A loaded scenario: the document plus the objects built from it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub structure: AlmostContactStructure,
    pub submersion: Option<SubmersionMap>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.spec.constants.get(name).copied()
    }

    pub fn expected(&self, key: &str) -> Option<&Expected> {
        self.spec.expected.get(key)
    }

    pub fn expected_f64(&self, key: &str) -> Option<f64> {
        self.expected(key).and_then(|e| e.value.as_f64())
    }

    /// The submersion, or a `WrongDimensions` error for structure-only
    /// scenarios.
    pub fn require_submersion(&self) -> Result<&SubmersionMap, GeometryError> {
        self.submersion
            .as_ref()
            .ok_or_else(|| GeometryError::WrongDimensions(format!("scenario {} has no map", self.spec.name)))
    }

    /// Builds the structure, validating the almost contact identities.
    pub fn from_spec(spec: ScenarioSpec) -> ScenarioResult<Self> {
        Self::build(spec, true)
    }

    /// Builds without validating the almost contact identities.
    pub fn from_spec_unchecked(spec: ScenarioSpec) -> ScenarioResult<Self> {
        Self::build(spec, false)
    }

    fn build(spec: ScenarioSpec, validate: bool) -> ScenarioResult<Self> {
        let n = spec.dimension;
        if n == 0 {
            return Err(ScenarioError::ShapeMismatch("dimension must be positive".into()));
        }
        let c = &spec.constants;
        let domain = domain_box(spec.domain.as_deref(), n, DEFAULT_HALF_WIDTH, "domain")?;
        let metric = compile_matrix(&spec.metric, n, n, n, c, "metric")?;
        let phi = compile_matrix(&spec.phi, n, n, n, c, "phi")?;
        let xi = compile_vector(&spec.xi, n, n, c, "xi")?;
        let eta = compile_vector(&spec.eta, n, n, c, "eta")?;
        let model = ManifoldModel::new(spec.name.clone(), MetricField::new(n, move |x| metric.eval(x)), domain)?;
        let phi = EndomorphismField::new(n, move |x| phi.eval(x));
        let xi = VectorField::new(n, move |x| xi.eval(x));
        let eta = OneFormField::new(n, move |x| eta.eval(x));
        let structure = if validate {
            AlmostContactStructure::new(model, phi, xi, eta)?
        } else {
            AlmostContactStructure::new_unchecked(model, phi, xi, eta)?
        };
        let submersion = match &spec.map {
            None => {
                if spec.target.is_some() {
                    return Err(ScenarioError::ShapeMismatch("target given without map".into()));
                }
                None
            }
            Some(map) => Some(build_submersion(&spec, map, structure.clone())?),
        };
        Ok(Self {
            spec,
            structure,
            submersion,
        })
    }
}

fn build_submersion(spec: &ScenarioSpec, map: &[String], source: AlmostContactStructure) -> ScenarioResult<SubmersionMap> {
    let n = spec.dimension;
    let c = &spec.constants;
    let m = map.len();
    let target = spec.target.clone().unwrap_or(TargetSpec {
        dimension: m,
        domain: None,
        metric: None,
    });
    if target.dimension != m {
        return Err(ScenarioError::ShapeMismatch(format!(
            "map has {m} components but target dimension is {}",
            target.dimension
        )));
    }
    let target_domain = domain_box(target.domain.as_deref(), m, DEFAULT_TARGET_HALF_WIDTH, "target.domain")?;
    let target_metric = match &target.metric {
        Some(rows) => {
            let compiled = compile_matrix(rows, m, m, m, c, "target.metric")?;
            MetricField::new(m, move |y| compiled.eval(y))
        }
        None => MetricField::euclidean(m),
    };
    let target_model = ManifoldModel::new(format!("{}-target", spec.name), target_metric, target_domain)?;
    let components = compile_vector(map, m, n, c, "map")?;
    let jacobian: Option<Vec<Vec<Expr>>> = components
        .0
        .iter()
        .map(|e| (1..=n).map(|v| e.derivative(v).ok()).collect::<Option<Vec<_>>>())
        .collect();
    let eval = components.clone();
    let submersion = match jacobian {
        Some(rows) => {
            let rows = ExprMatrix(Arc::new(rows));
            SubmersionMap::with_jacobian(source, target_model, move |x| eval.eval(x), move |x| rows.eval(x))?
        }
        None => SubmersionMap::new(source, target_model, move |x| eval.eval(x))?,
    };
    Ok(submersion)
}

/// Loads a builtin by name (with optional parameters, e.g. `mixed-r7(0.5)`)
/// or a JSON document from a path, validating the structure.
pub fn load_scenario(name_or_path: &str) -> ScenarioResult<Scenario> {
    Scenario::from_spec(resolve_spec(name_or_path)?)
}

/// As [`load_scenario`] but without validating the almost contact identities.
pub fn load_scenario_unchecked(name_or_path: &str) -> ScenarioResult<Scenario> {
    Scenario::from_spec_unchecked(resolve_spec(name_or_path)?)
}

/// The document for a builtin name or file path.
pub fn resolve_spec(name_or_path: &str) -> ScenarioResult<ScenarioSpec> {
    match builtin_spec(name_or_path) {
        Err(ScenarioError::UnknownBuiltin(_)) if Path::new(name_or_path).is_file() => read_spec(Path::new(name_or_path)),
        other => other,
    }
}

pub fn read_spec(path: &Path) -> ScenarioResult<ScenarioSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> ScenarioResult<ScenarioSpec> {
    serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))
}

fn domain_box(bounds: Option<&[[f64; 2]]>, n: usize, half_width: f64, field: &str) -> ScenarioResult<DomainBox> {
    match bounds {
        None => Ok(DomainBox::symmetric(n, half_width)),
        Some(b) if b.len() != n => Err(ScenarioError::ShapeMismatch(format!(
            "{field} has {} intervals, expected {n}",
            b.len()
        ))),
        Some(b) => Ok(DomainBox::new(b.iter().map(|i| i[0]).collect(), b.iter().map(|i| i[1]).collect())?),
    }
}

#[derive(Clone)]
struct ExprVector(Arc<Vec<Expr>>);

impl ExprVector {
    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        let xs = x.as_slice();
        DVector::from_iterator(self.0.len(), self.0.iter().map(|e| e.eval_or_nan(xs)))
    }
}

#[derive(Clone)]
struct ExprMatrix(Arc<Vec<Vec<Expr>>>);

impl ExprMatrix {
    fn eval(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let xs = x.as_slice();
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        DMatrix::from_fn(rows, cols, |i, j| self.0[i][j].eval_or_nan(xs))
    }
}

fn compile(text: &str, vars: usize, constants: &BTreeMap<String, f64>, field: &str) -> ScenarioResult<Expr> {
    let e = parse_with_constants(text, constants).map_err(|error| ScenarioError::Syntax {
        field: field.to_string(),
        error,
    })?;
    if e.max_variable() > vars {
        return Err(ScenarioError::ShapeMismatch(format!(
            "{field} uses x{} but the chart has dimension {vars}",
            e.max_variable()
        )));
    }
    Ok(e)
}

fn compile_vector(
    entries: &[String],
    len: usize,
    vars: usize,
    constants: &BTreeMap<String, f64>,
    field: &str,
) -> ScenarioResult<ExprVector> {
    if entries.len() != len {
        return Err(ScenarioError::ShapeMismatch(format!(
            "{field} has {} entries, expected {len}",
            entries.len()
        )));
    }
    let exprs = entries
        .iter()
        .enumerate()
        .map(|(i, t)| compile(t, vars, constants, &format!("{field}[{i}]")))
        .collect::<ScenarioResult<Vec<_>>>()?;
    Ok(ExprVector(Arc::new(exprs)))
}

fn compile_matrix(
    rows: &[Vec<String>],
    nrows: usize,
    ncols: usize,
    vars: usize,
    constants: &BTreeMap<String, f64>,
    field: &str,
) -> ScenarioResult<ExprMatrix> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        let found = rows.iter().map(Vec::len).max().unwrap_or(0);
        return Err(ScenarioError::ShapeMismatch(format!(
            "{field} is {}x{found}, expected {nrows}x{ncols}",
            rows.len()
        )));
    }
    let exprs = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, t)| compile(t, vars, constants, &format!("{field}[{i}][{j}]")))
                .collect::<ScenarioResult<Vec<_>>>()
        })
        .collect::<ScenarioResult<Vec<_>>>()?;
    Ok(ExprMatrix(Arc::new(exprs)))
}

/// Every expression string of a document, labelled by its field.
pub fn expressions(spec: &ScenarioSpec) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut push_matrix = |label: &str, m: &[Vec<String>]| {
        for (i, row) in m.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                out.push((format!("{label}[{i}][{j}]"), t.clone()));
            }
        }
    };
    push_matrix("metric", &spec.metric);
    push_matrix("phi", &spec.phi);
    if let Some(t) = spec.target.as_ref().and_then(|t| t.metric.as_ref()) {
        push_matrix("target.metric", t);
    }
    let vectors = [("xi", Some(&spec.xi)), ("eta", Some(&spec.eta)), ("map", spec.map.as_ref())];
    for (label, v) in vectors {
        for (i, t) in v.into_iter().flatten().enumerate() {
            out.push((format!("{label}[{i}]"), t.clone()));
        }
    }
    out
}
