//! `slantsub`: runs the verification suites on builtin or file scenarios and
//! reports every check as a pass/fail record.

pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{Map, Value};
use slant_core::sampling::Sampler;
use slant_core::scenario::ScenarioError;
use slant_core::slant::{InequalityCase, ANGLE_TOLERANCE, DEFAULT_DIRECTIONS};
use slant_core::{
    linalg, load_scenario, load_scenario_unchecked, Check, GeometryError, Point, Report, Scenario, SlantReport,
    SubmersionMap, Verdict, XiPosition,
};

pub use report::{CheckRecord, ErrorRecord, ReportDocument};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerance on θ against a scenario's stated angle.
const EXPECTED_THETA_TOLERANCE: f64 = 1e-8;
const FRAME_INDEPENDENCE_TOLERANCE: f64 = 1e-6;
const HARMONIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "slantsub", version, about = "Verify slant Riemannian submersions numerically")]
struct Cli {
    /// Sample points per suite.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
    samples: u32,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Multiplies every default tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    Vertical,
    Horizontal,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Almost contact, closedness, normality and cosymplectic checks.
    CheckStructure { scenario: String },
    /// Submersion axioms and the φ decomposition identities.
    CheckSubmersion { scenario: String },
    /// Slant angle, its constancy and the algebra it forces.
    SlantAngle {
        scenario: String,
        /// Random vertical directions per point.
        #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
        directions: usize,
    },
    /// O'Neill curvature identities and the slant derivative identities.
    VerifyIdentities { scenario: String },
    /// ‖H‖² against the fibre scalar curvature.
    VerifyInequality {
        scenario: String,
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Constant φ-sectional curvature of the source.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
    },
    /// Tension field and its frame independence.
    Tension { scenario: String },
    /// Checks specific to θ = π/2 with ξ horizontal.
    AntiInvariant { scenario: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::CheckStructure { .. } => "check-structure",
            Self::CheckSubmersion { .. } => "check-submersion",
            Self::SlantAngle { .. } => "slant-angle",
            Self::VerifyIdentities { .. } => "verify-identities",
            Self::VerifyInequality { .. } => "verify-inequality",
            Self::Tension { .. } => "tension",
            Self::AntiInvariant { .. } => "anti-invariant",
        }
    }

    fn scenario(&self) -> &str {
        match self {
            Self::CheckStructure { scenario }
            | Self::CheckSubmersion { scenario }
            | Self::SlantAngle { scenario, .. }
            | Self::VerifyIdentities { scenario }
            | Self::VerifyInequality { scenario, .. }
            | Self::Tension { scenario }
            | Self::AntiInvariant { scenario } => scenario,
        }
    }
}

/// Result of one invocation, before any IO.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    /// None for help, version and argument errors.
    pub document: Option<ReportDocument>,
    pub stdout: String,
    pub stderr: String,
    pub out: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome {
                code,
                document: None,
                stdout,
                stderr,
                out: None,
            };
        }
    };
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        return Outcome {
            code: EXIT_USAGE,
            document: None,
            stdout: String::new(),
            stderr: format!("error: --tolerance-scale must be a positive number, got {}\n", cli.tolerance_scale),
            out: None,
        };
    }
    let ctx = Context {
        samples: cli.samples as usize,
        seed: cli.seed,
        scale: cli.tolerance_scale,
    };
    let mut doc = ReportDocument::new(cli.command.scenario(), cli.command.name(), ctx.seed, ctx.samples);
    let usage = execute(&cli.command, &ctx, &mut doc);
    let code = if usage {
        EXIT_USAGE
    } else if doc.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let stdout = match cli.format {
        Format::Json => doc.to_json(),
        Format::Text => doc.to_text(),
    };
    Outcome {
        code,
        document: Some(doc),
        stdout,
        stderr: String::new(),
        out: cli.out,
    }
}

struct Context {
    samples: usize,
    seed: u64,
    scale: f64,
}

impl Context {
    fn scaled(&self, report: &Report) -> Report {
        let mut out = Report {
            samples: report.samples,
            resampled: report.resampled,
            ..Report::default()
        };
        for c in report.checks.iter() {
            out.checks.push(self.scaled_check(c));
        }
        out
    }

    fn scaled_check(&self, c: &Check) -> Check {
        let mut c = c.clone();
        c.tolerance *= self.scale;
        c
    }

    fn push(&self, doc: &mut ReportDocument, report: &Report) {
        doc.push_report(&self.scaled(report));
    }

    fn push_check(&self, doc: &mut ReportDocument, check: &Check) {
        doc.push_check(&self.scaled_check(check));
    }

    fn slant(&self, f: &SubmersionMap, directions: usize) -> SlantReport {
        f.slant_constancy_with(self.samples, directions, self.seed, ANGLE_TOLERANCE * self.scale)
    }
}

fn geometry_error(doc: &mut ReportDocument, e: &GeometryError) {
    doc.push_error(e.kind(), e.to_string());
}

/// Records a load failure; true when it is a usage/parse problem.
fn load_error(doc: &mut ReportDocument, e: &ScenarioError) -> bool {
    doc.push_error(e.kind(), e.to_string());
    !matches!(e, ScenarioError::Geometry(_))
}

/// Runs the command into `doc`; true when the failure is a usage error.
fn execute(command: &Command, ctx: &Context, doc: &mut ReportDocument) -> bool {
    let loaded = match command {
        Command::CheckStructure { scenario } => load_scenario_unchecked(scenario),
        other => load_scenario(other.scenario()),
    };
    let scenario = match loaded {
        Ok(s) => s,
        Err(e) => return load_error(doc, &e),
    };
    doc.scenario = scenario.name().to_string();
    if let Command::CheckStructure { .. } = command {
        doc.set("dimension", scenario.structure.dim());
        match scenario.structure.check_structure(ctx.samples, ctx.seed) {
            Ok(r) => ctx.push(doc, &r),
            Err(e) => geometry_error(doc, &e),
        }
        return false;
    }
    let f = match scenario.require_submersion() {
        Ok(f) => f,
        Err(e) => {
            geometry_error(doc, &e);
            return false;
        }
    };
    doc.set("source_dim", f.source_dim());
    doc.set("target_dim", f.target_dim());
    match command {
        Command::CheckStructure { .. } => unreachable!("handled above"),
        Command::CheckSubmersion { .. } => check_submersion(f, ctx, doc),
        Command::SlantAngle { directions, .. } => slant_angle(&scenario, f, *directions, ctx, doc),
        Command::VerifyIdentities { .. } => verify_identities(f, ctx, doc),
        Command::VerifyInequality { case, c, .. } => {
            let case = match case {
                CaseArg::Vertical => InequalityCase::Vertical,
                CaseArg::Horizontal => InequalityCase::Horizontal,
            };
            verify_inequality(f, case, *c, ctx, doc)
        }
        Command::Tension { .. } => tension(f, ctx, doc),
        Command::AntiInvariant { .. } => anti_invariant(f, ctx, doc),
    }
    false
}

fn check_submersion(f: &SubmersionMap, ctx: &Context, doc: &mut ReportDocument) {
    ctx.push(doc, &f.check_axioms(ctx.samples, ctx.seed));
    match f.check_decomposition_identities(ctx.samples, ctx.seed) {
        Ok(r) => ctx.push(doc, &r),
        Err(e) => geometry_error(doc, &e),
    }
}

fn expected_check(name: &str, matches: bool) -> Check {
    let mut c = Check::new(name, 0.0);
    c.record(if matches { 0.0 } else { 1.0 });
    c
}

fn slant_angle(scenario: &Scenario, f: &SubmersionMap, directions: usize, ctx: &Context, doc: &mut ReportDocument) {
    let slant = ctx.slant(f, directions);
    doc.set("theta_mean", slant.mean);
    doc.set("theta_max_deviation", slant.max_deviation);
    doc.set("verdict", slant.verdict.as_str());
    doc.set("xi_position", slant.xi_position.as_str());
    doc.set("directions", slant.directions);
    doc.set("angle_samples", slant.angles.len());

    let mut constancy = Check::new("slant angle constant", slant.tolerance);
    constancy.record(slant.max_deviation);
    doc.push_check(&constancy);
    if !slant.verdict.is_slant() {
        doc.push_error(
            "NotSlant",
            format!("max deviation {:e}, xi {}", slant.max_deviation, slant.xi_position),
        );
    }

    let mut provenance = Map::new();
    if let Some(e) = scenario.expected("theta") {
        provenance.insert("theta".into(), e.provenance.clone().into());
        if let Some(theta) = e.value.as_f64() {
            let mut c = Check::new("theta = expected", EXPECTED_THETA_TOLERANCE);
            c.record(slant.mean - theta);
            ctx.push_check(doc, &c);
        }
    }
    for (key, actual) in [("verdict", slant.verdict.as_str()), ("xi_position", slant.xi_position.as_str())] {
        if let Some(e) = scenario.expected(key) {
            provenance.insert(key.into(), e.provenance.clone().into());
            doc.push_check(&expected_check(&format!("{key} = expected"), e.value.as_str() == Some(actual)));
        }
    }

    if slant.verdict.is_slant() {
        for r in [f.check_psi_square(&slant, ctx.seed), f.check_norm_relations(&slant, ctx.seed)] {
            match r {
                Ok(r) => ctx.push(doc, &r),
                Err(e) => geometry_error(doc, &e),
            }
        }
        doc.set("lambda", slant.lambda());
    }
    if slant.is_proper() {
        match f.check_frames(&slant) {
            Ok(r) => ctx.push(doc, &r),
            Err(e) => geometry_error(doc, &e),
        }
    }
    if slant.verdict.is_slant() && slant.xi_position != XiPosition::Oblique {
        let p = Point::from_coords(slant.points[0].clone());
        match f.mu_distribution(&slant, &p) {
            Ok(mu) => {
                doc.set("mu_dim", mu.dim);
                if let Some(e) = scenario.expected("mu_dim") {
                    provenance.insert("mu_dim".into(), e.provenance.clone().into());
                    let want = e.value.as_u64().map(|d| d as usize);
                    doc.push_check(&expected_check("mu_dim = expected", want == Some(mu.dim)));
                }
            }
            Err(e) => geometry_error(doc, &e),
        }
    }
    if !provenance.is_empty() {
        doc.set("provenance", Value::Object(provenance));
    }
}

fn verify_identities(f: &SubmersionMap, ctx: &Context, doc: &mut ReportDocument) {
    match f.verify_curvature_identities(ctx.samples, ctx.seed) {
        Ok(r) => ctx.push(doc, &r),
        Err(e) => geometry_error(doc, &e),
    }
    let slant = ctx.slant(f, DEFAULT_DIRECTIONS);
    doc.set("verdict", slant.verdict.as_str());
    doc.set("xi_position", slant.xi_position.as_str());
    if slant.verdict.is_slant() {
        match f.check_slant_derivatives(&slant, ctx.seed) {
            Ok(r) => ctx.push(doc, &r),
            Err(e) => geometry_error(doc, &e),
        }
    }
    if slant.xi_position == XiPosition::Horizontal {
        match f.check_horizontal_xi(ctx.samples, ctx.seed) {
            Ok(r) => ctx.push(doc, &r),
            Err(e) => geometry_error(doc, &e),
        }
    }
}

/// Folds `c` into the check of the same name in `acc`.
fn accumulate(acc: &mut Vec<Check>, c: &Check) {
    match acc.iter_mut().find(|a| a.name == c.name) {
        Some(a) => {
            a.max_defect = if a.max_defect.is_nan() || c.max_defect.is_nan() {
                f64::NAN
            } else {
                a.max_defect.max(c.max_defect)
            };
            a.samples += c.samples;
        }
        None => acc.push(c.clone()),
    }
}

fn verify_inequality(f: &SubmersionMap, case: InequalityCase, c: f64, ctx: &Context, doc: &mut ReportDocument) {
    doc.set("case", case.as_str());
    doc.set("c", c);
    let slant = ctx.slant(f, DEFAULT_DIRECTIONS);
    doc.set("theta", slant.mean);
    doc.set("verdict", slant.verdict.as_str());
    let mut checks: Vec<Check> = Vec::new();
    let mut flags: Vec<(String, bool)> = Vec::new();
    let (mut slack_min, mut slack_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut flags_imply_equality = true;
    for x in &slant.points {
        let p = Point::from_coords(x.clone());
        let r = match f.inequality(case, &slant, &p, c) {
            Ok(r) => r,
            Err(e) => {
                geometry_error(doc, &e);
                return;
            }
        };
        for check in r.checks.iter() {
            accumulate(&mut checks, check);
        }
        if flags.is_empty() {
            flags = r.flags.clone();
        } else {
            for (acc, (_, b)) in flags.iter_mut().zip(&r.flags) {
                acc.1 &= *b;
            }
        }
        slack_min = slack_min.min(r.slack);
        slack_max = slack_max.max(r.slack);
        flags_imply_equality &= r.flags_imply_equality();
        if !doc.extras.contains_key("coefficient") {
            doc.set("coefficient", r.coefficient);
        }
    }
    for check in &checks {
        ctx.push_check(doc, check);
    }
    doc.set("slack_min", slack_min);
    doc.set("slack_max", slack_max);
    let flag_map: Map<String, Value> = flags.into_iter().map(|(k, b)| (k, Value::Bool(b))).collect();
    doc.set("equality_flags", Value::Object(flag_map));
    doc.set("flags_imply_equality", flags_imply_equality);
}

/// `frame` recombined by a random orthogonal matrix.
fn rotated_frame(frame: &[DVector<f64>], rng: &mut Sampler) -> Vec<DVector<f64>> {
    let n = frame.len();
    let q = rng.matrix(n).qr().q();
    (0..n)
        .map(|j| (0..n).fold(DVector::zeros(frame[0].len()), |acc, i| acc + &frame[i] * q[(i, j)]))
        .collect()
}

fn tension(f: &SubmersionMap, ctx: &Context, doc: &mut ReportDocument) {
    let (points, resampled) = f.sample_points(ctx.samples, ctx.seed);
    let mut rng = Sampler::new(ctx.seed ^ 0x7e45);
    let mut independence = Check::new("tension field frame-independent", FRAME_INDEPENDENCE_TOLERANCE);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in &points {
        let p = Point::from_coords(x.clone());
        let frame = match f.split(&p) {
            Ok(s) => s.frame(),
            Err(e) => return geometry_error(doc, &e),
        };
        let other = rotated_frame(&frame, &mut rng);
        let (tau, tau2) = match (f.tension_field(&p), f.tension_field_in_frame(&p, &other)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return geometry_error(doc, &e),
        };
        independence.record((&tau - &tau2).amax());
        let h = f.target().metric().at(&f.map_at(x));
        let size = linalg::norm(&h, &tau);
        lo = lo.min(size);
        hi = hi.max(size);
    }
    ctx.push_check(doc, &independence);
    doc.set("tension_norm_min", lo);
    doc.set("tension_norm_max", hi);
    doc.set("harmonic", hi <= HARMONIC_TOLERANCE * ctx.scale);
    doc.set("resampled", resampled);
}

fn anti_invariant(f: &SubmersionMap, ctx: &Context, doc: &mut ReportDocument) {
    let slant = ctx.slant(f, DEFAULT_DIRECTIONS);
    doc.set("theta", slant.mean);
    doc.set("verdict", slant.verdict.as_str());
    if slant.verdict != Verdict::AntiInvariant {
        doc.push_error("NotAntiInvariant", format!("verdict {}", slant.verdict));
    }
    match f.anti_invariant_checks(ctx.samples, ctx.seed) {
        Ok(r) => {
            ctx.push(doc, &r.report);
            doc.set("note", r.note.as_str());
            doc.set("fibres_totally_geodesic", r.fibres_totally_geodesic);
            doc.set("max_abs_phi_sectional", r.max_abs_phi_sectional);
        }
        Err(e) => geometry_error(doc, &e),
    }
}
