//! ‖H‖² against the fibre scalar curvature for proper slant submersions
//! from five-dimensional cosymplectic space forms M(c).
//!
//! With ξ vertical (target dimension 2), in the frame e1, e2 = sec θ ψe1,
//! e3 = ξ, e4 = csc θ ωe1, e5 = csc θ ωe2 and e4 ∥ H:
//!
//! ```text
//! ‖H‖² = (T11⁴ + T22⁴)²/9
//! K̂(e1∧e2) = c/4 (1 + 3cos²θ) + T11⁴T22⁴ − (T11⁵)² − (T12⁴)² − (T22⁴)²
//! ‖H‖² ≥ 8/9 (τ̂ − c/4 (1 + 3cos²θ))
//! ```
//!
//! With ξ horizontal (target dimension 3), e1, e2 = sec θ ψe1,
//! e3 = csc θ ωe1, e4 = csc θ ωe2, e5 = ξ:
//!
//! ```text
//! ‖H‖² = (T11⁴ + T22⁴)²/4
//! K̂(e1∧e2) = c/4 (1 + 3cos²θ) + T11⁴T22⁴ − (T11³)² − (T12³)² − (T22³)²
//! ‖H‖² ≥ 1/4 (τ̂ − c/4 (1 + 3cos²θ))
//! ```
//!
//! Here T_ij^α = g(T(e_i, e_j), e_α).

use std::collections::BTreeMap;

use nalgebra::DVector;

use super::{SlantReport, XiPosition};
use crate::check::{Check, CheckSet};
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::Point;
use crate::submersion::SubmersionMap;

/// Slack tolerance and the threshold for equality flags.
pub const INEQUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityCase {
    /// ξ vertical, M⁵ → N².
    Vertical,
    /// ξ horizontal, M⁵ → N³.
    Horizontal,
}

impl InequalityCase {
    pub fn coefficient(&self) -> f64 {
        match self {
            Self::Vertical => 8.0 / 9.0,
            Self::Horizontal => 0.25,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Vertical => "vertical",
            Self::Horizontal => "horizontal",
        }
    }

    fn target_dim(&self) -> usize {
        match self {
            Self::Vertical => 2,
            Self::Horizontal => 3,
        }
    }
}

/// T_ij^α with 1-based frame indices, symmetric in (i, j); missing entries
/// are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TTable {
    entries: BTreeMap<(usize, usize, usize), f64>,
}

impl TTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: &[((usize, usize, usize), f64)]) -> Self {
        let mut t = Self::new();
        for &((i, j, a), v) in entries {
            t.set(i, j, a, v);
        }
        t
    }

    pub fn set(&mut self, i: usize, j: usize, alpha: usize, value: f64) {
        self.entries.insert((i.min(j), i.max(j), alpha), value);
    }

    pub fn get(&self, i: usize, j: usize, alpha: usize) -> f64 {
        self.entries.get(&(i.min(j), i.max(j), alpha)).copied().unwrap_or(0.0)
    }

    /// Stored entries with i ≤ j.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub case: InequalityCase,
    /// None for a synthetic T table.
    pub point: Option<Point>,
    pub h_squared: f64,
    pub tau_hat: f64,
    pub c: f64,
    pub theta: f64,
    pub coefficient: f64,
    pub bound: f64,
    /// ‖H‖² − bound.
    pub slack: f64,
    pub components: TTable,
    /// Equality conditions stated for the frame, each evaluated at
    /// [`INEQUALITY_TOLERANCE`].
    pub flags: Vec<(String, bool)>,
    /// Consistency checks on the geometric evaluation (empty when
    /// synthetic).
    pub checks: CheckSet,
}

fn ambient_term(c: f64, theta: f64) -> f64 {
    c / 4.0 * (1.0 + 3.0 * theta.cos().powi(2))
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= INEQUALITY_TOLERANCE
}

impl InequalityReport {
    /// Evaluates the reduced algebra on a hand-set T table, with no geometry.
    pub fn synthetic(case: InequalityCase, table: &TTable, c: f64, theta: f64) -> Self {
        let t = |i, j, a| table.get(i, j, a);
        let amb = ambient_term(c, theta);
        let (h_squared, k12) = match case {
            InequalityCase::Vertical => (
                (t(1, 1, 4) + t(2, 2, 4)).powi(2) / 9.0,
                amb + t(1, 1, 4) * t(2, 2, 4) - t(1, 1, 5).powi(2) - t(1, 2, 4).powi(2) - t(2, 2, 4).powi(2),
            ),
            InequalityCase::Horizontal => (
                (t(1, 1, 4) + t(2, 2, 4)).powi(2) / 4.0,
                amb + t(1, 1, 4) * t(2, 2, 4) - t(1, 1, 3).powi(2) - t(1, 2, 3).powi(2) - t(2, 2, 3).powi(2),
            ),
        };
        Self::assemble(case, None, h_squared, k12, c, theta, table.clone(), CheckSet::new())
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        case: InequalityCase,
        point: Option<Point>,
        h_squared: f64,
        tau_hat: f64,
        c: f64,
        theta: f64,
        components: TTable,
        checks: CheckSet,
    ) -> Self {
        let coefficient = case.coefficient();
        let bound = coefficient * (tau_hat - ambient_term(c, theta));
        let slack = h_squared - bound;
        let flags = equality_flags(case, &components);
        Self {
            case,
            point,
            h_squared,
            tau_hat,
            c,
            theta,
            coefficient,
            bound,
            slack,
            components,
            flags,
            checks,
        }
    }

    pub fn flags_hold(&self) -> bool {
        self.flags.iter().all(|(_, b)| *b)
    }

    pub fn inequality_holds(&self) -> bool {
        self.slack >= -INEQUALITY_TOLERANCE
    }

    pub fn is_equality(&self) -> bool {
        self.slack.abs() <= INEQUALITY_TOLERANCE
    }

    /// Forward direction only: flags true ⇒ equality.
    pub fn flags_imply_equality(&self) -> bool {
        !self.flags_hold() || self.slack <= INEQUALITY_TOLERANCE
    }
}

fn equality_flags(case: InequalityCase, t: &TTable) -> Vec<(String, bool)> {
    let g = |i, j, a| t.get(i, j, a);
    match case {
        InequalityCase::Vertical => vec![
            ("T11^4 = 3 T22^4".into(), near(g(1, 1, 4), 3.0 * g(2, 2, 4))),
            ("T12^4 = 0".into(), near(g(1, 2, 4), 0.0)),
            ("T11^5 = 0".into(), near(g(1, 1, 5), 0.0)),
        ],
        InequalityCase::Horizontal => {
            let fifth = [(1, 1), (1, 2), (2, 2)].iter().all(|&(i, j)| near(g(i, j, 5), 0.0));
            vec![
                ("T11^4 = -T22^4".into(), near(g(1, 1, 4), -g(2, 2, 4))),
                ("T11^3 = 0".into(), near(g(1, 1, 3), 0.0)),
                ("T12^3 = 0".into(), near(g(1, 2, 3), 0.0)),
                ("T22^3 = 0".into(), near(g(2, 2, 3), 0.0)),
                ("T_ij^5 = 0".into(), fifth),
            ]
        }
    }
}

impl SubmersionMap {
    pub fn inequality_vertical(&self, slant: &SlantReport, p: &Point, c: f64) -> Result<InequalityReport> {
        self.inequality(InequalityCase::Vertical, slant, p, c)
    }

    pub fn inequality_horizontal(&self, slant: &SlantReport, p: &Point, c: f64) -> Result<InequalityReport> {
        self.inequality(InequalityCase::Horizontal, slant, p, c)
    }

    /// Evaluates every term of the inequality in the adapted frame at `p`,
    /// with e1 chosen so that the first ω-direction is parallel to H.
    pub fn inequality(&self, case: InequalityCase, slant: &SlantReport, p: &Point, c: f64) -> Result<InequalityReport> {
        if self.source_dim() != 5 || self.target_dim() != case.target_dim() {
            return Err(GeometryError::WrongDimensions(format!(
                "{} case needs M^5 -> N^{}, found M^{} -> N^{}",
                case.as_str(),
                case.target_dim(),
                self.source_dim(),
                self.target_dim()
            )));
        }
        slant.require_proper()?;
        let x = p.coords();
        self.source().model().require_stencil(x, self.fibre_reach())?;
        let sp = self.slant_point(x)?;
        match (case, sp.xi_position()) {
            (InequalityCase::Vertical, XiPosition::Vertical) | (InequalityCase::Horizontal, XiPosition::Horizontal) => {}
            (InequalityCase::Vertical, _) => return Err(GeometryError::XiNotVertical),
            (InequalityCase::Horizontal, _) => return Err(GeometryError::XiNotHorizontal),
        }
        let g = sp.g().clone();
        let ip = |a: &DVector<f64>, b: &DVector<f64>| linalg::inner(&g, a, b);
        let h = self.mean_curvature_at(x)?;
        // e4 ∥ H: ωe1 ∥ H with ξ vertical, ωe2 ∥ H with ξ horizontal. On the
        // ξ-free vertical part ω⁻¹ ∝ −B and ψ⁻¹ ∝ −ψ.
        let first = (sp.norm(&h) > 1e-9).then(|| match case {
            InequalityCase::Vertical => -sp.vphi(&h),
            InequalityCase::Horizontal => sp.vphi(&sp.vphi(&h)),
        });
        let frame = self.adapted_frame_with(slant, p, first.as_ref())?;
        let e = frame.frame();
        let k = frame.vertical.len();

        let mut table = TTable::new();
        let mut trace = DVector::zeros(self.source_dim());
        for i in 0..k {
            for j in i..k {
                let t = self.t_at(x, &e[i], &e[j])?;
                if i == j {
                    trace += &t;
                }
                for (alpha, ea) in e.iter().enumerate().take(5).skip(k) {
                    table.set(i + 1, j + 1, alpha + 1, ip(&t, ea));
                }
            }
        }
        let t = |i, j, a| table.get(i, j, a);
        let h_squared = ip(&h, &h);
        let fibre = self.fibre_curvature(p)?;
        let tau_hat = fibre.scalar_intrinsic;
        let k12 = self.fibre_sectional(p, &e[0], &e[1])?;
        let amb = ambient_term(c, slant.mean);

        let mut checks = CheckSet::new();
        let mut holds = Check::new("|H|^2 >= bound", INEQUALITY_TOLERANCE);
        holds.record((-(h_squared - case.coefficient() * (tau_hat - amb))).max(0.0));
        checks.push(holds);
        let mut from_frame = Check::new("|H|^2 from the frame components", INEQUALITY_TOLERANCE);
        let trace_norm = ip(&trace, &trace) / (k * k) as f64;
        from_frame.record(trace_norm - h_squared);
        checks.push(from_frame);
        let mut route = Check::new("K(e1^e2) from T components = intrinsic K(e1^e2)", 1e-4);
        let relation = match case {
            InequalityCase::Vertical => {
                route.record(amb + t(1, 1, 4) * t(2, 2, 4) + t(1, 1, 5) * t(2, 2, 5) - t(1, 2, 4).powi(2) - t(1, 2, 5).powi(2) - k12);
                let mut flat_xi = Check::new("K(e1^xi) = K(e2^xi) = 0", 1e-4);
                flat_xi.record(self.fibre_sectional(p, &e[0], &e[2])?);
                flat_xi.record(self.fibre_sectional(p, &e[1], &e[2])?);
                checks.push(flat_xi);
                let mut relation = Check::new("T22^4 = T12^5", 1e-5);
                relation.record(t(2, 2, 4) - t(1, 2, 5));
                relation
            }
            InequalityCase::Horizontal => {
                route.record(amb + t(1, 1, 3) * t(2, 2, 3) + t(1, 1, 4) * t(2, 2, 4) - t(1, 2, 3).powi(2) - t(1, 2, 4).powi(2) - k12);
                let mut relation = Check::new("T22^3 = T12^4", 1e-5);
                relation.record(t(2, 2, 3) - t(1, 2, 4));
                let mut fifth = Check::new("T_ij^5 = 0", 1e-7);
                for (i, j) in [(1, 1), (1, 2), (2, 2)] {
                    fifth.record(t(i, j, 5));
                }
                checks.push(fifth);
                relation
            }
        };
        checks.push(route);
        checks.push(relation);
        Ok(InequalityReport::assemble(case, Some(p.clone()), h_squared, tau_hat, c, slant.mean, table, checks))
    }
}
