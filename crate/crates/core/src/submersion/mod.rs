//! Riemannian submersions from an almost contact metric manifold: the
//! differential, the vertical/horizontal split and the submersion axioms.
//!
//! Projectors are computed from the smooth formula
//! `ℋ = G⁻¹Jᵀ(JG⁻¹Jᵀ)⁻¹J`, `𝒱 = I − ℋ`, so they can be differentiated
//! in the base point without any basis-choice ambiguity.

mod fibre;
mod harmonic;
mod identities;
mod oneill;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::check::{Check, CheckSet, Report};
use crate::connection::LeviCivita;
use crate::contact::AlmostContactStructure;
use crate::diff::DiffScheme;
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::{ManifoldModel, Point};
use crate::sampling::Sampler;

pub use fibre::FibreSample;
pub use identities::IdentityOptions;
pub use oneill::ONeillSample;

/// Tolerance for the horizontal isometry axiom.
pub const ISOMETRY_TOLERANCE: f64 = 1e-8;
/// Tolerance for projector identities.
pub const PROJECTOR_TOLERANCE: f64 = 1e-9;
/// Tolerance for first-order tensor identities (T, A, ∇F_*).
pub const TENSOR_TOLERANCE: f64 = 1e-6;
/// Tolerance for curvature identities with one nested derivative.
pub const CURVATURE_IDENTITY_TOLERANCE: f64 = 1e-4;
/// Tolerance for identities involving ∇T and ∇A.
pub const DEEP_IDENTITY_TOLERANCE: f64 = 1e-3;

pub type MapEval = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type JacobianEval = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// A smooth map F: M → N from an almost contact metric manifold.
#[derive(Clone)]
pub struct SubmersionMap {
    source: AlmostContactStructure,
    target: LeviCivita,
    map: MapEval,
    jacobian: Option<JacobianEval>,
}

impl fmt::Debug for SubmersionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmersionMap")
            .field("source", &self.source.model().name())
            .field("target", &self.target.model().name())
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

/// Projectors onto ker F_* and its g-orthogonal complement.
#[derive(Debug, Clone, PartialEq)]
pub struct Projectors {
    pub vertical: DMatrix<f64>,
    pub horizontal: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalHorizontalSplit {
    pub point: Point,
    /// g-orthonormal basis of ker F_*.
    pub vertical: Vec<DVector<f64>>,
    /// g-orthonormal basis of (ker F_*)^⊥.
    pub horizontal: Vec<DVector<f64>>,
    pub projectors: Projectors,
    pub metric: DMatrix<f64>,
}

impl VerticalHorizontalSplit {
    pub fn vertical_dim(&self) -> usize {
        self.vertical.len()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.horizontal.len()
    }

    pub fn vertical_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.projectors.vertical * v
    }

    pub fn horizontal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.projectors.horizontal * v
    }

    /// Vertical basis followed by the horizontal basis.
    pub fn frame(&self) -> Vec<DVector<f64>> {
        self.vertical.iter().chain(&self.horizontal).cloned().collect()
    }

    /// Largest defect among 𝒱 + ℋ = I, idempotence, g-self-adjointness and
    /// 𝒱U = U on the vertical basis.
    pub fn invariant_defect(&self) -> f64 {
        let n = self.metric.nrows();
        let (v, h, g) = (&self.projectors.vertical, &self.projectors.horizontal, &self.metric);
        let mut worst = (v + h - DMatrix::identity(n, n)).amax();
        worst = worst.max((v * v - v).amax()).max((h * h - h).amax());
        for p in [v, h] {
            let gp = g * p;
            worst = worst.max((&gp - gp.transpose()).amax());
        }
        for u in &self.vertical {
            worst = worst.max((v * u - u).amax());
        }
        for x in &self.horizontal {
            worst = worst.max((h * x - x).amax());
        }
        worst
    }
}

impl SubmersionMap {
    pub fn new(
        source: AlmostContactStructure,
        target: ManifoldModel,
        map: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(source, target, Arc::new(map), None)
    }

    /// Like [`SubmersionMap::new`] with an exact Jacobian evaluator.
    pub fn with_jacobian(
        source: AlmostContactStructure,
        target: ManifoldModel,
        map: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        jacobian: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(source, target, Arc::new(map), Some(Arc::new(jacobian)))
    }

    fn build(
        source: AlmostContactStructure,
        target: ManifoldModel,
        map: MapEval,
        jacobian: Option<JacobianEval>,
    ) -> Result<Self> {
        if target.dim() > source.dim() || target.dim() == 0 {
            return Err(GeometryError::WrongDimensions(format!(
                "target dimension {} must lie in 1..={}",
                target.dim(),
                source.dim()
            )));
        }
        let config = *source.connection().config();
        Ok(Self {
            source,
            target: LeviCivita::with_config(target, config),
            map,
            jacobian,
        })
    }

    pub fn source(&self) -> &AlmostContactStructure {
        &self.source
    }

    pub fn target(&self) -> &ManifoldModel {
        self.target.model()
    }

    pub fn target_connection(&self) -> &LeviCivita {
        &self.target
    }

    pub fn source_connection(&self) -> &LeviCivita {
        self.source.connection()
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn source_dim(&self) -> usize {
        self.source.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target.model().dim()
    }

    pub fn vertical_dim(&self) -> usize {
        self.source_dim() - self.target_dim()
    }

    pub fn map_at(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.map)(x)
    }

    pub fn jacobian_at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match &self.jacobian {
            Some(j) => j(x),
            None => {
                let n = self.source_dim();
                let first = &self.source_connection().config().first;
                let cols: Vec<DVector<f64>> = (0..n).map(|i| first.partial(|y| self.map_at(y), x, i)).collect();
                linalg::columns(&cols, self.target_dim())
            }
        }
    }

    /// Scheme for differentiating quantities built from the Jacobian.
    pub(crate) fn field_scheme(&self) -> DiffScheme {
        let config = self.source_connection().config();
        if self.jacobian.is_some() {
            config.first
        } else {
            config.outer
        }
    }

    /// Stencil reach needed by the deepest nested computation.
    pub(crate) fn reach(&self) -> f64 {
        self.source_connection().config().reach()
    }

    pub(crate) fn require_stencil(&self, x: &DVector<f64>) -> Result<()> {
        self.source.model().require_stencil(x, self.reach())
    }

    /// Jacobian F_* at `p`; fails unless it has full rank.
    pub fn differential(&self, p: &Point) -> Result<DMatrix<f64>> {
        let x = p.coords();
        if !self.source.model().domain().contains(x) {
            return Err(GeometryError::PointOutOfDomain {
                coords: x.iter().copied().collect(),
            });
        }
        if self.jacobian.is_none() {
            self.source
                .model()
                .require_stencil(x, self.source_connection().config().first.reach())?;
        }
        let j = self.jacobian_at(x);
        let rank = linalg::rank(&j, linalg::RANK_TOLERANCE);
        if rank < self.target_dim() {
            return Err(GeometryError::RankDeficient {
                rank,
                expected: self.target_dim(),
            });
        }
        Ok(j)
    }

    pub(crate) fn projectors_at(&self, x: &DVector<f64>) -> Result<Projectors> {
        let n = self.source_dim();
        let j = self.jacobian_at(x);
        let g_inv = self.source.model().metric().inverse_at(x)?;
        let lift = &g_inv * j.transpose();
        let gram = &j * &lift;
        let rank = linalg::rank(&gram, linalg::RANK_TOLERANCE);
        let inv = gram.clone().try_inverse().filter(|_| rank == self.target_dim());
        let Some(inv) = inv else {
            return Err(GeometryError::RankDeficient {
                rank,
                expected: self.target_dim(),
            });
        };
        let horizontal = lift * inv * j;
        let vertical = DMatrix::identity(n, n) - &horizontal;
        Ok(Projectors { vertical, horizontal })
    }

    /// Projectors with NaN entries where they are undefined, for use inside
    /// difference stencils.
    pub(crate) fn projectors_or_nan(&self, x: &DVector<f64>) -> Projectors {
        self.projectors_at(x).unwrap_or_else(|_| {
            let n = self.source_dim();
            Projectors {
                vertical: DMatrix::from_element(n, n, f64::NAN),
                horizontal: DMatrix::from_element(n, n, f64::NAN),
            }
        })
    }

    /// Horizontal lift of the constant target vector `w`: the basic field
    /// with F_* h = w.
    pub(crate) fn basic_lift_at(&self, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let j = self.jacobian_at(x);
        let Ok(g_inv) = self.source.model().metric().inverse_at(x) else {
            return DVector::from_element(self.source_dim(), f64::NAN);
        };
        let lift = &g_inv * j.transpose();
        match (&j * &lift).lu().solve(w) {
            Some(c) => lift * c,
            None => DVector::from_element(self.source_dim(), f64::NAN),
        }
    }

    pub(crate) fn split_at(&self, x: &DVector<f64>) -> Result<VerticalHorizontalSplit> {
        let j = self.jacobian_at(x);
        let g = self.source.model().metric().at(x);
        let kernel = linalg::nullspace(&j, linalg::RANK_TOLERANCE);
        if kernel.len() != self.vertical_dim() {
            return Err(GeometryError::RankDeficient {
                rank: self.source_dim() - kernel.len(),
                expected: self.target_dim(),
            });
        }
        let vertical = linalg::gram_schmidt(&g, &kernel)?;
        let horizontal = linalg::orthogonal_complement(&g, &vertical)?;
        let projectors = self.projectors_at(x)?;
        Ok(VerticalHorizontalSplit {
            point: Point::from_coords(x.clone()),
            vertical,
            horizontal,
            projectors,
            metric: g,
        })
    }

    /// Vertical space = kernel of F_*, horizontal space = its g-orthogonal
    /// complement, both g-orthonormalised.
    pub fn split(&self, p: &Point) -> Result<VerticalHorizontalSplit> {
        self.differential(p)?;
        self.split_at(p.coords())
    }

    /// Seeded points whose image lies in the target domain and where every
    /// field is finite. Returns the points and the number of rejections.
    pub fn sample_points(&self, samples: usize, seed: u64) -> (Vec<DVector<f64>>, usize) {
        let mut sampler = Sampler::new(seed);
        let mut points = Vec::with_capacity(samples);
        let mut rejected = 0;
        let limit = 20 * samples.max(1);
        while points.len() < samples && rejected < limit {
            let x = sampler.point(self.source.model().domain());
            let y = self.map_at(&x);
            let finite = y.iter().all(|v| v.is_finite())
                && self.source.metric_at(&x).iter().all(|v| v.is_finite())
                && self.source.phi_at(&x).iter().all(|v| v.is_finite())
                && self.source.xi_at(&x).iter().all(|v| v.is_finite());
            if finite && self.target().domain().contains(&y) {
                points.push(x);
            } else {
                rejected += 1;
            }
        }
        (points, rejected)
    }

    /// Rank (S1), horizontal isometry (S2) and projector identities over
    /// seeded points.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> Report {
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rank = Check::new("rank F_* = dim N", 0.0);
        let mut isometry = Check::new("g_N(F_*X, F_*Y) = g_M(X, Y)", ISOMETRY_TOLERANCE);
        let mut projectors = Check::new("projector identities", PROJECTOR_TOLERANCE);
        for x in &points {
            let j = self.jacobian_at(x);
            let r = linalg::rank(&j, linalg::RANK_TOLERANCE);
            rank.record((self.target_dim() - r.min(self.target_dim())) as f64);
            match self.split_at(x) {
                Ok(split) => {
                    let gn = self.target().metric().at(&self.map_at(x));
                    for a in &split.horizontal {
                        for b in &split.horizontal {
                            let lhs = linalg::inner(&gn, &(&j * a), &(&j * b));
                            isometry.record(lhs - linalg::inner(&split.metric, a, b));
                        }
                    }
                    projectors.record(split.invariant_defect());
                }
                Err(_) => {
                    isometry.record(f64::NAN);
                    projectors.record(f64::NAN);
                }
            }
        }
        let mut checks = CheckSet::new();
        for c in [rank, isometry, projectors] {
            checks.push(c);
        }
        Report {
            checks,
            samples: points.len(),
            resampled,
        }
    }
}
