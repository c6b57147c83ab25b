//! Fibre geometry: induced metric, intrinsic curvature and scalar curvature.
//!
//! Two independent routes to the fibre sectional curvature K̂:
//!
//! * (a) from the ambient curvature, K̂ = K − ‖T_U V‖² + g(T_U U, T_V V);
//! * (b) intrinsically, by parameterising the fibre through p as
//!   `s ↦ p + Σ s_a U_a + ℋ-correction` (Newton along the horizontal basis
//!   so that F stays equal to F(p)) and differentiating the induced metric.

use nalgebra::{DMatrix, DVector};

use super::SubmersionMap;
use crate::connection::{sectional_from, LeviCivita, RiemannTensor};
use crate::diff::DiffConfig;
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::{DomainBox, ManifoldModel, MetricField, Point};

const NEWTON_TOLERANCE: f64 = 1e-14;
const NEWTON_MAX_STEPS: usize = 50;

#[derive(Debug, Clone)]
pub struct FibreSample {
    pub point: Point,
    /// g-orthonormal vertical basis, the coordinate frame of the fibre chart.
    pub vertical: Vec<DVector<f64>>,
    /// Induced metric ĝ on the vertical basis.
    pub induced_metric: DMatrix<f64>,
    /// K̂ over vertical basis pairs (a < b), route (a).
    pub sectional_ambient: Vec<((usize, usize), f64)>,
    /// K̂ over vertical basis pairs (a < b), route (b).
    pub sectional_intrinsic: Vec<((usize, usize), f64)>,
    pub scalar_ambient: f64,
    pub scalar_intrinsic: f64,
    /// Mean curvature vector H.
    pub mean_curvature: DVector<f64>,
    /// Intrinsic curvature tensor in the chart with coordinate frame `vertical`.
    pub intrinsic: Option<RiemannTensor>,
}

impl FibreSample {
    /// Largest |route (a) − route (b)| over the basis pairs.
    pub fn route_disagreement(&self) -> f64 {
        self.sectional_ambient
            .iter()
            .zip(&self.sectional_intrinsic)
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Local chart of the fibre through a base point.
#[derive(Clone)]
struct FibreChart {
    map: SubmersionMap,
    base: DVector<f64>,
    target: DVector<f64>,
    vertical: DMatrix<f64>,
    horizontal: DMatrix<f64>,
}

impl FibreChart {
    /// Point of the fibre over `s`.
    fn point(&self, s: &DVector<f64>) -> DVector<f64> {
        let mut x = &self.base + &self.vertical * s;
        for _ in 0..NEWTON_MAX_STEPS {
            let residual = self.map.map_at(&x) - &self.target;
            if residual.amax() <= NEWTON_TOLERANCE * (1.0 + self.target.amax()) {
                break;
            }
            let jh = self.map.jacobian_at(&x) * &self.horizontal;
            match jh.lu().solve(&residual) {
                Some(c) => x -= &self.horizontal * c,
                None => return DVector::from_element(x.len(), f64::NAN),
            }
        }
        x
    }

    /// Induced metric ĝ(s); the chart tangents solve J(U + ℋc) = 0.
    fn metric(&self, s: &DVector<f64>) -> DMatrix<f64> {
        let x = self.point(s);
        let j = self.map.jacobian_at(&x);
        let jh = &j * &self.horizontal;
        let tangent = match jh.lu().solve(&(&j * &self.vertical)) {
            Some(c) => &self.vertical - &self.horizontal * c,
            None => return DMatrix::from_element(s.len(), s.len(), f64::NAN),
        };
        let g = self.map.source().metric_at(&x);
        tangent.transpose() * g * tangent
    }
}

impl SubmersionMap {
    /// Intrinsic curvature of the fibre through `x`, in the chart whose
    /// coordinate frame at s = 0 is the given vertical basis.
    pub(crate) fn intrinsic_fibre_curvature(
        &self,
        x: &DVector<f64>,
        vertical: &[DVector<f64>],
        horizontal: &[DVector<f64>],
    ) -> Result<RiemannTensor> {
        let n = self.source_dim();
        let k = vertical.len();
        let chart = FibreChart {
            map: self.clone(),
            base: x.clone(),
            target: self.map_at(x),
            vertical: linalg::columns(vertical, n),
            horizontal: linalg::columns(horizontal, n),
        };
        let metric = MetricField::new(k, move |s| chart.metric(s));
        let model = ManifoldModel::new("fibre", metric, DomainBox::symmetric(k, 1.0))?;
        let intrinsic = self.source_connection().config().intrinsic;
        let config = DiffConfig {
            first: intrinsic,
            outer: intrinsic,
            intrinsic,
        };
        LeviCivita::with_config(model, config).riemann_at(&DVector::zeros(k))
    }

    pub(crate) fn fibre_reach(&self) -> f64 {
        2.0 * self.source_connection().config().intrinsic.reach() + self.reach()
    }

    /// Fibre metric, K̂ by both routes, τ̂ and H at `p`.
    pub fn fibre_curvature(&self, p: &Point) -> Result<FibreSample> {
        let x = p.coords();
        self.source.model().require_stencil(x, self.fibre_reach())?;
        let split = self.split_at(x)?;
        let k = split.vertical_dim();
        let g = &split.metric;
        let gram = DMatrix::from_fn(k, k, |a, b| linalg::inner(g, &split.vertical[a], &split.vertical[b]));
        let mean_curvature = self.mean_curvature_at(x)?;
        let mut sample = FibreSample {
            point: p.clone(),
            vertical: split.vertical.clone(),
            induced_metric: gram,
            sectional_ambient: Vec::new(),
            sectional_intrinsic: Vec::new(),
            scalar_ambient: 0.0,
            scalar_intrinsic: 0.0,
            mean_curvature,
            intrinsic: None,
        };
        if k < 2 {
            return Ok(sample);
        }
        let ambient = self.source_connection().riemann_at(x)?;
        let intrinsic = self.intrinsic_fibre_curvature(x, &split.vertical, &split.horizontal)?;
        for a in 0..k {
            for b in (a + 1)..k {
                let (u, v) = (&split.vertical[a], &split.vertical[b]);
                let k_amb = sectional_from(&ambient, u, v)?;
                let tuv = self.t_at(x, u, v)?;
                let tuu = self.t_at(x, u, u)?;
                let tvv = self.t_at(x, v, v)?;
                let route_a = k_amb - linalg::inner(g, &tuv, &tuv) + linalg::inner(g, &tuu, &tvv);
                let ea = DVector::from_fn(k, |i, _| if i == a { 1.0 } else { 0.0 });
                let eb = DVector::from_fn(k, |i, _| if i == b { 1.0 } else { 0.0 });
                let route_b = sectional_from(&intrinsic, &ea, &eb)?;
                sample.sectional_ambient.push(((a, b), route_a));
                sample.sectional_intrinsic.push(((a, b), route_b));
                sample.scalar_ambient += route_a;
                sample.scalar_intrinsic += route_b;
            }
        }
        sample.intrinsic = Some(intrinsic);
        Ok(sample)
    }

    /// K̂(U ∧ V) by the intrinsic route for vertical U, V.
    pub fn fibre_sectional(&self, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let x = p.coords();
        self.source.model().require_stencil(x, self.fibre_reach())?;
        let split = self.split_at(x)?;
        for w in [u, v] {
            let defect = split.horizontal_part(w).amax();
            if defect > 1e-8 * w.amax().max(1.0) {
                return Err(GeometryError::NotVertical { defect });
            }
        }
        let intrinsic = self.intrinsic_fibre_curvature(x, &split.vertical, &split.horizontal)?;
        let coeffs = |w: &DVector<f64>| {
            DVector::from_fn(split.vertical_dim(), |a, _| linalg::inner(&split.metric, &split.vertical[a], w))
        };
        sectional_from(&intrinsic, &coeffs(u), &coeffs(v))
    }
}
