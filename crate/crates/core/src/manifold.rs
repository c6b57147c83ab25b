//! Single-chart manifolds: domain boxes, points, evaluable fields and the
//! metric.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::diff::DiffScheme;
use crate::error::{GeometryError, Result};
use crate::linalg;

type Eval<T> = Arc<dyn Fn(&DVector<f64>) -> T + Send + Sync>;

/// Axis-aligned coordinate box.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(GeometryError::WrongDimensions(
                "domain box needs lower < upper on every axis".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// The default chart box `[-0.9, 0.9]^n`.
    pub fn symmetric(n: usize, half_width: f64) -> Self {
        Self {
            lower: vec![-half_width; n],
            upper: vec![half_width; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.contains_with_margin(x, 0.0)
    }

    pub fn contains_with_margin(&self, x: &DVector<f64>, margin: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l + margin && *v <= u - margin)
    }

    /// Uniform sample from the box shrunk by `inset` on every side.
    pub fn sample<R: Rng>(&self, rng: &mut R, inset: f64) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| {
            let lo = self.lower[i] + inset;
            let hi = self.upper[i] - inset;
            lo + (hi - lo) * rng.random::<f64>()
        })
    }
}

/// A point in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    /// Unvalidated constructor; prefer [`ManifoldModel::point`].
    pub fn from_coords(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

macro_rules! field_type {
    ($(#[$doc:meta])* $name:ident, $out:ty) => {
        $(#[$doc])*
        #[derive(Clone)]
        pub struct $name {
            dim: usize,
            eval: Eval<$out>,
        }

        impl $name {
            pub fn new(dim: usize, f: impl Fn(&DVector<f64>) -> $out + Send + Sync + 'static) -> Self {
                Self { dim, eval: Arc::new(f) }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn at(&self, x: &DVector<f64>) -> $out {
                (self.eval)(x)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_struct(stringify!($name)).field("dim", &self.dim).finish()
            }
        }
    };
}

field_type!(ScalarField, f64);
field_type!(
    /// Component vector `X^i` in the coordinate frame.
    VectorField,
    DVector<f64>
);
field_type!(
    /// Covector components `eta_i`.
    OneFormField,
    DVector<f64>
);
field_type!(
    /// (1,1)-tensor as a matrix acting on component vectors.
    EndomorphismField,
    DMatrix<f64>
);

impl VectorField {
    pub fn constant(v: DVector<f64>) -> Self {
        let dim = v.len();
        Self::new(dim, move |_| v.clone())
    }

    /// Coordinate field `∂_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        Self::constant(DVector::from_fn(dim, |i, _| if i == axis { 1.0 } else { 0.0 }))
    }
}

impl OneFormField {
    pub fn apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.at(x).dot(v)
    }
}

/// Riemannian metric as a symmetric matrix field.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    eval: Eval<DMatrix<f64>>,
}

impl MetricField {
    /// Wraps `f`; values are symmetrised on every evaluation.
    pub fn new(dim: usize, f: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self { dim, eval: Arc::new(f) }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, move |_| DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Symmetrised value, without the positivity check.
    pub fn at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = (self.eval)(x);
        (&m + m.transpose()) * 0.5
    }

    pub fn inverse_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let g = self.at(x);
        match g.clone().cholesky() {
            Some(ch) => Ok(ch.inverse()),
            None => Err(GeometryError::NonPositiveDefinite {
                min_eigenvalue: linalg::min_eigenvalue(&g),
            }),
        }
    }
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField").field("dim", &self.dim).finish()
    }
}

/// Eigenvalues at or below this bound reject a metric.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

/// A coordinate chart with a metric.
#[derive(Debug, Clone)]
pub struct ManifoldModel {
    name: String,
    metric: MetricField,
    domain: DomainBox,
}

impl ManifoldModel {
    pub fn new(name: impl Into<String>, metric: MetricField, domain: DomainBox) -> Result<Self> {
        if metric.dim() != domain.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: domain.dim(),
                found: metric.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            metric,
            domain,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            name: format!("R^{dim}"),
            metric: MetricField::euclidean(dim),
            domain: DomainBox::symmetric(dim, 0.9),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        let x = DVector::from_column_slice(coords);
        if coords.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        if !self.domain.contains(&x) {
            return Err(GeometryError::PointOutOfDomain {
                coords: coords.to_vec(),
            });
        }
        Ok(Point::from_coords(x))
    }

    /// Metric at `p`, checked for positive definiteness.
    pub fn metric_eval(&self, p: &Point) -> Result<DMatrix<f64>> {
        if !self.domain.contains(p.coords()) {
            return Err(GeometryError::PointOutOfDomain {
                coords: p.coords().iter().copied().collect(),
            });
        }
        let g = self.metric.at(p.coords());
        let min = linalg::min_eigenvalue(&g);
        if !(min > POSITIVITY_TOLERANCE) {
            return Err(GeometryError::NonPositiveDefinite { min_eigenvalue: min });
        }
        Ok(g)
    }

    /// Fails unless the box shrunk by `reach` still contains `p`.
    pub fn require_stencil(&self, p: &DVector<f64>, reach: f64) -> Result<()> {
        if self.domain.contains_with_margin(p, reach) {
            Ok(())
        } else {
            Err(GeometryError::StencilOutOfDomain {
                coords: p.iter().copied().collect(),
            })
        }
    }

    /// Central-difference estimate of `∂f/∂x_axis` at `p`.
    pub fn numeric_partial(
        &self,
        f: &ScalarField,
        p: &Point,
        axis: usize,
        scheme: &DiffScheme,
    ) -> Result<f64> {
        if axis >= self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: axis + 1,
            });
        }
        let reach = scheme.reach();
        for sign in [-1.0, 1.0] {
            let mut x = p.coords().clone();
            x[axis] += sign * reach;
            if !self.domain.contains(&x) {
                return Err(GeometryError::StencilOutOfDomain {
                    coords: p.coords().iter().copied().collect(),
                });
            }
        }
        Ok(scheme.partial(|x| f.at(x), p.coords(), axis))
    }

    pub fn gram_schmidt(&self, p: &Point, vs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
        linalg::gram_schmidt(&self.metric_eval(p)?, vs)
    }

    pub fn orthogonal_complement(
        &self,
        p: &Point,
        basis: &[DVector<f64>],
    ) -> Result<Vec<DVector<f64>>> {
        linalg::orthogonal_complement(&self.metric_eval(p)?, basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_partial_examples() {
        let m = ManifoldModel::euclidean(2);
        let s = DiffScheme::first();
        let sin = ScalarField::new(2, |x| x[0].sin());
        let d = m.numeric_partial(&sin, &m.point(&[0.0, 0.0]).unwrap(), 0, &s).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        let c = ScalarField::new(2, |_| 3.25);
        assert_eq!(m.numeric_partial(&c, &m.point(&[0.1, 0.2]).unwrap(), 1, &s).unwrap(), 0.0);

        let wide = ManifoldModel::new(
            "wide",
            MetricField::euclidean(2),
            DomainBox::symmetric(2, 5.0),
        )
        .unwrap();
        let prod = ScalarField::new(2, |x| x[0] * x[1]);
        let d = wide.numeric_partial(&prod, &wide.point(&[2.0, 3.0]).unwrap(), 1, &s).unwrap();
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn stencil_at_boundary_is_rejected() {
        let m = ManifoldModel::euclidean(1);
        let f = ScalarField::new(1, |x| x[0]);
        let p = Point::from_coords(DVector::from_element(1, 0.9));
        assert!(matches!(
            m.numeric_partial(&f, &p, 0, &DiffScheme::first()),
            Err(GeometryError::StencilOutOfDomain { .. })
        ));
        assert!(matches!(m.point(&[1.0]), Err(GeometryError::PointOutOfDomain { .. })));
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let metric = MetricField::new(2, |_| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let m = ManifoldModel::new("bad", metric, DomainBox::symmetric(2, 0.9)).unwrap();
        let p = m.point(&[0.0, 0.0]).unwrap();
        assert!(matches!(m.metric_eval(&p), Err(GeometryError::NonPositiveDefinite { .. })));
    }

    #[test]
    fn metric_is_symmetrised() {
        let metric = MetricField::new(2, |_| DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.1, 2.0]));
        let g = metric.at(&DVector::zeros(2));
        assert_eq!(g[(0, 1)], g[(1, 0)]);
    }
}
