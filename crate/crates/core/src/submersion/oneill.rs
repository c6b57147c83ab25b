//! O'Neill's tensors T and A and the mean curvature of the fibres.
//!
//! Arguments are extended as constant coordinate fields and then projected
//! through the point-dependent 𝒱/ℋ, which keeps the derivative terms honest:
//!
//! ```text
//! T_E G = ℋ∇_{𝒱E}(𝒱G) + 𝒱∇_{𝒱E}(ℋG)
//! A_E G = 𝒱∇_{ℋE}(ℋG) + ℋ∇_{ℋE}(𝒱G)
//! ```

use nalgebra::{DMatrix, DVector};

use super::{Projectors, SubmersionMap};
use crate::error::Result;
use crate::manifold::Point;

/// T and A on the adapted frame (vertical basis, then horizontal basis).
#[derive(Debug, Clone, PartialEq)]
pub struct ONeillSample {
    pub point: Point,
    pub frame: Vec<DVector<f64>>,
    pub vertical_dim: usize,
    /// `t[i][j] = T_{frame[i]} frame[j]`.
    pub t: Vec<Vec<DVector<f64>>>,
    /// `a[i][j] = A_{frame[i]} frame[j]`.
    pub a: Vec<Vec<DVector<f64>>>,
}

impl ONeillSample {
    /// Largest |T| or |A| component in the frame.
    pub fn max_component(&self) -> f64 {
        self.t
            .iter()
            .chain(&self.a)
            .flatten()
            .map(|v| v.amax())
            .fold(0.0, f64::max)
    }
}

impl SubmersionMap {
    /// D_dir 𝒱 as a matrix.
    pub(crate) fn vertical_derivative(&self, x: &DVector<f64>, dir: &DVector<f64>) -> DMatrix<f64> {
        self.field_scheme()
            .directional(|z: &DVector<f64>| self.projectors_or_nan(z).vertical, x, dir)
    }

    /// T_E G at a coordinate point, unchecked.
    pub(crate) fn t_at(&self, x: &DVector<f64>, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        let pr = self.projectors_at(x)?;
        self.t_with(x, &pr, e, g)
    }

    fn t_with(&self, x: &DVector<f64>, pr: &Projectors, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        let ve = &pr.vertical * e;
        let dv = self.vertical_derivative(x, &ve);
        let gamma = self.source_connection().gamma_at(x)?;
        let nabla_v = &dv * g + gamma.contract(&ve, &(&pr.vertical * g));
        let nabla_h = -(&dv * g) + gamma.contract(&ve, &(&pr.horizontal * g));
        Ok(&pr.horizontal * nabla_v + &pr.vertical * nabla_h)
    }

    /// A_E G at a coordinate point, unchecked.
    pub(crate) fn a_at(&self, x: &DVector<f64>, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        let pr = self.projectors_at(x)?;
        self.a_with(x, &pr, e, g)
    }

    fn a_with(&self, x: &DVector<f64>, pr: &Projectors, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        let he = &pr.horizontal * e;
        let dv = self.vertical_derivative(x, &he);
        let gamma = self.source_connection().gamma_at(x)?;
        let nabla_h = -(&dv * g) + gamma.contract(&he, &(&pr.horizontal * g));
        let nabla_v = &dv * g + gamma.contract(&he, &(&pr.vertical * g));
        Ok(&pr.vertical * nabla_h + &pr.horizontal * nabla_v)
    }

    pub fn oneill_t(&self, p: &Point, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        self.require_stencil(p.coords())?;
        self.t_at(p.coords(), e, g)
    }

    pub fn oneill_a(&self, p: &Point, e: &DVector<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
        self.require_stencil(p.coords())?;
        self.a_at(p.coords(), e, g)
    }

    /// T and A on every pair of the adapted frame at `p`.
    pub fn oneill_sample(&self, p: &Point) -> Result<ONeillSample> {
        self.require_stencil(p.coords())?;
        let x = p.coords();
        let split = self.split_at(x)?;
        let frame = split.frame();
        let pr = &split.projectors;
        let mut t = Vec::with_capacity(frame.len());
        let mut a = Vec::with_capacity(frame.len());
        for e in &frame {
            let mut t_row = Vec::with_capacity(frame.len());
            let mut a_row = Vec::with_capacity(frame.len());
            for g in &frame {
                t_row.push(self.t_with(x, pr, e, g)?);
                a_row.push(self.a_with(x, pr, e, g)?);
            }
            t.push(t_row);
            a.push(a_row);
        }
        Ok(ONeillSample {
            point: p.clone(),
            frame,
            vertical_dim: split.vertical_dim(),
            t,
            a,
        })
    }

    pub(crate) fn mean_curvature_at(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let split = self.split_at(x)?;
        let k = split.vertical_dim();
        let mut h = DVector::zeros(self.source_dim());
        if k == 0 {
            return Ok(h);
        }
        for u in &split.vertical {
            h += self.t_with(x, &split.projectors, u, u)?;
        }
        Ok(h / k as f64)
    }

    /// H = (1/dim 𝒱) Σ T_{U_j} U_j over a g-orthonormal vertical basis.
    pub fn mean_curvature(&self, p: &Point) -> Result<DVector<f64>> {
        self.require_stencil(p.coords())?;
        self.mean_curvature_at(p.coords())
    }
}
