//! Second fundamental form ∇F_* of the map and its trace, the tension field.

use nalgebra::DVector;

use super::SubmersionMap;
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::Point;

impl SubmersionMap {
    /// (∇F_*)(X, Y) = D_X(J Y) + Γ^N(F_*X, F_*Y) − F_*(Γ^M(X, Y)) for
    /// constant-extended X, Y.
    pub(crate) fn second_fundamental_form_at(
        &self,
        x: &DVector<f64>,
        u: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let j = self.jacobian_at(x);
        let d_jv: DVector<f64> = self
            .field_scheme()
            .directional(|z: &DVector<f64>| self.jacobian_at(z) * v, x, u);
        let gamma_m = self.source_connection().gamma_at(x)?;
        let gamma_n = self.target_connection().gamma_at(&self.map_at(x))?;
        Ok(d_jv + gamma_n.contract(&(&j * u), &(&j * v)) - &j * gamma_m.contract(u, v))
    }

    fn require_target_stencil(&self, x: &DVector<f64>) -> Result<()> {
        let y = self.map_at(x);
        self.target()
            .require_stencil(&y, self.target_connection().config().first.reach())
    }

    pub fn second_fundamental_form_map(
        &self,
        p: &Point,
        u: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.require_stencil(p.coords())?;
        self.require_target_stencil(p.coords())?;
        self.second_fundamental_form_at(p.coords(), u, v)
    }

    /// τ(F) = Σ (∇F_*)(e_i, e_i) over the adapted orthonormal frame.
    pub fn tension_field(&self, p: &Point) -> Result<DVector<f64>> {
        self.require_stencil(p.coords())?;
        let frame = self.split_at(p.coords())?.frame();
        self.tension_field_in_frame(p, &frame)
    }

    /// Tension field over a caller-supplied g-orthonormal frame.
    pub fn tension_field_in_frame(&self, p: &Point, frame: &[DVector<f64>]) -> Result<DVector<f64>> {
        let x = p.coords();
        self.require_stencil(x)?;
        self.require_target_stencil(x)?;
        let n = self.source_dim();
        if frame.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: frame.len(),
            });
        }
        let g = self.source.metric_at(x);
        let gram = linalg::columns(frame, n);
        let defect = (gram.transpose() * &g * &gram - nalgebra::DMatrix::identity(n, n)).amax();
        if defect > 1e-8 {
            return Err(GeometryError::NotUnit { norm: 1.0 + defect });
        }
        let mut tau = DVector::zeros(self.target_dim());
        for e in frame {
            tau += self.second_fundamental_form_at(x, e, e)?;
        }
        Ok(tau)
    }
}
