//! Residuals of the O'Neill identities at seeded points.
//!
//! With R(X,Y,Z,W) = g(R(X,Y)Z, W), U, V, W, S vertical and X, Y horizontal:
//!
//! ```text
//! Gauss      R(S,W,V,U) = R̂(S,W,V,U) + g(T_U W, T_V S) − g(T_V W, T_U S)
//! sectional  K(U∧V)     = K̂(U∧V) + ‖T_U V‖² − g(T_U U, T_V V)
//! mixed      g(R(V,X)Y, W) = g((∇_X T)(V,W), Y) + g((∇_V A)(X,Y), W)
//!                            − g(T_V X, T_W Y) + g(A_X V, A_Y W)
//! ```
//!
//! plus skew-adjointness of T_E and A_E, T_U W = T_W U and, for basic
//! horizontal fields, A_X Y = −A_Y X = ½𝒱[X,Y].

use nalgebra::DVector;

use super::{
    SubmersionMap, CURVATURE_IDENTITY_TOLERANCE, DEEP_IDENTITY_TOLERANCE, TENSOR_TOLERANCE,
};
use crate::check::{Check, CheckSet, Report};
use crate::connection::{lie_bracket_at, RiemannTensor};
use crate::error::Result;
use crate::linalg;
use crate::manifold::Point;
use crate::sampling::Sampler;

/// Knobs for [`SubmersionMap::verify_curvature_identities_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    /// Sign in front of R̂ in the Gauss equation; −1 gives a deliberately
    /// mis-signed variant.
    pub gauss_sign: f64,
    /// Evaluate the mixed identity, the most expensive one.
    pub include_mixed: bool,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            gauss_sign: 1.0,
            include_mixed: true,
        }
    }
}

impl SubmersionMap {
    /// (∇_E T)(V, W) for constant-extended V, W.
    pub(crate) fn nabla_t_at(
        &self,
        x: &DVector<f64>,
        e: &DVector<f64>,
        v: &DVector<f64>,
        w: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let n = self.source_dim();
        let outer = self.source_connection().config().outer;
        let field = |z: &DVector<f64>| {
            self.t_at(z, v, w)
                .unwrap_or_else(|_| DVector::from_element(n, f64::NAN))
        };
        let d: DVector<f64> = outer.directional(field, x, e);
        let gamma = self.source_connection().gamma_at(x)?;
        Ok(d + gamma.contract(e, &self.t_at(x, v, w)?)
            - self.t_at(x, &gamma.contract(e, v), w)?
            - self.t_at(x, v, &gamma.contract(e, w))?)
    }

    /// (∇_E A)(X, Y) for constant-extended X, Y.
    pub(crate) fn nabla_a_at(
        &self,
        x: &DVector<f64>,
        e: &DVector<f64>,
        a: &DVector<f64>,
        b: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let n = self.source_dim();
        let outer = self.source_connection().config().outer;
        let field = |z: &DVector<f64>| {
            self.a_at(z, a, b)
                .unwrap_or_else(|_| DVector::from_element(n, f64::NAN))
        };
        let d: DVector<f64> = outer.directional(field, x, e);
        let gamma = self.source_connection().gamma_at(x)?;
        Ok(d + gamma.contract(e, &self.a_at(x, a, b)?)
            - self.a_at(x, &gamma.contract(e, a), b)?
            - self.a_at(x, a, &gamma.contract(e, b))?)
    }

    fn gauss_residual_with(
        &self,
        x: &DVector<f64>,
        ambient: &RiemannTensor,
        intrinsic: &RiemannTensor,
        vertical: &[DVector<f64>],
        [s, w, v, u]: [&DVector<f64>; 4],
        sign: f64,
    ) -> Result<f64> {
        let g = self.source.metric_at(x);
        let c = |y: &DVector<f64>| DVector::from_fn(vertical.len(), |a, _| linalg::inner(&g, &vertical[a], y));
        let lhs = ambient.lowered(s, w, v, u);
        let fibre = intrinsic.lowered(&c(s), &c(w), &c(v), &c(u));
        let tuw = self.t_at(x, u, w)?;
        let tvs = self.t_at(x, v, s)?;
        let tvw = self.t_at(x, v, w)?;
        let tus = self.t_at(x, u, s)?;
        let rhs = sign * fibre + linalg::inner(&g, &tuw, &tvs) - linalg::inner(&g, &tvw, &tus);
        Ok(lhs - rhs)
    }

    /// Residual of the Gauss equation for vertical S, W, V, U at `p`, with `sign` in front
    /// of the fibre curvature term.
    pub fn gauss_residual(
        &self,
        p: &Point,
        vectors: [&DVector<f64>; 4],
        sign: f64,
    ) -> Result<f64> {
        let x = p.coords();
        self.source.model().require_stencil(x, self.fibre_reach())?;
        let split = self.split_at(x)?;
        let ambient = self.source_connection().riemann_at(x)?;
        let intrinsic = self.intrinsic_fibre_curvature(x, &split.vertical, &split.horizontal)?;
        self.gauss_residual_with(x, &ambient, &intrinsic, &split.vertical, vectors, sign)
    }

    pub fn verify_curvature_identities(&self, samples: usize, seed: u64) -> Result<Report> {
        self.verify_curvature_identities_with(samples, seed, &IdentityOptions::default())
    }

    pub fn verify_curvature_identities_with(
        &self,
        samples: usize,
        seed: u64,
        options: &IdentityOptions,
    ) -> Result<Report> {
        let n = self.source_dim();
        let m = self.target_dim();
        let k = self.vertical_dim();
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rng = Sampler::new(seed ^ 0x0e111);
        let mut skew_t = Check::new("T skew-adjoint", TENSOR_TOLERANCE);
        let mut skew_a = Check::new("A skew-adjoint", TENSOR_TOLERANCE);
        let mut sym_t = Check::new("T_U W = T_W U", TENSOR_TOLERANCE);
        let mut alt_a = Check::new("A_X Y = -A_Y X", TENSOR_TOLERANCE);
        let mut bracket_a = Check::new("A_X Y = V[X,Y]/2", TENSOR_TOLERANCE);
        let mut gauss = Check::new("Gauss equation", CURVATURE_IDENTITY_TOLERANCE);
        let mut sectional = Check::new("fibre sectional curvature", CURVATURE_IDENTITY_TOLERANCE);
        let mut mixed = Check::new("mixed curvature identity", DEEP_IDENTITY_TOLERANCE);
        for x in &points {
            self.source.model().require_stencil(x, self.fibre_reach())?;
            let split = self.split_at(x)?;
            let g = &split.metric;
            let ip = |a: &DVector<f64>, b: &DVector<f64>| linalg::inner(g, a, b);

            let (d, e, f) = (rng.vector(n), rng.vector(n), rng.vector(n));
            skew_t.record(ip(&self.t_at(x, &d, &e)?, &f) + ip(&self.t_at(x, &d, &f)?, &e));
            skew_a.record(ip(&self.a_at(x, &d, &e)?, &f) + ip(&self.a_at(x, &d, &f)?, &e));

            let verticals: Vec<DVector<f64>> = (0..4).map(|_| split.vertical_part(&rng.vector(n))).collect();
            if k >= 1 {
                let (u, w) = (&verticals[0], &verticals[1]);
                sym_t.record((self.t_at(x, u, w)? - self.t_at(x, w, u)?).amax());
            }

            let (w1, w2) = (rng.vector(m), rng.vector(m));
            let hx = self.basic_lift_at(x, &w1);
            let hy = self.basic_lift_at(x, &w2);
            let axy = self.a_at(x, &hx, &hy)?;
            alt_a.record((&axy + self.a_at(x, &hy, &hx)?).amax());
            let bracket = lie_bracket_at(
                &self.field_scheme(),
                x,
                |z| self.basic_lift_at(z, &w1),
                |z| self.basic_lift_at(z, &w2),
            );
            bracket_a.record((&axy - split.vertical_part(&bracket) * 0.5).amax());

            if k >= 2 {
                let ambient = self.source_connection().riemann_at(x)?;
                let intrinsic = self.intrinsic_fibre_curvature(x, &split.vertical, &split.horizontal)?;
                let [s, w, v, u] = [&verticals[0], &verticals[1], &verticals[2], &verticals[3]];
                gauss.record(self.gauss_residual_with(
                    x,
                    &ambient,
                    &intrinsic,
                    &split.vertical,
                    [s, w, v, u],
                    options.gauss_sign,
                )?);
                let pair = linalg::gram_schmidt(g, &[verticals[0].clone(), verticals[1].clone()])?;
                let (u, v) = (&pair[0], &pair[1]);
                let coeffs = |y: &DVector<f64>| DVector::from_fn(k, |a, _| ip(&split.vertical[a], y));
                let k_amb = ambient.lowered(u, v, v, u);
                let k_hat = intrinsic.lowered(&coeffs(u), &coeffs(v), &coeffs(v), &coeffs(u));
                let tuv = self.t_at(x, u, v)?;
                let rhs = k_hat + ip(&tuv, &tuv) - ip(&self.t_at(x, u, u)?, &self.t_at(x, v, v)?);
                sectional.record(k_amb - rhs);
            }

            if options.include_mixed && k >= 1 && m >= 1 {
                let ambient = self.source_connection().riemann_at(x)?;
                let (hx, hy) = (split.horizontal_part(&rng.vector(n)), split.horizontal_part(&rng.vector(n)));
                let (v, w) = (&verticals[2], &verticals[3]);
                let lhs = -ambient.lowered(&hx, v, &hy, w);
                let rhs = ip(&self.nabla_t_at(x, &hx, v, w)?, &hy)
                    + ip(&self.nabla_a_at(x, v, &hx, &hy)?, w)
                    - ip(&self.t_at(x, v, &hx)?, &self.t_at(x, w, &hy)?)
                    + ip(&self.a_at(x, &hx, v)?, &self.a_at(x, &hy, w)?);
                mixed.record(lhs - rhs);
            }
        }
        let mut checks = CheckSet::new();
        for c in [skew_t, skew_a, sym_t, alt_a, bracket_a] {
            checks.push(c);
        }
        if k >= 2 {
            checks.push(gauss);
            checks.push(sectional);
        }
        if options.include_mixed && k >= 1 && m >= 1 {
            checks.push(mixed);
        }
        Ok(Report {
            checks,
            samples: points.len(),
            resampled,
        })
    }
}
