//! Levi-Civita connection and curvature by finite differences of the metric.
//!
//! Curvature convention, used by every identity check in the crate:
//!
//! ```text
//! R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z
//! R(X,Y,Z,W) = g(R(X,Y)Z, W)
//! K(U∧V) = R(U,V,V,U) / (|U|²|V|² − g(U,V)²)
//! ```
//!
//! so the round sphere has K = +1, and the Gauss-type decomposition of a
//! Riemannian submersion reads
//! `R(S,W,V,U) = R̂(S,W,V,U) + g(T_U W, T_V S) − g(T_V W, T_U S)`.

use nalgebra::{DMatrix, DVector};

use crate::diff::{DiffConfig, DiffScheme};
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::{ManifoldModel, MetricField, Point, VectorField};

/// Γ^k_{ij} at a point, stored as `gamma[k][(i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelSample {
    point: DVector<f64>,
    gamma: Vec<DMatrix<f64>>,
}

impl ChristoffelSample {
    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][(i, j)]
    }

    /// Γ(X, Y)^k = Γ^k_{ij} X^i Y^j.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |k, _| x.dot(&(&self.gamma[k] * y)))
    }

    /// Largest |Γ^k_{ij} − Γ^k_{ji}|.
    pub fn torsion(&self) -> f64 {
        self.gamma
            .iter()
            .map(|m| (m - m.transpose()).amax())
            .fold(0.0, f64::max)
    }

    fn flatten(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n * n * n, |idx, _| {
            let (k, rest) = (idx / (n * n), idx % (n * n));
            self.gamma[k][(rest / n, rest % n)]
        })
    }
}

/// Γ at `x` from metric derivatives; no domain checks.
pub(crate) fn christoffel_at(
    metric: &MetricField,
    x: &DVector<f64>,
    scheme: &DiffScheme,
) -> Result<ChristoffelSample> {
    let n = metric.dim();
    let g_inv = metric.inverse_at(x)?;
    let dg: Vec<DMatrix<f64>> = (0..n).map(|l| scheme.partial(|y| metric.at(y), x, l)).collect();
    // lowered[l][(i, j)] = Γ_{l,ij}
    let lowered: Vec<DMatrix<f64>> = (0..n)
        .map(|l| {
            DMatrix::from_fn(n, n, |i, j| {
                0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])
            })
        })
        .collect();
    let gamma = (0..n)
        .map(|k| {
            let mut m = DMatrix::zeros(n, n);
            for (l, low) in lowered.iter().enumerate() {
                m += low * g_inv[(k, l)];
            }
            m
        })
        .collect();
    Ok(ChristoffelSample {
        point: x.clone(),
        gamma,
    })
}

/// Riemann tensor R^l_{ijk}, the l-component of R(∂_i, ∂_j)∂_k.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    n: usize,
    metric: DMatrix<f64>,
    data: Vec<f64>,
}

impl RiemannTensor {
    fn idx(&self, l: usize, i: usize, j: usize, k: usize) -> usize {
        ((l * self.n + i) * self.n + j) * self.n + k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(l, i, j, k)]
    }

    /// R(X,Y)Z.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut out = DVector::zeros(n);
        for l in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    if y[j] == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        acc += self.data[self.idx(l, i, j, k)] * x[i] * y[j] * z[k];
                    }
                }
            }
            out[l] = acc;
        }
        out
    }

    /// R(X,Y,Z,W) = g(R(X,Y)Z, W).
    pub fn lowered(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        linalg::inner(&self.metric, &self.apply(x, y, z), w)
    }

    /// R_{ijkl} = g(R(∂_i,∂_j)∂_k, ∂_l).
    pub fn lowered_component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        (0..self.n)
            .map(|m| self.metric[(l, m)] * self.component(m, i, j, k))
            .sum()
    }

    /// Largest violation of antisymmetry, pair symmetry and first Bianchi.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.lowered_component(i, j, k, l);
                        worst = worst
                            .max((r + self.lowered_component(j, i, k, l)).abs())
                            .max((r + self.lowered_component(i, j, l, k)).abs())
                            .max((r - self.lowered_component(k, l, i, j)).abs())
                            .max(
                                (r + self.lowered_component(j, k, i, l)
                                    + self.lowered_component(k, i, j, l))
                                .abs(),
                            );
                    }
                }
            }
        }
        worst
    }
}

/// The Levi-Civita connection of a [`ManifoldModel`].
#[derive(Debug, Clone)]
pub struct LeviCivita {
    model: ManifoldModel,
    config: DiffConfig,
}

impl LeviCivita {
    pub fn new(model: ManifoldModel) -> Self {
        Self::with_config(model, DiffConfig::default())
    }

    pub fn with_config(model: ManifoldModel, config: DiffConfig) -> Self {
        Self { model, config }
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn config(&self) -> &DiffConfig {
        &self.config
    }

    fn check(&self, x: &DVector<f64>, reach: f64) -> Result<()> {
        self.model.require_stencil(x, reach)
    }

    pub fn christoffel(&self, p: &Point) -> Result<ChristoffelSample> {
        self.check(p.coords(), self.config.first.reach())?;
        christoffel_at(self.model.metric(), p.coords(), &self.config.first)
    }

    pub(crate) fn gamma_at(&self, x: &DVector<f64>) -> Result<ChristoffelSample> {
        christoffel_at(self.model.metric(), x, &self.config.first)
    }

    /// ∇_X Y at `x` for a vector X and a field Y; no domain checks.
    pub(crate) fn nabla_at<F>(&self, x: &DVector<f64>, dir: &DVector<f64>, field: F) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let y = field(x);
        let gamma = self.gamma_at(x)?;
        let d: DVector<f64> = self.config.first.directional(&field, x, dir);
        Ok(d + gamma.contract(dir, &y))
    }

    /// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j.
    pub fn covariant_derivative(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &VectorField,
    ) -> Result<DVector<f64>> {
        let reach = self.config.first.reach() * x.amax().max(1.0);
        self.check(p.coords(), reach)?;
        self.nabla_at(p.coords(), x, |z| y.at(z))
    }

    /// [X,Y] = D_X Y − D_Y X; antisymmetric bit for bit.
    pub fn lie_bracket(&self, p: &Point, x: &VectorField, y: &VectorField) -> Result<DVector<f64>> {
        let at = p.coords();
        let reach = self.config.first.reach() * x.at(at).amax().max(y.at(at).amax()).max(1.0);
        self.check(at, reach)?;
        Ok(lie_bracket_at(&self.config.first, at, |z| x.at(z), |z| y.at(z)))
    }

    pub(crate) fn riemann_at(&self, x: &DVector<f64>) -> Result<RiemannTensor> {
        let n = self.model.dim();
        let outer = &self.config.outer;
        let base = self.gamma_at(x)?;
        let mut d_gamma = Vec::with_capacity(n);
        for i in 0..n {
            let failure = std::cell::RefCell::new(None);
            let d: DVector<f64> = outer.partial(
                |y| match self.gamma_at(y) {
                    Ok(g) => g.flatten(),
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        DVector::zeros(n * n * n)
                    }
                },
                x,
                i,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            d_gamma.push(d);
        }
        let dg = |i: usize, l: usize, j: usize, k: usize| d_gamma[i][(l * n + j) * n + k];
        let mut data = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut r = dg(i, l, j, k) - dg(j, l, i, k);
                        for m in 0..n {
                            r += base.get(m, j, k) * base.get(l, i, m)
                                - base.get(m, i, k) * base.get(l, j, m);
                        }
                        data[((l * n + i) * n + j) * n + k] = r;
                    }
                }
            }
        }
        Ok(RiemannTensor {
            n,
            metric: self.model.metric().at(x),
            data,
        })
    }

    /// Full curvature tensor at `p`.
    pub fn riemann_tensor(&self, p: &Point) -> Result<RiemannTensor> {
        self.check(p.coords(), self.config.first.reach() + self.config.outer.reach())?;
        self.riemann_at(p.coords())
    }

    /// R(X,Y)Z with constant-extended vectors.
    pub fn riemann(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        Ok(self.riemann_tensor(p)?.apply(x, y, z))
    }

    pub fn sectional_curvature(&self, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let r = self.riemann_tensor(p)?;
        sectional_from(&r, u, v)
    }
}

pub(crate) fn lie_bracket_at<X, Y>(scheme: &DiffScheme, at: &DVector<f64>, x: X, y: Y) -> DVector<f64>
where
    X: Fn(&DVector<f64>) -> DVector<f64>,
    Y: Fn(&DVector<f64>) -> DVector<f64>,
{
    let xv = x(at);
    let yv = y(at);
    let dxy: DVector<f64> = scheme.directional(&y, at, &xv);
    let dyx: DVector<f64> = scheme.directional(&x, at, &yv);
    dxy - dyx
}

pub(crate) fn sectional_from(r: &RiemannTensor, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let g = &r.metric;
    let uu = linalg::inner(g, u, u);
    let vv = linalg::inner(g, v, v);
    let uv = linalg::inner(g, u, v);
    let gram = uu * vv - uv * uv;
    if !(gram > 1e-12 * uu * vv) {
        return Err(GeometryError::DegeneratePlane { gram });
    }
    Ok(r.lowered(u, v, v, u) / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::DomainBox;

    fn disk() -> LeviCivita {
        let metric = MetricField::new(2, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            DMatrix::identity(2, 2) * (4.0 / ((1.0 - r2) * (1.0 - r2)))
        });
        LeviCivita::new(
            ManifoldModel::new("disk", metric, DomainBox::symmetric(2, 0.65)).unwrap(),
        )
    }

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let lc = LeviCivita::new(ManifoldModel::euclidean(3));
        let p = lc.model().point(&[0.1, -0.2, 0.3]).unwrap();
        let gamma = lc.christoffel(&p).unwrap();
        for k in 0..3 {
            assert_eq!(gamma.gamma[k].amax(), 0.0);
        }
    }

    #[test]
    fn poincare_disk_christoffel() {
        // Γ¹₁₁ = 2x/(1−r²) for the conformal factor 4/(1−r²)².
        let lc = disk();
        let p = lc.model().point(&[0.5, 0.0]).unwrap();
        let gamma = lc.christoffel(&p).unwrap();
        assert!((gamma.get(0, 0, 0) - 4.0 / 3.0).abs() < 1e-6);
        assert!(gamma.torsion() < 1e-9);
    }

    #[test]
    fn poincare_disk_curvature_is_minus_one() {
        let lc = disk();
        let p = lc.model().point(&[0.2, -0.3]).unwrap();
        let k = lc.sectional_curvature(&p, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap();
        assert!((k + 1.0).abs() < 1e-5, "K = {k}");
        let k2 = lc.sectional_curvature(&p, &v(&[1.0, 2.0]), &v(&[-3.0, 0.5])).unwrap();
        assert!((k - k2).abs() < 1e-6);
        assert!(lc.riemann_tensor(&p).unwrap().symmetry_defect() < 1e-5);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let lc = disk();
        let p = lc.model().point(&[0.0, 0.0]).unwrap();
        assert!(matches!(
            lc.sectional_curvature(&p, &v(&[1.0, 1.0]), &v(&[2.0, 2.0])),
            Err(GeometryError::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn lie_bracket_examples() {
        let lc = LeviCivita::new(ManifoldModel::euclidean(2));
        let p = lc.model().point(&[0.3, 0.4]).unwrap();
        let e1 = VectorField::coordinate(2, 0);
        let e2 = VectorField::coordinate(2, 1);
        assert_eq!(lc.lie_bracket(&p, &e1, &e2).unwrap().amax(), 0.0);
        let x2d1 = VectorField::new(2, |x| v(&[x[1], 0.0]));
        let b = lc.lie_bracket(&p, &x2d1, &e2).unwrap();
        assert!((&b - v(&[-1.0, 0.0])).amax() < 1e-9);
        let back = lc.lie_bracket(&p, &e2, &x2d1).unwrap();
        assert_eq!(b, -back);
    }
}
