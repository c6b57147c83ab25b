//! Almost contact metric structures and the cosymplectic conditions.

use nalgebra::{DMatrix, DVector};

use crate::check::{Check, CheckSet, Report};
use crate::connection::{lie_bracket_at, LeviCivita};
use crate::diff::DiffConfig;
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::{EndomorphismField, ManifoldModel, OneFormField, Point, VectorField};
use crate::sampling::Sampler;

/// Tolerance for the algebraic identities φ² = −I + η⊗ξ and friends.
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-10;
/// Tolerance for closedness and normality (one derivative).
pub const FIRST_ORDER_TOLERANCE: f64 = 1e-8;
/// Tolerance where the connection enters (∇φ, ∇ξ).
pub const CONNECTION_TOLERANCE: f64 = 1e-6;
/// Tolerance for curvature-level comparisons.
pub const CURVATURE_TOLERANCE: f64 = 1e-4;

/// Points used by the eager validation in [`AlmostContactStructure::new`].
const VALIDATION_POINTS: usize = 16;

/// Per-check defects of a structure over a sample set.
pub type StructureReport = Report;

/// (φ, ξ, η, g) on an odd-dimensional chart.
#[derive(Debug, Clone)]
pub struct AlmostContactStructure {
    connection: LeviCivita,
    phi: EndomorphismField,
    xi: VectorField,
    eta: OneFormField,
}

impl AlmostContactStructure {
    /// Builds the structure and rejects it unless the defining identities
    /// hold within [`ALGEBRAIC_TOLERANCE`] at a fixed set of sample points.
    pub fn new(
        model: ManifoldModel,
        phi: EndomorphismField,
        xi: VectorField,
        eta: OneFormField,
    ) -> Result<Self> {
        let s = Self::new_unchecked(model, phi, xi, eta)?;
        let report = s.check_almost_contact(VALIDATION_POINTS, 0);
        if let Some(bad) = report.checks.iter().find(|c| !c.passed()) {
            return Err(GeometryError::StructureInvalid(format!(
                "{} defect {:.3e} exceeds {:.1e}",
                bad.name, bad.max_defect, bad.tolerance
            )));
        }
        Ok(s)
    }

    /// Builds without validating the identities (diagnostic fixtures).
    pub fn new_unchecked(
        model: ManifoldModel,
        phi: EndomorphismField,
        xi: VectorField,
        eta: OneFormField,
    ) -> Result<Self> {
        let n = model.dim();
        if n.is_multiple_of(2) {
            return Err(GeometryError::WrongDimensions(format!(
                "almost contact manifolds are odd-dimensional, got {n}"
            )));
        }
        for found in [phi.dim(), xi.dim(), eta.dim()] {
            if found != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found });
            }
        }
        Ok(Self {
            connection: LeviCivita::new(model),
            phi,
            xi,
            eta,
        })
    }

    pub fn with_config(mut self, config: DiffConfig) -> Self {
        self.connection = LeviCivita::with_config(self.connection.model().clone(), config);
        self
    }

    pub fn model(&self) -> &ManifoldModel {
        self.connection.model()
    }

    pub fn connection(&self) -> &LeviCivita {
        &self.connection
    }

    pub fn dim(&self) -> usize {
        self.model().dim()
    }

    pub fn phi_at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.phi.at(x)
    }

    pub fn xi_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.xi.at(x)
    }

    pub fn eta_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.eta.at(x)
    }

    pub fn metric_at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.model().metric().at(x)
    }

    /// Same structure with φ replaced by `factor · φ` (no validation).
    pub fn scaled_phi(&self, factor: f64) -> Self {
        let phi = self.phi.clone();
        Self {
            connection: self.connection.clone(),
            phi: EndomorphismField::new(self.dim(), move |x| phi.at(x) * factor),
            xi: self.xi.clone(),
            eta: self.eta.clone(),
        }
    }

    fn sample_points(&self, samples: usize, seed: u64) -> (Vec<DVector<f64>>, usize) {
        let mut sampler = Sampler::new(seed);
        let mut points = Vec::with_capacity(samples);
        let mut resampled = 0;
        while points.len() < samples && resampled < 10 * samples.max(1) {
            let x = sampler.point(self.model().domain());
            let finite = self.metric_at(&x).iter().all(|v| v.is_finite())
                && self.phi_at(&x).iter().all(|v| v.is_finite())
                && self.xi_at(&x).iter().all(|v| v.is_finite())
                && self.eta_at(&x).iter().all(|v| v.is_finite());
            if finite {
                points.push(x);
            } else {
                resampled += 1;
            }
        }
        (points, resampled)
    }

    /// Defects of the four almost-contact identities and the two metric
    /// compatibility identities at seeded points and random vectors.
    pub fn check_almost_contact(&self, samples: usize, seed: u64) -> StructureReport {
        let n = self.dim();
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut vectors = Sampler::new(seed ^ 0x5eed);
        let tol = ALGEBRAIC_TOLERANCE;
        let mut phi_sq = Check::new("phi^2 = -I + eta(x)xi", tol);
        let mut phi_xi = Check::new("phi xi = 0", tol);
        let mut eta_phi = Check::new("eta o phi = 0", tol);
        let mut eta_xi = Check::new("eta(xi) = 1", tol);
        let mut compat = Check::new("g(phi X, phi Y) = g - eta eta", tol);
        let mut eta_g = Check::new("eta(X) = g(X, xi)", tol);
        for x in &points {
            let phi = self.phi_at(x);
            let xi = self.xi_at(x);
            let eta = self.eta_at(x);
            let g = self.metric_at(x);
            let u = vectors.vector(n);
            let w = vectors.vector(n);
            let expected = -&u + &xi * eta.dot(&u);
            phi_sq.record((&phi * (&phi * &u) - expected).amax());
            phi_xi.record((&phi * &xi).amax());
            eta_phi.record(eta.dot(&(&phi * &u)));
            eta_xi.record(eta.dot(&xi) - 1.0);
            let lhs = linalg::inner(&g, &(&phi * &u), &(&phi * &w));
            compat.record(lhs - linalg::inner(&g, &u, &w) + eta.dot(&u) * eta.dot(&w));
            eta_g.record(eta.dot(&u) - linalg::inner(&g, &u, &xi));
        }
        let mut checks = CheckSet::new();
        for c in [phi_sq, phi_xi, eta_phi, eta_xi, compat, eta_g] {
            checks.push(c);
        }
        StructureReport {
            checks,
            samples: points.len(),
            resampled,
        }
    }

    /// Φ(X, Y) = g(X, φY).
    pub fn fundamental_two_form(&self, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let at = p.coords();
        linalg::inner(&self.metric_at(at), x, &(self.phi_at(at) * y))
    }

    /// Coefficients Φ_{ij} = g(∂_i, φ∂_j).
    fn two_form_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.metric_at(x) * self.phi_at(x)
    }

    /// Coefficients (dη)_{ij} = ∂_i η_j − ∂_j η_i and
    /// (dΦ)_{ijk} = ∂_i Φ_{jk} + ∂_j Φ_{ki} + ∂_k Φ_{ij}, largest magnitude.
    pub fn exterior_defects(&self, p: &Point) -> Result<(f64, f64)> {
        let first = self.connection.config().first;
        let at = p.coords();
        self.model().require_stencil(at, first.reach())?;
        let n = self.dim();
        let d_eta: Vec<DVector<f64>> = (0..n).map(|i| first.partial(|y| self.eta_at(y), at, i)).collect();
        let d_phi: Vec<DMatrix<f64>> = (0..n)
            .map(|i| first.partial(|y| self.two_form_matrix(y), at, i))
            .collect();
        let mut eta_max: f64 = 0.0;
        let mut phi_max: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                eta_max = eta_max.max((d_eta[i][j] - d_eta[j][i]).abs());
                for k in (j + 1)..n {
                    let c = d_phi[i][(j, k)] + d_phi[j][(k, i)] + d_phi[k][(i, j)];
                    phi_max = phi_max.max(c.abs());
                }
            }
        }
        Ok((phi_max, eta_max))
    }

    /// dΦ = 0 and dη = 0 over seeded points.
    pub fn check_closed(&self, samples: usize, seed: u64) -> Result<StructureReport> {
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut d_phi = Check::new("d Phi = 0", FIRST_ORDER_TOLERANCE);
        let mut d_eta = Check::new("d eta = 0", FIRST_ORDER_TOLERANCE);
        for x in &points {
            let (a, b) = self.exterior_defects(&Point::from_coords(x.clone()))?;
            d_phi.record(a);
            d_eta.record(b);
        }
        let mut checks = CheckSet::new();
        checks.push(d_phi);
        checks.push(d_eta);
        Ok(StructureReport {
            checks,
            samples: points.len(),
            resampled,
        })
    }

    /// [φ,φ](X,Y) + 2dη(X,Y)ξ for vector fields X, Y, with
    /// [φ,φ](X,Y) = φ²[X,Y] + [φX,φY] − φ[φX,Y] − φ[X,φY] and
    /// dη(X,Y) = ½(X η(Y) − Y η(X) − η([X,Y])).
    pub fn nijenhuis_defect(&self, p: &Point, x: &VectorField, y: &VectorField) -> Result<DVector<f64>> {
        let at = p.coords();
        let reach = self.connection.config().first.reach()
            * x.at(at).amax().max(y.at(at).amax()).max(1.0)
            * 4.0;
        self.model().require_stencil(at, reach)?;
        Ok(self.nijenhuis_at(at, |z| x.at(z), |z| y.at(z)))
    }

    fn nijenhuis_at<X, Y>(&self, at: &DVector<f64>, x: X, y: Y) -> DVector<f64>
    where
        X: Fn(&DVector<f64>) -> DVector<f64>,
        Y: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let first = &self.connection.config().first;
        let phi = self.phi_at(at);
        let phi_x = |z: &DVector<f64>| self.phi_at(z) * x(z);
        let phi_y = |z: &DVector<f64>| self.phi_at(z) * y(z);
        let xy = lie_bracket_at(first, at, &x, &y);
        let fxfy = lie_bracket_at(first, at, phi_x, phi_y);
        let fxy = lie_bracket_at(first, at, phi_x, &y);
        let xfy = lie_bracket_at(first, at, &x, phi_y);
        let bracket = &phi * (&phi * &xy) + fxfy - &phi * fxy - &phi * xfy;
        let x_eta_y: f64 = first.directional(|z: &DVector<f64>| self.eta_at(z).dot(&y(z)), at, &x(at));
        let y_eta_x: f64 = first.directional(|z: &DVector<f64>| self.eta_at(z).dot(&x(z)), at, &y(at));
        let d_eta = 0.5 * (x_eta_y - y_eta_x - self.eta_at(at).dot(&xy));
        bracket + self.xi_at(at) * (2.0 * d_eta)
    }

    /// Normality over seeded points: all coordinate field pairs plus one
    /// pair of random affine fields per point.
    pub fn check_normal(&self, samples: usize, seed: u64) -> Result<StructureReport> {
        let n = self.dim();
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut fields = Sampler::new(seed ^ 0xf1e1d);
        let mut check = Check::new("[phi,phi] + 2 d eta (x) xi = 0", FIRST_ORDER_TOLERANCE);
        let unit = |i: usize| DVector::from_fn(n, move |k, _| if k == i { 1.0 } else { 0.0 });
        for x in &points {
            self.model().require_stencil(x, 8.0 * self.connection.config().first.reach())?;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (ei, ej) = (unit(i), unit(j));
                    check.record(self.nijenhuis_at(x, |_| ei.clone(), |_| ej.clone()).amax());
                }
            }
            let a = fields.affine_field(x);
            let b = fields.affine_field(x);
            check.record(self.nijenhuis_at(x, |z| a.at(z), |z| b.at(z)).amax());
        }
        let mut checks = CheckSet::new();
        checks.push(check);
        Ok(StructureReport {
            checks,
            samples: points.len(),
            resampled,
        })
    }

    /// (∇_E φ)G = ∇_E(φG) − φ∇_E G for a vector E and a field G.
    pub fn nabla_phi_at<G>(&self, at: &DVector<f64>, e: &DVector<f64>, field: G) -> Result<DVector<f64>>
    where
        G: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let lc = &self.connection;
        let phi_g = lc.nabla_at(at, e, |z| self.phi_at(z) * field(z))?;
        let g = lc.nabla_at(at, e, &field)?;
        Ok(phi_g - self.phi_at(at) * g)
    }

    pub fn nabla_xi_at(&self, at: &DVector<f64>, e: &DVector<f64>) -> Result<DVector<f64>> {
        self.connection.nabla_at(at, e, |z| self.xi_at(z))
    }

    /// (∇_E η)G = E(η(G)) − η(∇_E G).
    pub fn nabla_eta_at<G>(&self, at: &DVector<f64>, e: &DVector<f64>, field: G) -> Result<f64>
    where
        G: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let first = &self.connection.config().first;
        let d: f64 = first.directional(|z: &DVector<f64>| self.eta_at(z).dot(&field(z)), at, e);
        let nabla_g = self.connection.nabla_at(at, e, &field)?;
        Ok(d - self.eta_at(at).dot(&nabla_g))
    }

    /// ∇φ = 0, ∇ξ = 0 and ∇η = 0 for random E and random affine fields G.
    pub fn check_cosymplectic(&self, samples: usize, seed: u64) -> Result<StructureReport> {
        let n = self.dim();
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rng = Sampler::new(seed ^ 0xc05);
        let mut nabla_phi = Check::new("(nabla_E phi) G = 0", CONNECTION_TOLERANCE);
        let mut nabla_xi = Check::new("nabla_E xi = 0", CONNECTION_TOLERANCE);
        let mut nabla_eta = Check::new("nabla_E eta = 0", CONNECTION_TOLERANCE);
        for x in &points {
            self.model().require_stencil(x, 4.0 * self.connection.config().first.reach())?;
            let e = rng.vector(n);
            let g = rng.affine_field(x);
            nabla_phi.record(self.nabla_phi_at(x, &e, |z| g.at(z))?.amax());
            nabla_xi.record(self.nabla_xi_at(x, &e)?.amax());
            nabla_eta.record(self.nabla_eta_at(x, &e, |z| g.at(z))?);
        }
        let mut checks = CheckSet::new();
        checks.push(nabla_phi);
        checks.push(nabla_xi);
        checks.push(nabla_eta);
        Ok(StructureReport {
            checks,
            samples: points.len(),
            resampled,
        })
    }

    /// Every structure check: algebraic identities, closedness, normality and
    /// the cosymplectic equations.
    pub fn check_structure(&self, samples: usize, seed: u64) -> Result<StructureReport> {
        let mut report = self.check_almost_contact(samples, seed);
        report.merge(self.check_closed(samples, seed)?);
        report.merge(self.check_normal(samples, seed)?);
        report.merge(self.check_cosymplectic(samples, seed)?);
        Ok(report)
    }

    /// H(E) = g(R(E, φE)φE, E) for a unit E orthogonal to ξ.
    pub fn phi_sectional(&self, p: &Point, e: &DVector<f64>) -> Result<f64> {
        let at = p.coords();
        let g = self.metric_at(at);
        let norm = linalg::norm(&g, e);
        if (norm - 1.0).abs() > 1e-8 {
            return Err(GeometryError::NotUnit { norm });
        }
        let eta = self.eta_at(at).dot(e);
        if eta.abs() > 1e-8 {
            return Err(GeometryError::NotOrthogonalToXi { eta });
        }
        let phi_e = self.phi_at(at) * e;
        let r = self.connection.riemann_tensor(p)?;
        Ok(r.lowered(e, &phi_e, &phi_e, e))
    }

    /// Closed-form curvature of a cosymplectic space form M(c):
    ///
    /// ```text
    /// R(X,Y)Z = c/4 [ g(Y,Z)X − g(X,Z)Y + η(X)η(Z)Y − η(Y)η(Z)X
    ///               + g(X,Z)η(Y)ξ − g(Y,Z)η(X)ξ
    ///               + g(φY,Z)φX − g(φX,Z)φY − 2g(φX,Y)φZ ]
    /// ```
    pub fn space_form_curvature(
        &self,
        c: f64,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> DVector<f64> {
        let at = p.coords();
        let g = self.metric_at(at);
        let phi = self.phi_at(at);
        let xi = self.xi_at(at);
        let eta = self.eta_at(at);
        let ip = |a: &DVector<f64>, b: &DVector<f64>| linalg::inner(&g, a, b);
        let (ex, ey, ez) = (eta.dot(x), eta.dot(y), eta.dot(z));
        let (px, py, pz) = (&phi * x, &phi * y, &phi * z);
        let sum = x * ip(y, z) - y * ip(x, z) + y * (ex * ez) - x * (ey * ez)
            + &xi * (ip(x, z) * ey)
            - &xi * (ip(y, z) * ex)
            + &px * ip(&py, z)
            - &py * ip(&px, z)
            - pz * (2.0 * ip(&px, y));
        sum * (c / 4.0)
    }
}
