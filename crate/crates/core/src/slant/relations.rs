//! Pointwise algebra of ψ, ω, B, C and the relations a slant angle forces.

use nalgebra::DVector;

use super::{SlantPoint, SlantReport, XiPosition, ALGEBRA_TOLERANCE, REASSEMBLY_TOLERANCE, RELATION_TOLERANCE};
use crate::check::{Check, CheckSet, Report};
use crate::error::{GeometryError, Result};
use crate::manifold::Point;
use crate::sampling::Sampler;
use crate::submersion::SubmersionMap;

/// Random vectors drawn per point by the aggregated checks.
const VECTORS_PER_POINT: usize = 3;

impl SlantPoint {
    /// ψ²U + λ(U − η(U)ξ) with ξ vertical, ψ²U + λU otherwise.
    pub fn psi_square_defect(&self, lambda: f64, u: &DVector<f64>) -> DVector<f64> {
        let psi2 = self.vphi(&self.vphi(u));
        let rest = match self.xi_position() {
            XiPosition::Vertical => u - &self.xi * self.eta(u),
            _ => u.clone(),
        };
        psi2 + rest * lambda
    }

    /// g(U, V) − η(U)η(V), or g(U, V) when ξ is not vertical.
    fn reduced_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        match self.xi_position() {
            XiPosition::Vertical => self.ip(u, v) - self.eta(u) * self.eta(v),
            _ => self.ip(u, v),
        }
    }
}

impl SubmersionMap {
    /// g-norm of ψ²U + λ(U − η(U)ξ) (or ψ²U + λU when ξ is horizontal).
    pub fn psi_square_residual(&self, p: &Point, lambda: f64, u: &DVector<f64>) -> Result<f64> {
        self.decompose_vertical(p, u)?;
        let sp = self.slant_point(p.coords())?;
        Ok(sp.norm(&sp.psi_square_defect(lambda, u)))
    }

    fn random_vertical(sp: &SlantPoint, rng: &mut Sampler) -> DVector<f64> {
        sp.v(&rng.vector(sp.phi.nrows()))
    }

    fn random_horizontal(sp: &SlantPoint, rng: &mut Sampler) -> DVector<f64> {
        sp.h(&rng.vector(sp.phi.nrows()))
    }

    /// ψ² = −cos²θ (I − η⊗ξ) on the vertical space (η-term dropped when ξ
    /// is horizontal).
    pub fn check_psi_square(&self, slant: &SlantReport, seed: u64) -> Result<Report> {
        slant.require_slant()?;
        let name = match slant.xi_position {
            XiPosition::Vertical => "psi^2 = -cos^2(theta) (I - eta(x)xi)",
            _ => "psi^2 = -cos^2(theta) I",
        };
        let mut check = Check::new(name, RELATION_TOLERANCE);
        let mut rng = Sampler::new(seed ^ 0x9515);
        let lambda = slant.lambda();
        for x in &slant.points {
            let sp = self.slant_point(x)?;
            for _ in 0..VECTORS_PER_POINT {
                let u = Self::random_vertical(&sp, &mut rng);
                check.record(sp.norm(&sp.psi_square_defect(lambda, &u)));
            }
        }
        Ok(single(check, slant))
    }

    /// g(ψU, ψV) = cos²θ ĝ(U, V) and g(ωU, ωV) = sin²θ ĝ(U, V), where
    /// ĝ(U, V) = g(U, V) − η(U)η(V) when ξ is vertical and g otherwise.
    pub fn check_norm_relations(&self, slant: &SlantReport, seed: u64) -> Result<Report> {
        slant.require_slant()?;
        let (cos2, sin2) = (slant.mean.cos().powi(2), slant.mean.sin().powi(2));
        let mut psi = Check::new("g(psi U, psi V) = cos^2(theta) g(U, V)", RELATION_TOLERANCE);
        let mut omega = Check::new("g(omega U, omega V) = sin^2(theta) g(U, V)", RELATION_TOLERANCE);
        let mut rng = Sampler::new(seed ^ 0x2c05);
        for x in &slant.points {
            let sp = self.slant_point(x)?;
            for _ in 0..VECTORS_PER_POINT {
                let u = Self::random_vertical(&sp, &mut rng);
                let v = Self::random_vertical(&sp, &mut rng);
                let base = sp.reduced_inner(&u, &v);
                psi.record(sp.ip(&sp.vphi(&u), &sp.vphi(&v)) - cos2 * base);
                omega.record(sp.ip(&sp.hphi(&u), &sp.hphi(&v)) - sin2 * base);
            }
        }
        let mut checks = CheckSet::new();
        checks.push(psi);
        checks.push(omega);
        Ok(Report {
            checks,
            samples: slant.points.len(),
            resampled: slant.resampled,
        })
    }

    /// Identities that hold for any almost contact metric structure: φ
    /// reassembles from its four pieces, ψ and the ω/B pair are skew, and
    /// φ² = −I + η⊗ξ split into vertical and horizontal parts.
    pub fn check_decomposition_identities(&self, samples: usize, seed: u64) -> Result<Report> {
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rng = Sampler::new(seed ^ 0xdec0);
        let mut reassembly = Check::new("phi E = psi VE + omega VE + B HE + C HE", REASSEMBLY_TOLERANCE);
        let mut skew_psi = Check::new("g(psi U, V) = -g(U, psi V)", ALGEBRA_TOLERANCE);
        let mut skew_omega = Check::new("g(omega U, Y) = -g(U, B Y)", ALGEBRA_TOLERANCE);
        let mut h_of_x = Check::new("omega B X + C^2 X = -X + eta(X) H xi", ALGEBRA_TOLERANCE);
        let mut v_of_x = Check::new("psi B X + B C X = eta(X) V xi", ALGEBRA_TOLERANCE);
        let mut v_of_u = Check::new("psi^2 U + B omega U = -U + eta(U) V xi", ALGEBRA_TOLERANCE);
        let mut h_of_u = Check::new("omega psi U + C omega U = eta(U) H xi", ALGEBRA_TOLERANCE);
        let mut mixed = Check::new("g(C X, phi U) + g(B X, psi U) = -eta(X) eta(U)", ALGEBRA_TOLERANCE);
        for x in &points {
            let sp = self.slant_point(x)?;
            let n = sp.phi.nrows();
            let e = rng.vector(n);
            let (ve, he) = (sp.v(&e), sp.h(&e));
            let pieces = sp.vphi(&ve) + sp.hphi(&ve) + sp.vphi(&he) + sp.hphi(&he);
            reassembly.record((pieces - sp.phi(&e)).amax());

            let u = Self::random_vertical(&sp, &mut rng);
            let v = Self::random_vertical(&sp, &mut rng);
            let hx = Self::random_horizontal(&sp, &mut rng);
            let hy = Self::random_horizontal(&sp, &mut rng);
            skew_psi.record(sp.ip(&sp.vphi(&u), &v) + sp.ip(&u, &sp.vphi(&v)));
            skew_omega.record(sp.ip(&sp.hphi(&u), &hy) + sp.ip(&u, &sp.vphi(&hy)));

            let (bx, cx) = (sp.vphi(&hx), sp.hphi(&hx));
            let xi_v = sp.v(&sp.xi);
            let xi_h = sp.h(&sp.xi);
            let lhs = sp.hphi(&bx) + sp.hphi(&cx);
            h_of_x.record(sp.norm(&(lhs + &hx - &xi_h * sp.eta(&hx))));
            let lhs = sp.vphi(&bx) + sp.vphi(&cx);
            v_of_x.record(sp.norm(&(lhs - &xi_v * sp.eta(&hx))));

            let (psi_u, omega_u) = (sp.vphi(&u), sp.hphi(&u));
            let lhs = sp.vphi(&psi_u) + sp.vphi(&omega_u);
            v_of_u.record(sp.norm(&(lhs + &u - &xi_v * sp.eta(&u))));
            let lhs = sp.hphi(&psi_u) + sp.hphi(&omega_u);
            h_of_u.record(sp.norm(&(lhs - &xi_h * sp.eta(&u))));

            mixed.record(sp.ip(&cx, &sp.phi(&u)) + sp.ip(&bx, &psi_u) + sp.eta(&hx) * sp.eta(&u));
        }
        let mut checks = CheckSet::new();
        for c in [reassembly, skew_psi, skew_omega, h_of_x, v_of_x, v_of_u, h_of_u, mixed] {
            checks.push(c);
        }
        Ok(Report {
            checks,
            samples: points.len(),
            resampled,
        })
    }

    /// With ξ horizontal: T_U ξ = 0, A_X ξ = 0 and η(∇_U V) = 0.
    pub fn check_horizontal_xi(&self, samples: usize, seed: u64) -> Result<Report> {
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rng = Sampler::new(seed ^ 0x8e1);
        let mut t_xi = Check::new("T_U xi = 0", 1e-7);
        let mut a_xi = Check::new("A_X xi = 0", 1e-7);
        let mut eta_nabla = Check::new("eta(nabla_U V) = 0", 1e-6);
        for x in &points {
            self.require_stencil(x)?;
            let sp = self.slant_point(x)?;
            if sp.xi_position() != XiPosition::Horizontal {
                return Err(GeometryError::XiNotHorizontal);
            }
            let u = Self::random_vertical(&sp, &mut rng);
            let v = Self::random_vertical(&sp, &mut rng);
            let hx = Self::random_horizontal(&sp, &mut rng);
            t_xi.record(sp.norm(&self.t_at(x, &u, &sp.xi)?));
            a_xi.record(sp.norm(&self.a_at(x, &hx, &sp.xi)?));
            let nabla = self.nabla_projected(x, &u, |z| self.projectors_or_nan(z).vertical * &v)?;
            eta_nabla.record(sp.eta(&nabla));
        }
        let mut checks = CheckSet::new();
        for c in [t_xi, a_xi, eta_nabla] {
            checks.push(c);
        }
        Ok(Report {
            checks,
            samples: points.len(),
            resampled,
        })
    }
}

fn single(check: Check, slant: &SlantReport) -> Report {
    let mut checks = CheckSet::new();
    checks.push(check);
    Report {
        checks,
        samples: slant.points.len(),
        resampled: slant.resampled,
    }
}
