//! Identities with one covariant derivative of ψ, ω, Q = ψ² and the
//! totally-geodesic criteria.
//!
//! Vertical (horizontal) vectors at the base point are extended to fields
//! by z ↦ 𝒱(z)v (z ↦ ℋ(z)x); projected pieces such as ωV are built from
//! those extensions pointwise.

use nalgebra::DVector;

use super::{SlantReport, XiPosition, DERIVATIVE_TOLERANCE};
use crate::check::{Check, CheckSet, Report};
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::Point;
use crate::sampling::Sampler;
use crate::submersion::SubmersionMap;

/// Both sides of the (∇_U ω)V and (∇_U ψ)V identities at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaParallelSample {
    pub point: Point,
    /// ℋ∇_U(ωV) − ω(∇̂_U V).
    pub omega_lhs: DVector<f64>,
    /// C T_U V − T_U ψV.
    pub omega_rhs: DVector<f64>,
    /// ∇̂_U(ψV) − ψ(∇̂_U V).
    pub psi_lhs: DVector<f64>,
    /// B T_U V − T_U ωV.
    pub psi_rhs: DVector<f64>,
    /// T_{ψU}ψU + cos²θ T_U U, which vanishes when ω is parallel.
    pub parallel_consequence: Option<DVector<f64>>,
}

impl OmegaParallelSample {
    pub fn omega_residual(&self) -> f64 {
        (&self.omega_lhs - &self.omega_rhs).amax()
    }

    pub fn psi_residual(&self) -> f64 {
        (&self.psi_lhs - &self.psi_rhs).amax()
    }

    /// Size of (∇ω) itself.
    pub fn omega_defect(&self) -> f64 {
        self.omega_lhs.amax()
    }
}

/// Max |LHS − RHS| of one criterion next to the defect of the geometric
/// conclusion it is supposed to characterise.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSides {
    pub name: String,
    pub max_residual: f64,
    pub direct_defect: f64,
}

impl CriterionSides {
    /// Criterion and conclusion are both satisfied or both violated at `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        (self.max_residual <= tol) == (self.direct_defect <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotallyGeodesicReport {
    pub point: Point,
    /// ℋ is a totally geodesic foliation ⟺
    /// g(ℋ∇_X Y, ωψU) = g(A_X BY, ωU) + g(ℋ∇_X CY, ωU); direct defect max |A_X Y|.
    pub horizontal_foliation: CriterionSides,
    /// 𝒱 is a totally geodesic foliation ⟺
    /// g(ℋ∇_U ωψV, X) = g(T_U ωV, BX) + g(ℋ∇_U ωV, CX); direct defect max |T_U V|.
    pub vertical_foliation: CriterionSides,
    /// F is totally geodesic ⟺ the vertical criterion and
    /// g(ℋ∇_Z ωψU, X) = g(A_Z ωU, BX) + g(ℋ∇_Z ωU, CX); direct defect max |∇F_*|.
    pub map: CriterionSides,
}

impl TotallyGeodesicReport {
    pub fn criteria(&self) -> [&CriterionSides; 3] {
        [&self.horizontal_foliation, &self.vertical_foliation, &self.map]
    }
}

impl SubmersionMap {
    /// ∇_dir of the field `field` at `x`, differentiated with the scheme
    /// suited to projected quantities.
    pub(crate) fn nabla_projected<F>(&self, x: &DVector<f64>, dir: &DVector<f64>, field: F) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let y = field(x);
        let d: DVector<f64> = self.field_scheme().directional(&field, x, dir);
        Ok(d + self.source_connection().gamma_at(x)?.contract(dir, &y))
    }

    /// `steps` applied in order to the constant vector `v`, evaluated at z.
    fn projected_chain(&self, z: &DVector<f64>, v: &DVector<f64>, steps: &[Piece]) -> DVector<f64> {
        let pr = self.projectors_or_nan(z);
        let phi = self.source().phi_at(z);
        let mut w = v.clone();
        for step in steps {
            w = match step {
                Piece::V => &pr.vertical * w,
                Piece::H => &pr.horizontal * w,
                Piece::VPhi => &pr.vertical * (&phi * w),
                Piece::HPhi => &pr.horizontal * (&phi * w),
            };
        }
        w
    }

    fn require_vertical(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<()> {
        let pr = self.projectors_at(x)?;
        let defect = (&pr.horizontal * u).amax();
        if defect > 1e-8 * u.amax().max(1.0) {
            return Err(GeometryError::NotVertical { defect });
        }
        Ok(())
    }

    /// Both sides of (∇_U ω)V = C T_U V − T_U ψV and
    /// (∇_U ψ)V = B T_U V − T_U ωV, with V extended as a vertical field.
    /// `theta` adds the consequence T_{ψU}ψU + cos²θ T_U U.
    pub fn omega_parallel_defect(
        &self,
        p: &Point,
        u: &DVector<f64>,
        v: &DVector<f64>,
        theta: Option<f64>,
    ) -> Result<OmegaParallelSample> {
        let x = p.coords();
        self.require_stencil(x)?;
        self.require_vertical(x, u)?;
        self.require_vertical(x, v)?;
        let sp = self.slant_point(x)?;
        use Piece::*;
        let hat_nabla_v = sp.v(&self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V]))?);
        let nabla_omega_v = self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V, HPhi]))?;
        let nabla_psi_v = self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V, VPhi]))?;
        let tuv = self.t_at(x, u, v)?;
        let omega_lhs = sp.h(&nabla_omega_v) - sp.hphi(&hat_nabla_v);
        let omega_rhs = sp.hphi(&tuv) - self.t_at(x, u, &sp.vphi(v))?;
        let psi_lhs = sp.v(&nabla_psi_v) - sp.vphi(&hat_nabla_v);
        let psi_rhs = sp.vphi(&tuv) - self.t_at(x, u, &sp.hphi(v))?;
        let parallel_consequence = match theta {
            Some(theta) => {
                let psi_u = sp.vphi(u);
                Some(self.t_at(x, &psi_u, &psi_u)? + self.t_at(x, u, u)? * theta.cos().powi(2))
            }
            None => None,
        };
        Ok(OmegaParallelSample {
            point: p.clone(),
            omega_lhs,
            omega_rhs,
            psi_lhs,
            psi_rhs,
            parallel_consequence,
        })
    }

    /// (∇_U Q)V = 𝒱∇_U(QV) − Q(∇̂_U V) with Q = ψ².
    pub fn check_nabla_q(&self, slant: &SlantReport, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        slant.require_slant()?;
        let x = p.coords();
        self.require_stencil(x)?;
        self.require_vertical(x, u)?;
        self.require_vertical(x, v)?;
        let sp = self.slant_point(x)?;
        use Piece::*;
        let hat_nabla_v = sp.v(&self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V]))?);
        let nabla_qv = self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V, VPhi, VPhi]))?;
        Ok(sp.v(&nabla_qv) - sp.vphi(&sp.vphi(&hat_nabla_v)))
    }

    /// (∇ω)/(∇ψ) identities and ∇Q = 0 at the points of the slant report.
    pub fn check_slant_derivatives(&self, slant: &SlantReport, seed: u64) -> Result<Report> {
        slant.require_slant()?;
        let mut omega = Check::new("(nabla_U omega)V = C T_U V - T_U psi V", DERIVATIVE_TOLERANCE);
        let mut psi = Check::new("(nabla_U psi)V = B T_U V - T_U omega V", DERIVATIVE_TOLERANCE);
        let mut q = Check::new("(nabla_U Q)V = 0", DERIVATIVE_TOLERANCE);
        let mut rng = Sampler::new(seed ^ 0xd0d0);
        for x in &slant.points {
            let p = Point::from_coords(x.clone());
            let sp = self.slant_point(x)?;
            let n = self.source_dim();
            let u = sp.v(&rng.vector(n));
            let v = sp.v(&rng.vector(n));
            let sample = self.omega_parallel_defect(&p, &u, &v, None)?;
            omega.record(sample.omega_residual());
            psi.record(sample.psi_residual());
            q.record(self.check_nabla_q(slant, &p, &u, &v)?.amax());
        }
        let mut checks = CheckSet::new();
        for c in [omega, psi, q] {
            checks.push(c);
        }
        Ok(Report {
            checks,
            samples: slant.points.len(),
            resampled: slant.resampled,
        })
    }

    /// Totally-geodesic criteria of a slant submersion at `p`.
    pub fn totally_geodesic_criteria(&self, slant: &SlantReport, p: &Point) -> Result<TotallyGeodesicReport> {
        slant.require_slant()?;
        if slant.xi_position == XiPosition::Oblique {
            return Err(GeometryError::WrongXiPosition(slant.xi_position.to_string()));
        }
        self.criteria_sides(p)
    }

    /// Both sides of every criterion and the direct defects over the split
    /// frame at `p`, without any slant precondition.
    pub fn criteria_sides(&self, p: &Point) -> Result<TotallyGeodesicReport> {
        let x = p.coords();
        self.require_stencil(x)?;
        self.differential(p)?;
        let sp = self.slant_point(x)?;
        let g = sp.g().clone();
        let ip = |a: &DVector<f64>, b: &DVector<f64>| linalg::inner(&g, a, b);
        let verticals = sp.split.vertical.clone();
        let horizontals = sp.split.horizontal.clone();
        use Piece::*;

        let mut r_h: f64 = 0.0;
        let mut d_h: f64 = 0.0;
        for hx in &horizontals {
            for hy in &horizontals {
                let nabla_y = sp.h(&self.nabla_projected(x, hx, |z| self.projected_chain(z, hy, &[H]))?);
                let nabla_cy = sp.h(&self.nabla_projected(x, hx, |z| self.projected_chain(z, hy, &[H, HPhi]))?);
                let a_by = self.a_at(x, hx, &sp.vphi(hy))?;
                for u in &verticals {
                    let omega_u = sp.hphi(u);
                    let lhs = ip(&nabla_y, &sp.hphi(&sp.vphi(u)));
                    let rhs = ip(&a_by, &omega_u) + ip(&nabla_cy, &omega_u);
                    r_h = r_h.max((lhs - rhs).abs());
                }
                d_h = d_h.max(self.a_at(x, hx, hy)?.amax());
            }
        }

        let mut r_v: f64 = 0.0;
        let mut d_v: f64 = 0.0;
        for u in &verticals {
            for v in &verticals {
                let nabla_wpsi = sp.h(&self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V, VPhi, HPhi]))?);
                let nabla_w = sp.h(&self.nabla_projected(x, u, |z| self.projected_chain(z, v, &[V, HPhi]))?);
                let t_w = self.t_at(x, u, &sp.hphi(v))?;
                for hx in &horizontals {
                    let lhs = ip(&nabla_wpsi, hx);
                    let rhs = ip(&t_w, &sp.vphi(hx)) + ip(&nabla_w, &sp.hphi(hx));
                    r_v = r_v.max((lhs - rhs).abs());
                }
                d_v = d_v.max(self.t_at(x, u, v)?.amax());
            }
        }

        let mut r_m = r_v;
        for hz in &horizontals {
            for u in &verticals {
                let nabla_wpsi = sp.h(&self.nabla_projected(x, hz, |z| self.projected_chain(z, u, &[V, VPhi, HPhi]))?);
                let nabla_w = sp.h(&self.nabla_projected(x, hz, |z| self.projected_chain(z, u, &[V, HPhi]))?);
                let a_w = self.a_at(x, hz, &sp.hphi(u))?;
                for hx in &horizontals {
                    let lhs = ip(&nabla_wpsi, hx);
                    let rhs = ip(&a_w, &sp.vphi(hx)) + ip(&nabla_w, &sp.hphi(hx));
                    r_m = r_m.max((lhs - rhs).abs());
                }
            }
        }
        let mut d_m: f64 = 0.0;
        let frame = sp.split.frame();
        for a in &frame {
            for b in &frame {
                d_m = d_m.max(self.second_fundamental_form_at(x, a, b)?.amax());
            }
        }

        Ok(TotallyGeodesicReport {
            point: p.clone(),
            horizontal_foliation: CriterionSides {
                name: "horizontal distribution totally geodesic".into(),
                max_residual: r_h,
                direct_defect: d_h,
            },
            vertical_foliation: CriterionSides {
                name: "fibres totally geodesic".into(),
                max_residual: r_v,
                direct_defect: d_v,
            },
            map: CriterionSides {
                name: "F totally geodesic".into(),
                max_residual: r_m,
                direct_defect: d_m,
            },
        })
    }
}

/// One step of a projected chain: a projector, or φ followed by one.
#[derive(Debug, Clone, Copy)]
enum Piece {
    V,
    H,
    VPhi,
    HPhi,
}
