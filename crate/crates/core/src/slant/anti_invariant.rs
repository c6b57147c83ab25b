//! θ = π/2 with ξ horizontal, where (ker F_*)^⊥ = φ(ker F_*) ⊕ ⟨ξ⟩.

use nalgebra::DVector;

use super::{SlantPoint, XiPosition, ALGEBRA_TOLERANCE};
use crate::check::{Check, CheckSet, Report};
use crate::error::{GeometryError, Result};
use crate::manifold::Point;
use crate::sampling::Sampler;
use crate::submersion::SubmersionMap;

const PRECONDITION_TOLERANCE: f64 = 1e-8;
const TENSOR_TOLERANCE: f64 = 1e-7;
const SECTIONAL_TOLERANCE: f64 = 1e-6;
const MIXED_CURVATURE_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct AntiInvariantReport {
    pub report: Report,
    /// Largest |H| seen through `phi_sectional` on unit vectors ⊥ ξ.
    pub max_abs_phi_sectional: f64,
    pub fibres_totally_geodesic: bool,
    pub note: String,
}

impl AntiInvariantReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

impl SubmersionMap {
    /// Largest failure of (ker F_*)^⊥ = φ(ker F_*) ⊕ ⟨ξ⟩ at one point.
    fn anti_invariant_defect(&self, sp: &SlantPoint) -> f64 {
        let k = sp.split.vertical.len();
        let h = sp.split.horizontal.len();
        if h != k + 1 || sp.xi_position() != XiPosition::Horizontal {
            return f64::INFINITY;
        }
        sp.split
            .vertical
            .iter()
            .map(|u| sp.norm(&sp.vphi(u)) / sp.norm(u).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Commutation of φ with T and A, A ≡ 0, the φ-sectional curvature
    /// through T on vertical and horizontal unit vectors, and the mixed
    /// curvature R(Y, W, V, X) = g((∇_X T)(V, W), Y) − g(T_V X, T_W Y).
    pub fn anti_invariant_checks(&self, samples: usize, seed: u64) -> Result<AntiInvariantReport> {
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        for x in &points {
            let sp = self.slant_point(x)?;
            let defect = self.anti_invariant_defect(&sp);
            if !(defect < PRECONDITION_TOLERANCE) {
                return Err(GeometryError::NotAntiInvariant { defect });
            }
        }
        let mut rng = Sampler::new(seed ^ 0xa171);
        let mut c_zero = Check::new("C phi U = 0", ALGEBRA_TOLERANCE);
        let mut t_comm = Check::new("T_U phi E = phi T_U E", TENSOR_TOLERANCE);
        let mut a_comm = Check::new("A_X phi E = phi A_X E", TENSOR_TOLERANCE);
        let mut a_skew = Check::new("A_X phi Y = -A_Y phi X", TENSOR_TOLERANCE);
        let mut a_zero = Check::new("A_X = 0", TENSOR_TOLERANCE);
        let mut vertical_h = Check::new("H(V) from T = phi-sectional curvature", SECTIONAL_TOLERANCE);
        let mut horizontal_h = Check::new("H(X) from T = phi-sectional curvature", SECTIONAL_TOLERANCE);
        let mut mixed = Check::new("R(Y, W, V, X) = g((nabla_X T)(V, W), Y) - g(T_V X, T_W Y)", MIXED_CURVATURE_TOLERANCE);
        let mut max_h: f64 = 0.0;
        let mut max_t: f64 = 0.0;
        for x in &points {
            self.require_stencil(x)?;
            let p = Point::from_coords(x.clone());
            let sp = self.slant_point(x)?;
            let n = sp.phi.nrows();
            let unit = |w: DVector<f64>| {
                let s = sp.norm(&w);
                w / s
            };
            // Horizontal vectors orthogonal to ξ are exactly φ(ker F_*).
            let perp_xi = |w: DVector<f64>| {
                let xi_hat = &sp.xi / sp.norm(&sp.xi);
                let c = sp.ip(&xi_hat, &w);
                w - xi_hat * c
            };
            let u = unit(sp.v(&rng.vector(n)));
            let v = unit(sp.v(&rng.vector(n)));
            let e = rng.vector(n);
            let hx = sp.h(&rng.vector(n));
            let hy = sp.h(&rng.vector(n));

            c_zero.record(sp.norm(&sp.hphi(&sp.phi(&u))));

            let tue = self.t_at(x, &u, &e)?;
            t_comm.record(sp.norm(&(self.t_at(x, &u, &sp.phi(&e))? - sp.phi(&tue))));
            max_t = max_t.max(sp.norm(&self.t_at(x, &u, &v)?));
            let axe = self.a_at(x, &hx, &e)?;
            a_comm.record(sp.norm(&(self.a_at(x, &hx, &sp.phi(&e))? - sp.phi(&axe))));
            let lhs = self.a_at(x, &hx, &sp.phi(&hy))? + self.a_at(x, &hy, &sp.phi(&hx))?;
            a_skew.record(sp.norm(&lhs));
            a_zero.record(sp.norm(&self.a_at(x, &hx, &hy)?));
            a_zero.record(sp.norm(&self.a_at(x, &hx, &u)?));

            // H(V) = g((∇_{φV} T)(V, V), φV) − ‖T_V V‖².
            let phi_u = sp.phi(&u);
            let tvv = self.t_at(x, &u, &u)?;
            let h_v = sp.ip(&self.nabla_t_at(x, &phi_u, &u, &u)?, &phi_u) - sp.ip(&tvv, &tvv);
            let direct = self.source().phi_sectional(&p, &u)?;
            vertical_h.record(h_v - direct);
            max_h = max_h.max(direct.abs());

            // H(X) = g((∇_X T)(φX, φX), X) − ‖T_{φX} X‖² for unit X ⊥ ξ.
            let ux = unit(perp_xi(hx.clone()));
            let phi_x = sp.phi(&ux);
            let t = self.t_at(x, &phi_x, &ux)?;
            let h_x = sp.ip(&self.nabla_t_at(x, &ux, &phi_x, &phi_x)?, &ux) - sp.ip(&t, &t);
            let direct = self.source().phi_sectional(&p, &ux)?;
            horizontal_h.record(h_x - direct);
            max_h = max_h.max(direct.abs());

            let r = self.source_connection().riemann_tensor(&p)?;
            let lhs = r.lowered(&hy, &v, &u, &hx);
            let rhs = sp.ip(&self.nabla_t_at(x, &hx, &u, &v)?, &hy)
                - sp.ip(&self.t_at(x, &u, &hx)?, &self.t_at(x, &v, &hy)?);
            mixed.record(lhs - rhs);
        }
        let fibres_totally_geodesic = max_t < TENSOR_TOLERANCE;
        let note = if fibres_totally_geodesic && max_h < SECTIONAL_TOLERANCE {
            "c = 0 consistent".to_string()
        } else if fibres_totally_geodesic {
            format!("totally geodesic fibres with |H| up to {max_h:e}: a space form here needs c = 0")
        } else {
            "fibres not totally geodesic".to_string()
        };
        let mut checks = CheckSet::new();
        for c in [c_zero, t_comm, a_comm, a_skew, a_zero, vertical_h, horizontal_h, mixed] {
            checks.push(c);
        }
        Ok(AntiInvariantReport {
            report: Report {
                checks,
                samples: points.len(),
                resampled,
            },
            max_abs_phi_sectional: max_h,
            fibres_totally_geodesic,
            note,
        })
    }
}
