//! Adapted orthonormal frames of a proper slant submersion and the
//! complement μ of ω(ker F_*) in the horizontal space.
//!
//! Vertical part: `e1, sec θ ψe1, e2, sec θ ψe2, …` followed by ξ when ξ is
//! vertical. Horizontal part: `csc θ ωe` for each of those (ξ excluded),
//! then a basis of μ, then ξ when ξ is horizontal.

use nalgebra::{DMatrix, DVector};

use super::{SlantPoint, SlantReport, XiPosition};
use crate::check::{Check, CheckSet, Report};
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::Point;
use crate::submersion::SubmersionMap;

pub const FRAME_TOLERANCE: f64 = 1e-8;
pub const MU_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub point: Point,
    pub theta: f64,
    pub xi_position: XiPosition,
    pub vertical: Vec<DVector<f64>>,
    pub horizontal: Vec<DVector<f64>>,
    /// One label per vector, vertical first.
    pub labels: Vec<String>,
    pub metric: DMatrix<f64>,
}

impl AdaptedFrame {
    pub fn frame(&self) -> Vec<DVector<f64>> {
        self.vertical.iter().chain(&self.horizontal).cloned().collect()
    }

    /// Number of (e, sec θ ψe) pairs.
    pub fn pairs(&self) -> usize {
        self.vertical.len() / 2
    }

    /// max |g(e_a, e_b) − δ_ab| over the whole frame.
    pub fn orthonormality_defect(&self) -> f64 {
        let frame = self.frame();
        let mut worst: f64 = 0.0;
        for (a, u) in frame.iter().enumerate() {
            for (b, v) in frame.iter().enumerate() {
                let delta = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((linalg::inner(&self.metric, u, v) - delta).abs());
            }
        }
        worst
    }
}

/// μ (ξ vertical) or 𝒟 (ξ horizontal) at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MuReport {
    pub point: Point,
    pub xi_position: XiPosition,
    pub basis: Vec<DVector<f64>>,
    pub dim: usize,
    /// 2(n − m) for ξ vertical, 2(n − m − 1) for ξ horizontal, where the
    /// source has dimension 2m + 1 and the target n. Only stated for proper
    /// slant submersions.
    pub expected_dim: Option<usize>,
    /// max ‖(I − P_μ)φX‖ over the basis of μ.
    pub invariance_defect: f64,
}

impl SubmersionMap {
    /// The frame with e1 chosen from the ψ-invariant part of the vertical
    /// space.
    pub fn adapted_frame(&self, slant: &SlantReport, p: &Point) -> Result<AdaptedFrame> {
        self.adapted_frame_with(slant, p, None)
    }

    /// As [`adapted_frame`](Self::adapted_frame), starting from the vertical
    /// part of `first` when given.
    pub fn adapted_frame_with(
        &self,
        slant: &SlantReport,
        p: &Point,
        first: Option<&DVector<f64>>,
    ) -> Result<AdaptedFrame> {
        slant.require_proper()?;
        self.differential(p)?;
        let sp = self.slant_point(p.coords())?;
        let position = sp.xi_position();
        if position == XiPosition::Oblique {
            return Err(GeometryError::WrongXiPosition(position.to_string()));
        }
        let k = self.vertical_dim();
        // dim ker F_* = 2m − n + 1 is 2k + 1 with ξ vertical and 2k with ξ
        // horizontal; the complement of ξ must be even.
        let d_dim = if position == XiPosition::Vertical { k.checked_sub(1) } else { Some(k) };
        let Some(d_dim) = d_dim.filter(|d| d % 2 == 0 && *d > 0) else {
            return Err(GeometryError::DimensionMismatch {
                expected: k + 1,
                found: k,
            });
        };
        let theta = slant.mean;
        let (sec, csc) = (1.0 / theta.cos(), 1.0 / theta.sin());
        let mut candidates: Vec<DVector<f64>> = first.map(|f| sp.v(f)).into_iter().collect();
        candidates.extend(sp.distribution_d());
        let mut vertical: Vec<DVector<f64>> = Vec::new();
        let mut labels = Vec::new();
        let xi_hat = sp.xi.clone() / sp.norm(&sp.xi);
        for cand in candidates {
            if vertical.len() == d_dim {
                break;
            }
            let mut w = cand.clone();
            if position == XiPosition::Vertical {
                w -= &xi_hat * sp.ip(&xi_hat, &w);
            }
            for e in &vertical {
                w -= e * sp.ip(e, &w);
            }
            let size = sp.norm(&w);
            if size < 1e-6 * sp.norm(&cand).max(1e-300) {
                continue;
            }
            let e = w / size;
            let partner = sp.vphi(&e) * sec;
            let i = vertical.len() / 2 + 1;
            labels.push(format!("e{i}"));
            labels.push(format!("sec(theta) psi e{i}"));
            vertical.push(e);
            vertical.push(partner);
        }
        if vertical.len() != d_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: d_dim,
                found: vertical.len(),
            });
        }
        let mut horizontal: Vec<DVector<f64>> = Vec::new();
        let mut h_labels = Vec::new();
        for (e, label) in vertical.iter().zip(&labels) {
            horizontal.push(sp.hphi(e) * csc);
            h_labels.push(format!("csc(theta) omega ({label})"));
        }
        if position == XiPosition::Vertical {
            vertical.push(xi_hat.clone());
            labels.push("xi".into());
        }
        let mu = mu_basis(&sp);
        for (i, b) in mu.iter().enumerate() {
            horizontal.push(b.clone());
            h_labels.push(format!("mu{}", i + 1));
        }
        if position == XiPosition::Horizontal {
            horizontal.push(xi_hat);
            h_labels.push("xi".into());
        }
        labels.extend(h_labels);
        Ok(AdaptedFrame {
            point: p.clone(),
            theta,
            xi_position: position,
            vertical,
            horizontal,
            labels,
            metric: sp.split.metric.clone(),
        })
    }

    pub fn mu_distribution(&self, slant: &SlantReport, p: &Point) -> Result<MuReport> {
        slant.require_slant()?;
        self.differential(p)?;
        let sp = self.slant_point(p.coords())?;
        let basis = mu_basis(&sp);
        let mut defect: f64 = 0.0;
        for b in &basis {
            let phi_b = sp.phi(b);
            let mut rest = phi_b.clone();
            for c in &basis {
                rest -= c * sp.ip(c, &phi_b);
            }
            defect = defect.max(sp.norm(&rest));
        }
        let m = (self.source_dim() - 1) / 2;
        let n = self.target_dim();
        let expected_dim = if slant.is_proper() {
            match slant.xi_position {
                XiPosition::Vertical => (2 * n).checked_sub(2 * m),
                XiPosition::Horizontal => (2 * n).checked_sub(2 * m + 2),
                XiPosition::Oblique => None,
            }
        } else {
            None
        };
        Ok(MuReport {
            point: p.clone(),
            xi_position: sp.xi_position(),
            dim: basis.len(),
            basis,
            expected_dim,
            invariance_defect: defect,
        })
    }

    /// Frame orthonormality, the frame bookkeeping and μ invariance at every
    /// point of the slant report.
    pub fn check_frames(&self, slant: &SlantReport) -> Result<Report> {
        let mut ortho = Check::new("adapted frame orthonormal", FRAME_TOLERANCE);
        let mut count = Check::new("dim ker F_* = 2k + 1 (xi vertical) or 2k (xi horizontal)", 0.0);
        let mut mu_dim = Check::new("dim mu = 2(n - m) (xi vertical) or 2(n - m - 1) (xi horizontal)", 0.0);
        let mut mu_inv = Check::new("phi mu = mu", MU_TOLERANCE);
        for x in &slant.points {
            let p = Point::from_coords(x.clone());
            let frame = self.adapted_frame(slant, &p)?;
            ortho.record(frame.orthonormality_defect());
            let xi = usize::from(frame.xi_position == XiPosition::Vertical);
            let expected = 2 * frame.pairs() + xi;
            count.record(expected.abs_diff(self.vertical_dim()) as f64);
            let mu = self.mu_distribution(slant, &p)?;
            mu_dim.record(mu.expected_dim.map_or(f64::NAN, |d| d.abs_diff(mu.dim) as f64));
            mu_inv.record(mu.invariance_defect);
        }
        let mut checks = CheckSet::new();
        for c in [ortho, count, mu_dim, mu_inv] {
            checks.push(c);
        }
        Ok(Report {
            checks,
            samples: slant.points.len(),
            resampled: slant.resampled,
        })
    }
}

/// Orthogonal complement of ω(ker F_*) (and ξ, if horizontal) inside the
/// horizontal space.
fn mu_basis(sp: &SlantPoint) -> Vec<DVector<f64>> {
    let g = sp.g();
    let mut spanning: Vec<DVector<f64>> = sp.split.vertical.iter().map(|u| sp.hphi(u)).collect();
    if sp.xi_position() == XiPosition::Horizontal {
        spanning.push(sp.xi.clone());
    }
    let taken = linalg::orthonormal_span(g, &spanning, 1e-8);
    let rest: Vec<DVector<f64>> = sp
        .split
        .horizontal
        .iter()
        .map(|h| {
            let mut w = h.clone();
            for t in &taken {
                w -= t * linalg::inner(g, t, &w);
            }
            w
        })
        .collect();
    linalg::orthonormal_span(g, &rest, 1e-6)
}
