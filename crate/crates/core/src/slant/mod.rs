//! Slant geometry of a submersion F from an almost contact metric manifold.
//!
//! For vertical U and horizontal X the structure tensor splits as
//!
//! ```text
//! φU = ψU + ωU      (𝒱φU + ℋφU)
//! φX = BX + CX      (𝒱φX + ℋφX)
//! ```
//!
//! and the slant angle θ(U) is the angle between φU and ker F_*, i.e.
//! `atan2(‖ωU‖, ‖ψU‖)`.

mod anti_invariant;
mod derivatives;
mod frame;
mod inequality;
mod relations;

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifold::Point;
use crate::sampling::Sampler;
use crate::submersion::{SubmersionMap, VerticalHorizontalSplit};

pub use anti_invariant::AntiInvariantReport;
pub use derivatives::{CriterionSides, OmegaParallelSample, TotallyGeodesicReport};
pub use frame::{AdaptedFrame, MuReport};
pub use inequality::{InequalityCase, InequalityReport, TTable};

/// Absolute tolerance on θ for the constancy verdict.
pub const ANGLE_TOLERANCE: f64 = 1e-6;
/// Random vertical directions tried per sample point.
pub const DEFAULT_DIRECTIONS: usize = 20;
/// U counts as parallel to ξ when ‖U − η(U)ξ‖ < this · ‖U‖.
pub const XI_EXCLUSION: f64 = 1e-10;
/// ξ counts as vertical (horizontal) when its ℋ (𝒱) part is below this.
pub const XI_POSITION_TOLERANCE: f64 = 1e-8;
/// Projection identities (φ reassembly).
pub const REASSEMBLY_TOLERANCE: f64 = 1e-9;
/// Algebraic identities between ψ, ω, B, C.
pub const ALGEBRA_TOLERANCE: f64 = 1e-8;
/// ψ² and the norm relations.
pub const RELATION_TOLERANCE: f64 = 1e-6;
/// Identities involving one covariant derivative of a projected field.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-5;

/// Where ξ sits relative to the vertical/horizontal split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiPosition {
    Vertical,
    Horizontal,
    Oblique,
}

impl XiPosition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Vertical => "vertical",
            Self::Horizontal => "horizontal",
            Self::Oblique => "oblique",
        }
    }
}

impl fmt::Display for XiPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// θ = 0.
    Invariant,
    /// θ = π/2.
    AntiInvariant,
    /// Constant θ strictly between 0 and π/2.
    ProperSlant,
    NotSlant,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Invariant => "invariant",
            Self::AntiInvariant => "anti-invariant",
            Self::ProperSlant => "proper-slant",
            Self::NotSlant => "not-slant",
        }
    }

    pub fn is_slant(&self) -> bool {
        !matches!(self, Self::NotSlant)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// φU = ψU + ωU for a vertical U.
#[derive(Debug, Clone, PartialEq)]
pub struct SlantDecomposition {
    pub point: Point,
    pub input: DVector<f64>,
    pub psi: DVector<f64>,
    pub omega: DVector<f64>,
}

/// φX = BX + CX for a horizontal X.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalDecomposition {
    pub point: Point,
    pub input: DVector<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
}

/// Outcome of [`SubmersionMap::slant_constancy`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlantReport {
    pub xi_position: XiPosition,
    /// θ per (point, direction), radians.
    pub angles: Vec<f64>,
    pub mean: f64,
    pub max_deviation: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub points: Vec<DVector<f64>>,
    pub directions: usize,
    pub resampled: usize,
}

impl SlantReport {
    /// λ = cos²θ.
    pub fn lambda(&self) -> f64 {
        self.mean.cos().powi(2)
    }

    pub fn is_proper(&self) -> bool {
        self.verdict == Verdict::ProperSlant
    }

    pub(crate) fn require_slant(&self) -> Result<()> {
        if self.verdict.is_slant() {
            Ok(())
        } else {
            Err(GeometryError::NotSlant(format!(
                "angle deviates by {:e} with xi {}",
                self.max_deviation, self.xi_position
            )))
        }
    }

    pub(crate) fn require_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(GeometryError::NotProperSlant(format!(
                "verdict {} (theta = {})",
                self.verdict, self.mean
            )))
        }
    }
}

/// Everything pointwise the slant computations need at one base point.
pub(crate) struct SlantPoint {
    pub split: VerticalHorizontalSplit,
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
}

impl SlantPoint {
    pub fn g(&self) -> &DMatrix<f64> {
        &self.split.metric
    }

    pub fn ip(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        linalg::inner(&self.split.metric, a, b)
    }

    pub fn norm(&self, a: &DVector<f64>) -> f64 {
        linalg::norm(&self.split.metric, a)
    }

    pub fn v(&self, e: &DVector<f64>) -> DVector<f64> {
        self.split.vertical_part(e)
    }

    pub fn h(&self, e: &DVector<f64>) -> DVector<f64> {
        self.split.horizontal_part(e)
    }

    pub fn phi(&self, e: &DVector<f64>) -> DVector<f64> {
        &self.phi * e
    }

    /// ψ (on vertical input) and B (on horizontal input) are both 𝒱φ.
    pub fn vphi(&self, e: &DVector<f64>) -> DVector<f64> {
        self.v(&self.phi(e))
    }

    /// ω and C are both ℋφ.
    pub fn hphi(&self, e: &DVector<f64>) -> DVector<f64> {
        self.h(&self.phi(e))
    }

    pub fn eta(&self, e: &DVector<f64>) -> f64 {
        self.eta.dot(e)
    }

    pub fn xi_position(&self) -> XiPosition {
        let scale = self.norm(&self.xi).max(1.0);
        if self.norm(&self.h(&self.xi)) <= XI_POSITION_TOLERANCE * scale {
            XiPosition::Vertical
        } else if self.norm(&self.v(&self.xi)) <= XI_POSITION_TOLERANCE * scale {
            XiPosition::Horizontal
        } else {
            XiPosition::Oblique
        }
    }

    /// Vertical basis with the ξ direction removed when ξ is vertical.
    pub fn distribution_d(&self) -> Vec<DVector<f64>> {
        let mut vs: Vec<DVector<f64>> = Vec::new();
        if self.xi_position() == XiPosition::Vertical {
            vs.push(self.xi.clone());
        }
        vs.extend(self.split.vertical.iter().cloned());
        let mut basis = linalg::orthonormal_span(self.g(), &vs, 1e-8);
        if self.xi_position() == XiPosition::Vertical {
            basis.remove(0);
        }
        basis
    }

    /// θ(U) with the ξ exclusion applied when ξ is vertical.
    pub fn angle(&self, u: &DVector<f64>) -> Result<f64> {
        let size = self.norm(u);
        if self.xi_position() == XiPosition::Vertical {
            let rest = u - &self.xi * self.eta(u);
            if self.norm(&rest) < XI_EXCLUSION * size || size == 0.0 {
                return Err(GeometryError::XiDirection);
            }
        }
        let phi_u = self.phi(u);
        if !(self.norm(&phi_u) > 1e-14 * size.max(f64::MIN_POSITIVE)) {
            return Err(GeometryError::ZeroPhi);
        }
        let psi = self.norm(&self.v(&phi_u));
        let omega = self.norm(&self.h(&phi_u));
        Ok(omega.atan2(psi))
    }
}

impl SubmersionMap {
    pub(crate) fn slant_point(&self, x: &DVector<f64>) -> Result<SlantPoint> {
        let split = self.split_at(x)?;
        let s = self.source();
        Ok(SlantPoint {
            split,
            phi: s.phi_at(x),
            xi: s.xi_at(x),
            eta: s.eta_at(x),
        })
    }

    /// Where ξ sits at `p`.
    pub fn xi_position(&self, p: &Point) -> Result<XiPosition> {
        self.differential(p)?;
        Ok(self.slant_point(p.coords())?.xi_position())
    }

    pub fn decompose_vertical(&self, p: &Point, u: &DVector<f64>) -> Result<SlantDecomposition> {
        self.differential(p)?;
        let sp = self.slant_point(p.coords())?;
        let defect = sp.norm(&sp.h(u));
        if defect > 1e-8 * sp.norm(u).max(1.0) {
            return Err(GeometryError::NotVertical { defect });
        }
        Ok(SlantDecomposition {
            point: p.clone(),
            input: u.clone(),
            psi: sp.vphi(u),
            omega: sp.hphi(u),
        })
    }

    pub fn decompose_horizontal(&self, p: &Point, x: &DVector<f64>) -> Result<HorizontalDecomposition> {
        self.differential(p)?;
        let sp = self.slant_point(p.coords())?;
        let defect = sp.norm(&sp.v(x));
        if defect > 1e-8 * sp.norm(x).max(1.0) {
            return Err(GeometryError::NotHorizontal { defect });
        }
        Ok(HorizontalDecomposition {
            point: p.clone(),
            input: x.clone(),
            b: sp.vphi(x),
            c: sp.hphi(x),
        })
    }

    /// θ(U) ∈ [0, π/2] for a vertical U.
    pub fn slant_angle(&self, p: &Point, u: &DVector<f64>) -> Result<f64> {
        self.decompose_vertical(p, u)?;
        self.slant_point(p.coords())?.angle(u)
    }

    /// Evaluates θ over `directions` random admissible vertical directions at
    /// each of `samples` seeded points and classifies the result.
    pub fn slant_constancy(&self, samples: usize, directions: usize, seed: u64) -> SlantReport {
        self.slant_constancy_with(samples, directions, seed, ANGLE_TOLERANCE)
    }

    pub fn slant_constancy_with(&self, samples: usize, directions: usize, seed: u64, tolerance: f64) -> SlantReport {
        let n = self.source_dim();
        let (points, resampled) = self.sample_points(samples.max(1), seed);
        let mut rng = Sampler::new(seed ^ 0x51a7);
        let mut angles = Vec::new();
        let mut positions = Vec::new();
        let mut failed = false;
        for x in &points {
            let Ok(sp) = self.slant_point(x) else {
                failed = true;
                continue;
            };
            let position = sp.xi_position();
            positions.push(position);
            let d = sp.distribution_d();
            if d.is_empty() {
                continue;
            }
            for _ in 0..directions.max(1) {
                let coeffs = rng.vector(d.len());
                let u = d.iter().zip(coeffs.iter()).fold(DVector::zeros(n), |acc, (e, c)| acc + e * *c);
                let size = sp.norm(&u);
                if size < 1e-6 {
                    continue;
                }
                match sp.angle(&(u / size)) {
                    Ok(theta) => angles.push(theta),
                    Err(_) => failed = true,
                }
            }
        }
        let xi_position = match positions.first() {
            Some(&first) if positions.iter().all(|&q| q == first) => first,
            Some(_) => XiPosition::Oblique,
            None => XiPosition::Oblique,
        };
        let mean = if angles.is_empty() {
            f64::NAN
        } else {
            angles.iter().sum::<f64>() / angles.len() as f64
        };
        let max_deviation = angles.iter().map(|t| (t - mean).abs()).fold(0.0, f64::max);
        let verdict = if failed || angles.is_empty() || xi_position == XiPosition::Oblique || !(max_deviation <= tolerance) {
            Verdict::NotSlant
        } else if mean <= tolerance {
            Verdict::Invariant
        } else if mean >= FRAC_PI_2 - tolerance {
            Verdict::AntiInvariant
        } else {
            Verdict::ProperSlant
        };
        SlantReport {
            xi_position,
            angles,
            mean,
            max_deviation,
            verdict,
            tolerance,
            points,
            directions: directions.max(1),
            resampled,
        }
    }
}
