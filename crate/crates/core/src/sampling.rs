//! Seeded sampling of points, vectors and smooth test fields.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Reals are drawn with `rand`'s standard
//! `[0, 1)` conversion, so a given seed yields the same sample set on every
//! platform.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::manifold::DomainBox;

/// Sampled points stay this far from the domain boundary.
pub const SAMPLE_INSET: f64 = 0.02;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn point(&mut self, domain: &DomainBox) -> DVector<f64> {
        domain.sample(&mut self.rng, SAMPLE_INSET)
    }

    pub fn points(&mut self, domain: &DomainBox, count: usize) -> Vec<DVector<f64>> {
        (0..count).map(|_| self.point(domain)).collect()
    }

    /// Uniform in `[-1, 1)^n`.
    pub fn vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| 2.0 * self.rng.random::<f64>() - 1.0)
    }

    pub fn matrix(&mut self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| 2.0 * self.rng.random::<f64>() - 1.0)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Random affine field `x ↦ a + B (x − base)`.
    pub fn affine_field(&mut self, base: &DVector<f64>) -> AffineField {
        let n = base.len();
        AffineField {
            base: base.clone(),
            offset: self.vector(n),
            linear: self.matrix(n),
        }
    }
}

/// Smooth test field with a non-trivial derivative.
#[derive(Debug, Clone)]
pub struct AffineField {
    base: DVector<f64>,
    offset: DVector<f64>,
    linear: DMatrix<f64>,
}

impl AffineField {
    pub fn at(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.linear * (x - &self.base)
    }
}
