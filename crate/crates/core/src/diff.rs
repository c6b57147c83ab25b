//! Central finite differences.

use std::ops::{Mul, Sub};

use nalgebra::DVector;

use crate::error::{GeometryError, Result};

/// Central-difference stencil: step size and accuracy order (2 or 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffScheme {
    step: f64,
    order: u8,
}

impl DiffScheme {
    pub fn new(step: f64, order: u8) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(GeometryError::InvalidScheme(format!("step {step} must be > 0")));
        }
        if order != 2 && order != 4 {
            return Err(GeometryError::InvalidScheme(format!("order {order} not in {{2, 4}}")));
        }
        Ok(Self { step, order })
    }

    /// Default for first derivatives: step 1e-5, order 2.
    pub fn first() -> Self {
        Self { step: 1e-5, order: 2 }
    }

    /// Outer level of curvature computations: step 1e-4, order 2.
    pub fn curvature() -> Self {
        Self { step: 1e-4, order: 2 }
    }

    /// Nested levels on a reparameterised fibre; order 4 keeps the
    /// truncation error small at a step that suppresses round-off.
    pub fn intrinsic() -> Self {
        Self { step: 4e-3, order: 4 }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Largest multiple of the direction the stencil visits.
    pub fn reach(&self) -> f64 {
        self.step * f64::from(self.order / 2)
    }

    /// Derivative of `f` at `p` along `dir` (not normalised).
    pub fn directional<T, F>(&self, f: F, p: &DVector<f64>, dir: &DVector<f64>) -> T
    where
        F: Fn(&DVector<f64>) -> T,
        T: Sub<Output = T> + Mul<f64, Output = T>,
    {
        let h = self.step;
        let at = |k: f64| {
            let mut x = p.clone();
            x.axpy(k * h, dir, 1.0);
            f(&x)
        };
        match self.order {
            2 => (at(1.0) - at(-1.0)) * (0.5 / h),
            _ => {
                let near = at(1.0) - at(-1.0);
                let far = at(2.0) - at(-2.0);
                (near * 8.0 - far) * (1.0 / (12.0 * h))
            }
        }
    }

    /// Partial derivative along coordinate `axis`.
    pub fn partial<T, F>(&self, f: F, p: &DVector<f64>, axis: usize) -> T
    where
        F: Fn(&DVector<f64>) -> T,
        T: Sub<Output = T> + Mul<f64, Output = T>,
    {
        let e = DVector::from_fn(p.len(), |i, _| if i == axis { 1.0 } else { 0.0 });
        self.directional(f, p, &e)
    }
}

impl Default for DiffScheme {
    fn default() -> Self {
        Self::first()
    }
}

/// Step sizes for the nested derivative levels used across the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffConfig {
    /// Metric derivatives, Jacobians, covariant derivatives of fields.
    pub first: DiffScheme,
    /// Derivatives of quantities that already contain a first derivative.
    pub outer: DiffScheme,
    /// Intrinsic fibre curvature.
    pub intrinsic: DiffScheme,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            first: DiffScheme::first(),
            outer: DiffScheme::curvature(),
            intrinsic: DiffScheme::intrinsic(),
        }
    }
}

impl DiffConfig {
    /// Upper bound on how far nested stencils wander from the base point
    /// for unit-size directions.
    pub fn reach(&self) -> f64 {
        4.0 * (2.0 * self.first.reach() + 2.0 * self.outer.reach())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_schemes() {
        assert!(DiffScheme::new(0.0, 2).is_err());
        assert!(DiffScheme::new(1e-3, 3).is_err());
        assert!(DiffScheme::new(f64::NAN, 2).is_err());
        assert!(DiffScheme::new(1e-3, 4).is_ok());
    }

    #[test]
    fn order_four_beats_order_two() {
        let p = DVector::from_column_slice(&[0.3]);
        let f = |x: &DVector<f64>| x[0].exp() * x[0].sin();
        let exact = 0.3f64.exp() * (0.3f64.sin() + 0.3f64.cos());
        let two = DiffScheme::new(1e-3, 2).unwrap().partial(f, &p, 0);
        let four = DiffScheme::new(1e-3, 4).unwrap().partial(f, &p, 0);
        assert!((four - exact).abs() < (two - exact).abs());
        assert!((four - two).abs() < 10.0 * 1e-6);
    }
}
