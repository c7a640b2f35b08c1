use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant diffusivity `b₁` on the closed core and `b₂` on the
/// shell, optionally regularized by a cubic smoothstep ramp of width `ε`
/// centred on the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionField {
    b1: f64,
    b2: f64,
    width: f64,
}

impl DiffusionField {
    pub fn new(b1: f64, b2: f64) -> Result<Self> {
        Self::regularized(b1, b2, 0.0)
    }

    pub fn regularized(b1: f64, b2: f64, width: f64) -> Result<Self> {
        for (name, b) in [("b1", b1), ("b2", b2)] {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidDiffusion(format!("{name} must be positive, got {b}")));
            }
        }
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::InvalidDiffusion(format!("regularization width must be non-negative, got {width}")));
        }
        Ok(Self { b1, b2, width })
    }

    pub fn uniform(b: f64) -> Result<Self> {
        Self::new(b, b)
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn b_min(&self) -> f64 {
        self.b1.min(self.b2)
    }

    pub fn b_max(&self) -> f64 {
        self.b1.max(self.b2)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::regularized(s * self.b1, s * self.b2, self.width)
    }

    /// Same coefficients with the jump restored (`ε = 0`).
    pub fn sharp(&self) -> Self {
        Self { width: 0.0, ..*self }
    }

    /// Interval on which the coefficient is not constant, if any.
    pub fn ramp(&self, interface: f64) -> Option<(f64, f64)> {
        if self.width > 0.0 && self.b1 != self.b2 {
            Some((interface - 0.5 * self.width, interface + 0.5 * self.width))
        } else {
            None
        }
    }

    pub fn value(&self, x: f64, interface: f64) -> f64 {
        match self.ramp(interface) {
            None => {
                if x <= interface {
                    self.b1
                } else {
                    self.b2
                }
            }
            Some((lo, _)) => {
                let t = ((x - lo) / self.width).clamp(0.0, 1.0);
                self.b1 + (self.b2 - self.b1) * t * t * (3.0 - 2.0 * t)
            }
        }
    }
}
