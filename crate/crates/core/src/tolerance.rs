//! Rank and residual thresholds.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Thresholds for rank decisions and residual checks.
///
/// A quantity of magnitude `scale` is treated as zero when it is below
/// `max(abs, rel * scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative threshold against the dominant singular value or pivot.
    pub rel: f64,
    /// Absolute floor.
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(abs > 0.0 && abs <= rel && rel < 1.0) {
            return Err(Error::InvalidTolerance);
        }
        Ok(Tolerance { rel, abs })
    }

    /// Threshold below which a value at the given scale counts as zero.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }

    /// `|value| <= threshold(scale)`.
    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        value.abs() <= self.threshold(scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let tol = Tolerance::default();
        assert!(Tolerance::new(tol.rel, tol.abs).is_ok());
    }

    #[test]
    fn rejects_inverted_thresholds() {
        assert!(Tolerance::new(1e-12, 1e-9).is_err());
        assert!(Tolerance::new(2.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-9, 0.0).is_err());
    }

    #[test]
    fn threshold_scales() {
        let tol = Tolerance::default();
        assert_eq!(tol.threshold(0.0), tol.abs);
        assert_eq!(tol.threshold(1e6), 1e6 * tol.rel);
    }
}
