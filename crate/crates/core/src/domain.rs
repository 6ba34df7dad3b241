//! Material coefficients and corner geometry.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Contrasts closer than this to -1 are rejected.
const EXCLUDED_CONTRAST_TOL: f64 = 1e-14;

/// Checks that `mu` is an admissible contrast: finite, nonzero and not -1.
pub fn validate_mu(mu: f64) -> Result<f64> {
    if !mu.is_finite() {
        return Err(Error::InvalidContrast {
            mu,
            reason: "contrast must be finite",
        });
    }
    if mu == 0.0 {
        return Err(Error::InvalidContrast {
            mu,
            reason: "contrast must be nonzero",
        });
    }
    if (mu + 1.0).abs() <= EXCLUDED_CONTRAST_TOL {
        return Err(Error::ExcludedContrast { mu });
    }
    Ok(mu)
}

pub fn validate_omega(omega: f64) -> Result<f64> {
    if omega.is_finite() && omega > 0.0 && omega < TWO_PI {
        Ok(omega)
    } else {
        Err(Error::InvalidAngle { omega })
    }
}

/// Coefficients `a+` (on the large sector) and `a-` (on the small sector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialPair {
    a_plus: f64,
    a_minus: f64,
}

impl MaterialPair {
    pub fn new(a_plus: f64, a_minus: f64) -> Result<Self> {
        if !(a_plus.is_finite() && a_minus.is_finite()) || a_plus == 0.0 || a_minus == 0.0 {
            return Err(Error::InvalidContrast {
                mu: a_plus / a_minus,
                reason: "coefficients must be finite and nonzero",
            });
        }
        validate_mu(a_plus / a_minus)?;
        Ok(Self { a_plus, a_minus })
    }

    /// The pair `(a+, a-) = (mu, 1)`.
    pub fn from_contrast(mu: f64) -> Result<Self> {
        Self::new(validate_mu(mu)?, 1.0)
    }

    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }

    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }

    pub fn mu(&self) -> f64 {
        self.a_plus / self.a_minus
    }

    /// Coefficient on the given side of the interface.
    pub fn coefficient(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.a_minus,
            Side::Plus => self.a_plus,
        }
    }
}

/// One of the two sectors `G- = (0, omega)` and `G+ = (omega, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Minus, Side::Plus];
}

/// Opening of the small sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerConfig {
    omega: f64,
}

impl CornerConfig {
    pub fn new(omega: f64) -> Result<Self> {
        Ok(Self {
            omega: validate_omega(omega)?,
        })
    }

    pub fn right_angle() -> Self {
        Self { omega: FRAC_PI_2 }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Closed interval `[start, end]` of the sector.
    pub fn sector(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Minus => (0.0, self.omega),
            Side::Plus => (self.omega, TWO_PI),
        }
    }

    /// Whether the closed-form exponents apply (`omega = pi/2`).
    pub fn is_right_angle(&self) -> bool {
        (self.omega - FRAC_PI_2).abs() < 1e-14
    }

    /// Sector containing `theta` (taken modulo 2 pi); the ray `theta = omega`
    /// is attributed to `G-`.
    pub fn side_of(&self, theta: f64) -> Side {
        let t = theta.rem_euclid(TWO_PI);
        if t <= self.omega {
            Side::Minus
        } else {
            Side::Plus
        }
    }
}

impl Default for CornerConfig {
    fn default() -> Self {
        Self::right_angle()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excluded_contrast_is_rejected() {
        assert_eq!(
            MaterialPair::new(1.0, -1.0),
            Err(Error::ExcludedContrast { mu: -1.0 })
        );
        assert!(matches!(
            MaterialPair::from_contrast(-1.0),
            Err(Error::ExcludedContrast { .. })
        ));
    }

    #[test]
    fn zero_coefficient_is_rejected() {
        assert!(MaterialPair::new(0.0, 1.0).is_err());
        assert!(MaterialPair::new(1.0, 0.0).is_err());
        assert!(validate_mu(f64::NAN).is_err());
    }

    #[test]
    fn contrast_is_ratio() {
        let m = MaterialPair::new(1.0, -2.0).unwrap();
        assert_eq!(m.mu(), -0.5);
        assert_eq!(m.coefficient(Side::Plus), 1.0);
        assert_eq!(m.coefficient(Side::Minus), -2.0);
    }

    #[test]
    fn corner_angle_bounds() {
        assert!(CornerConfig::new(0.0).is_err());
        assert!(CornerConfig::new(TWO_PI).is_err());
        let c = CornerConfig::new(1.0).unwrap();
        assert_eq!(c.sector(Side::Plus), (1.0, TWO_PI));
        assert_eq!(c.side_of(0.5), Side::Minus);
        assert_eq!(c.side_of(3.0), Side::Plus);
        assert!(CornerConfig::right_angle().is_right_angle());
    }
}
