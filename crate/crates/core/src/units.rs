use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Action and mass units. The default (`hbar = 1`, `mass = 1/2`) makes
/// `k^2 = E - V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConfig {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        UnitsConfig { hbar: 1.0, mass: 0.5 }
    }
}

impl UnitsConfig {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(UnitsConfig { hbar, mass })
    }

    /// `2m / hbar^2`, the factor converting an energy difference into `k^2`.
    #[inline]
    pub fn k2_per_energy(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    /// `k^2 = 2m(E - V)/hbar^2`, possibly negative.
    #[inline]
    pub fn ksq(&self, energy: f64, potential: f64) -> f64 {
        self.k2_per_energy() * (energy - potential)
    }

    /// Inverse of [`UnitsConfig::ksq`]: the energy carried by wavenumber `k`
    /// above a zero potential.
    #[inline]
    pub fn energy_of_k(&self, k: f64) -> f64 {
        k * k / self.k2_per_energy()
    }
}
