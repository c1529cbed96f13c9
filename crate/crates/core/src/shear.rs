//! Taylor correction of a shear profile from its Fourier coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearSpectrum {
    pub amplitude: f64,
    pub chi_hat: BTreeMap<i64, C64>,
}

impl ShearSpectrum {
    pub fn new(amplitude: f64, chi_hat: BTreeMap<i64, C64>) -> Result<Self> {
        let s = ShearSpectrum { amplitude, chi_hat };
        s.validate()?;
        Ok(s)
    }

    /// Builds the spectrum of a real profile from the nonnegative modes.
    pub fn real_profile(amplitude: f64, positive: &[(i64, C64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(m, c) in positive {
            map.insert(m, c);
            map.insert(-m, c.conj());
        }
        Self::new(amplitude, map)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c0) = self.chi_hat.get(&0) {
            if c0.norm() != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "profile must have zero mean, chi_hat[0] = {c0}"
                )));
            }
        }
        for (&m, &c) in &self.chi_hat {
            let partner = self.chi_hat.get(&-m).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::InvalidParameter(format!(
                    "chi_hat[{}] is not the conjugate of chi_hat[{m}]",
                    -m
                )));
            }
        }
        Ok(())
    }
}

/// `D_T = A^2 sum_{m != 0} |chi_hat_m|^2 / m^2`.
pub fn taylor_correction(spec: &ShearSpectrum) -> Result<f64> {
    spec.validate()?;
    let sum: f64 = spec
        .chi_hat
        .iter()
        .filter(|(&m, _)| m != 0)
        .map(|(&m, c)| c.norm_sqr() / (m as f64 * m as f64))
        .sum();
    Ok(spec.amplitude * spec.amplitude * sum)
}

/// Effective diffusivity `nu + D_T / nu`.
pub fn effective_diffusivity(nu: f64, spec: &ShearSpectrum) -> Result<f64> {
    Ok(nu + taylor_correction(spec)? / nu)
}
