//! Problem constants and the `key = value` configuration block.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enhanced diffusivity `nu + 1/nu`.
pub fn enhanced_diffusivity(nu: f64) -> f64 {
    nu + 1.0 / nu
}

/// Model constants shared by every stage of the laboratory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub nu: f64,
    /// Truncation order of the Hermite projection.
    #[serde(rename = "N")]
    pub truncation: usize,
    /// Exponent of the `(1 + xi^2)^m` weight.
    pub m: u32,
    /// Target algebraic decay order.
    #[serde(rename = "M")]
    pub target_order: f64,
}

impl Params {
    pub fn new(nu: f64, truncation: usize, m: u32, target_order: f64) -> Result<Self> {
        let p = Params { nu, truncation, m, target_order };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.target_order.is_finite() && self.target_order > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target decay order must be positive, got {}",
                self.target_order
            )));
        }
        Ok(())
    }

    pub fn nu_t(&self) -> f64 {
        enhanced_diffusivity(self.nu)
    }

    /// Projections up to index `N` need `m > N + 1/2`.
    pub fn check_projection_weight(&self) -> Result<()> {
        if (self.m as f64) <= self.truncation as f64 + 0.5 {
            return Err(Error::InvalidParameter(format!(
                "weight m = {} must exceed N + 1/2 = {}",
                self.m,
                self.truncation as f64 + 0.5
            )));
        }
        Ok(())
    }

    /// Error-scaling experiments need `N >= 4M`.
    pub fn check_error_order(&self) -> Result<()> {
        if (self.truncation as f64) < 4.0 * self.target_order {
            return Err(Error::InvalidParameter(format!(
                "N = {} must be at least 4M = {}",
                self.truncation,
                4.0 * self.target_order
            )));
        }
        Ok(())
    }
}

impl Default for Params {
    fn default() -> Self {
        Params { nu: 0.5, truncation: 4, m: 5, target_order: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { half_width: 20.0, n_points: 801 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quadrature_tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quadrature_tail: 1e-14 }
    }
}

/// Parsed configuration file.
///
/// The file is a flat `key = value` block; dotted keys (`grid.L`) select
/// nested sections. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(rename = "N", default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(rename = "M", default = "default_target")]
    pub target_order: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub experiment: Option<crate::harness::config::ExperimentSection>,
}

fn default_nu() -> f64 {
    Params::default().nu
}
fn default_truncation() -> usize {
    Params::default().truncation
}
fn default_m() -> u32 {
    Params::default().m
}
fn default_target() -> f64 {
    Params::default().target_order
}

impl Default for Config {
    fn default() -> Self {
        let p = Params::default();
        Config {
            nu: p.nu,
            truncation: p.truncation,
            m: p.m,
            target_order: p.target_order,
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            experiment: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params()?;
        if cfg.grid.n_points < 3 || !(cfg.grid.half_width > 0.0) {
            return Err(Error::Config(format!("degenerate grid {:?}", cfg.grid)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.nu, self.truncation, self.m, self.target_order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys() {
        let cfg = Config::parse(
            "nu = 0.2\nN = 6\nm = 7\nM = 1.5\ngrid.L = 30.0\ngrid.n_points = 1201\ntolerances.quadrature_tail = 1e-12\n",
        )
        .unwrap();
        assert_eq!(cfg.truncation, 6);
        assert_eq!(cfg.grid.half_width, 30.0);
        assert_eq!(cfg.tolerances.quadrature_tail, 1e-12);
        let p = cfg.params().unwrap();
        assert!((p.nu_t() - 5.2).abs() < 1e-12);
        p.check_projection_weight().unwrap();
        p.check_error_order().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::parse("nu = -1.0").is_err());
        assert!(Config::parse("nu = 0.5\nbogus = 3").is_err());
        let p = Params::new(0.5, 6, 6, 1.0).unwrap();
        assert!(p.check_projection_weight().is_err());
        let p = Params::new(0.5, 3, 6, 1.0).unwrap();
        assert!(p.check_error_order().is_err());
    }
}
