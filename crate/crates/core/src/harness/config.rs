use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decomposition::wait_time;
use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::params::{Config, GridConfig, Params, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    EnhancedDiffusion,
    CmAttraction,
    RateTable,
    ErrorScaling,
    BoundsCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::EnhancedDiffusion,
        ExperimentKind::CmAttraction,
        ExperimentKind::RateTable,
        ExperimentKind::ErrorScaling,
        ExperimentKind::BoundsCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EnhancedDiffusion => "enhanced_diffusion",
            ExperimentKind::CmAttraction => "cm_attraction",
            ExperimentKind::RateTable => "rate_table",
            ExperimentKind::ErrorScaling => "error_scaling",
            ExperimentKind::BoundsCheck => "bounds_check",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Where the initial data come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Gaussian {
        #[serde(default = "one")]
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::Gaussian { width: 1.0, amplitude: 1.0 }
    }
}

impl InitSpec {
    /// `gaussian` or a file path, as accepted on the command line.
    pub fn parse_cli(s: &str) -> Self {
        if s == "gaussian" {
            InitSpec::default()
        } else {
            InitSpec::File { path: PathBuf::from(s) }
        }
    }

    pub fn load(&self) -> Result<InitialData> {
        match self {
            InitSpec::Gaussian { width, amplitude } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
                }
                Ok(InitialData::gaussian(*width, *amplitude))
            }
            InitSpec::File { path } => InitialData::load(path),
        }
    }
}

/// The `[experiment]` table of a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: ExperimentKind,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Fitting window; its meaning (in `t` or `tau`) depends on the experiment.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Probe wavenumbers for `enhanced_diffusion`.
    #[serde(default = "default_probes")]
    pub probes: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_seed() -> u64 {
    7
}

fn default_probes() -> Vec<f64> {
    vec![1e-3]
}

fn default_samples() -> usize {
    9
}

impl ExperimentSection {
    pub fn new(name: ExperimentKind) -> Self {
        ExperimentSection {
            name,
            init: InitSpec::default(),
            out_dir: None,
            window: None,
            seed: default_seed(),
            probes: default_probes(),
            samples: default_samples(),
        }
    }
}

/// Everything an experiment needs, validated at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: Params,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub init: InitSpec,
    pub out_dir: Option<PathBuf>,
    pub window: Option<(f64, f64)>,
    pub seed: u64,
    pub probes: Vec<f64>,
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let section = cfg
            .experiment
            .clone()
            .ok_or_else(|| Error::Config("configuration has no [experiment] section".into()))?;
        Self::new(cfg.params()?, cfg.grid, cfg.tolerances, section)
    }

    pub fn new(params: Params, grid: GridConfig, tolerances: Tolerances, s: ExperimentSection) -> Result<Self> {
        let c = ExperimentConfig {
            kind: s.name,
            params,
            grid,
            tolerances,
            init: s.init,
            out_dir: s.out_dir,
            window: s.window,
            seed: s.seed,
            probes: s.probes,
            samples: s.samples,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_config(&Config::load(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let InitSpec::File { path } = &self.init {
            if !path.exists() {
                return Err(Error::Config(format!("initial data file {} does not exist", path.display())));
            }
        }
        if let Some((a, b)) = self.window {
            if !(b > a) {
                return Err(Error::Config(format!("empty window [{a}, {b}]")));
            }
            let t0 = wait_time(self.params.nu);
            let start = match self.kind {
                ExperimentKind::ErrorScaling => Some(a.exp() - 1.0),
                ExperimentKind::BoundsCheck => Some(a),
                _ => None,
            };
            if let Some(t) = start {
                if t < t0 * (1.0 - 1e-12) {
                    return Err(Error::WaitTime { t, required: t0 });
                }
            }
        }
        if self.kind == ExperimentKind::ErrorScaling {
            self.params.check_error_order()?;
            self.params.check_projection_weight()?;
        }
        Ok(())
    }

    pub fn data(&self) -> Result<InitialData> {
        self.init.load()
    }
}
