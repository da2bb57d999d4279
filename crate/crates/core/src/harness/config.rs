//! Experiment configuration file (TOML).
//!
//! ```toml
//! version = 1
//! cache_pages = 1200
//!
//! [[tables]]
//! id = "orders"
//! pages = 800
//! tuples_per_page = 20
//! has_index = true
//! distinct_keys = 400
//!
//! [timing]
//! t_seq_page_ms = 0.1
//! # ...
//!
//! [acm]
//! alpha = 0.3
//! scale_factor = "auto"
//!
//! [defaults]        # baseline cost parameters
//! cpu_tuple_cost = 0.01
//!
//! [workload]        # used by `gen`
//! # ...
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::workload::WorkloadConfig;
use super::HarnessError;
use crate::bufsim::{Catalog, TableDef, TimingProfile};
use crate::cost_model::CostParams;
use crate::cpu_model::{CpuModelConfig, CpuParams};
use crate::disk_model::DiskModelConfig;

pub const CONFIG_VERSION: u32 = 1;

/// Time-to-cost scaling: a fixed number or `"auto"`, which derives it from
/// the timing profile so one sequential page fetch costs one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleFactor {
    Fixed(f64),
    Named(String),
}

impl Default for ScaleFactor {
    fn default() -> Self {
        ScaleFactor::Named("auto".into())
    }
}

impl ScaleFactor {
    pub fn resolve(&self, profile: &TimingProfile) -> Result<f64, HarnessError> {
        match self {
            ScaleFactor::Fixed(v) if v.is_finite() && *v > 0.0 => Ok(*v),
            ScaleFactor::Fixed(v) => Err(HarnessError::Config(format!(
                "scale_factor must be positive, got {v}"
            ))),
            ScaleFactor::Named(s) if s == "auto" => Ok(profile.scale_factor()),
            ScaleFactor::Named(s) => Err(HarnessError::Config(format!(
                "scale_factor must be a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcmConfig {
    pub alpha: f64,
    pub scale_factor: ScaleFactor,
    pub min_observations: u64,
    pub window_size: usize,
    pub refit_every: usize,
    pub epsilon_floor: f64,
    /// Falls back to the baseline `random_page_cost` when absent.
    pub random_page_cost_default: Option<f64>,
    pub ridge_lambda: f64,
}

impl Default for AcmConfig {
    fn default() -> Self {
        let cpu = CpuModelConfig::default();
        Self {
            alpha: cpu.alpha,
            scale_factor: ScaleFactor::default(),
            min_observations: DiskModelConfig::default().min_observations,
            window_size: cpu.window_size,
            refit_every: cpu.refit_every,
            epsilon_floor: cpu.epsilon_floor,
            random_page_cost_default: None,
            ridge_lambda: cpu.ridge_lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub cache_pages: usize,
    pub tables: Vec<TableDef>,
    pub timing: TimingProfile,
    #[serde(default)]
    pub acm: AcmConfig,
    /// Baseline cost parameters; also the adaptive model's starting point.
    #[serde(default)]
    pub defaults: CostParams,
    #[serde(default)]
    pub workload: Option<WorkloadConfig>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != CONFIG_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.cache_pages == 0 {
            return Err(HarnessError::Config("cache_pages must be >= 1".into()));
        }
        self.defaults
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.timing.validate()?;
        self.catalog()?;
        self.disk_config().validate()?;
        self.cpu_config()?.validate()?;
        Ok(())
    }

    pub fn catalog(&self) -> Result<Catalog, HarnessError> {
        Ok(Catalog::new(self.tables.clone())?)
    }

    pub fn disk_config(&self) -> DiskModelConfig {
        DiskModelConfig {
            random_page_cost_default: self
                .acm
                .random_page_cost_default
                .unwrap_or(self.defaults.random_page_cost),
            seq_page_cost: self.defaults.seq_page_cost,
            min_observations: self.acm.min_observations,
        }
    }

    pub fn cpu_config(&self) -> Result<CpuModelConfig, HarnessError> {
        Ok(CpuModelConfig {
            scale_factor: self.acm.scale_factor.resolve(&self.timing)?,
            alpha: self.acm.alpha,
            window_size: self.acm.window_size,
            epsilon_floor: self.acm.epsilon_floor,
            refit_every: self.acm.refit_every,
            ridge_lambda: self.acm.ridge_lambda,
            defaults: CpuParams {
                cpu_tuple_cost: self.defaults.cpu_tuple_cost,
                cpu_operator_cost: self.defaults.cpu_operator_cost,
                cpu_index_tuple_cost: self.defaults.cpu_index_tuple_cost,
            },
        })
    }

    pub fn setup(&self) -> Result<ReplaySetup, HarnessError> {
        Ok(ReplaySetup {
            catalog: self.catalog()?,
            cache_pages: self.cache_pages,
            profile: self.timing,
            defaults: self.defaults,
            disk: self.disk_config(),
            cpu: self.cpu_config()?,
        })
    }
}

/// Everything a replay needs, resolved and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplaySetup {
    pub catalog: Catalog,
    pub cache_pages: usize,
    pub profile: TimingProfile,
    pub defaults: CostParams,
    pub disk: DiskModelConfig,
    pub cpu: CpuModelConfig,
}
