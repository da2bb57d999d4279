//! Per-operator CPU cost parameters fitted from execution statistics.
//!
//! Each executed operator yields one observation `(n_t, n_o, n_i, s, time)`.
//! For every operator type separately, the model solves
//!
//! ```text
//! min Σ_k (c_t·n_t + c_o·n_o + c_i·n_i + s − time·scale_factor)²
//! ```
//!
//! over a sliding window of observations, then smooths successive fits with
//! an exponential moving average. The disk term `s` enters with coefficient
//! one: it is supplied by the disk model, not fitted here.

pub mod lsq;
pub mod oracle;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_model::OperatorType;

pub(crate) const FEATURES: usize = 3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FitError {
    #[error("no observations to fit")]
    Empty,
    #[error("observations mix operator types {0} and {1}")]
    MixedOperatorTypes(OperatorType, OperatorType),
    #[error(transparent)]
    Solver(#[from] lsq::LsqError),
}

#[derive(Debug, Error, PartialEq)]
pub enum CpuModelError {
    #[error("invalid observation: {0}")]
    InvalidObservation(String),
    #[error("invalid cpu model configuration: {0}")]
    Config(String),
}

/// One executed operator, as a training row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorObservation {
    pub op_type: OperatorType,
    pub n_tuples: u64,
    pub n_operations: u64,
    pub n_index_entries: u64,
    /// Disk part of the operator cost, in cost units.
    pub disk_cost: f64,
    /// Measured operator time in milliseconds.
    pub exec_time: f64,
}

impl OperatorObservation {
    pub fn new(
        op_type: OperatorType,
        n_tuples: u64,
        n_operations: u64,
        n_index_entries: u64,
        disk_cost: f64,
        exec_time: f64,
    ) -> Result<Self, CpuModelError> {
        for (name, v) in [("disk_cost", disk_cost), ("exec_time", exec_time)] {
            if !v.is_finite() || v < 0.0 {
                return Err(CpuModelError::InvalidObservation(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Self {
            op_type,
            n_tuples,
            n_operations,
            n_index_entries,
            disk_cost,
            exec_time,
        })
    }

    pub(crate) fn features(&self) -> [f64; FEATURES] {
        [
            self.n_tuples as f64,
            self.n_operations as f64,
            self.n_index_entries as f64,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpuParams {
    pub cpu_tuple_cost: f64,
    pub cpu_operator_cost: f64,
    pub cpu_index_tuple_cost: f64,
}

impl Default for CpuParams {
    fn default() -> Self {
        Self {
            cpu_tuple_cost: 0.01,
            cpu_operator_cost: 0.0025,
            cpu_index_tuple_cost: 0.005,
        }
    }
}

impl CpuParams {
    fn as_array(&self) -> [f64; FEATURES] {
        [
            self.cpu_tuple_cost,
            self.cpu_operator_cost,
            self.cpu_index_tuple_cost,
        ]
    }

    fn from_array(a: [f64; FEATURES]) -> Self {
        Self {
            cpu_tuple_cost: a[0],
            cpu_operator_cost: a[1],
            cpu_index_tuple_cost: a[2],
        }
    }
}

/// Result of one least-squares solve. A parameter is `None` when its count
/// column was zero in every row, so the data says nothing about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedCpu {
    pub c_t: Option<f64>,
    pub c_o: Option<f64>,
    pub c_i: Option<f64>,
}

impl FittedCpu {
    fn as_array(&self) -> [Option<f64>; FEATURES] {
        [self.c_t, self.c_o, self.c_i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpuModelConfig {
    /// Converts milliseconds into cost units.
    pub scale_factor: f64,
    /// Weight of the previous prediction in the moving average.
    pub alpha: f64,
    /// Observations retained per operator type.
    pub window_size: usize,
    /// Lower clamp for fitted parameters.
    pub epsilon_floor: f64,
    /// Refit an operator type after this many new observations of it.
    pub refit_every: usize,
    /// Optional ridge penalty; 0 gives plain least squares.
    pub ridge_lambda: f64,
    /// Parameters reported before the first fit.
    pub defaults: CpuParams,
}

impl Default for CpuModelConfig {
    fn default() -> Self {
        Self {
            scale_factor: 1.0,
            alpha: 0.3,
            window_size: 512,
            epsilon_floor: 1e-6,
            refit_every: 10,
            ridge_lambda: 0.0,
            defaults: CpuParams::default(),
        }
    }
}

impl CpuModelConfig {
    pub fn validate(&self) -> Result<(), CpuModelError> {
        let err = |m: String| Err(CpuModelError::Config(m));
        if !(self.scale_factor.is_finite() && self.scale_factor > 0.0) {
            return err(format!(
                "scale_factor must be positive, got {}",
                self.scale_factor
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return err(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.window_size == 0 || self.refit_every == 0 {
            return err("window_size and refit_every must be positive".into());
        }
        if !(self.epsilon_floor.is_finite() && self.epsilon_floor > 0.0) {
            return err(format!(
                "epsilon_floor must be positive, got {}",
                self.epsilon_floor
            ));
        }
        if !(self.ridge_lambda.is_finite() && self.ridge_lambda >= 0.0) {
            return err(format!(
                "ridge_lambda must be >= 0, got {}",
                self.ridge_lambda
            ));
        }
        Ok(())
    }
}

/// Fits `(c_t, c_o, c_i)` for one operator type.
///
/// The regression target is `time·scale_factor − s`. Columns that are zero
/// in every row are left out and reported as `None`; fitted values are
/// clamped to `epsilon_floor`.
pub fn fit(
    observations: &[OperatorObservation],
    config: &CpuModelConfig,
) -> Result<FittedCpu, FitError> {
    let first = observations.first().ok_or(FitError::Empty)?;
    if let Some(other) = observations.iter().find(|o| o.op_type != first.op_type) {
        return Err(FitError::MixedOperatorTypes(first.op_type, other.op_type));
    }
    let active: Vec<usize> = (0..FEATURES)
        .filter(|&j| observations.iter().any(|o| o.features()[j] != 0.0))
        .collect();
    let rows: Vec<Vec<f64>> = observations
        .iter()
        .map(|o| {
            let f = o.features();
            active.iter().map(|&j| f[j]).collect()
        })
        .collect();
    let target: Vec<f64> = observations
        .iter()
        .map(|o| o.exec_time * config.scale_factor - o.disk_cost)
        .collect();
    let solution = lsq::solve(&rows, &target, active.len(), config.ridge_lambda)?;

    let mut out = [None; FEATURES];
    for (k, &j) in active.iter().enumerate() {
        out[j] = Some(solution[k].max(config.epsilon_floor));
    }
    Ok(FittedCpu {
        c_t: out[0],
        c_o: out[1],
        c_i: out[2],
    })
}

/// One step of the moving average: `(1 − α)·latest + α·previous`.
///
/// The weight α sits on the old prediction, so α = 0 follows the newest fit
/// and α = 1 never moves. The textbook form with weight β on the new value
/// is recovered with α = 1 − β.
pub fn smooth(previous_pred: f64, latest_fit: f64, alpha: f64) -> f64 {
    (1.0 - alpha) * latest_fit + alpha * previous_pred
}

/// Fit state for one operator type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpuFit {
    /// Most recent least-squares values; parameters the last window could
    /// not determine keep their previous value.
    pub fitted: CpuParams,
    pub smoothed: CpuParams,
    /// Rows used in the last solve.
    pub n_samples: usize,
    /// Which parameters have been fitted at least once.
    pub seeded: [bool; FEATURES],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub op_type: OperatorType,
    /// Total observations ingested when the refit happened.
    pub step: u64,
    pub fitted: CpuParams,
    pub smoothed: CpuParams,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Window {
    obs: VecDeque<OperatorObservation>,
    since_refit: usize,
}

/// What an `ingest` call did.
#[derive(Debug, Clone, PartialEq)]
pub enum IngestOutcome {
    Buffered,
    Refit(CpuFit),
    /// A refit was due but the window could not be solved; the previous
    /// parameters stay in force.
    RefitSkipped(FitError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpuModel {
    config: CpuModelConfig,
    windows: BTreeMap<OperatorType, Window>,
    fits: BTreeMap<OperatorType, CpuFit>,
    history: Vec<FitRecord>,
    ingested: u64,
}

impl CpuModel {
    pub fn new(config: CpuModelConfig) -> Result<Self, CpuModelError> {
        config.validate()?;
        Ok(Self {
            config,
            windows: BTreeMap::new(),
            fits: BTreeMap::new(),
            history: Vec::new(),
            ingested: 0,
        })
    }

    pub fn config(&self) -> &CpuModelConfig {
        &self.config
    }

    pub fn window_len(&self, op: OperatorType) -> usize {
        self.windows.get(&op).map_or(0, |w| w.obs.len())
    }

    pub fn fit_for(&self, op: OperatorType) -> Option<&CpuFit> {
        self.fits.get(&op)
    }

    pub fn history(&self) -> &[FitRecord] {
        &self.history
    }

    /// Appends to the operator type's window, evicting the oldest row beyond
    /// `window_size`, and refits when `refit_every` new rows have arrived.
    pub fn ingest(&mut self, obs: OperatorObservation) -> IngestOutcome {
        self.ingested += 1;
        let op = obs.op_type;
        let window = self.windows.entry(op).or_insert_with(|| Window {
            obs: VecDeque::new(),
            since_refit: 0,
        });
        window.obs.push_back(obs);
        while window.obs.len() > self.config.window_size {
            window.obs.pop_front();
        }
        window.since_refit += 1;
        if window.since_refit < self.config.refit_every {
            return IngestOutcome::Buffered;
        }
        window.since_refit = 0;
        match self.refit(op) {
            Ok(fit) => IngestOutcome::Refit(fit),
            Err(e) => IngestOutcome::RefitSkipped(e),
        }
    }

    /// Refits one operator type from its current window immediately.
    pub fn refit(&mut self, op: OperatorType) -> Result<CpuFit, FitError> {
        let rows: Vec<OperatorObservation> = self
            .windows
            .get(&op)
            .map(|w| w.obs.iter().cloned().collect())
            .unwrap_or_default();
        let fitted = fit(&rows, &self.config)?;

        let defaults = self.config.defaults.as_array();
        let alpha = self.config.alpha;
        let prev = self.fits.get(&op);
        let mut raw = prev.map_or(defaults, |f| f.fitted.as_array());
        let mut smoothed = prev.map_or(defaults, |f| f.smoothed.as_array());
        let mut seeded = prev.map_or([false; FEATURES], |f| f.seeded);
        for (j, value) in fitted.as_array().into_iter().enumerate() {
            let Some(value) = value else { continue };
            raw[j] = value;
            smoothed[j] = if seeded[j] {
                smooth(smoothed[j], value, alpha)
            } else {
                value
            };
            seeded[j] = true;
        }
        let fit = CpuFit {
            fitted: CpuParams::from_array(raw),
            smoothed: CpuParams::from_array(smoothed),
            n_samples: rows.len(),
            seeded,
        };
        self.history.push(FitRecord {
            op_type: op,
            step: self.ingested,
            fitted: fit.fitted,
            smoothed: fit.smoothed,
            n_samples: fit.n_samples,
        });
        self.fits.insert(op, fit.clone());
        Ok(fit)
    }

    /// Smoothed parameters for `op`, or the configured defaults before any
    /// fit.
    pub fn current_params(&self, op: OperatorType) -> CpuParams {
        self.fits
            .get(&op)
            .map_or(self.config.defaults, |f| f.smoothed)
    }

    /// Fit history as CSV, one row per refit.
    pub fn history_csv(&self) -> String {
        let mut out = String::from(
            "op_type,step,c_t,c_o,c_i,smoothed_c_t,smoothed_c_o,smoothed_c_i,n_samples\n",
        );
        for r in &self.history {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.op_type,
                r.step,
                r.fitted.cpu_tuple_cost,
                r.fitted.cpu_operator_cost,
                r.fitted.cpu_index_tuple_cost,
                r.smoothed.cpu_tuple_cost,
                r.smoothed.cpu_operator_cost,
                r.smoothed.cpu_index_tuple_cost,
                r.n_samples
            );
        }
        out
    }
}
