//! Experiment surface: workload traces, the plan → execute → learn replay
//! loop, correlation metrics and report files.

pub mod adaptive;
pub mod config;
pub mod metrics;
pub mod replay;
pub mod report;
pub mod workload;

use std::path::PathBuf;

use thiserror::Error;

use crate::bufsim::SimError;
use crate::cpu_model::CpuModelError;
use crate::disk_model::DiskModelError;
use crate::planner::PlanError;

pub use adaptive::AdaptiveModel;
pub use config::{AcmConfig, ExperimentConfig, ReplaySetup, ScaleFactor};
pub use metrics::{latency_improvement, pearson, MetricError};
pub use replay::{compare, replay, CompareReport, Mode, PlanFlip, QueryOutcome, RunReport};
pub use report::{write_compare_report, write_run_report};
pub use workload::{generate_workload, Phase, TraceEntry, WorkloadConfig, WorkloadTrace};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("trace error: {0}")]
    Trace(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Disk(#[from] DiskModelError),
    #[error(transparent)]
    Cpu(#[from] CpuModelError),
}

impl HarnessError {
    /// Whether the failure stems from user-supplied configuration rather
    /// than from running the experiment.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::Disk(DiskModelError::Config(_))
                | HarnessError::Cpu(CpuModelError::Config(_))
                | HarnessError::Sim(SimError::BadTable(_) | SimError::BadProfile(_))
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
