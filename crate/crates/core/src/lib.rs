//! Adaptive optimizer cost model.
//!
//! The crate tunes the five classical cost constants from execution
//! feedback: a disk model turns per-table buffer hit ratios into a
//! table-specific `random_page_cost`, and a CPU model fits per-operator tuple,
//! operator and index-entry costs by least squares. A small buffer-cache
//! simulator and access-path planner provide the executions to learn from,
//! and the harness replays workloads through both and reports how well cost
//! tracks time.

pub mod bufsim;
pub mod cost_model;
pub mod cpu_model;
pub mod disk_model;
pub mod harness;
pub mod planner;

use std::fmt;

use serde::{Deserialize, Serialize};

/// Table identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableId(pub String);

impl From<&str> for TableId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
