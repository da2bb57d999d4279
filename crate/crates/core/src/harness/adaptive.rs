//! The adaptive cost model: disk and CPU models joined behind the planner's
//! parameter interface.

use serde::{Deserialize, Serialize};

use super::config::ReplaySetup;
use super::HarnessError;
use crate::bufsim::ExecutionRecord;
use crate::cost_model::{CostParams, OperatorParams, OperatorType};
use crate::cpu_model::{CpuModel, CpuModelConfig, CpuParams, IngestOutcome, OperatorObservation};
use crate::disk_model::{DiskModel, DiskModelConfig};
use crate::planner::{ParamsSource, PlanNode};
use crate::TableId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveModel {
    pub disk: DiskModel,
    pub cpu: CpuModel,
}

impl AdaptiveModel {
    pub fn new(disk: DiskModelConfig, cpu: CpuModelConfig) -> Result<Self, HarnessError> {
        Ok(Self {
            disk: DiskModel::new(disk)?,
            cpu: CpuModel::new(cpu)?,
        })
    }

    pub fn from_setup(setup: &ReplaySetup) -> Result<Self, HarnessError> {
        Self::new(setup.disk, setup.cpu)
    }

    /// Writes the model state as JSON.
    pub fn save_checkpoint(&self, path: &std::path::Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self).expect("model state serializes");
        std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load_checkpoint(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Trace(format!("{}: {e}", path.display())))
    }

    /// Full parameter set for one operator type over `table`.
    pub fn cost_params(&self, op: OperatorType, table: &TableId) -> CostParams {
        let CpuParams {
            cpu_tuple_cost,
            cpu_operator_cost,
            cpu_index_tuple_cost,
        } = self.cpu.current_params(op);
        CostParams {
            cpu_tuple_cost,
            cpu_operator_cost,
            cpu_index_tuple_cost,
            seq_page_cost: self.disk.config().seq_page_cost,
            random_page_cost: self.disk.random_page_cost_for(table),
        }
    }

    /// Learns from one executed plan: one disk observation per table read,
    /// one CPU observation per operator.
    pub fn observe(
        &mut self,
        plan: &PlanNode,
        exec: &ExecutionRecord,
    ) -> Result<Vec<IngestOutcome>, HarnessError> {
        let nodes = plan.preorder();
        if nodes.len() != exec.nodes.len() {
            return Err(crate::planner::PlanError::ShapeMismatch {
                expected: nodes.len(),
                got: exec.nodes.len(),
            }
            .into());
        }
        for (table, stats) in &exec.per_table {
            let hit = i64::try_from(stats.hit)
                .map_err(|_| HarnessError::Trace("hit counter overflow".into()))?;
            let read = i64::try_from(stats.read)
                .map_err(|_| HarnessError::Trace("read counter overflow".into()))?;
            self.disk.record_execution(table, hit, read)?;
        }
        let mut outcomes = Vec::with_capacity(exec.nodes.len());
        for n in &exec.nodes {
            let disk_cost = match n.op_type {
                OperatorType::IndexScan => {
                    self.disk.realized_disk_cost(0, n.page_hits, n.page_reads)
                }
                _ => self.disk.realized_disk_cost(n.counts.n_seq_pages, 0, 0),
            };
            let obs = OperatorObservation::new(
                n.op_type,
                n.counts.n_tuples,
                n.counts.n_operations,
                n.counts.n_index_entries,
                disk_cost,
                n.time_ms,
            )?;
            outcomes.push(self.cpu.ingest(obs));
        }
        Ok(outcomes)
    }
}

impl ParamsSource for AdaptiveModel {
    fn params_for(&self, table: &TableId) -> OperatorParams {
        let mut p = OperatorParams::new();
        for op in OperatorType::ALL {
            p.insert(op, self.cost_params(op, table));
        }
        p
    }
}
