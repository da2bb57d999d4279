//! Per-table buffer statistics and the dynamic `random_page_cost` they drive.
//!
//! After each table access the model stores the observed hit ratio
//! `hit / (hit + read)`. Before planning, that ratio is decayed by how many
//! table accesses happened since (the gap `g = qc - tc`), using
//! `D = (1 + g) / (1 + g²)`, and the prediction blends the default random
//! page cost toward the sequential one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::TableId;

#[derive(Debug, Error, PartialEq)]
pub enum DiskModelError {
    #[error("negative page counter for table {table}: hit={hit}, read={read}")]
    NegativeCounter { table: TableId, hit: i64, read: i64 },
    #[error("access counter invariant violated: qc={qc} < tc={tc}")]
    CounterInversion { qc: u64, tc: u64 },
    #[error("invalid disk model configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableBufferStats {
    pub last_hit_ratio: Option<f64>,
    pub observation_count: u64,
    /// Value of the global access counter at this table's last access.
    pub tc: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskModelConfig {
    pub random_page_cost_default: f64,
    pub seq_page_cost: f64,
    /// Observations a table needs before its hit ratio is predicted.
    pub min_observations: u64,
}

impl Default for DiskModelConfig {
    fn default() -> Self {
        Self {
            random_page_cost_default: 4.0,
            seq_page_cost: 1.0,
            min_observations: 3,
        }
    }
}

impl DiskModelConfig {
    pub fn validate(&self) -> Result<(), DiskModelError> {
        if !(self.seq_page_cost.is_finite() && self.seq_page_cost > 0.0) {
            return Err(DiskModelError::Config(format!(
                "seq_page_cost must be positive, got {}",
                self.seq_page_cost
            )));
        }
        if !self.random_page_cost_default.is_finite()
            || self.random_page_cost_default < self.seq_page_cost
        {
            return Err(DiskModelError::Config(format!(
                "random_page_cost_default ({}) must be >= seq_page_cost ({})",
                self.random_page_cost_default, self.seq_page_cost
            )));
        }
        if self.min_observations == 0 {
            return Err(DiskModelError::Config(
                "min_observations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Single-writer state: `record_execution` mutates, everything else reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskModel {
    config: DiskModelConfig,
    qc: u64,
    tables: BTreeMap<TableId, TableBufferStats>,
}

impl DiskModel {
    pub fn new(config: DiskModelConfig) -> Result<Self, DiskModelError> {
        config.validate()?;
        Ok(Self {
            config,
            qc: 0,
            tables: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &DiskModelConfig {
        &self.config
    }

    /// Global table-access counter.
    pub fn qc(&self) -> u64 {
        self.qc
    }

    pub fn table(&self, table: &TableId) -> Option<&TableBufferStats> {
        self.tables.get(table)
    }

    pub fn tables(&self) -> impl Iterator<Item = (&TableId, &TableBufferStats)> {
        self.tables.iter()
    }

    /// Records one table access with its buffer hit and disk read page
    /// counts.
    ///
    /// Every call is an access: `qc` advances and the table's `tc` follows
    /// it. An access that touched no pages says nothing about residency, so
    /// it leaves the stored ratio and observation count alone.
    pub fn record_execution(
        &mut self,
        table: &TableId,
        hit: i64,
        read: i64,
    ) -> Result<(), DiskModelError> {
        if hit < 0 || read < 0 {
            return Err(DiskModelError::NegativeCounter {
                table: table.clone(),
                hit,
                read,
            });
        }
        self.qc += 1;
        let stats = self
            .tables
            .entry(table.clone())
            .or_insert(TableBufferStats {
                last_hit_ratio: None,
                observation_count: 0,
                tc: 0,
            });
        stats.tc = self.qc;
        let total = hit + read;
        if total > 0 {
            stats.last_hit_ratio = Some(hit as f64 / total as f64);
            stats.observation_count += 1;
        }
        Ok(())
    }

    /// `None` for unknown tables and tables still warming up.
    pub fn predict_hit_ratio(&self, table: &TableId) -> Option<f64> {
        let stats = self.tables.get(table)?;
        if stats.observation_count < self.config.min_observations {
            return None;
        }
        let last = stats.last_hit_ratio?;
        // tc is only ever assigned from qc, so the gap is never negative.
        let d = degradation_factor(self.qc, stats.tc).ok()?;
        Some(last * d)
    }

    /// Random page cost to inject for `table` before planning. Tables without
    /// a prediction keep the default.
    pub fn random_page_cost_for(&self, table: &TableId) -> f64 {
        let r = self.predict_hit_ratio(table).unwrap_or(0.0);
        blend_random_page_cost(
            self.config.random_page_cost_default,
            self.config.seq_page_cost,
            r,
        )
    }

    /// Disk cost of an executed operator, with its random pages priced at
    /// the rate its own observed hit ratio implies.
    ///
    /// Sequential pages cost `seq_page_cost`; random page fetches cost the
    /// blend of the default and the sequential cost at the realized hit
    /// ratio, i.e. hits at `seq_page_cost` and misses at the default.
    pub fn realized_disk_cost(&self, seq_pages: u64, random_hits: u64, random_reads: u64) -> f64 {
        let random = random_hits + random_reads;
        let mut cost = self.config.seq_page_cost * seq_pages as f64;
        if random > 0 {
            let r = random_hits as f64 / random as f64;
            cost += blend_random_page_cost(
                self.config.random_page_cost_default,
                self.config.seq_page_cost,
                r,
            ) * random as f64;
        }
        cost
    }
}

/// `(1 + g) / (1 + g²)` with `g = qc - tc`.
///
/// Equals 1 at both `g = 0` and `g = 1` and decreases strictly after that.
pub fn degradation_factor(qc: u64, tc: u64) -> Result<f64, DiskModelError> {
    if qc < tc {
        return Err(DiskModelError::CounterInversion { qc, tc });
    }
    let g = (qc - tc) as f64;
    Ok((1.0 + g) / (1.0 + g * g))
}

/// `default·(1 - r) + seq·r`.
pub fn blend_random_page_cost(default: f64, seq: f64, hit_ratio: f64) -> f64 {
    default * (1.0 - hit_ratio) + seq * hit_ratio
}
