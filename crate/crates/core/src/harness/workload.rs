//! Synthetic workload generation and the line-delimited trace format.
//!
//! A trace file is JSON lines: a header record
//! `{"format":"acm-trace","version":1,"seed":..,"queries":..}` followed by
//! one query record per line, replayed in file order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bufsim::Catalog;
use crate::planner::QuerySpec;
use crate::TableId;

pub const TRACE_FORMAT: &str = "acm-trace";
pub const TRACE_VERSION: u32 = 1;

/// A run of queries drawn from one table mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    pub name: String,
    pub length: usize,
    /// Relative weight of each table.
    pub mix: BTreeMap<TableId, f64>,
    /// Candidate selectivities, drawn uniformly.
    pub selectivities: Vec<f64>,
    #[serde(default)]
    pub aggregate_probability: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadConfig {
    pub phases: Vec<Phase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub label: String,
    #[serde(flatten)]
    pub query: QuerySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TraceHeader {
    format: String,
    version: u32,
    seed: u64,
    queries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadTrace {
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
}

impl WorkloadTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let header = TraceHeader {
            format: TRACE_FORMAT.into(),
            version: TRACE_VERSION,
            seed: self.seed,
            queries: self.entries.len(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(e).expect("entry serializes")
            );
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| HarnessError::Trace("empty trace file".into()))?;
        let header: TraceHeader = serde_json::from_str(first)
            .map_err(|e| HarnessError::Trace(format!("line 1: bad header: {e}")))?;
        if header.format != TRACE_FORMAT || header.version != TRACE_VERSION {
            return Err(HarnessError::Trace(format!(
                "unsupported trace {} v{}",
                header.format, header.version
            )));
        }
        let entries = lines
            .map(|(i, l)| {
                serde_json::from_str::<TraceEntry>(l)
                    .map_err(|e| HarnessError::Trace(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != header.queries {
            return Err(HarnessError::Trace(format!(
                "header announces {} queries, found {}",
                header.queries,
                entries.len()
            )));
        }
        Ok(Self {
            seed: header.seed,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_jsonl(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| HarnessError::io(path, e))
    }
}

fn validate_phase(phase: &Phase, catalog: &Catalog) -> Result<(), HarnessError> {
    let bad = |m: String| Err(HarnessError::Config(format!("phase {}: {m}", phase.name)));
    if phase.mix.is_empty() {
        return bad("empty table mix".into());
    }
    for (table, w) in &phase.mix {
        if !w.is_finite() || *w < 0.0 {
            return bad(format!("invalid weight {w} for table {table}"));
        }
        if catalog.get(table).is_err() {
            return bad(format!("unknown table {table}"));
        }
    }
    if phase.mix.values().sum::<f64>() <= 0.0 {
        return bad("mix weights sum to zero".into());
    }
    if phase.selectivities.is_empty() {
        return bad("no selectivities".into());
    }
    if let Some(s) = phase
        .selectivities
        .iter()
        .find(|s| !(0.0..=1.0).contains(*s))
    {
        return bad(format!("selectivity {s} outside [0, 1]"));
    }
    if !(0.0..=1.0).contains(&phase.aggregate_probability) {
        return bad(format!(
            "aggregate_probability {} outside [0, 1]",
            phase.aggregate_probability
        ));
    }
    Ok(())
}

/// Draws a trace phase by phase. The same seed and config always yield the
/// same trace.
pub fn generate_workload(
    config: &WorkloadConfig,
    catalog: &Catalog,
    seed: u64,
) -> Result<WorkloadTrace, HarnessError> {
    for phase in &config.phases {
        validate_phase(phase, catalog)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for phase in &config.phases {
        let tables: Vec<&TableId> = phase.mix.keys().collect();
        let weights = WeightedIndex::new(phase.mix.values().copied())
            .map_err(|e| HarnessError::Config(format!("phase {}: {e}", phase.name)))?;
        for i in 0..phase.length {
            let table = tables[weights.sample(&mut rng)].clone();
            let selectivity = phase.selectivities[rng.random_range(0..phase.selectivities.len())];
            let aggregate = rng.random_bool(phase.aggregate_probability);
            entries.push(TraceEntry {
                label: format!("{}-{}", phase.name, i),
                query: QuerySpec {
                    table,
                    selectivity,
                    aggregate,
                },
            });
        }
    }
    Ok(WorkloadTrace { seed, entries })
}
