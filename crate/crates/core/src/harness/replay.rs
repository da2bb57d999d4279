//! The plan → execute → learn loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::adaptive::AdaptiveModel;
use super::config::ReplaySetup;
use super::metrics::{pearson, MetricError};
use super::workload::WorkloadTrace;
use super::HarnessError;
use crate::bufsim::Simulator;
use crate::cost_model::{OperatorCounts, OperatorType};
use crate::cpu_model::FitRecord;
use crate::planner::{enumerate_and_choose, FixedParams, ParamsSource};
use crate::TableId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Fixed default parameters, no learning.
    Baseline,
    /// Parameters injected from the adaptive model, which learns after every
    /// query.
    Acm,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Acm => "acm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "acm" => Ok(Mode::Acm),
            other => Err(format!("unknown mode {other:?} (expected baseline or acm)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeOutcome {
    pub op_type: OperatorType,
    pub estimated_cost: f64,
    pub actual_ms: f64,
    pub counts: OperatorCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub index: usize,
    pub label: String,
    pub table: TableId,
    pub selectivity: f64,
    pub aggregate: bool,
    pub access_path: OperatorType,
    pub estimated_cost: f64,
    pub latency_ms: f64,
    pub page_hits: u64,
    pub page_reads: u64,
    /// Plan nodes in preorder.
    pub nodes: Vec<NodeOutcome>,
}

/// One parameter value as it stood when query `step` was planned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    /// A table id for disk parameters, an operator type for CPU ones.
    pub scope: String,
    pub param: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub warmup: usize,
    /// Measured pass only.
    pub queries: Vec<QueryOutcome>,
    pub trajectory: Vec<TrajectoryPoint>,
    /// CPU refits over the whole run, warm-up included.
    pub fit_history: Vec<FitRecord>,
    /// Model state after the run, in acm mode.
    pub final_model: Option<AdaptiveModel>,
}

impl RunReport {
    pub fn total_latency_ms(&self) -> f64 {
        self.queries.iter().map(|q| q.latency_ms).sum()
    }

    /// `(estimated_cost, actual_ms)` over every executed plan node.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.queries
            .iter()
            .flat_map(|q| q.nodes.iter().map(|n| (n.estimated_cost, n.actual_ms)))
            .collect()
    }

    pub fn correlation(&self) -> Result<f64, MetricError> {
        pearson(&self.pairs())
    }
}

/// A query whose access path differs between the two runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFlip {
    pub index: usize,
    pub label: String,
    pub baseline: OperatorType,
    pub acm: OperatorType,
    pub baseline_ms: f64,
    pub acm_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub baseline: RunReport,
    pub acm: RunReport,
    pub flips: Vec<PlanFlip>,
}

impl CompareReport {
    pub fn flipped_latency_ms(&self) -> (f64, f64) {
        self.flips
            .iter()
            .fold((0.0, 0.0), |(b, a), f| (b + f.baseline_ms, a + f.acm_ms))
    }
}

fn snapshot(
    step: usize,
    source: &dyn ParamsSource,
    model: Option<&AdaptiveModel>,
    setup: &ReplaySetup,
) -> Vec<TrajectoryPoint> {
    let mut out = Vec::new();
    let point = |scope: &str, param: &str, value: f64| TrajectoryPoint {
        step,
        scope: scope.to_string(),
        param: param.to_string(),
        value,
    };
    for table in setup.catalog.tables() {
        let params = source.params_for(&table.id);
        let rpc = params
            .get(OperatorType::IndexScan)
            .map_or(setup.defaults.random_page_cost, |p| p.random_page_cost);
        out.push(point(&table.id.0, "random_page_cost", rpc));
        if let Some(r) = model.and_then(|m| m.disk.predict_hit_ratio(&table.id)) {
            out.push(point(&table.id.0, "predicted_hit_ratio", r));
        }
    }
    let any = &setup.catalog.tables()[0].id;
    let params = source.params_for(any);
    for (op, p) in params.iter() {
        out.push(point(op.as_str(), "cpu_tuple_cost", p.cpu_tuple_cost));
        out.push(point(op.as_str(), "cpu_operator_cost", p.cpu_operator_cost));
        out.push(point(
            op.as_str(),
            "cpu_index_tuple_cost",
            p.cpu_index_tuple_cost,
        ));
    }
    out
}

/// Replays `trace` on a cold simulator with a fresh model.
pub fn replay(
    trace: &WorkloadTrace,
    mode: Mode,
    setup: &ReplaySetup,
    warmup: usize,
) -> Result<RunReport, HarnessError> {
    let mut model = AdaptiveModel::from_setup(setup)?;
    replay_with(trace, mode, setup, warmup, &mut model)
}

/// Replays `trace` on a cold simulator, starting from `model`.
///
/// The trace runs `warmup` times unmeasured, then once measured; the cache
/// carries over between passes. Only acm mode reads or updates `model`.
pub fn replay_with(
    trace: &WorkloadTrace,
    mode: Mode,
    setup: &ReplaySetup,
    warmup: usize,
    model: &mut AdaptiveModel,
) -> Result<RunReport, HarnessError> {
    let mut sim = Simulator::new(setup.catalog.clone(), setup.cache_pages, setup.profile)?;
    let fixed = FixedParams(setup.defaults);
    let history_start = model.cpu.history().len();
    let mut queries = Vec::new();
    let mut trajectory = Vec::new();

    for pass in 0..=warmup {
        let measured = pass == warmup;
        for (index, entry) in trace.entries.iter().enumerate() {
            let q = &entry.query;
            let source: &dyn ParamsSource = match mode {
                Mode::Baseline => &fixed,
                Mode::Acm => &*model,
            };
            if measured {
                let m = (mode == Mode::Acm).then_some(&*model);
                trajectory.extend(snapshot(index, source, m, setup));
            }
            let mut plan = enumerate_and_choose(q, &setup.catalog, source)?;
            let exec = sim.execute(&plan)?;
            plan.annotate(&exec)?;
            if mode == Mode::Acm {
                model.observe(&plan, &exec)?;
            }
            if !measured {
                continue;
            }
            let stats = exec.per_table.get(&q.table).copied().unwrap_or_default();
            let nodes = plan
                .preorder()
                .into_iter()
                .zip(&exec.nodes)
                .map(|(n, e)| NodeOutcome {
                    op_type: n.op_type,
                    estimated_cost: n.estimated_cost,
                    actual_ms: e.time_ms,
                    counts: e.counts,
                })
                .collect();
            queries.push(QueryOutcome {
                index,
                label: entry.label.clone(),
                table: q.table.clone(),
                selectivity: q.selectivity,
                aggregate: q.aggregate,
                access_path: plan.access_path(),
                estimated_cost: plan.total_cost(),
                latency_ms: exec.total_latency_ms,
                page_hits: stats.hit,
                page_reads: stats.read,
                nodes,
            });
        }
    }

    Ok(RunReport {
        mode,
        warmup,
        queries,
        trajectory,
        fit_history: model.cpu.history()[history_start..].to_vec(),
        final_model: (mode == Mode::Acm).then(|| model.clone()),
    })
}

/// Runs both modes on the same trace, each from a cold cache.
pub fn compare(
    trace: &WorkloadTrace,
    setup: &ReplaySetup,
    warmup: usize,
) -> Result<CompareReport, HarnessError> {
    let baseline = replay(trace, Mode::Baseline, setup, warmup)?;
    let acm = replay(trace, Mode::Acm, setup, warmup)?;
    let flips = baseline
        .queries
        .iter()
        .zip(&acm.queries)
        .filter(|(b, a)| b.access_path != a.access_path)
        .map(|(b, a)| PlanFlip {
            index: b.index,
            label: b.label.clone(),
            baseline: b.access_path,
            acm: a.access_path,
            baseline_ms: b.latency_ms,
            acm_ms: a.latency_ms,
        })
        .collect();
    Ok(CompareReport {
        baseline,
        acm,
        flips,
    })
}
