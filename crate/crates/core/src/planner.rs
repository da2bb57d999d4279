//! Minimal cost-based access-path selection.
//!
//! A query reads one table with a predicate of known selectivity and may
//! aggregate the result. The planner prices a sequential scan and, when the
//! table is indexed, an index scan, and keeps the cheaper plan. Cardinalities
//! come straight from the catalog, so the only thing that moves a decision
//! is the cost parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bufsim::{agg_groups, matching_tuples, Catalog, ExecutionRecord, SimError, TableDef};
use crate::cost_model::{
    operator_cost, plan_cost, CostError, CostParams, OperatorCounts, OperatorParams, OperatorType,
};
use crate::TableId;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Catalog(#[from] SimError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("selectivity {0} outside [0, 1]")]
    BadSelectivity(f64),
    #[error("plan node {0} has not been executed")]
    Unexecuted(OperatorType),
    #[error("execution record has {got} nodes, plan has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub table: TableId,
    pub selectivity: f64,
    pub aggregate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanNode {
    pub op_type: OperatorType,
    /// Table the node reads, or whose rows it aggregates.
    pub table: Option<TableId>,
    /// Predicate selectivity, for scans.
    pub selectivity: Option<f64>,
    /// Estimated counts.
    pub counts: OperatorCounts,
    pub children: Vec<PlanNode>,
    pub estimated_cost: f64,
    pub actual_time_ms: Option<f64>,
}

impl PlanNode {
    pub fn leaf(op_type: OperatorType, counts: OperatorCounts) -> Self {
        Self {
            op_type,
            table: None,
            selectivity: None,
            counts,
            children: Vec::new(),
            estimated_cost: 0.0,
            actual_time_ms: None,
        }
    }

    pub fn with_child(mut self, child: PlanNode) -> Self {
        self.children.push(child);
        self
    }

    pub(crate) fn scan_target(&self) -> Option<(&TableId, f64)> {
        Some((self.table.as_ref()?, self.selectivity?))
    }

    /// Nodes in preorder.
    pub fn preorder(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    fn preorder_mut(&mut self, f: &mut impl FnMut(&mut PlanNode)) {
        f(self);
        for c in &mut self.children {
            c.preorder_mut(f);
        }
    }

    /// The scan at the bottom of the plan.
    pub fn access_path(&self) -> OperatorType {
        let mut node = self;
        while let Some(child) = node.children.first() {
            node = child;
        }
        node.op_type
    }

    /// Sum of the estimated costs of all nodes.
    pub fn total_cost(&self) -> f64 {
        self.preorder().iter().map(|n| n.estimated_cost).sum()
    }

    /// Prices every node with its operator type's parameters.
    pub fn price(&mut self, params: &OperatorParams) -> Result<(), CostError> {
        let mut result = Ok(());
        self.preorder_mut(&mut |n| {
            if result.is_err() {
                return;
            }
            match params.get(n.op_type) {
                Ok(p) => n.estimated_cost = operator_cost(p, &n.counts),
                Err(e) => result = Err(e),
            }
        });
        result
    }

    /// Copies measured operator times from an execution of this plan.
    pub fn annotate(&mut self, exec: &ExecutionRecord) -> Result<(), PlanError> {
        let expected = self.preorder().len();
        if exec.nodes.len() != expected {
            return Err(PlanError::ShapeMismatch {
                expected,
                got: exec.nodes.len(),
            });
        }
        let mut times = exec.nodes.iter().map(|n| n.time_ms);
        self.preorder_mut(&mut |n| n.actual_time_ms = times.next());
        Ok(())
    }
}

/// Supplies cost parameters for planning a query over one table.
pub trait ParamsSource {
    fn params_for(&self, table: &TableId) -> OperatorParams;
}

/// The same constants for every table and operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams(pub CostParams);

impl ParamsSource for FixedParams {
    fn params_for(&self, _table: &TableId) -> OperatorParams {
        OperatorParams::uniform(self.0)
    }
}

impl ParamsSource for OperatorParams {
    fn params_for(&self, _table: &TableId) -> OperatorParams {
        self.clone()
    }
}

/// Estimated counts for a scan of `table`.
///
/// A sequential scan reads every page and tuple and evaluates the filter on
/// each tuple when there is one. An index scan reads `k` index entries and
/// fetches `min(k, pages)` heap pages, examining every tuple on them.
pub fn scan_counts(op: OperatorType, table: &TableDef, selectivity: f64) -> OperatorCounts {
    let n = table.n_tuples();
    match op {
        OperatorType::SeqScan => OperatorCounts {
            n_tuples: n,
            n_operations: if selectivity < 1.0 { n } else { 0 },
            n_seq_pages: table.pages,
            ..Default::default()
        },
        OperatorType::IndexScan => {
            let k = matching_tuples(n, selectivity);
            let pages = k.min(table.pages);
            OperatorCounts {
                n_tuples: pages * table.tuples_per_page,
                n_index_entries: k,
                n_random_pages: pages,
                ..Default::default()
            }
        }
        OperatorType::Agg => OperatorCounts::default(),
    }
}

fn build(access: OperatorType, q: &QuerySpec, table: &TableDef) -> PlanNode {
    let scan = PlanNode {
        table: Some(q.table.clone()),
        selectivity: Some(q.selectivity),
        ..PlanNode::leaf(access, scan_counts(access, table, q.selectivity))
    };
    if !q.aggregate {
        return scan;
    }
    let rows = matching_tuples(table.n_tuples(), q.selectivity);
    let agg = PlanNode {
        table: Some(q.table.clone()),
        ..PlanNode::leaf(
            OperatorType::Agg,
            OperatorCounts {
                n_tuples: rows,
                n_operations: agg_groups(table, rows),
                ..Default::default()
            },
        )
    };
    agg.with_child(scan)
}

/// All priced alternatives for `q`: the sequential-scan plan first, then
/// the index-scan plan when the table has an index.
pub fn enumerate(
    q: &QuerySpec,
    catalog: &Catalog,
    params: &OperatorParams,
) -> Result<Vec<PlanNode>, PlanError> {
    if !(0.0..=1.0).contains(&q.selectivity) {
        return Err(PlanError::BadSelectivity(q.selectivity));
    }
    let table = catalog.get(&q.table)?;
    let mut plans = vec![build(OperatorType::SeqScan, q, table)];
    if table.has_index {
        plans.push(build(OperatorType::IndexScan, q, table));
    }
    for p in &mut plans {
        p.price(params)?;
    }
    Ok(plans)
}

/// Cheapest plan for `q` under the parameters `source` supplies for its
/// table. Ties go to the sequential scan.
pub fn enumerate_and_choose(
    q: &QuerySpec,
    catalog: &Catalog,
    source: &dyn ParamsSource,
) -> Result<PlanNode, PlanError> {
    let params = source.params_for(&q.table);
    let mut best: Option<(f64, PlanNode)> = None;
    for plan in enumerate(q, catalog, &params)? {
        let cost = plan_cost(Some(&plan), &params)?;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, plan));
        }
    }
    Ok(best.expect("a sequential scan is always enumerated").1)
}

/// `(estimated_cost, actual_time_ms)` for every node, in preorder.
pub fn estimated_vs_actual(plan: Option<&PlanNode>) -> Result<Vec<(f64, f64)>, PlanError> {
    let Some(plan) = plan else {
        return Ok(Vec::new());
    };
    plan.preorder()
        .into_iter()
        .map(|n| {
            n.actual_time_ms
                .map(|t| (n.estimated_cost, t))
                .ok_or(PlanError::Unexecuted(n.op_type))
        })
        .collect()
}
