//! Five-parameter optimizer cost vocabulary and the per-operator cost
//! formulas built on it.
//!
//! Every operator is priced as a linear combination of cost constants and
//! cardinalities:
//!
//! ```text
//! cost = c_t·n_t + c_o·n_o + c_s·n_s + c_i·n_i + c_r·n_r
//! ```
//!
//! `seq_page_cost` is the unit of the scale: with the defaults, processing
//! 100 tuples costs as much as one sequential page fetch.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::PlanNode;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("cost parameter `{name}` is invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("random_page_cost ({random}) is below seq_page_cost ({seq})")]
    RandomBelowSequential { random: f64, seq: f64 },
    #[error("no cost parameters configured for operator {0}")]
    MissingOperator(OperatorType),
}

/// The five cost constants an optimizer consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    pub cpu_tuple_cost: f64,
    pub cpu_operator_cost: f64,
    pub cpu_index_tuple_cost: f64,
    pub seq_page_cost: f64,
    pub random_page_cost: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            cpu_tuple_cost: 0.01,
            cpu_operator_cost: 0.0025,
            cpu_index_tuple_cost: 0.005,
            seq_page_cost: 1.0,
            random_page_cost: 4.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), CostError> {
        let fields = [
            ("cpu_tuple_cost", self.cpu_tuple_cost),
            ("cpu_operator_cost", self.cpu_operator_cost),
            ("cpu_index_tuple_cost", self.cpu_index_tuple_cost),
            ("seq_page_cost", self.seq_page_cost),
            ("random_page_cost", self.random_page_cost),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(CostError::InvalidParameter { name, value });
            }
        }
        if self.seq_page_cost <= 0.0 {
            return Err(CostError::InvalidParameter {
                name: "seq_page_cost",
                value: self.seq_page_cost,
            });
        }
        if self.random_page_cost < self.seq_page_cost {
            return Err(CostError::RandomBelowSequential {
                random: self.random_page_cost,
                seq: self.seq_page_cost,
            });
        }
        Ok(())
    }

    /// Multiplies every constant by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cpu_tuple_cost: self.cpu_tuple_cost * factor,
            cpu_operator_cost: self.cpu_operator_cost * factor,
            cpu_index_tuple_cost: self.cpu_index_tuple_cost * factor,
            seq_page_cost: self.seq_page_cost * factor,
            random_page_cost: self.random_page_cost * factor,
        }
    }
}

/// Cardinalities an operator is charged for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorCounts {
    pub n_tuples: u64,
    pub n_operations: u64,
    pub n_seq_pages: u64,
    pub n_index_entries: u64,
    pub n_random_pages: u64,
}

impl Add for OperatorCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            n_tuples: self.n_tuples + rhs.n_tuples,
            n_operations: self.n_operations + rhs.n_operations,
            n_seq_pages: self.n_seq_pages + rhs.n_seq_pages,
            n_index_entries: self.n_index_entries + rhs.n_index_entries,
            n_random_pages: self.n_random_pages + rhs.n_random_pages,
        }
    }
}

/// Physical operator tag. Each tag has one cost-formula shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorType {
    SeqScan,
    IndexScan,
    Agg,
}

impl OperatorType {
    pub const ALL: [OperatorType; 3] = [Self::SeqScan, Self::IndexScan, Self::Agg];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SeqScan => "SeqScan",
            Self::IndexScan => "IndexScan",
            Self::Agg => "Agg",
        }
    }
}

impl fmt::Display for OperatorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn operator_cost(params: &CostParams, counts: &OperatorCounts) -> f64 {
    params.cpu_tuple_cost * counts.n_tuples as f64
        + params.cpu_operator_cost * counts.n_operations as f64
        + params.seq_page_cost * counts.n_seq_pages as f64
        + params.cpu_index_tuple_cost * counts.n_index_entries as f64
        + params.random_page_cost * counts.n_random_pages as f64
}

/// Unfiltered sequential scan: `c_t·n_t + c_s·n_s`.
pub fn seq_scan_cost(params: &CostParams, n_tuples: u64, n_pages: u64) -> f64 {
    operator_cost(
        params,
        &OperatorCounts {
            n_tuples,
            n_seq_pages: n_pages,
            ..Default::default()
        },
    )
}

pub fn agg_cost(params: &CostParams, n_tuples: u64) -> f64 {
    operator_cost(
        params,
        &OperatorCounts {
            n_tuples,
            ..Default::default()
        },
    )
}

/// Index scan: `c_t·n_t + c_i·n_i + c_r·n_r`.
///
/// Which counts an index scan is charged for is a modelling choice of this
/// crate; only the sequential scan and aggregate shapes are standard.
pub fn index_scan_cost(
    params: &CostParams,
    n_tuples: u64,
    n_index_entries: u64,
    n_random_pages: u64,
) -> f64 {
    operator_cost(
        params,
        &OperatorCounts {
            n_tuples,
            n_index_entries,
            n_random_pages,
            ..Default::default()
        },
    )
}

/// Cost parameters keyed by operator type, so each operator can carry its
/// own CPU constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams(BTreeMap<OperatorType, CostParams>);

impl OperatorParams {
    pub fn new() -> Self {
        Self::default()
    }

    /// Same parameters for every known operator type.
    pub fn uniform(params: CostParams) -> Self {
        Self(OperatorType::ALL.iter().map(|op| (*op, params)).collect())
    }

    pub fn insert(&mut self, op: OperatorType, params: CostParams) {
        self.0.insert(op, params);
    }

    pub fn get(&self, op: OperatorType) -> Result<&CostParams, CostError> {
        self.0.get(&op).ok_or(CostError::MissingOperator(op))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OperatorType, &CostParams)> {
        self.0.iter()
    }
}

/// Sum of `operator_cost` over every node of the plan, each node priced with
/// the parameters of its own operator type. `None` is the empty plan.
pub fn plan_cost(root: Option<&PlanNode>, params: &OperatorParams) -> Result<f64, CostError> {
    let Some(root) = root else {
        return Ok(0.0);
    };
    let mut total = 0.0;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        total += operator_cost(params.get(node.op_type)?, &node.counts);
        stack.extend(node.children.iter());
    }
    Ok(total)
}
