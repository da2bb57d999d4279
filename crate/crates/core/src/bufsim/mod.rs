//! Deterministic mini storage engine used as the execution substrate.
//!
//! Tables are arrays of heap pages behind one LRU buffer cache. Operators
//! touch pages, count hits and reads, and charge simulated time from a
//! hidden [`TimingProfile`]; no wall clock is involved, so a run is a pure
//! function of workload, profile and seed.

pub mod cache;

use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_model::{OperatorCounts, OperatorType};
use crate::planner::PlanNode;
use crate::TableId;
pub use cache::{LruBufferCache, PageCache, PageId};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("unknown table {0}")]
    UnknownTable(TableId),
    #[error("table {0} has no index")]
    NoIndex(TableId),
    #[error("selectivity {0} outside [0, 1]")]
    BadSelectivity(f64),
    #[error("invalid table definition: {0}")]
    BadTable(String),
    #[error("invalid timing profile: {0}")]
    BadProfile(String),
    #[error("plan node {0} cannot be executed: {1}")]
    BadPlan(OperatorType, String),
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDef {
    pub id: TableId,
    pub pages: u64,
    pub tuples_per_page: u64,
    pub has_index: bool,
    /// Distinct grouping keys; an aggregate over this table produces
    /// `min(input, distinct_keys)` groups.
    #[serde(default = "one")]
    pub distinct_keys: u64,
}

impl TableDef {
    pub fn n_tuples(&self) -> u64 {
        self.pages * self.tuples_per_page
    }
}

/// The set of tables known to one simulator and planner.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    tables: Vec<TableDef>,
    by_id: BTreeMap<TableId, usize>,
}

impl Catalog {
    pub fn new(tables: Vec<TableDef>) -> Result<Self, SimError> {
        let mut by_id = BTreeMap::new();
        for (i, t) in tables.iter().enumerate() {
            if t.pages == 0 || t.tuples_per_page == 0 {
                return Err(SimError::BadTable(format!(
                    "{}: pages and tuples_per_page must be >= 1",
                    t.id
                )));
            }
            if by_id.insert(t.id.clone(), i).is_some() {
                return Err(SimError::BadTable(format!("duplicate table id {}", t.id)));
            }
        }
        Ok(Self { tables, by_id })
    }

    pub fn get(&self, id: &TableId) -> Result<&TableDef, SimError> {
        self.ordinal(id).map(|i| &self.tables[i])
    }

    pub fn ordinal(&self, id: &TableId) -> Result<usize, SimError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| SimError::UnknownTable(id.clone()))
    }

    pub fn tables(&self) -> &[TableDef] {
        &self.tables
    }

    pub fn total_pages(&self) -> u64 {
        self.tables.iter().map(|t| t.pages).sum()
    }
}

/// Hidden ground-truth timing of the simulated machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingProfile {
    pub t_seq_page_ms: f64,
    pub t_rand_page_ms: f64,
    pub t_hit_page_ms: f64,
    pub t_tuple_ms: f64,
    pub t_op_ms: f64,
    pub t_index_entry_ms: f64,
    /// Sigma of the multiplicative lognormal noise on operator time.
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for TimingProfile {
    fn default() -> Self {
        Self {
            t_seq_page_ms: 0.1,
            t_rand_page_ms: 0.4,
            t_hit_page_ms: 0.1,
            t_tuple_ms: 0.01,
            t_op_ms: 0.005,
            t_index_entry_ms: 0.01,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl TimingProfile {
    pub fn validate(&self) -> Result<(), SimError> {
        let fields = [
            ("t_seq_page_ms", self.t_seq_page_ms),
            ("t_rand_page_ms", self.t_rand_page_ms),
            ("t_hit_page_ms", self.t_hit_page_ms),
            ("t_tuple_ms", self.t_tuple_ms),
            ("t_op_ms", self.t_op_ms),
            ("t_index_entry_ms", self.t_index_entry_ms),
            ("noise_sigma", self.noise_sigma),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(SimError::BadProfile(format!("{name} = {v}")));
            }
        }
        if self.t_seq_page_ms <= 0.0 {
            return Err(SimError::BadProfile(
                "t_seq_page_ms must be positive".into(),
            ));
        }
        if !(self.t_rand_page_ms >= self.t_seq_page_ms && self.t_seq_page_ms >= self.t_hit_page_ms)
        {
            return Err(SimError::BadProfile(
                "need t_rand_page_ms >= t_seq_page_ms >= t_hit_page_ms".into(),
            ));
        }
        Ok(())
    }

    /// Milliseconds to cost units, taking one sequential page fetch as 1.
    pub fn scale_factor(&self) -> f64 {
        1.0 / self.t_seq_page_ms
    }

    fn noise(&self, rng: &mut impl Rng) -> f64 {
        if self.noise_sigma == 0.0 {
            return 1.0;
        }
        // Mean-one lognormal.
        let sigma = self.noise_sigma;
        LogNormal::new(-0.5 * sigma * sigma, sigma)
            .expect("sigma validated as finite and non-negative")
            .sample(rng)
    }
}

/// Outcome of one executed operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpExecution {
    pub op_type: OperatorType,
    pub table: Option<TableId>,
    /// Actual counts. Sequential scans report every touched page in
    /// `n_seq_pages`; index scans in `n_random_pages`.
    pub counts: OperatorCounts,
    pub output_tuples: u64,
    pub page_hits: u64,
    pub page_reads: u64,
    pub time_ms: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageStats {
    pub hit: u64,
    pub read: u64,
}

/// Execution of a whole plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    /// Operators in plan preorder.
    pub nodes: Vec<OpExecution>,
    pub per_table: BTreeMap<TableId, PageStats>,
    pub total_latency_ms: f64,
}

fn check_selectivity(s: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(SimError::BadSelectivity(s))
    }
}

/// Tuples satisfying a predicate of selectivity `s` over `n` tuples.
pub fn matching_tuples(n: u64, s: f64) -> u64 {
    ((s * n as f64).ceil() as u64).min(n)
}

/// Full scan of `table`, pages in order. A selectivity below one means a
/// filter is evaluated on every tuple.
pub fn execute_seq_scan(
    cache: &mut dyn PageCache,
    ordinal: u32,
    table: &TableDef,
    selectivity: f64,
    profile: &TimingProfile,
    rng: &mut impl Rng,
) -> Result<OpExecution, SimError> {
    check_selectivity(selectivity)?;
    let (mut hits, mut reads) = (0u64, 0u64);
    let mut io_ms = 0.0;
    for page in 0..table.pages {
        if cache.access(PageId {
            table: ordinal,
            page,
        }) {
            hits += 1;
            io_ms += profile.t_hit_page_ms;
        } else {
            reads += 1;
            io_ms += profile.t_seq_page_ms;
        }
    }
    let n = table.n_tuples();
    let filter_ops = if selectivity < 1.0 { n } else { 0 };
    let cpu_ms = profile.t_tuple_ms * n as f64 + profile.t_op_ms * filter_ops as f64;
    Ok(OpExecution {
        op_type: OperatorType::SeqScan,
        table: Some(table.id.clone()),
        counts: OperatorCounts {
            n_tuples: n,
            n_operations: filter_ops,
            n_seq_pages: table.pages,
            ..Default::default()
        },
        output_tuples: matching_tuples(n, selectivity),
        page_hits: hits,
        page_reads: reads,
        time_ms: (io_ms + cpu_ms) * profile.noise(rng),
    })
}

/// Heap pages an index scan visits, in visit order.
///
/// Matching tuples are spread over `min(k, pages)` distinct pages chosen
/// uniformly at random; each page is fetched once.
pub fn index_probe_pages(table: &TableDef, selectivity: f64, rng: &mut impl Rng) -> Vec<u64> {
    let k = matching_tuples(table.n_tuples(), selectivity);
    let d = k.min(table.pages);
    if d == 0 {
        return Vec::new();
    }
    index::sample(rng, table.pages as usize, d as usize)
        .into_iter()
        .map(|p| p as u64)
        .collect()
}

/// Index lookup of the matching tuples followed by random heap fetches.
/// Every tuple on a fetched page is examined.
pub fn execute_index_scan(
    cache: &mut dyn PageCache,
    ordinal: u32,
    table: &TableDef,
    selectivity: f64,
    profile: &TimingProfile,
    rng: &mut impl Rng,
) -> Result<OpExecution, SimError> {
    check_selectivity(selectivity)?;
    if !table.has_index {
        return Err(SimError::NoIndex(table.id.clone()));
    }
    let k = matching_tuples(table.n_tuples(), selectivity);
    let pages = index_probe_pages(table, selectivity, rng);
    let (mut hits, mut reads) = (0u64, 0u64);
    let mut io_ms = 0.0;
    for &page in &pages {
        if cache.access(PageId {
            table: ordinal,
            page,
        }) {
            hits += 1;
            io_ms += profile.t_hit_page_ms;
        } else {
            reads += 1;
            io_ms += profile.t_rand_page_ms;
        }
    }
    let examined = pages.len() as u64 * table.tuples_per_page;
    let cpu_ms = profile.t_tuple_ms * examined as f64 + profile.t_index_entry_ms * k as f64;
    let time_ms = if pages.is_empty() && k == 0 {
        0.0
    } else {
        (io_ms + cpu_ms) * profile.noise(rng)
    };
    Ok(OpExecution {
        op_type: OperatorType::IndexScan,
        table: Some(table.id.clone()),
        counts: OperatorCounts {
            n_tuples: examined,
            n_index_entries: k,
            n_random_pages: pages.len() as u64,
            ..Default::default()
        },
        output_tuples: k,
        page_hits: hits,
        page_reads: reads,
        time_ms,
    })
}

/// Hash aggregate: one tuple cost per input row and one operation per group.
pub fn execute_agg(
    n_input: u64,
    n_groups: u64,
    profile: &TimingProfile,
    rng: &mut impl Rng,
) -> OpExecution {
    let base = profile.t_tuple_ms * n_input as f64 + profile.t_op_ms * n_groups as f64;
    OpExecution {
        op_type: OperatorType::Agg,
        table: None,
        counts: OperatorCounts {
            n_tuples: n_input,
            n_operations: n_groups,
            ..Default::default()
        },
        output_tuples: n_groups,
        page_hits: 0,
        page_reads: 0,
        time_ms: base * profile.noise(rng),
    }
}

/// Groups an aggregate over `table` produces from `n_input` rows.
pub fn agg_groups(table: &TableDef, n_input: u64) -> u64 {
    n_input.min(table.distinct_keys)
}

/// Catalog, buffer cache, timing and RNG of one simulated server.
pub struct Simulator {
    catalog: Catalog,
    cache: LruBufferCache,
    profile: TimingProfile,
    rng: ChaCha8Rng,
}

impl Simulator {
    pub fn new(
        catalog: Catalog,
        cache_pages: usize,
        profile: TimingProfile,
    ) -> Result<Self, SimError> {
        profile.validate()?;
        let capacity = NonZeroUsize::new(cache_pages)
            .ok_or_else(|| SimError::BadTable("cache_pages must be >= 1".into()))?;
        Ok(Self {
            catalog,
            cache: LruBufferCache::new(capacity),
            rng: ChaCha8Rng::seed_from_u64(profile.seed),
            profile,
        })
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn profile(&self) -> &TimingProfile {
        &self.profile
    }

    pub fn cache(&self) -> &LruBufferCache {
        &self.cache
    }

    /// Empties the cache and rewinds the RNG to the profile seed.
    pub fn reset(&mut self) {
        self.cache.clear();
        self.rng = ChaCha8Rng::seed_from_u64(self.profile.seed);
    }

    /// Pages of `table` currently resident.
    pub fn resident_pages(&self, table: &TableId) -> Result<u64, SimError> {
        let ord = self.catalog.ordinal(table)? as u32;
        Ok(self
            .cache
            .resident()
            .iter()
            .filter(|p| p.table == ord)
            .count() as u64)
    }

    /// Executes a plan bottom-up. Nodes come back in plan preorder.
    pub fn execute(&mut self, plan: &PlanNode) -> Result<ExecutionRecord, SimError> {
        let mut nodes = Vec::new();
        self.execute_node(plan, &mut nodes)?;
        let mut per_table: BTreeMap<TableId, PageStats> = BTreeMap::new();
        for n in &nodes {
            if let Some(t) = &n.table {
                let e = per_table.entry(t.clone()).or_default();
                e.hit += n.page_hits;
                e.read += n.page_reads;
            }
        }
        let total_latency_ms = nodes.iter().map(|n| n.time_ms).sum();
        Ok(ExecutionRecord {
            nodes,
            per_table,
            total_latency_ms,
        })
    }

    fn execute_node(
        &mut self,
        node: &PlanNode,
        out: &mut Vec<OpExecution>,
    ) -> Result<u64, SimError> {
        let slot = out.len();
        // Placeholder keeps preorder positions while children run first.
        out.push(OpExecution {
            op_type: node.op_type,
            table: None,
            counts: OperatorCounts::default(),
            output_tuples: 0,
            page_hits: 0,
            page_reads: 0,
            time_ms: 0.0,
        });
        let mut child_rows = 0;
        for child in &node.children {
            child_rows += self.execute_node(child, out)?;
        }
        let exec = match node.op_type {
            OperatorType::SeqScan | OperatorType::IndexScan => {
                let (table_id, selectivity) = node.scan_target().ok_or_else(|| {
                    SimError::BadPlan(node.op_type, "scan without table/selectivity".into())
                })?;
                let ord = self.catalog.ordinal(table_id)?;
                let table = &self.catalog.tables()[ord];
                if node.op_type == OperatorType::SeqScan {
                    execute_seq_scan(
                        &mut self.cache,
                        ord as u32,
                        table,
                        selectivity,
                        &self.profile,
                        &mut self.rng,
                    )?
                } else {
                    execute_index_scan(
                        &mut self.cache,
                        ord as u32,
                        table,
                        selectivity,
                        &self.profile,
                        &mut self.rng,
                    )?
                }
            }
            OperatorType::Agg => {
                let groups = match &node.table {
                    Some(t) => agg_groups(self.catalog.get(t)?, child_rows),
                    None => child_rows.min(1),
                };
                execute_agg(child_rows, groups, &self.profile, &mut self.rng)
            }
        };
        let rows = exec.output_tuples;
        out[slot] = exec;
        Ok(rows)
    }
}
