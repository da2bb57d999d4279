//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use acm_core::bufsim::{
    Catalog, LruBufferCache, PageCache, PageId, Simulator, TableDef, TimingProfile,
};
use acm_core::cost_model::{
    operator_cost, CostParams, OperatorCounts, OperatorParams, OperatorType,
};
use acm_core::cpu_model::oracle::fit_observations;
use acm_core::cpu_model::{fit, smooth, CpuModelConfig, FittedCpu, OperatorObservation};
use acm_core::disk_model::{degradation_factor, DiskModel, DiskModelConfig};
use acm_core::harness::replay::{NodeOutcome, QueryOutcome};
use acm_core::harness::{
    compare, generate_workload, replay, write_compare_report, AdaptiveModel, CompareReport,
    ExperimentConfig, Mode, PlanFlip, RunReport, TraceEntry, WorkloadTrace,
};
use acm_core::planner::{enumerate, enumerate_and_choose, FixedParams, QuerySpec};
use acm_core::TableId;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRACE_SEED: u64 = 42;
const WARMUP: usize = 2;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn rel_err(got: f64, want: f64) -> f64 {
    let d = (got - want).abs();
    if want == 0.0 {
        d
    } else {
        d / want.abs()
    }
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Formula conformance against direct evaluation.
fn formulas() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = 1e-12;
    let n = 2000;
    let mut worst = [0.0f64; 5];

    for _ in 0..n {
        let tc: u64 = rng.random_range(0..1_000_000);
        let g: u64 = rng.random_range(0..10_000);
        let gf = g as f64;
        let want = (1.0 + gf) / (1.0 + gf * gf);
        worst[0] = worst[0].max(rel_err(degradation_factor(tc + g, tc).unwrap(), want));

        let (prev, latest, alpha) = (
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random::<f64>(),
        );
        worst[3] = worst[3].max(rel_err(
            smooth(prev, latest, alpha),
            (1.0 - alpha) * latest + alpha * prev,
        ));

        let p = CostParams {
            cpu_tuple_cost: rng.random_range(0.0..1.0),
            cpu_operator_cost: rng.random_range(0.0..1.0),
            cpu_index_tuple_cost: rng.random_range(0.0..1.0),
            seq_page_cost: rng.random_range(0.0..10.0),
            random_page_cost: rng.random_range(0.0..100.0),
        };
        let c = OperatorCounts {
            n_tuples: rng.random_range(0..1_000_000),
            n_operations: rng.random_range(0..1_000_000),
            n_seq_pages: rng.random_range(0..100_000),
            n_index_entries: rng.random_range(0..1_000_000),
            n_random_pages: rng.random_range(0..100_000),
        };
        let want = p.cpu_tuple_cost * c.n_tuples as f64
            + p.cpu_operator_cost * c.n_operations as f64
            + p.seq_page_cost * c.n_seq_pages as f64
            + p.cpu_index_tuple_cost * c.n_index_entries as f64
            + p.random_page_cost * c.n_random_pages as f64;
        worst[4] = worst[4].max(rel_err(operator_cost(&p, &c), want));
    }

    // Hit-ratio prediction and random page cost over random access streams,
    // with the counters kept independently here.
    let tables: Vec<TableId> = ["a", "b", "c", "d"]
        .iter()
        .map(|t| TableId::from(*t))
        .collect();
    let mut checked = 0;
    while checked < n {
        let cfg = DiskModelConfig {
            random_page_cost_default: rng.random_range(1.0..50.0),
            seq_page_cost: rng.random_range(0.1..1.0),
            min_observations: rng.random_range(1..5),
        };
        let mut model = DiskModel::new(cfg).unwrap();
        let mut qc = 0u64;
        let mut last: BTreeMap<TableId, (u64, Option<f64>, u64)> = BTreeMap::new();
        for _ in 0..200 {
            let t = tables.choose(&mut rng).unwrap().clone();
            let (hit, read) = if rng.random_bool(0.1) {
                (0, 0)
            } else {
                (rng.random_range(0..500i64), rng.random_range(0..500i64))
            };
            model.record_execution(&t, hit, read).unwrap();
            qc += 1;
            let e = last.entry(t).or_insert((0, None, 0));
            e.0 = qc;
            if hit + read > 0 {
                e.1 = Some(hit as f64 / (hit + read) as f64);
                e.2 += 1;
            }
            for t in &tables {
                let predicted = last.get(t).and_then(|&(tc, r, obs)| {
                    if obs < cfg.min_observations {
                        return None;
                    }
                    let g = (qc - tc) as f64;
                    Some(r? * (1.0 + g) / (1.0 + g * g))
                });
                match (model.predict_hit_ratio(t), predicted) {
                    (Some(got), Some(want)) => worst[1] = worst[1].max(rel_err(got, want)),
                    (None, None) => {}
                    (got, want) => {
                        return Err(format!("prediction mismatch for {t}: {got:?} vs {want:?}"))
                    }
                }
                let r = predicted.unwrap_or(0.0);
                let want = cfg.random_page_cost_default * (1.0 - r) + cfg.seq_page_cost * r;
                worst[2] = worst[2].max(rel_err(model.random_page_cost_for(t), want));
                checked += 1;
            }
        }
    }

    let elapsed = start.elapsed();
    let names = [
        "degradation",
        "hit_ratio",
        "random_page_cost",
        "smooth",
        "operator_cost",
    ];
    let detail = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(
        worst.iter().all(|w| *w <= tol) && elapsed < Duration::from_secs(1),
        format!("max rel err: {detail}; {n}+ inputs each; {elapsed:.2?} (limit 1e-12, 1 s)"),
    )
}

// QR fit against the normal-equations oracle.
fn lsq_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let config = CpuModelConfig {
        scale_factor: 10.0,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rows = rng.random_range(3..=50);
        let truth = [
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
        ];
        let obs: Vec<OperatorObservation> = (0..rows)
            .map(|_| {
                let (t, o, i) = (
                    rng.random_range(1..10_000u64),
                    rng.random_range(1..10_000u64),
                    rng.random_range(1..10_000u64),
                );
                let s = rng.random_range(0.0..1000.0);
                let cost = truth[0] * t as f64 + truth[1] * o as f64 + truth[2] * i as f64 + s;
                let time = cost * rng.random_range(0.9..1.1) / config.scale_factor;
                OperatorObservation::new(OperatorType::SeqScan, t, o, i, s, time).unwrap()
            })
            .collect();
        let got = fit(&obs, &config).map_err(|e| format!("fit failed: {e}"))?;
        let want =
            fit_observations(&obs, config.scale_factor).ok_or("oracle found a singular system")?;
        let pairs = |f: FittedCpu| [f.c_t, f.c_o, f.c_i];
        for (g, w) in pairs(got).into_iter().zip(pairs(want)) {
            let (g, w) = (g.ok_or("missing column")?, w.ok_or("missing column")?);
            worst = worst.max(rel_err(g, w.max(config.epsilon_floor)));
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("200 systems, max rel err {worst:.1e}; {elapsed:.2?} (limit 1e-9, 5 s)"),
    )
}

// Drives random plans through the simulator and checks the fitted CPU
// parameters against the profile's hidden per-unit times.
fn recovery_run(sigma: f64, operators: usize) -> Result<(f64, String), String> {
    let cfg = ExperimentConfig::load(&configs().join("default.toml")).map_err(|e| e.to_string())?;
    let mut setup = cfg.setup().map_err(|e| e.to_string())?;
    setup.profile = TimingProfile {
        noise_sigma: sigma,
        seed: setup.profile.seed,
        ..TimingProfile::default()
    };
    setup.cpu.scale_factor = setup.profile.scale_factor();
    // Distinct keys at different fractions of each table, so the ratio of
    // groups to input rows varies with selectivity and table.
    setup.catalog = Catalog::new(
        [
            ("narrow", 100, 400, 10_000),
            ("medium", 400, 40, 1_600),
            ("wide", 1000, 4, 4_000),
        ]
        .into_iter()
        .map(|(id, pages, tuples_per_page, distinct_keys)| TableDef {
            id: TableId::from(id),
            pages,
            tuples_per_page,
            has_index: true,
            distinct_keys,
        })
        .collect(),
    )
    .map_err(|e| e.to_string())?;
    // Fit over every operator replayed, not just the default window.
    setup.cpu.window_size = operators;
    let profile = setup.profile;
    let sf = profile.scale_factor();
    let mut model = AdaptiveModel::from_setup(&setup).map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(setup.catalog.clone(), setup.cache_pages, profile)
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tables: Vec<TableId> = setup
        .catalog
        .tables()
        .iter()
        .map(|t| t.id.clone())
        .collect();
    let selectivities = [0.0005, 0.002, 0.01, 0.05, 0.2, 0.6, 1.0];
    let params = OperatorParams::uniform(setup.defaults);

    let mut seen: BTreeMap<OperatorType, usize> = BTreeMap::new();
    while seen.values().copied().min().unwrap_or(0) < operators || seen.len() < 3 {
        let q = QuerySpec {
            table: tables.choose(&mut rng).unwrap().clone(),
            selectivity: *selectivities.choose(&mut rng).unwrap(),
            aggregate: rng.random_bool(0.5),
        };
        let plans = enumerate(&q, &setup.catalog, &params).map_err(|e| e.to_string())?;
        let plan = plans.choose(&mut rng).unwrap();
        let exec = sim.execute(plan).map_err(|e| e.to_string())?;
        model.observe(plan, &exec).map_err(|e| e.to_string())?;
        for n in &exec.nodes {
            *seen.entry(n.op_type).or_default() += 1;
        }
    }

    let hidden = [
        profile.t_tuple_ms * sf,
        profile.t_op_ms * sf,
        profile.t_index_entry_ms * sf,
    ];
    let names = ["c_t", "c_o", "c_i"];
    let mut worst = (0.0f64, String::new());
    for op in OperatorType::ALL {
        model.cpu.refit(op).map_err(|e| format!("{op}: {e}"))?;
        let f = model.cpu.fit_for(op).ok_or(format!("{op}: no fit"))?;
        let fitted = [
            f.fitted.cpu_tuple_cost,
            f.fitted.cpu_operator_cost,
            f.fitted.cpu_index_tuple_cost,
        ];
        for j in 0..3 {
            // Columns an operator never exercises carry no information.
            let err = rel_err(fitted[j], hidden[j]);
            if f.seeded[j] && err >= worst.0 {
                worst = (err, format!("{op} {}", names[j]));
            }
        }
    }
    Ok(worst)
}

fn recovery() -> Outcome {
    let (exact, exact_at) = recovery_run(0.0, 200)?;
    let (noisy, noisy_at) = recovery_run(0.05, 1000)?;
    check(
        exact <= 1e-6 && noisy <= 0.10,
        format!(
            "sigma=0 after 200 ops/type: max rel err {exact:.1e} at {exact_at} (limit 1e-6); \
             sigma=0.05 after 1000 ops/type: {:.2}% at {noisy_at} (limit 10%)",
            noisy * 100.0
        ),
    )
}

fn shipped(name: &str) -> Result<(ExperimentConfig, WorkloadTrace), String> {
    let cfg = ExperimentConfig::load(&configs().join(name)).map_err(|e| e.to_string())?;
    let workload = cfg.workload.as_ref().ok_or("config has no workload")?;
    let trace = generate_workload(
        workload,
        &cfg.catalog().map_err(|e| e.to_string())?,
        TRACE_SEED,
    )
    .map_err(|e| e.to_string())?;
    Ok((cfg, trace))
}

fn correlation() -> Outcome {
    let start = Instant::now();
    let (cfg, trace) = shipped("default.toml")?;
    let report = compare(&trace, &cfg.setup().map_err(|e| e.to_string())?, WARMUP)
        .map_err(|e| e.to_string())?;
    let b = report.baseline.correlation().map_err(|e| e.to_string())?;
    let a = report.acm.correlation().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        b <= 0.6 && a >= 0.9 && elapsed < Duration::from_secs(30),
        format!("baseline r={b:.4} (<= 0.6), acm r={a:.4} (>= 0.9), {} tables, cache {} of {} pages; {elapsed:.2?} (limit 30 s)",
            cfg.tables.len(), cfg.cache_pages, cfg.catalog().unwrap().total_pages()),
    )
}

fn plan_flips() -> Outcome {
    let (cfg, trace) = shipped("hot_table.toml")?;
    let setup = cfg.setup().map_err(|e| e.to_string())?;
    let report = compare(&trace, &setup, WARMUP).map_err(|e| e.to_string())?;
    let resident_flips = report
        .flips
        .iter()
        .filter(|f| f.baseline == OperatorType::SeqScan && f.acm == OperatorType::IndexScan)
        .filter(|f| {
            let table = &report.acm.queries[f.index].table;
            report.acm.trajectory.iter().any(|p| {
                p.step == f.index
                    && p.scope == table.0
                    && p.param == "random_page_cost"
                    && p.value == setup.defaults.seq_page_cost
            })
        })
        .count();
    let (tb, ta) = (
        report.baseline.total_latency_ms(),
        report.acm.total_latency_ms(),
    );
    let gain = (tb - ta) / tb * 100.0;
    check(
        resident_flips >= 1 && gain >= 10.0,
        format!("{resident_flips} SeqScan->IndexScan flips on cache-resident tables (>= 1); latency {gain:.2}% lower (>= 10%)"),
    )
}

const TABLE1: [(u32, f64, f64); 22] = [
    (1, 128235.0, 127906.0),
    (2, 1325.0, 1423.0),
    (3, 42453.0, 22632.0),
    (4, 5969.0, 5956.0),
    (5, 43756.0, 9860.0),
    (6, 4290.0, 4254.0),
    (7, 42803.0, 21306.0),
    (8, 6819.0, 6808.0),
    (9, 93829.0, 61407.0),
    (10, 35248.0, 11726.0),
    (11, 2308.0, 2225.0),
    (12, 51593.0, 39639.0),
    (13, 33872.0, 33795.0),
    (14, 4685.0, 4442.0),
    (15, 5893.0, 5949.0),
    (16, 8992.0, 8816.0),
    (17, 1971.0, 1225.0),
    (18, 52151.0, 51435.0),
    (19, 36333.0, 36371.0),
    (20, 71459.0, 71743.0),
    (21, 47928.0, 47944.0),
    (22, 3909.0, 3878.0),
];
const TABLE1_CHANGED: [u32; 7] = [3, 5, 7, 9, 10, 12, 17];

fn synthetic_run(mode: Mode, latencies: impl Iterator<Item = f64>) -> RunReport {
    RunReport {
        mode,
        warmup: 0,
        queries: latencies
            .enumerate()
            .map(|(i, ms)| QueryOutcome {
                index: i,
                label: format!("Q{}", i + 1),
                table: TableId::from("tpch"),
                selectivity: 1.0,
                aggregate: false,
                access_path: OperatorType::SeqScan,
                estimated_cost: ms,
                latency_ms: ms,
                page_hits: 0,
                page_reads: 0,
                nodes: vec![NodeOutcome {
                    op_type: OperatorType::SeqScan,
                    estimated_cost: ms,
                    actual_ms: ms,
                    counts: OperatorCounts::default(),
                }],
            })
            .collect(),
        trajectory: Vec::new(),
        fit_history: Vec::new(),
        final_model: None,
    }
}

fn summary_value(text: &str, key: &str) -> Result<f64, String> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .ok_or(format!("summary lacks {key}"))?
        .parse()
        .map_err(|e| format!("{key}: {e}"))
}

fn report_arithmetic() -> Outcome {
    let report = CompareReport {
        baseline: synthetic_run(Mode::Baseline, TABLE1.iter().map(|r| r.1)),
        acm: synthetic_run(Mode::Acm, TABLE1.iter().map(|r| r.2)),
        flips: TABLE1
            .iter()
            .filter(|r| TABLE1_CHANGED.contains(&r.0))
            .map(|r| PlanFlip {
                index: r.0 as usize - 1,
                label: format!("Q{}", r.0),
                baseline: OperatorType::SeqScan,
                acm: OperatorType::IndexScan,
                baseline_ms: r.1,
                acm_ms: r.2,
            })
            .collect(),
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_compare_report(&report, dir.path()).map_err(|e| e.to_string())?;
    let summary =
        std::fs::read_to_string(dir.path().join("summary.txt")).map_err(|e| e.to_string())?;
    let total = summary_value(&summary, "improvement_pct")?;
    let flipped = summary_value(&summary, "flipped_improvement_pct")?;
    check(
        (total - 20.0).abs() <= 1.0,
        format!("44 published values give {total:.2}% (20% +/- 1%); the 7 re-planned queries give {flipped:.2}%"),
    )
}

// Straightforward LRU over a recency-ordered vector.
struct ReferenceLru {
    capacity: usize,
    pages: Vec<PageId>,
}

impl ReferenceLru {
    fn access(&mut self, p: PageId) -> bool {
        let hit = if let Some(pos) = self.pages.iter().position(|q| *q == p) {
            self.pages.remove(pos);
            true
        } else {
            if self.pages.len() == self.capacity {
                self.pages.pop();
            }
            false
        };
        self.pages.insert(0, p);
        hit
    }
}

fn lru_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut traces = 0;
    for capacity in [1usize, 2, 7, 64, 300] {
        let mut cache = LruBufferCache::new(NonZeroUsize::new(capacity).unwrap());
        let mut reference = ReferenceLru {
            capacity,
            pages: Vec::new(),
        };
        for step in 0..10_000 {
            let p = PageId {
                table: rng.random_range(0..3),
                page: rng.random_range(0..(capacity as u64 * 2 + 3)),
            };
            if cache.access(p) != reference.access(p) {
                return Err(format!(
                    "capacity {capacity}: hit/miss differs at touch {step}"
                ));
            }
        }
        if cache.resident() != reference.pages {
            return Err(format!("capacity {capacity}: resident sets differ"));
        }
        traces += 1;
    }
    Ok(format!("{traces} traces x 1e4 touches"))
}

fn conservation() -> Result<String, String> {
    let (cfg, trace) = shipped("default.toml")?;
    let setup = cfg.setup().map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(setup.catalog.clone(), setup.cache_pages, setup.profile)
        .map_err(|e| e.to_string())?;
    let mut nodes = 0;
    for e in &trace.entries {
        let plan = enumerate_and_choose(&e.query, &setup.catalog, &FixedParams(setup.defaults))
            .map_err(|e| e.to_string())?;
        let exec = sim.execute(&plan).map_err(|e| e.to_string())?;
        for n in &exec.nodes {
            if n.page_hits + n.page_reads != n.counts.n_seq_pages + n.counts.n_random_pages {
                return Err(format!("{}: hits+reads != pages touched", e.label));
            }
            nodes += 1;
        }
        let stats = exec
            .per_table
            .get(&e.query.table)
            .copied()
            .unwrap_or_default();
        let touched: u64 = exec.nodes.iter().map(|n| n.page_hits + n.page_reads).sum();
        if stats.hit + stats.read != touched {
            return Err(format!("{}: per-table totals disagree", e.label));
        }
    }
    Ok(format!("{nodes} operators"))
}

fn determinism() -> Result<String, String> {
    let (cfg, trace) = shipped("default.toml")?;
    let setup = cfg.setup().map_err(|e| e.to_string())?;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let r = compare(&trace, &setup, WARMUP).map_err(|e| e.to_string())?;
        write_compare_report(&r, d.path()).map_err(|e| e.to_string())?;
    }
    let mut files = 0;
    for entry in std::fs::read_dir(dirs[0].path()).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let a = std::fs::read(dirs[0].path().join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(&name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{name:?} differs between identical runs"));
        }
        files += 1;
    }
    Ok(format!("{files} report files byte-identical"))
}

fn scale_invariance() -> Result<String, String> {
    let (cfg, trace) = shipped("default.toml")?;
    let catalog = cfg.catalog().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for e in &trace.entries {
        let p = CostParams {
            cpu_tuple_cost: rng.random_range(0.001..0.5),
            cpu_operator_cost: rng.random_range(0.001..0.5),
            cpu_index_tuple_cost: rng.random_range(0.001..0.5),
            seq_page_cost: 1.0,
            random_page_cost: rng.random_range(1.0..8.0),
        };
        let base =
            enumerate_and_choose(&e.query, &catalog, &FixedParams(p)).map_err(|e| e.to_string())?;
        for k in [0.25, 2.0, 1024.0] {
            let scaled = enumerate_and_choose(&e.query, &catalog, &FixedParams(p.scaled(k)))
                .map_err(|e| e.to_string())?;
            if scaled.access_path() != base.access_path() {
                return Err(format!("{}: choice changed under scale {k}", e.label));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} scaled plannings"))
}

fn warmup_identity() -> Result<String, String> {
    let (cfg, trace) = shipped("default.toml")?;
    let setup = cfg.setup().map_err(|e| e.to_string())?;
    let short = WorkloadTrace {
        seed: trace.seed,
        entries: trace
            .entries
            .iter()
            .take(setup.disk.min_observations as usize - 1)
            .cloned()
            .collect::<Vec<TraceEntry>>(),
    };
    let b = replay(&short, Mode::Baseline, &setup, 0).map_err(|e| e.to_string())?;
    let a = replay(&short, Mode::Acm, &setup, 0).map_err(|e| e.to_string())?;
    if a.queries != b.queries || a.trajectory != b.trajectory {
        return Err("acm diverged from baseline before min_observations".into());
    }
    Ok(format!("{} queries identical", a.queries.len()))
}

fn invariants() -> Outcome {
    let parts: Vec<(&str, Result<String, String>)> = vec![
        ("lru", lru_equivalence()),
        ("conservation", conservation()),
        ("determinism", determinism()),
        ("scale", scale_invariance()),
        ("warmup", warmup_identity()),
    ];
    let ok = parts.iter().all(|(_, r)| r.is_ok());
    let detail = parts
        .into_iter()
        .map(|(n, r)| match r {
            Ok(m) => format!("{n}: {m}"),
            Err(m) => format!("{n}: FAILED {m}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    check(ok, detail)
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 formula conformance", formulas),
        ("2 least-squares oracle equivalence", lsq_oracle),
        ("3 parameter recovery", recovery),
        ("4 correlation improvement", correlation),
        ("5 plan improvement", plan_flips),
        ("6 report arithmetic (published table)", report_arithmetic),
        ("7 invariant suites", invariants),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
