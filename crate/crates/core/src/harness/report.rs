//! Report files. Output is a pure function of the report, so identical runs
//! give byte-identical directories.

use std::fmt::Write as _;
use std::path::Path;

use super::metrics::latency_improvement;
use super::replay::{CompareReport, RunReport};
use super::HarnessError;

pub const LATENCY_CSV: &str = "latency.csv";
pub const CORRELATION_CSV: &str = "correlation.csv";
pub const TRAJECTORY_CSV: &str = "params_trajectory.csv";
pub const FITS_CSV: &str = "fits.csv";
pub const PLANS_CSV: &str = "plans.csv";
pub const NODES_CSV: &str = "nodes.csv";
pub const FLIPS_CSV: &str = "flips.csv";
pub const SCATTER_SVG: &str = "scatter_cost_time.svg";
pub const SUMMARY_TXT: &str = "summary.txt";

fn write(dir: &Path, name: &str, body: String) -> Result<(), HarnessError> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| HarnessError::io(path, e))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn correlation_rows(out: &mut String, run: &RunReport) {
    let pairs = run.pairs();
    let r = run.correlation().map(|r| r.to_string()).unwrap_or_default();
    let _ = writeln!(out, "{},{},{}", run.mode, pairs.len(), r);
}

fn trajectory_rows(out: &mut String, run: &RunReport) {
    for p in &run.trajectory {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            run.mode,
            p.step,
            csv_field(&p.scope),
            p.param,
            p.value
        );
    }
}

fn fit_rows(out: &mut String, run: &RunReport) {
    for r in &run.fit_history {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            run.mode,
            r.op_type,
            r.step,
            r.fitted.cpu_tuple_cost,
            r.fitted.cpu_operator_cost,
            r.fitted.cpu_index_tuple_cost,
            r.smoothed.cpu_tuple_cost,
            r.smoothed.cpu_operator_cost,
            r.smoothed.cpu_index_tuple_cost,
            r.n_samples
        );
    }
}

fn plan_rows(out: &mut String, run: &RunReport) {
    for q in &run.queries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            run.mode,
            q.index,
            csv_field(&q.label),
            csv_field(&q.table.0),
            q.selectivity,
            q.aggregate,
            q.access_path,
            q.estimated_cost,
            q.latency_ms,
            q.page_hits,
            q.page_reads
        );
    }
}

fn node_rows(out: &mut String, run: &RunReport) {
    for q in &run.queries {
        for (i, n) in q.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                run.mode, q.index, i, n.op_type, n.estimated_cost, n.actual_ms
            );
        }
    }
}

fn write_common(dir: &Path, runs: &[&RunReport]) -> Result<(), HarnessError> {
    let mut corr = String::from("mode,n_pairs,pearson\n");
    let mut traj = String::from("mode,step,scope,param,value\n");
    let mut fits = String::from(
        "mode,op_type,step,c_t,c_o,c_i,smoothed_c_t,smoothed_c_o,smoothed_c_i,n_samples\n",
    );
    let mut plans = String::from(
        "mode,query,label,table,selectivity,aggregate,access_path,estimated_cost,latency_ms,page_hits,page_reads\n",
    );
    let mut nodes = String::from("mode,query,node,op_type,estimated_cost,actual_ms\n");
    for run in runs {
        correlation_rows(&mut corr, run);
        trajectory_rows(&mut traj, run);
        fit_rows(&mut fits, run);
        plan_rows(&mut plans, run);
        node_rows(&mut nodes, run);
    }
    write(dir, CORRELATION_CSV, corr)?;
    write(dir, TRAJECTORY_CSV, traj)?;
    write(dir, FITS_CSV, fits)?;
    write(dir, PLANS_CSV, plans)?;
    write(dir, NODES_CSV, nodes)?;
    write(dir, SCATTER_SVG, scatter_svg(runs))
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Writes the files for a single-mode run into `dir`.
pub fn write_run_report(run: &RunReport, dir: &Path) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    let mut latency = format!("query,{}_ms\n", run.mode);
    for q in &run.queries {
        let _ = writeln!(latency, "{},{}", csv_field(&q.label), q.latency_ms);
    }
    write(dir, LATENCY_CSV, latency)?;
    write_common(dir, &[run])?;

    let mut summary = String::new();
    let _ = writeln!(summary, "mode: {}", run.mode);
    let _ = writeln!(summary, "warmup_passes: {}", run.warmup);
    let _ = writeln!(summary, "queries: {}", run.queries.len());
    let _ = writeln!(summary, "total_ms: {}", run.total_latency_ms());
    let _ = writeln!(summary, "pearson: {}", fmt_corr(run));
    write(dir, SUMMARY_TXT, summary)
}

fn fmt_corr(run: &RunReport) -> String {
    run.correlation()
        .map(|r| format!("{r:.4}"))
        .unwrap_or_else(|e| format!("undefined ({e})"))
}

/// Writes the combined baseline/acm files into `dir`.
pub fn write_compare_report(report: &CompareReport, dir: &Path) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    let (base, acm) = (&report.baseline, &report.acm);
    let mut latency = String::from("query,baseline_ms,acm_ms\n");
    for (b, a) in base.queries.iter().zip(&acm.queries) {
        let _ = writeln!(
            latency,
            "{},{},{}",
            csv_field(&b.label),
            b.latency_ms,
            a.latency_ms
        );
    }
    write(dir, LATENCY_CSV, latency)?;

    let mut flips = String::from("query,label,baseline_plan,acm_plan,baseline_ms,acm_ms\n");
    for f in &report.flips {
        let _ = writeln!(
            flips,
            "{},{},{},{},{},{}",
            f.index,
            csv_field(&f.label),
            f.baseline,
            f.acm,
            f.baseline_ms,
            f.acm_ms
        );
    }
    write(dir, FLIPS_CSV, flips)?;
    write_common(dir, &[base, acm])?;
    write(dir, SUMMARY_TXT, compare_summary(report))
}

/// Text of `summary.txt` for a comparison.
pub fn compare_summary(report: &CompareReport) -> String {
    let (base, acm) = (&report.baseline, &report.acm);
    let (tb, ta) = (base.total_latency_ms(), acm.total_latency_ms());
    let (fb, fa) = report.flipped_latency_ms();
    let mut s = String::new();
    let _ = writeln!(s, "warmup_passes: {}", base.warmup);
    let _ = writeln!(s, "queries: {}", base.queries.len());
    let _ = writeln!(s, "baseline_total_ms: {tb}");
    let _ = writeln!(s, "acm_total_ms: {ta}");
    let _ = writeln!(s, "improvement_pct: {:.4}", latency_improvement(tb, ta));
    let _ = writeln!(s, "flipped_queries: {}", report.flips.len());
    let _ = writeln!(s, "flipped_baseline_ms: {fb}");
    let _ = writeln!(s, "flipped_acm_ms: {fa}");
    let _ = writeln!(
        s,
        "flipped_improvement_pct: {:.4}",
        latency_improvement(fb, fa)
    );
    let _ = writeln!(s, "baseline_pearson: {}", fmt_corr(base));
    let _ = writeln!(s, "acm_pearson: {}", fmt_corr(acm));
    s
}

const PANEL_W: f64 = 400.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 50.0;

/// Cost against time, one panel per run, each axis scaled to its panel's
/// maximum.
fn scatter_svg(runs: &[&RunReport]) -> String {
    let width = PANEL_W * runs.len().max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" font-family="sans-serif" font-size="11">"#
    );
    for (i, run) in runs.iter().enumerate() {
        let x0 = PANEL_W * i as f64;
        let (pw, ph) = (PANEL_W - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
        let pairs = run.pairs();
        let max_c = pairs.iter().map(|p| p.0).fold(0.0f64, f64::max);
        let max_t = pairs.iter().map(|p| p.1).fold(0.0f64, f64::max);
        let _ = writeln!(svg, r#"<g transform="translate({x0},0)">"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" text-anchor="middle">{} (r = {})</text>"#,
            PANEL_W / 2.0,
            run.mode,
            fmt_corr(run)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">estimated cost (max {max_c:.3})</text>"#,
            PANEL_W / 2.0,
            PANEL_H - 15.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">time ms (max {max_t:.3})</text>"#,
            PANEL_H / 2.0,
            PANEL_H / 2.0
        );
        for (c, t) in &pairs {
            let fx = if max_c > 0.0 { c / max_c } else { 0.0 };
            let fy = if max_t > 0.0 { t / max_t } else { 0.0 };
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="steelblue" fill-opacity="0.6"/>"#,
                MARGIN + fx * pw,
                MARGIN + (1.0 - fy) * ph
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
