//! The six experiment commands. Each validates its configuration, opens a
//! run directory, writes its tables and returns the typed results.

use std::path::PathBuf;

use serde::Serialize;

use super::config::{Command, CutChoice, ExperimentConfig};
use super::oracle::{run_oracle_checks, OracleCheck, OracleOptions};
use super::output::{fmt_float, fmt_opt_f64, fmt_opt_u64, loglog_svg, CsvTable, RunDir};
use crate::conductance::{
    brute_force_conductance, estimate_conductance, fr_closed_form, BruteForceResult, ConductanceEstimate, CutRule,
};
use crate::error::{Error, Result};
use crate::gossip::{ring_spreading_time, spreading_time, SpreadConfig, SpreadingParams, SpreadingResult};
use crate::mobility::{MobilityKind, MobilitySpec};
use crate::stats::linear_fit;
use crate::tradeoff::{analytic_threshold, empirical_threshold_search, AnalyticThreshold, EmpiricalThreshold, SearchParams};

pub const SPREAD_COLUMNS: [&str; 5] = ["source", "trial", "completion", "source_t_spr", "t_spr"];
pub const CONDUCTANCE_COLUMNS: [&str; 13] = [
    "model",
    "n",
    "r",
    "cut",
    "cut_size",
    "mean",
    "stderr",
    "samples",
    "closed_form",
    "closed_form_square",
    "z",
    "check",
    "flag",
];
pub const GAP_COLUMNS: [&str; 6] = ["n", "r", "nr2", "t_spr", "t_ref", "gap"];
pub const TRADEOFF_COLUMNS: [&str; 10] = [
    "model",
    "n",
    "r",
    "c",
    "nr2",
    "analytic",
    "feasible",
    "sparse_warning",
    "root",
    "minimal_count",
];
pub const SEARCH_COLUMNS: [&str; 4] = ["intensity", "t_spr", "target", "meets_target"];
pub const RING_COLUMNS: [&str; 6] = ["n", "epsilon", "trials", "t_spr", "n_ln_n", "normalized"];
pub const ORACLE_COLUMNS: [&str; 3] = ["invariant", "status", "detail"];

pub const STATIC_FLAG: &str = "expected-meeting-time may be infinite";

/// Radius of the connected reference: `n π r² = 2 ln n`.
pub fn reference_radius(n: usize) -> f64 {
    (2.0 * (n as f64).ln() / (n as f64 * std::f64::consts::PI)).sqrt()
}

fn spread_config(cfg: &ExperimentConfig) -> SpreadConfig {
    SpreadConfig {
        exchange: cfg.exchange,
        max_slots: cfg.max_slots,
        record_trace: false,
    }
}

fn spreading_params(cfg: &ExperimentConfig, n: usize, r: f64, spec: MobilitySpec) -> SpreadingParams {
    SpreadingParams {
        n,
        r,
        spec,
        epsilon: cfg.epsilon,
        trials: cfg.trials,
        sources_sampled: cfg.sources,
        config: spread_config(cfg),
    }
}

#[derive(Debug)]
pub struct SpreadOutput {
    pub dir: PathBuf,
    pub result: SpreadingResult,
}

pub fn cmd_spread(cfg: &ExperimentConfig) -> Result<SpreadOutput> {
    cfg.validate(Command::Spread)?;
    let seed = cfg.seed()?;
    let (n, r) = (cfg.require_n()?, cfg.require_r()?);
    let spec = cfg.mobility_spec(n)?;
    let mut run = RunDir::create(&cfg.out, Command::Spread.name(), seed, cfg)?;
    let result = spreading_time(&spreading_params(cfg, n, r, spec), seed)?;

    let mut table = CsvTable::new(&SPREAD_COLUMNS);
    for (si, times) in result.completion_times.iter().enumerate() {
        for (k, t) in times.iter().enumerate() {
            table.push(vec![
                result.sources[si].to_string(),
                k.to_string(),
                fmt_opt_u64(*t),
                fmt_opt_u64(result.per_source_t_spr[si]),
                fmt_opt_u64(result.t_spr),
            ]);
        }
    }
    run.write_csv("spread.csv", &table)?;
    let dir = run.finish("ok")?;
    Ok(SpreadOutput { dir, result })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConductanceRow {
    pub estimate: ConductanceEstimate,
    /// Wall-free closed form and its boundary-exact counterpart, FR only.
    pub closed_form: Option<f64>,
    pub closed_form_square: Option<f64>,
    pub pass: Option<bool>,
    pub flag: Option<&'static str>,
}

#[derive(Debug)]
pub struct ConductanceOutput {
    pub dir: PathBuf,
    pub rows: Vec<ConductanceRow>,
    pub brute_force: Option<BruteForceResult>,
}

pub fn cmd_conductance(cfg: &ExperimentConfig) -> Result<ConductanceOutput> {
    cfg.validate(Command::Conductance)?;
    let seed = cfg.seed()?;
    let (n, r) = (cfg.require_n()?, cfg.require_r()?);
    let spec = cfg.mobility_spec(n)?;
    let mut run = RunDir::create(&cfg.out, Command::Conductance.name(), seed, cfg)?;

    let mut estimates = vec![estimate_conductance(n, r, &spec, &CutRule::Bisection, cfg.samples, seed)?];
    let brute_force = if cfg.cut == CutChoice::BruteForce {
        let bf = brute_force_conductance(n, r, &spec, cfg.samples, cfg.moves, seed)?;
        estimates.push(bf.minimum);
        Some(bf)
    } else {
        None
    };
    let closed = if spec.kind() == MobilityKind::FullyRandom {
        Some(fr_closed_form(n, r)?)
    } else {
        None
    };
    let rows: Vec<ConductanceRow> = estimates
        .into_iter()
        .map(|e| ConductanceRow {
            estimate: e,
            closed_form: closed.map(|c| c.exact),
            closed_form_square: closed.map(|c| c.square),
            pass: closed.map(|c| (e.mean - c.square).abs() <= 3.0 * e.stderr),
            flag: (spec.kind() == MobilityKind::Static && e.zero_flow_samples > 0).then_some(STATIC_FLAG),
        })
        .collect();

    let mut table = CsvTable::new(&CONDUCTANCE_COLUMNS);
    for row in &rows {
        let e = &row.estimate;
        let z = row
            .closed_form_square
            .filter(|_| e.stderr > 0.0)
            .map(|c| (e.mean - c) / e.stderr);
        table.push(vec![
            spec.kind().short_name().to_string(),
            n.to_string(),
            fmt_float(r),
            e.cut_kind.label().to_string(),
            e.cut_size.to_string(),
            fmt_float(e.mean),
            fmt_float(e.stderr),
            e.samples.to_string(),
            fmt_opt_f64(row.closed_form),
            fmt_opt_f64(row.closed_form_square),
            fmt_opt_f64(z),
            match row.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "NA",
            }
            .to_string(),
            row.flag.unwrap_or("").to_string(),
        ]);
    }
    run.write_csv("conductance.csv", &table)?;
    let dir = run.finish("ok")?;
    Ok(ConductanceOutput { dir, rows, brute_force })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub r: f64,
    pub nr2: f64,
    pub t_spr: Option<u64>,
    pub t_ref: Option<u64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Points with `nr² <` this enter the sparse-zone fit.
pub const GAP_FIT_LIMIT: f64 = 0.5;

#[derive(Debug)]
pub struct GapSweepOutput {
    pub dir: PathBuf,
    pub r_ref: f64,
    pub rows: Vec<GapRow>,
    pub fit: Option<GapFit>,
}

pub fn fit_gap(rows: &[GapRow]) -> Option<GapFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|row| row.nr2 < GAP_FIT_LIMIT)
        .filter_map(|row| row.gap.filter(|g| *g > 0.0).map(|g| (row.nr2.ln(), g.ln())))
        .unzip();
    let (slope, intercept) = linear_fit(&x, &y)?;
    Some(GapFit {
        slope,
        intercept,
        points: x.len(),
    })
}

pub fn cmd_gap_sweep(cfg: &ExperimentConfig) -> Result<GapSweepOutput> {
    cfg.validate(Command::GapSweep)?;
    let seed = cfg.seed()?;
    let n = cfg.n.unwrap_or(500);
    let spec = if cfg.model.is_some() {
        cfg.mobility_spec(n)?
    } else {
        MobilitySpec::FullyRandom
    };
    let mut run = RunDir::create(&cfg.out, Command::GapSweep.name(), seed, cfg)?;

    let r_ref = reference_radius(n);
    let t_ref = spreading_time(&spreading_params(cfg, n, r_ref, spec), seed)?.t_spr;
    let mut rows = Vec::with_capacity(cfg.nr2_grid.len());
    for &target in &cfg.nr2_grid {
        let r = (target / n as f64).sqrt();
        let t_spr = spreading_time(&spreading_params(cfg, n, r, spec), seed)?.t_spr;
        let gap = match (t_ref, t_spr) {
            (Some(a), Some(b)) if a > 0 && b > 0 => Some(if cfg.reciprocal_gap {
                b as f64 / a as f64
            } else {
                a as f64 / b as f64
            }),
            _ => None,
        };
        rows.push(GapRow {
            n,
            r,
            nr2: n as f64 * r * r,
            t_spr,
            t_ref,
            gap,
        });
    }
    let fit = fit_gap(&rows);

    let mut table = CsvTable::new(&GAP_COLUMNS);
    for row in &rows {
        table.push(vec![
            row.n.to_string(),
            fmt_float(row.r),
            fmt_float(row.nr2),
            fmt_opt_u64(row.t_spr),
            fmt_opt_u64(row.t_ref),
            fmt_opt_f64(row.gap),
        ]);
    }
    run.write_csv("gap.csv", &table)?;
    let points: Vec<(f64, f64)> = rows.iter().filter_map(|row| row.gap.map(|g| (row.nr2, g))).collect();
    let span = {
        let sparse: Vec<f64> = points.iter().map(|p| p.0).filter(|&x| x < GAP_FIT_LIMIT).collect();
        let lo = sparse.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sparse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo < hi).then_some((lo, hi))
    };
    let svg = loglog_svg(&points, fit.map(|f| (f.slope, f.intercept)), span, "n r^2", "gap");
    run.write_bytes("gap.svg", svg.as_bytes())?;
    let dir = run.finish("ok")?;
    Ok(GapSweepOutput { dir, r_ref, rows, fit })
}

#[derive(Debug)]
pub struct TradeoffOutput {
    pub dir: PathBuf,
    pub analytic: AnalyticThreshold,
    /// Ring benchmark target and search outcome, when a search was requested.
    pub target: Option<u64>,
    pub search: Option<std::result::Result<EmpiricalThreshold, Error>>,
}

/// Default search bracket per model, in intensity units.
pub fn default_search_bounds(kind: MobilityKind) -> (f64, f64) {
    match kind {
        MobilityKind::VelocityConstrained => (1e-3, 1.0),
        MobilityKind::OneDimensional => (0.0, 0.25),
        _ => (0.0, 1.0),
    }
}

pub fn cmd_tradeoff(cfg: &ExperimentConfig) -> Result<TradeoffOutput> {
    cfg.validate(Command::Tradeoff)?;
    let seed = cfg.seed()?;
    let (n, r) = (cfg.require_n()?, cfg.require_r()?);
    let kind = cfg.require_model()?;
    let mut run = RunDir::create(&cfg.out, Command::Tradeoff.name(), seed, cfg)?;

    let analytic = analytic_threshold(kind, n, r, cfg.c)?;
    let mut table = CsvTable::new(&TRADEOFF_COLUMNS);
    table.push(vec![
        kind.short_name().to_string(),
        n.to_string(),
        fmt_float(r),
        fmt_float(cfg.c),
        fmt_float(analytic.query.nr2()),
        fmt_float(analytic.value),
        analytic.feasible.to_string(),
        analytic.sparse_warning.to_string(),
        fmt_opt_f64(analytic.root),
        analytic.minimal_count.map_or_else(|| "NA".to_string(), |k| k.to_string()),
    ]);
    run.write_csv("tradeoff.csv", &table)?;

    let (target, search) = if cfg.search {
        let ring = ring_spreading_time(n, cfg.epsilon, cfg.trials, &spread_config(cfg), seed)?;
        let target = ring
            .t_spr
            .ok_or_else(|| Error::InvalidConfig("ring benchmark did not terminate; raise --max-slots".into()))?;
        let (lo, hi) = default_search_bounds(kind);
        let mut params = SearchParams::new(
            kind,
            n,
            r,
            target,
            cfg.search_lower.unwrap_or(lo),
            cfg.search_upper.unwrap_or(hi),
        );
        params.tolerance = cfg.tolerance;
        params.budget = cfg.budget;
        params.epsilon = cfg.epsilon;
        params.trials = cfg.trials;
        params.sources_sampled = cfg.sources;
        params.exchange = cfg.exchange;
        let outcome = empirical_threshold_search(&params, seed);
        let mut trace = CsvTable::new(&SEARCH_COLUMNS);
        let probes: Vec<(f64, Option<u64>)> = match &outcome {
            Ok(found) => found.trace.iter().map(|p| (p.intensity, p.t_spr)).collect(),
            Err(Error::NoCrossing { lo, hi, lo_time, hi_time, .. }) => vec![(*lo, *lo_time), (*hi, *hi_time)],
            Err(_) => Vec::new(),
        };
        for (intensity, t) in probes {
            trace.push(vec![
                fmt_float(intensity),
                fmt_opt_u64(t),
                target.to_string(),
                matches!(t, Some(t) if t <= target).to_string(),
            ]);
        }
        run.write_csv("tradeoff_search.csv", &trace)?;
        (Some(target), Some(outcome))
    } else {
        (None, None)
    };
    let status = match &search {
        Some(Err(_)) => "search-failed",
        _ => "ok",
    };
    let dir = run.finish(status)?;
    Ok(TradeoffOutput {
        dir,
        analytic,
        target,
        search,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingRow {
    pub n: usize,
    pub t_spr: Option<u64>,
    pub normalized: Option<f64>,
}

#[derive(Debug)]
pub struct RingOutput {
    pub dir: PathBuf,
    pub rows: Vec<RingRow>,
}

pub fn cmd_ring(cfg: &ExperimentConfig) -> Result<RingOutput> {
    cfg.validate(Command::Ring)?;
    let seed = cfg.seed()?;
    let mut run = RunDir::create(&cfg.out, Command::Ring.name(), seed, cfg)?;
    let mut rows = Vec::new();
    let mut table = CsvTable::new(&RING_COLUMNS);
    for &n in &cfg.n_grid {
        let res = ring_spreading_time(n, cfg.epsilon, cfg.trials, &spread_config(cfg), seed)?;
        let n_ln_n = n as f64 * (n as f64).ln();
        let normalized = res.t_spr.map(|t| t as f64 / n_ln_n);
        rows.push(RingRow {
            n,
            t_spr: res.t_spr,
            normalized,
        });
        table.push(vec![
            n.to_string(),
            fmt_float(cfg.epsilon),
            cfg.trials.to_string(),
            fmt_opt_u64(res.t_spr),
            fmt_float(n_ln_n),
            fmt_opt_f64(normalized),
        ]);
    }
    run.write_csv("ring.csv", &table)?;
    let dir = run.finish("ok")?;
    Ok(RingOutput { dir, rows })
}

#[derive(Debug)]
pub struct OracleOutput {
    pub dir: PathBuf,
    pub checks: Vec<OracleCheck>,
}

impl OracleOutput {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn cmd_oracle_check(cfg: &ExperimentConfig) -> Result<OracleOutput> {
    cmd_oracle_check_with(cfg, &OracleOptions::default())
}

/// Oracle check with a substitutable closed form, used to confirm that a
/// wrong formula is caught.
pub fn cmd_oracle_check_with(cfg: &ExperimentConfig, options: &OracleOptions) -> Result<OracleOutput> {
    cfg.validate(Command::OracleCheck)?;
    let seed = cfg.seed()?;
    let mut run = RunDir::create(&cfg.out, Command::OracleCheck.name(), seed, cfg)?;
    let checks = run_oracle_checks(seed, options)?;
    let mut table = CsvTable::new(&ORACLE_COLUMNS);
    for c in &checks {
        table.push(vec![
            c.name.to_string(),
            if c.passed { "PASS" } else { "FAIL" }.to_string(),
            c.detail.clone(),
        ]);
    }
    run.write_csv("oracle.csv", &table)?;
    let report = serde_json::to_string_pretty(&checks)? + "\n";
    run.write_bytes("oracle.json", report.as_bytes())?;
    let all = checks.iter().all(|c| c.passed);
    let dir = run.finish(if all { "ok" } else { "fail" })?;
    Ok(OracleOutput { dir, checks })
}

/// Human-readable outcome of any command, for the command-line front end.
#[derive(Debug)]
pub struct Summary {
    pub dir: PathBuf,
    pub lines: Vec<String>,
    pub success: bool,
}

pub fn run_command(command: Command, cfg: &ExperimentConfig) -> Result<Summary> {
    let mut lines = Vec::new();
    let mut success = true;
    let dir = match command {
        Command::Spread => {
            let out = cmd_spread(cfg)?;
            let res = &out.result;
            lines.push(format!(
                "t_spr = {} over {} runs ({} did not finish)",
                fmt_opt_u64(res.t_spr),
                res.total_runs(),
                res.failed_runs
            ));
            out.dir
        }
        Command::Conductance => {
            let out = cmd_conductance(cfg)?;
            for row in &out.rows {
                let e = &row.estimate;
                let mut line = format!(
                    "{} |S'|={}: {} ± {}",
                    e.cut_kind.label(),
                    e.cut_size,
                    fmt_float(e.mean),
                    fmt_float(e.stderr)
                );
                if let (Some(c), Some(p)) = (row.closed_form_square, row.pass) {
                    line += &format!(" closed form {} {}", fmt_float(c), if p { "PASS" } else { "FAIL" });
                }
                if let Some(f) = row.flag {
                    line += &format!(" [{f}]");
                }
                lines.push(line);
            }
            out.dir
        }
        Command::GapSweep => {
            let out = cmd_gap_sweep(cfg)?;
            for row in &out.rows {
                lines.push(format!("nr2={} gap={}", fmt_float(row.nr2), fmt_opt_f64(row.gap)));
            }
            match out.fit {
                Some(f) => lines.push(format!("sparse-zone slope {} over {} points", fmt_float(f.slope), f.points)),
                None => lines.push("sparse-zone fit unavailable".to_string()),
            }
            out.dir
        }
        Command::Tradeoff => {
            let out = cmd_tradeoff(cfg)?;
            let a = &out.analytic;
            lines.push(format!(
                "analytic threshold {} ({}){}",
                fmt_float(a.value),
                if a.feasible { "feasible" } else { "infeasible" },
                if a.sparse_warning { ", outside the sparse regime" } else { "" }
            ));
            for note in &a.notes {
                lines.push(format!("note: {note}"));
            }
            match &out.search {
                Some(Ok(found)) => lines.push(format!(
                    "empirical threshold in ({}, {}] for target {}",
                    fmt_float(found.below),
                    fmt_float(found.intensity),
                    found.target
                )),
                Some(Err(e)) => {
                    success = false;
                    lines.push(format!("search failed: {e}"));
                }
                None => {}
            }
            out.dir
        }
        Command::Ring => {
            let out = cmd_ring(cfg)?;
            for row in &out.rows {
                lines.push(format!(
                    "n={} t_spr={} t/(n ln n)={}",
                    row.n,
                    fmt_opt_u64(row.t_spr),
                    fmt_opt_f64(row.normalized)
                ));
            }
            out.dir
        }
        Command::OracleCheck => {
            let out = cmd_oracle_check(cfg)?;
            for c in &out.checks {
                lines.push(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            success = out.all_passed();
            out.dir
        }
    };
    Ok(Summary { dir, lines, success })
}
