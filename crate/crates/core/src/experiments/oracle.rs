//! Self-checks of the conductance machinery against independent evaluations.

use rand::Rng;
use serde::Serialize;

use crate::conductance::{
    bisection_cut, brute_force_conductance, cut_flow, estimate_conductance, fr_closed_form, fr_cross_pmf,
    fr_degree_pmf, fr_expected_cut_flow, Cut, CutRule,
};
use crate::error::Result;
use crate::geometry::build_snapshot;
use crate::mobility::{init_states, move_states, positions_of, MobilitySpec};
use crate::rng::stream;
use crate::stats::log_log_slope;

/// Names of every invariant the report covers, in report order.
pub const INVARIANTS: [&str; 8] = [
    "flow-bound",
    "closed-form-monotonicity",
    "simplification-identity",
    "closed-form-agreement",
    "oracle-dominance",
    "penalty-factor",
    "vc-scaling",
    "cut-size-argmin",
];

const BRUTE_FORCE_MOVES: usize = 200;
const ORACLE_STREAM: u64 = 0x5eed_0c1e;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Expected un-normalized cut flow `(n, r, s) -> value` under test.
pub type CutFlowFormula = fn(usize, f64, usize) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub cut_flow_formula: CutFlowFormula,
    pub samples: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cut_flow_formula: fr_expected_cut_flow,
            samples: 4000,
        }
    }
}

/// The expected cut flow summed term by term: degree distribution, then
/// the number of cross neighbors, each contributing `b/m`.
pub fn triple_sum_cut_flow(n: usize, r: f64, s: usize) -> f64 {
    let frac = (n - s) as f64 / (n - 1) as f64;
    let mut total = 0.0;
    for m in 1..n {
        let pm = fr_degree_pmf(n, r, m);
        if pm == 0.0 {
            continue;
        }
        let inner: f64 = (0..=m).map(|b| b as f64 / m as f64 * fr_cross_pmf(m, b, frac)).sum();
        total += pm * inner;
    }
    total * s as f64
}

fn r_for_contact(p: f64) -> f64 {
    (p / std::f64::consts::PI).sqrt()
}

fn check(name: &'static str, passed: bool, detail: String) -> OracleCheck {
    OracleCheck { name, passed, detail }
}

fn flow_bound(seed: u64) -> Result<OracleCheck> {
    let specs = [
        MobilitySpec::FullyRandom,
        MobilitySpec::velocity(0.1),
        MobilitySpec::PartiallyRandom { mobile: 10 },
        MobilitySpec::OneDimensional {
            vertical: 12,
            horizontal: 18,
        },
        MobilitySpec::Static,
    ];
    let n = 30;
    let mut worst = (f64::INFINITY, f64::NEG_INFINITY);
    let mut count = 0;
    for (si, spec) in specs.iter().enumerate() {
        for k in 0..40u64 {
            let mut rng = stream(seed, &[ORACLE_STREAM, 1, si as u64, k]);
            let r = rng.gen_range(0.02..0.6);
            let states = init_states(n, spec, &mut rng)?;
            let moved = move_states(&states, spec, &mut rng)?;
            let snap = build_snapshot(positions_of(&moved), r)?;
            let size = rng.gen_range(1..=n / 2);
            let ids = rand::seq::index::sample(&mut rng, n, size).into_vec();
            for cut in [bisection_cut(&states)?, Cut::new(n, ids)?] {
                let f = cut_flow(&snap, &cut)?;
                worst = (worst.0.min(f), worst.1.max(f));
                count += 1;
            }
        }
        let est = estimate_conductance(n, 0.2, spec, &CutRule::Bisection, 200, seed)?;
        worst = (worst.0.min(est.mean), worst.1.max(est.mean));
        count += 1;
    }
    Ok(check(
        "flow-bound",
        worst.0 >= 0.0 && worst.1 <= 1.0,
        format!("{count} values in [{:.6}, {:.6}]", worst.0, worst.1),
    ))
}

fn monotonicity(opts: &OracleOptions) -> Result<OracleCheck> {
    let f = opts.cut_flow_formula;
    let min_form = |n: usize, r: f64| f(n, r, n / 2) / (n / 2) as f64;
    let mut failures = Vec::new();
    let contacts: Vec<f64> = (0..40).map(|i| 1e-4 * 1.25f64.powi(i)).filter(|&p| p < 1.0).collect();
    for &n in &[2usize, 3, 10, 51, 200, 1000] {
        let mut prev = 0.0;
        for &p in &contacts {
            let v = min_form(n, r_for_contact(p));
            if v < prev || v > 1.0 {
                failures.push(format!("n={n} p={p:.3e}"));
            }
            prev = v;
        }
    }
    // The half-normalized form is monotone in n as well; the exact one
    // carries a ceil(n/2)/(n-1) factor that is not.
    for &p in &[1e-4, 1e-3, 0.01, 0.1, 0.5] {
        let r = r_for_contact(p);
        let mut prev = 0.0;
        for n in 2..400 {
            let half = fr_closed_form(n, r)?.half;
            if half < prev {
                failures.push(format!("half form n={n} p={p}"));
            }
            prev = half;
        }
    }
    Ok(check(
        "closed-form-monotonicity",
        failures.is_empty(),
        if failures.is_empty() {
            "nondecreasing in r (exact) and in n and r (half form)".to_string()
        } else {
            format!("violations at {}", failures.join("; "))
        },
    ))
}

fn identity(seed: u64, opts: &OracleOptions) -> OracleCheck {
    let mut rng = stream(seed, &[ORACLE_STREAM, 3]);
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for _ in 0..100 {
        let n = rng.gen_range(2..=300usize);
        let s = rng.gen_range(1..=(n / 2).max(1));
        let p = 10f64.powf(rng.gen_range(-4.0..-0.3));
        let r = r_for_contact(p);
        let direct = (opts.cut_flow_formula)(n, r, s);
        let summed = triple_sum_cut_flow(n, r, s);
        let rel = (direct - summed).abs() / summed.abs().max(f64::MIN_POSITIVE);
        if rel > worst {
            worst = rel;
            at = format!("n={n} s={s} p={p:.3e}");
        }
    }
    check(
        "simplification-identity",
        worst <= 1e-9,
        format!("max relative error {worst:.3e} over 100 points ({at})"),
    )
}

fn agreement(seed: u64, opts: &OracleOptions) -> Result<OracleCheck> {
    let n = 200;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for &p in &[0.005, 0.02] {
        let r = r_for_contact(p);
        let est = estimate_conductance(n, r, &MobilitySpec::FullyRandom, &CutRule::Bisection, opts.samples, seed)?;
        let z = (est.mean - fr_closed_form(n, r)?.square) / est.stderr;
        worst = worst.max(z.abs());
        parts.push(format!("p={p}: z={z:.2}"));
    }
    Ok(check("closed-form-agreement", worst <= 3.0, parts.join(", ")))
}

fn dominance(seed: u64, opts: &OracleOptions) -> Result<OracleCheck> {
    let states = (opts.samples / 4).max(100);
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, n, spec) in [
        ("fr", 8usize, MobilitySpec::FullyRandom),
        ("vc", 8, MobilitySpec::velocity(0.2)),
    ] {
        let r = r_for_contact(0.05);
        let bf = brute_force_conductance(n, r, &spec, states, BRUTE_FORCE_MOVES, seed)?;
        let bis = estimate_conductance(n, r, &spec, &CutRule::Bisection, opts.samples, seed)?;
        let slack = 3.0 * (bf.minimum.stderr.powi(2) + bis.stderr.powi(2)).sqrt();
        ok &= bf.minimum.mean <= bis.mean + slack;
        parts.push(format!(
            "{label}: min {:.5} vs bisection {:.5} (+{:.5})",
            bf.minimum.mean, bis.mean, slack
        ));
    }
    Ok(check("oracle-dominance", ok, parts.join(", ")))
}

fn penalty_factor(seed: u64, opts: &OracleOptions) -> Result<OracleCheck> {
    let n = 200;
    let nf = n as f64;
    let r_ref = (2.0 * nf.ln() / (nf * std::f64::consts::PI)).sqrt();
    let spec = MobilitySpec::FullyRandom;
    let reference = estimate_conductance(n, r_ref, &spec, &CutRule::Bisection, opts.samples, seed)?;
    let ref_closed = fr_closed_form(n, r_ref)?.square;
    let grid = [0.005, 0.01, 0.02, 0.04];
    let mut ratios = Vec::new();
    let mut tracking = true;
    let mut worst_z: f64 = 0.0;
    for &nr2 in &grid {
        let r = (nr2 / nf).sqrt();
        let est = estimate_conductance(n, r, &spec, &CutRule::Bisection, opts.samples, seed)?;
        let ratio = est.mean / reference.mean;
        let se = ratio * ((est.stderr / est.mean).powi(2) + (reference.stderr / reference.mean).powi(2)).sqrt();
        let predicted = fr_closed_form(n, r)?.square / ref_closed;
        let z = (ratio - predicted) / se;
        worst_z = worst_z.max(z.abs());
        tracking &= z.abs() <= 3.0;
        ratios.push(ratio);
    }
    let slope = log_log_slope(&grid, &ratios).unwrap_or(f64::NAN);
    Ok(check(
        "penalty-factor",
        tracking && (0.8..=1.2).contains(&slope),
        format!("sparse log-log slope {slope:.3}, worst tracking z {worst_z:.2}"),
    ))
}

fn vc_scaling(seed: u64, opts: &OracleOptions) -> Result<OracleCheck> {
    let n = 400;
    let r = (0.1 / n as f64).sqrt();
    let samples = opts.samples * 2;
    let lo = estimate_conductance(n, r, &MobilitySpec::velocity(0.1), &CutRule::Bisection, samples, seed)?;
    let hi = estimate_conductance(n, r, &MobilitySpec::velocity(0.2), &CutRule::Bisection, samples, seed)?;
    let ratio = hi.mean / lo.mean;
    Ok(check(
        "vc-scaling",
        (1.6..=2.4).contains(&ratio),
        format!("v_max 0.1 -> 0.2 multiplies the estimate by {ratio:.3}"),
    ))
}

fn argmin_size(seed: u64, opts: &OracleOptions) -> Result<OracleCheck> {
    // per-state selection needs enough moves to separate sizes reliably
    let states = (opts.samples / 20).max(100);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [6usize, 8] {
        let bf = brute_force_conductance(n, r_for_contact(0.05), &MobilitySpec::FullyRandom, states, 10 * BRUTE_FORCE_MOVES, seed)?;
        let sizes = bf.argmin_sizes();
        ok &= sizes == [n / 2];
        parts.push(format!("n={n}: minimizing sizes {sizes:?}"));
    }
    Ok(check("cut-size-argmin", ok, parts.join(", ")))
}

/// Run every check; the result lists [`INVARIANTS`] in order.
pub fn run_oracle_checks(seed: u64, opts: &OracleOptions) -> Result<Vec<OracleCheck>> {
    Ok(vec![
        flow_bound(seed)?,
        monotonicity(opts)?,
        identity(seed, opts),
        agreement(seed, opts)?,
        dominance(seed, opts)?,
        penalty_factor(seed, opts)?,
        vc_scaling(seed, opts)?,
        argmin_size(seed, opts)?,
    ])
}
