//! Acceptance criteria. Runs every criterion, prints one line each and exits
//! non-zero if any of them fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use mobicond::conductance::{brute_force_conductance, estimate_conductance, fr_closed_form, fr_expected_cut_flow, CutRule};
use mobicond::experiments::oracle::OracleOptions;
use mobicond::experiments::{
    cmd_conductance, cmd_gap_sweep, cmd_oracle_check_with, cmd_ring, cmd_spread, cmd_tradeoff, Command,
    ExperimentConfig,
};
use mobicond::mobility::MobilitySpec;
use mobicond::rng::stream;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> mobicond::Result<Outcome>;

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn r_for(p: f64) -> f64 {
    (p / PI).sqrt()
}

fn closed_form_agreement() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let n = 200;
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.002, 0.005, 0.01, 0.02] {
        let r = r_for(p);
        let est = estimate_conductance(n, r, &MobilitySpec::FullyRandom, &CutRule::Bisection, 10_000, 1)?;
        let cf = fr_closed_form(n, r)?;
        let z = (est.mean - cf.square) / est.stderr;
        let z_free = (est.mean - cf.exact) / est.stderr;
        pass &= z.abs() <= 3.0;
        parts.push(format!("πr²={p}: z={z:+.2} (wall-free z={z_free:+.1})"));
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: pass && within(elapsed, 60),
        detail: format!("{}; {:.1}s", parts.join(", "), elapsed.as_secs_f64()),
    })
}

fn brute_force_oracle() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let r = r_for(0.1);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [6usize, 8, 10] {
        let bf = brute_force_conductance(n, r, &MobilitySpec::FullyRandom, 200, 2000, 2)?;
        let cf = fr_closed_form(n, r)?.square;
        let z = (bf.minimum.mean - cf) / bf.minimum.stderr;
        let sizes = bf.argmin_sizes();
        pass &= z.abs() <= 3.0 && sizes == [n / 2];
        parts.push(format!("n={n}: z={z:+.2} sizes {sizes:?}"));
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: pass && within(elapsed, 120),
        detail: format!("{}; {:.1}s", parts.join(", "), elapsed.as_secs_f64()),
    })
}

fn binomial_row(trials: usize, p: f64) -> Vec<f64> {
    let mut row = vec![0.0; trials + 1];
    row[0] = (1.0 - p).powi(trials as i32);
    for k in 0..trials {
        row[k + 1] = row[k] * (trials - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
    }
    row
}

fn simplification_identity() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let mut rng = stream(3, &[0]);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=300usize);
        let s = rng.gen_range(1..=(n / 2).max(1));
        let p = 10f64.powf(rng.gen_range(-4.0..-0.3));
        let frac = (n - s) as f64 / (n - 1) as f64;
        let summed: f64 = binomial_row(n - 1, p)
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, pm)| {
                let inner: f64 = binomial_row(m, frac)
                    .iter()
                    .enumerate()
                    .map(|(b, pb)| b as f64 / m as f64 * pb)
                    .sum();
                pm * inner
            })
            .sum::<f64>()
            * s as f64;
        let direct = fr_expected_cut_flow(n, r_for(p), s);
        worst = worst.max((direct - summed).abs() / summed);
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: worst <= 1e-9 && within(elapsed, 5),
        detail: format!("max relative error {worst:.2e} over 100 points; {:.2}s", elapsed.as_secs_f64()),
    })
}

fn config(pairs: &[(&str, &str)], out: &Path) -> mobicond::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v)?;
    }
    cfg.out = out.to_path_buf();
    Ok(cfg)
}

fn gap_scaling() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let tmp = tempfile::tempdir()?;
    let cfg = config(&[("model", "fr"), ("n", "500"), ("trials", "200"), ("seed", "4")], tmp.path())?;
    let res = cmd_gap_sweep(&cfg)?;
    let slope = res.fit.map_or(f64::NAN, |f| f.slope);
    let saturated = res
        .rows
        .iter()
        .filter(|row| row.nr2 >= 4.0 - 1e-9)
        .all(|row| matches!(row.gap, Some(g) if (1.0 / 1.5..=1.5).contains(&g)));
    let elapsed = start.elapsed();
    let gaps: Vec<String> = res
        .rows
        .iter()
        .map(|row| format!("{:.3}", row.gap.unwrap_or(f64::NAN)))
        .collect();
    Ok(Outcome {
        pass: (0.8..=1.2).contains(&slope) && saturated && within(elapsed, 600),
        detail: format!(
            "sparse slope {slope:.3}, gaps [{}]; {:.1}s",
            gaps.join(", "),
            elapsed.as_secs_f64()
        ),
    })
}

fn velocity_scaling() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let n = 400;
    let r = (0.1 / n as f64).sqrt();
    let mut means = Vec::new();
    for v in [0.1, 0.2, 0.4] {
        means.push(estimate_conductance(n, r, &MobilitySpec::velocity(v), &CutRule::Bisection, 10_000, 5)?.mean);
    }
    let ratios = [means[1] / means[0], means[2] / means[1]];
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: ratios.iter().all(|q| (1.6..=2.4).contains(q)) && within(elapsed, 180),
        detail: format!(
            "ratios {:.3}, {:.3}; {:.1}s",
            ratios[0],
            ratios[1],
            elapsed.as_secs_f64()
        ),
    })
}

fn partial_reduction() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let n = 400;
    let r = (0.1 / n as f64).sqrt();
    let all = estimate_conductance(n, r, &MobilitySpec::PartiallyRandom { mobile: n }, &CutRule::Bisection, 20_000, 6)?;
    let fr = estimate_conductance(n, r, &MobilitySpec::FullyRandom, &CutRule::Bisection, 20_000, 7)?;
    let z = (all.mean - fr.mean) / (all.stderr.powi(2) + fr.stderr.powi(2)).sqrt();

    let r0 = (0.025 / n as f64).sqrt();
    let none = MobilitySpec::PartiallyRandom { mobile: 0 };
    let small = estimate_conductance(n, r0, &none, &CutRule::Bisection, 100_000, 8)?;
    let large = estimate_conductance(n, 2.0 * r0, &none, &CutRule::Bisection, 100_000, 8)?;
    let ratio = large.mean / small.mean;
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: z.abs() <= 3.0 && (5.5..=11.0).contains(&ratio) && within(elapsed, 240),
        detail: format!(
            "k=n vs fr z={z:+.2}; k=0 doubling r multiplies by {ratio:.2}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    })
}

fn line_balance() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let n = 400;
    let r = (0.1 / n as f64).sqrt();
    let balanced = MobilitySpec::OneDimensional {
        vertical: n / 2,
        horizontal: n / 2,
    };
    let vertical = MobilitySpec::OneDimensional {
        vertical: n,
        horizontal: 0,
    };
    let b = estimate_conductance(n, r, &balanced, &CutRule::Bisection, 20_000, 9)?;
    let v = estimate_conductance(n, r, &vertical, &CutRule::Bisection, 20_000, 9)?;
    let ratio = b.mean / v.mean;
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: ratio >= 2.0 && within(elapsed, 240),
        detail: format!(
            "balanced {:.5} vs all-vertical {:.5}, ratio {ratio:.2}; {:.1}s",
            b.mean,
            v.mean,
            elapsed.as_secs_f64()
        ),
    })
}

fn ring_benchmark() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let tmp = tempfile::tempdir()?;
    let cfg = config(&[("n-grid", "64,128,256,512"), ("eps", "0.01"), ("trials", "300"), ("seed", "3")], tmp.path())?;
    let res = cmd_ring(&cfg)?;
    let norm: Vec<f64> = res.rows.iter().map(|row| row.normalized.unwrap_or(f64::NAN)).collect();
    let max = norm.iter().copied().fold(f64::MIN, f64::max);
    let min = norm.iter().copied().fold(f64::MAX, f64::min);
    let elapsed = start.elapsed();
    let shown: Vec<String> = norm.iter().map(|v| format!("{v:.4}")).collect();
    Ok(Outcome {
        pass: max / min <= 1.5 && within(elapsed, 180),
        detail: format!(
            "t/(n ln n) = [{}], max/min {:.3}; {:.1}s",
            shown.join(", "),
            max / min,
            elapsed.as_secs_f64()
        ),
    })
}

fn tradeoff_consistency() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let tmp = tempfile::tempdir()?;
    let mut found = Vec::new();
    for n in ["300", "600"] {
        let cfg = config(
            &[
                ("model", "vc"),
                ("n", n),
                ("r", "0.01"),
                ("search", "true"),
                ("search-lower", "0.01"),
                ("search-upper", "0.3"),
                ("trials", "400"),
                ("sources", "1"),
                ("seed", "9"),
            ],
            &tmp.path().join(n),
        )?;
        let res = cmd_tradeoff(&cfg)?;
        match res.search {
            Some(Ok(t)) => found.push(t.intensity),
            Some(Err(e)) => {
                return Ok(Outcome {
                    pass: false,
                    detail: format!("n={n}: search failed: {e}"),
                })
            }
            None => unreachable!("search requested"),
        }
    }
    let ratio = found[0] / found[1];
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass: (2.5..=6.0).contains(&ratio) && within(elapsed, 600),
        detail: format!(
            "v* = {:.4} (n=300), {:.4} (n=600), ratio {ratio:.2}; {:.1}s",
            found[0],
            found[1],
            elapsed.as_secs_f64()
        ),
    })
}

fn data_files(dir: &Path) -> mobicond::Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name.ends_with(".csv") || name.ends_with(".svg") {
            files.push((name, fs::read(&path)?));
        }
    }
    files.sort();
    Ok(files)
}

fn determinism() -> mobicond::Result<Outcome> {
    let start = Instant::now();
    let runs: [(Command, &[(&str, &str)]); 6] = [
        (Command::Spread, &[("model", "vc"), ("vmax", "0.1"), ("n", "100"), ("r", "0.05"), ("trials", "50")]),
        (Command::Conductance, &[("model", "fr"), ("n", "8"), ("r", "0.2"), ("samples", "500"), ("cut", "brute-force")]),
        (Command::GapSweep, &[("n", "100"), ("nr2-grid", "0.1,0.4,2"), ("trials", "30"), ("sources", "2")]),
        (
            Command::Tradeoff,
            &[("model", "pr"), ("n", "100"), ("r", "0.02"), ("search", "true"), ("trials", "30"), ("budget", "6")],
        ),
        (Command::Ring, &[("n-grid", "8,16,32"), ("trials", "50")]),
        (Command::OracleCheck, &[]),
    ];
    let mut pass = true;
    let mut checked = 0;
    let mut mismatched = Vec::new();
    for (command, pairs) in runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let tmp = tempfile::tempdir()?;
            let mut cfg = config(pairs, tmp.path())?;
            cfg.seed = Some(11);
            let dir = match command {
                Command::Spread => cmd_spread(&cfg)?.dir,
                Command::Conductance => cmd_conductance(&cfg)?.dir,
                Command::GapSweep => cmd_gap_sweep(&cfg)?.dir,
                Command::Tradeoff => cmd_tradeoff(&cfg)?.dir,
                Command::Ring => cmd_ring(&cfg)?.dir,
                Command::OracleCheck => {
                    let opts = OracleOptions {
                        samples: 1000,
                        ..OracleOptions::default()
                    };
                    cmd_oracle_check_with(&cfg, &opts)?.dir
                }
            };
            let files = data_files(&dir)?;
            if files.is_empty() {
                pass = false;
            }
            outputs.push(files);
        }
        checked += outputs[0].len();
        if outputs[0] != outputs[1] {
            pass = false;
            mismatched.push(command.name());
        }
    }
    let elapsed = start.elapsed();
    Ok(Outcome {
        pass,
        detail: format!(
            "{checked} CSV/SVG files over 6 commands{}; {:.1}s",
            if mismatched.is_empty() {
                " identical on rerun".to_string()
            } else {
                format!(", differing: {}", mismatched.join(", "))
            },
            elapsed.as_secs_f64()
        ),
    })
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("closed-form agreement", closed_form_agreement),
        ("brute-force oracle", brute_force_oracle),
        ("cut-flow simplification identity", simplification_identity),
        ("sparse gap scaling", gap_scaling),
        ("velocity scaling", velocity_scaling),
        ("partial mobility endpoints", partial_reduction),
        ("one-dimensional balance", line_balance),
        ("ring benchmark", ring_benchmark),
        ("velocity threshold ratio", tradeoff_consistency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "AC{:<2} {} {name}: {}",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
