//! Gap between connected and sparse spreading times over an nr² grid,
//! written to a run directory as CSV and SVG.
//!
//!     cargo run --release --example gap_sweep [out-dir]

use mobicond::experiments::{cmd_gap_sweep, ExperimentConfig};

fn main() -> mobicond::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "runs".to_string());
    let mut cfg = ExperimentConfig::default();
    for (k, v) in [
        ("model", "fr"),
        ("n", "300"),
        ("trials", "100"),
        ("sources", "2"),
        ("seed", "4"),
        ("out", out.as_str()),
    ] {
        cfg.set(k, v)?;
    }
    let res = cmd_gap_sweep(&cfg)?;
    println!("r_ref = {:.4}", res.r_ref);
    for row in &res.rows {
        println!(
            "nr² = {:<5} t_spr = {:>5?} t_ref = {:>3?} gap = {:.3}",
            row.nr2,
            row.t_spr,
            row.t_ref,
            row.gap.unwrap_or(f64::NAN)
        );
    }
    if let Some(fit) = res.fit {
        println!("sparse-zone log-log slope {:.3}", fit.slope);
    }
    println!("wrote {}", res.dir.display());
    Ok(())
}
