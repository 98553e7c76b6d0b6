//! Meaningful-contact probability across the bisection line, and the
//! resulting velocity-constrained conductance as v_max grows.
//!
//!     cargo run --release --example velocity_contact

use mobicond::conductance::{estimate_conductance, meaningful_contact_prob, scaling_class, CutRule};
use mobicond::mobility::MobilitySpec;

fn main() -> mobicond::Result<()> {
    let (r, v) = (0.02, 0.05);
    println!("contact probability profile, r = {r}, v_max = {v}");
    for i in 0..=14 {
        let l = -v - r + i as f64 * (2.0 * v + r) / 14.0;
        let p = meaningful_contact_prob(l, r, v, 20_000, 3)?;
        println!("  l = {l:+.4}  p = {:.4} ± {:.4}", p.mean, p.stderr);
    }

    let n = 400;
    let r = (0.1 / n as f64).sqrt();
    println!("\nn = {n}, r = {r:.4} (nr² = 0.1)");
    let mut prev: Option<f64> = None;
    for v in [0.025, 0.05, 0.1, 0.2, 0.4] {
        let spec = MobilitySpec::velocity(v);
        let est = estimate_conductance(n, r, &spec, &CutRule::Bisection, 4000, 2)?;
        let ratio = prev.map_or(String::new(), |p| format!("x{:.2}", est.mean / p));
        println!(
            "  v_max = {v:<5} estimate {:.5} ± {:.5} {ratio:>6}  {}",
            est.mean,
            est.stderr,
            scaling_class(&spec, n, r).label()
        );
        prev = Some(est.mean);
    }
    Ok(())
}
