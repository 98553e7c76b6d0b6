//! Mobility needed for a sparse network to spread as fast as a ring:
//! analytic thresholds for all three models and one empirical search.
//!
//!     cargo run --release --example tradeoff_thresholds

use mobicond::gossip::{ring_spreading_time, SpreadConfig};
use mobicond::mobility::MobilityKind;
use mobicond::tradeoff::{analytic_threshold, empirical_threshold_search, SearchParams};

fn main() -> mobicond::Result<()> {
    for (n, r) in [(1000, 0.01), (1000, 0.001), (10_000, 0.001), (300, 0.01)] {
        for kind in [
            MobilityKind::VelocityConstrained,
            MobilityKind::PartiallyRandom,
            MobilityKind::OneDimensional,
        ] {
            let t = analytic_threshold(kind, n, r, 1.0)?;
            println!(
                "n={n:<6} r={r:<6} {:<3} value {:<10.4e} feasible {:<5} count {:?}",
                kind.short_name(),
                t.value,
                t.feasible,
                t.minimal_count
            );
        }
    }

    let (n, r) = (300, 0.01);
    let mut cfg = SpreadConfig::default();
    cfg.max_slots = 100_000;
    let target = ring_spreading_time(n, 0.01, 200, &cfg, 9)?.t_spr.expect("ring completes");
    let mut params = SearchParams::new(MobilityKind::VelocityConstrained, n, r, target, 0.01, 0.5);
    params.trials = 200;
    params.tolerance = 0.1;
    let found = empirical_threshold_search(&params, 9)?;
    println!("\nring target {target}; empirical v_max threshold in ({:.4}, {:.4}]", found.below, found.intensity);
    for p in &found.trace {
        println!("  v_max {:.4} -> t_spr {:?}", p.intensity, p.t_spr);
    }
    Ok(())
}
