//! Spreading time of one message under fully random and velocity-constrained
//! mobility, plus the per-round trace of a single run.
//!
//!     cargo run --release --example gossip_spreading

use mobicond::gossip::{edge_use_ratio, run_spreading, spreading_time, SpreadConfig, SpreadingParams};
use mobicond::mobility::MobilitySpec;
use mobicond::rng::stream;

fn main() -> mobicond::Result<()> {
    let (n, r) = (400, 0.03);
    for spec in [MobilitySpec::FullyRandom, MobilitySpec::velocity(0.1), MobilitySpec::velocity(0.02)] {
        let mut params = SpreadingParams::new(n, r, spec);
        params.trials = 200;
        params.sources_sampled = 2;
        let res = spreading_time(&params, 1)?;
        println!(
            "{:<4} v={:<5} t_spr(eps=0.01) = {:?}  per source {:?}",
            spec.kind().short_name(),
            match spec {
                MobilitySpec::VelocityConstrained { v_max, .. } => v_max.to_string(),
                _ => "-".into(),
            },
            res.t_spr,
            res.per_source_t_spr
        );
    }

    let cfg = SpreadConfig {
        record_trace: true,
        ..SpreadConfig::default()
    };
    let run = run_spreading(n, r, &MobilitySpec::FullyRandom, 0, &cfg, &mut stream(2, &[0]))?;
    let trace = run.trace;
    println!("\nsingle fr run, completion at slot {:?}", run.completion);
    for (t, rec) in trace.records.iter().enumerate().step_by(4) {
        println!(
            "slot {t:>3}: informed {:>3} -> {:>3}, cross contacts {:>3}",
            rec.informed_before, rec.informed_after, rec.cross_contacts
        );
    }
    println!("edge use ratio {:.3}", edge_use_ratio(&trace)?);
    Ok(())
}
