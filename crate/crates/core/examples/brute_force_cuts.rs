//! Exhaustive cut minimization on small networks next to the bisection cut.
//!
//!     cargo run --release --example brute_force_cuts

use std::f64::consts::PI;

use mobicond::conductance::{brute_force_conductance, estimate_conductance, fr_closed_form, CutRule};
use mobicond::mobility::MobilitySpec;

fn main() -> mobicond::Result<()> {
    let r = (0.1 / PI).sqrt();
    for (name, spec) in [("fr", MobilitySpec::FullyRandom), ("vc 0.1", MobilitySpec::velocity(0.1))] {
        for n in [6usize, 8, 10] {
            let bf = brute_force_conductance(n, r, &spec, 200, 500, 1)?;
            let bis = estimate_conductance(n, r, &spec, &CutRule::Bisection, 20_000, 1)?;
            print!(
                "{name:<7} n={n:<3} {} cuts  min {:.4} ± {:.4}  bisection {:.4} ± {:.4}",
                bf.cuts_evaluated, bf.minimum.mean, bf.minimum.stderr, bis.mean, bis.stderr
            );
            if matches!(spec, MobilitySpec::FullyRandom) {
                print!("  closed form {:.4}", fr_closed_form(n, r)?.square);
            }
            println!();
            for s in &bf.per_size {
                println!(
                    "    |S'|={}  {:>4} cuts  screened min {:.4}  chosen in {} states",
                    s.size, s.cuts, s.screening_mean, s.argmin_count
                );
            }
        }
    }
    Ok(())
}
