//! Monte Carlo mobile conductance against the fully random closed form.
//!
//!     cargo run --release --example conductance_fully_random

use std::f64::consts::PI;

use mobicond::conductance::{estimate_conductance, fr_closed_form, scaling_class, CutRule};
use mobicond::mobility::MobilitySpec;

fn main() -> mobicond::Result<()> {
    let n = 200;
    println!(
        "{:>7} {:>9} {:>11} {:>11} {:>11} {:>7} {:>10}",
        "πr²", "nr²", "estimate", "square", "wall-free", "z", "class"
    );
    for p in [0.002, 0.005, 0.01, 0.02, 0.05] {
        let r = (p / PI).sqrt();
        let spec = MobilitySpec::FullyRandom;
        let est = estimate_conductance(n, r, &spec, &CutRule::Bisection, 5000, 1)?;
        let cf = fr_closed_form(n, r)?;
        let class = scaling_class(&spec, n, r);
        println!(
            "{p:>7} {:>9.4} {:>11.6} {:>11.6} {:>11.6} {:>7.2} {:>10}",
            n as f64 * r * r,
            est.mean,
            cf.square,
            cf.exact,
            (est.mean - cf.square) / est.stderr,
            class.label()
        );
    }
    Ok(())
}
