//! One move of each mobility model, with how far nodes travel.
//!
//!     cargo run --release --example mobility_models

use mobicond::mobility::{advance, init_states, positions_of, BoundaryRule, MobilitySpec};
use mobicond::rng::stream;

fn main() -> mobicond::Result<()> {
    let n = 1000;
    let models = [
        ("fully random", MobilitySpec::FullyRandom),
        ("velocity 0.05", MobilitySpec::velocity(0.05)),
        (
            "velocity 0.05, reflect",
            MobilitySpec::VelocityConstrained {
                v_max: 0.05,
                boundary: BoundaryRule::Reflect,
            },
        ),
        ("partially random k=100", MobilitySpec::PartiallyRandom { mobile: 100 }),
        (
            "one-dimensional 500/500",
            MobilitySpec::OneDimensional {
                vertical: 500,
                horizontal: 500,
            },
        ),
        ("static", MobilitySpec::Static),
    ];
    println!("{:<26} {:>10} {:>10} {:>10}", "model", "intensity", "mean step", "max step");
    for (i, (name, spec)) in models.iter().enumerate() {
        let mut rng = stream(5, &[i as u64]);
        let mut states = init_states(n, spec, &mut rng)?;
        let before = positions_of(&states);
        advance(&mut states, spec, &mut rng)?;
        let steps: Vec<f64> = before
            .iter()
            .zip(positions_of(&states))
            .map(|(a, b)| a.distance(&b))
            .collect();
        let mean = steps.iter().sum::<f64>() / n as f64;
        let max = steps.iter().copied().fold(0.0, f64::max);
        println!(
            "{name:<26} {:>10.4} {mean:>10.4} {max:>10.4}",
            spec.mobility_intensity(n)
        );
    }
    Ok(())
}
