use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng::{purpose, stream};
use crate::stats::McEstimate;

fn in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y <= 1.0 {
            return (x * radius, y * radius);
        }
    }
}

/// Probability that a uniformly chosen edge of a left-origin node reaches a
/// right-origin node after one velocity-constrained move.
///
/// The bisection line sits at `x = 0`; before the move the left and right
/// populations fill their half-planes with equal density. `l` is the node's
/// x-offset from the line after its move. A left-origin node can only sit at
/// `l < v_max`, and nothing from the right can be within `r` unless
/// `l > -v_max - r`; outside that window the probability is 0.
///
/// Inside it, a neighbor is uniform over the `r`-disk around the node (the
/// total post-move density stays uniform), and it is right-origin when its
/// pre-move position, the neighbor minus a uniform `v_max`-disk step, has
/// positive x.
pub fn meaningful_contact_prob(l: f64, r: f64, v_max: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    if !(r > 0.0 && v_max > 0.0) || !l.is_finite() {
        return Err(invalid(format!("need r > 0 and v_max > 0, got r = {r}, v_max = {v_max}")));
    }
    if l <= -v_max - r || l >= v_max {
        return Ok(McEstimate {
            mean: 0.0,
            stderr: 0.0,
            samples,
        });
    }
    let mut rng = stream(seed, &[purpose::CONTACT]);
    let mut hits = 0usize;
    for _ in 0..samples {
        let (nx, _) = in_disk(r, &mut rng);
        let (sx, _) = in_disk(v_max, &mut rng);
        if l + nx - sx > 0.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        mean: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_outside_support() {
        assert_eq!(meaningful_contact_prob(-0.31, 0.1, 0.2, 100, 1).unwrap().mean, 0.0);
        assert_eq!(meaningful_contact_prob(0.2, 0.1, 0.2, 100, 1).unwrap().mean, 0.0);
    }

    #[test]
    fn half_at_the_line() {
        let est = meaningful_contact_prob(0.0, 0.05, 0.2, 200_000, 4).unwrap();
        assert!((est.mean - 0.5).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(meaningful_contact_prob(0.0, 0.1, 0.2, 0, 1).is_err());
        assert!(meaningful_contact_prob(0.0, 0.0, 0.2, 10, 1).is_err());
        assert!(meaningful_contact_prob(0.0, 0.1, -0.2, 10, 1).is_err());
    }
}
