//! Closed-form conductance chain for fully random mobility.
//!
//! With positions i.i.d. uniform after every move, a node has
//! `Binomial(n-1, p)` neighbors, and each neighbor lies across the cut with
//! probability `|S̄'|/(n-1)`. Summing the gossip contact probabilities gives
//! an expected cut flow of `|S'||S̄'|/(n-1) * (1 - (1-p)^(n-1))`.
//!
//! `p = πr²` ignores the walls of the square. The `*_square` functions
//! evaluate the same chain with the exact disk/square overlap, which is what
//! the hard-walled simulator realizes.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};

use crate::error::{invalid, Result};

/// Probability that a given node lands within `r` of another: `min(πr², 1)`.
pub fn fr_contact_prob(r: f64) -> f64 {
    (PI * r * r).min(1.0)
}

fn binomial_pmf(trials: u64, p: f64, k: u64) -> f64 {
    if k > trials {
        return 0.0;
    }
    let p = p.clamp(0.0, 1.0);
    Binomial::new(p, trials).expect("p in [0, 1]").pmf(k)
}

/// `P(|N_i| = m)`: binomial(n-1, πr²) mass at `m`.
pub fn fr_degree_pmf(n: usize, r: f64, m: usize) -> f64 {
    assert!(n >= 1, "need at least one node");
    binomial_pmf((n - 1) as u64, fr_contact_prob(r), m as u64)
}

/// Probability that `b` of `m` neighbors lie across the cut, each
/// independently with probability `s_bar_frac`.
pub fn fr_cross_pmf(m: usize, b: usize, s_bar_frac: f64) -> f64 {
    binomial_pmf(m as u64, s_bar_frac, b as u64)
}

/// `1 - (1 - p)^k` without cancellation for small `p`.
pub(crate) fn prob_any(p: f64, k: usize) -> f64 {
    if p >= 1.0 {
        return if k == 0 { 0.0 } else { 1.0 };
    }
    -((k as f64) * (-p).ln_1p()).exp_m1()
}

/// Expected total contact probability from a cut of size `s` to its
/// complement, un-normalized.
pub fn fr_expected_cut_flow(n: usize, r: f64, s: usize) -> f64 {
    assert!(n >= 2 && s >= 1 && s < n, "need 1 <= s <= n-1");
    let sf = s as f64;
    let nf = n as f64;
    sf * (nf - sf) / (nf - 1.0) * prob_any(fr_contact_prob(r), n - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrClosedForm {
    /// `ceil(n/2)/(n-1) * (1 - (1 - πr²)^(n-1))`: minimum over `|S'| <= n/2`.
    pub exact: f64,
    /// The same with `|S̄'|/(n-1)` replaced by `1/2`.
    pub half: f64,
    /// Exact minimum for the hard-walled square: `πr²` replaced by the
    /// position-dependent disk/square overlap, averaged over node position.
    pub square: f64,
}

/// Fully random mobile conductance in closed form.
pub fn fr_closed_form(n: usize, r: f64) -> Result<FrClosedForm> {
    if n < 2 {
        return Err(invalid("closed form needs n >= 2"));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    let nf = n as f64;
    let frac = (n - n / 2) as f64 / (nf - 1.0);
    let any = prob_any(fr_contact_prob(r), n - 1);
    Ok(FrClosedForm {
        exact: frac * any,
        half: 0.5 * any,
        square: frac * square_any_neighbor_prob(n, r),
    })
}

fn half_chord_integral(t: f64, r: f64) -> f64 {
    let t = t.clamp(-r, r);
    0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).asin())
}

/// Area of the disk of radius `r` centered at `(cx, cy)` inside the unit square.
/// The center must lie in the square.
pub fn disk_square_area(cx: f64, cy: f64, r: f64) -> f64 {
    // offsets from cx, so an unclipped chord ends exactly at ±r
    let lo = (-cx).max(-r);
    let hi = (1.0 - cx).min(r);
    let mut cuts = vec![lo, hi];
    for wall_gap in [1.0 - cy, cy] {
        if r > wall_gap {
            let w = (r * r - wall_gap * wall_gap).sqrt();
            for u in [-w, w] {
                if u > lo && u < hi {
                    cuts.push(u);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);

    let mut area = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let h = (r * r - mid * mid).max(0.0).sqrt();
        let chord = half_chord_integral(b, r) - half_chord_integral(a, r);
        area += if cy + h > 1.0 { (1.0 - cy) * (b - a) } else { chord };
        area += if cy - h < 0.0 { cy * (b - a) } else { chord };
    }
    area
}

/// Composite Gauss-Legendre nodes on `[0, 1/2]`, split at the kinks of the
/// overlap area.
fn quadrant_nodes(r: f64) -> Vec<(f64, f64)> {
    let mut breaks = vec![0.0, 0.5];
    for b in [r, 1.0 - r] {
        if b > 0.0 && b < 0.5 {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let gl = GaussLegendre::new(8.try_into().expect("nonzero order"));
    const PANELS: usize = 16;
    let mut nodes = Vec::new();
    for seg in breaks.windows(2) {
        let h = (seg[1] - seg[0]) / PANELS as f64;
        for p in 0..PANELS {
            let a = seg[0] + p as f64 * h;
            for (x, w) in gl.iter() {
                nodes.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
    }
    nodes
}

/// `E_X[f(area(X))]` for `X` uniform on the square.
fn average_over_square(r: f64, f: impl Fn(f64) -> f64) -> f64 {
    let nodes = quadrant_nodes(r);
    let mut total = 0.0;
    for &(x, wx) in &nodes {
        let mut row = 0.0;
        for &(y, wy) in &nodes {
            row += wy * f(disk_square_area(x, y, r));
        }
        total += wx * row;
    }
    4.0 * total
}

/// Probability that two independent uniform points of the square are within `r`.
pub fn square_pair_contact_prob(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r <= 1.0 {
        PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4)
    } else if r >= std::f64::consts::SQRT_2 {
        1.0
    } else {
        average_over_square(r, |a| a)
    }
}

/// Probability that a uniformly placed node has at least one of the other
/// `n - 1` uniform nodes within `r`, walls included.
pub fn square_any_neighbor_prob(n: usize, r: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    average_over_square(r, |a| prob_any(a.min(1.0), n - 1))
}
