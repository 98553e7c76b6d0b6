//! Stationary mobility laws driving the move half of each slot.
//!
//! Every model starts nodes uniformly on the square. A move consumes only the
//! current states and the random stream.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{uniform_position, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MobilityKind {
    FullyRandom,
    VelocityConstrained,
    PartiallyRandom,
    OneDimensional,
    Static,
}

impl MobilityKind {
    pub fn short_name(self) -> &'static str {
        match self {
            MobilityKind::FullyRandom => "fr",
            MobilityKind::VelocityConstrained => "vc",
            MobilityKind::PartiallyRandom => "pr",
            MobilityKind::OneDimensional => "1d",
            MobilityKind::Static => "static",
        }
    }
}

/// What a velocity-constrained step does when the speed disk leaves the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BoundaryRule {
    /// Redraw until the destination lies in the square (uniform on disk ∩ square).
    #[default]
    Resample,
    /// Draw from the full disk and mirror off the walls.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MobilitySpec {
    /// Every node redraws its position uniformly each slot.
    FullyRandom,
    /// Destination uniform within distance `v_max` of the current position.
    VelocityConstrained { v_max: f64, boundary: BoundaryRule },
    /// `mobile` pre-selected nodes are fully random, the rest never move.
    PartiallyRandom { mobile: usize },
    /// `vertical` nodes move only along y, `horizontal` only along x.
    OneDimensional { vertical: usize, horizontal: usize },
    Static,
}

impl MobilitySpec {
    pub fn velocity(v_max: f64) -> Self {
        MobilitySpec::VelocityConstrained {
            v_max,
            boundary: BoundaryRule::default(),
        }
    }

    pub fn kind(&self) -> MobilityKind {
        match self {
            MobilitySpec::FullyRandom => MobilityKind::FullyRandom,
            MobilitySpec::VelocityConstrained { .. } => MobilityKind::VelocityConstrained,
            MobilitySpec::PartiallyRandom { .. } => MobilityKind::PartiallyRandom,
            MobilitySpec::OneDimensional { .. } => MobilityKind::OneDimensional,
            MobilitySpec::Static => MobilityKind::Static,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            MobilitySpec::VelocityConstrained { v_max, .. } => {
                if !(v_max > 0.0 && v_max <= 1.0) {
                    return Err(invalid(format!("v_max must be in (0, 1], got {v_max}")));
                }
            }
            MobilitySpec::PartiallyRandom { mobile } => {
                if mobile > n {
                    return Err(invalid(format!("k = {mobile} mobile nodes exceeds n = {n}")));
                }
            }
            MobilitySpec::OneDimensional { vertical, horizontal } => {
                if vertical + horizontal != n {
                    return Err(invalid(format!(
                        "n_V + n_H = {} does not equal n = {n}",
                        vertical + horizontal
                    )));
                }
            }
            MobilitySpec::FullyRandom | MobilitySpec::Static => {}
        }
        Ok(())
    }

    /// Scalar knob comparing this law against fully random mobility:
    /// `v_max`, the mobility ratio `k/n`, or the mobility balance `n_V n_H / n^2`.
    pub fn mobility_intensity(&self, n: usize) -> f64 {
        match *self {
            MobilitySpec::FullyRandom => 1.0,
            MobilitySpec::Static => 0.0,
            MobilitySpec::VelocityConstrained { v_max, .. } => v_max,
            MobilitySpec::PartiallyRandom { mobile } => {
                if n == 0 {
                    0.0
                } else {
                    mobile as f64 / n as f64
                }
            }
            MobilitySpec::OneDimensional { vertical, horizontal } => {
                let total = (vertical + horizontal) as f64;
                if total == 0.0 {
                    0.0
                } else {
                    (vertical as f64 * horizontal as f64) / (total * total)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Motion {
    Free,
    Static,
    /// Moves along the vertical line `x = x0`.
    Vertical { x0: f64 },
    /// Moves along the horizontal line `y = y0`.
    Horizontal { y0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeState {
    pub id: usize,
    pub pos: Position,
    pub motion: Motion,
}

pub fn init_states<R: Rng + ?Sized>(n: usize, spec: &MobilitySpec, rng: &mut R) -> Result<Vec<NodeState>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    spec.validate(n)?;
    let mut states: Vec<NodeState> = (0..n)
        .map(|id| NodeState {
            id,
            pos: uniform_position(rng),
            motion: Motion::Free,
        })
        .collect();
    match *spec {
        MobilitySpec::FullyRandom | MobilitySpec::VelocityConstrained { .. } => {}
        MobilitySpec::Static => states.iter_mut().for_each(|s| s.motion = Motion::Static),
        MobilitySpec::PartiallyRandom { mobile } => {
            states.iter_mut().for_each(|s| s.motion = Motion::Static);
            for i in index::sample(rng, n, mobile) {
                states[i].motion = Motion::Free;
            }
        }
        MobilitySpec::OneDimensional { vertical, .. } => {
            for s in states.iter_mut() {
                s.motion = Motion::Horizontal { y0: s.pos.y() };
            }
            for i in index::sample(rng, n, vertical) {
                states[i].motion = Motion::Vertical { x0: states[i].pos.x() };
            }
        }
    }
    Ok(states)
}

fn check_states(states: &[NodeState], spec: &MobilitySpec) -> Result<()> {
    let n = states.len();
    spec.validate(n)?;
    let count = |pred: fn(&Motion) -> bool| states.iter().filter(|s| pred(&s.motion)).count();
    let ok = match *spec {
        MobilitySpec::FullyRandom | MobilitySpec::VelocityConstrained { .. } => {
            count(|m| matches!(m, Motion::Free)) == n
        }
        MobilitySpec::Static => count(|m| matches!(m, Motion::Static)) == n,
        MobilitySpec::PartiallyRandom { mobile } => {
            count(|m| matches!(m, Motion::Free)) == mobile && count(|m| matches!(m, Motion::Static)) == n - mobile
        }
        MobilitySpec::OneDimensional { vertical, horizontal } => {
            count(|m| matches!(m, Motion::Vertical { .. })) == vertical
                && count(|m| matches!(m, Motion::Horizontal { .. })) == horizontal
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::SpecMismatch(format!(
            "motion tags of {n} states are inconsistent with {:?}",
            spec
        )))
    }
}

fn disk_offset<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    loop {
        let dx = rng.gen_range(-1.0..1.0);
        let dy = rng.gen_range(-1.0..1.0);
        if dx * dx + dy * dy <= 1.0 {
            return (dx * radius, dy * radius);
        }
    }
}

fn reflect(t: f64) -> f64 {
    // |t| <= 2 because v_max <= 1
    let t = if t < 0.0 { -t } else { t };
    if t > 1.0 {
        (2.0 - t).max(0.0)
    } else {
        t
    }
}

fn velocity_step<R: Rng + ?Sized>(from: Position, v_max: f64, boundary: BoundaryRule, rng: &mut R) -> Position {
    match boundary {
        BoundaryRule::Resample => loop {
            let (dx, dy) = disk_offset(v_max, rng);
            let (x, y) = (from.x() + dx, from.y() + dy);
            if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
                return Position::new_unchecked(x, y);
            }
        },
        BoundaryRule::Reflect => {
            let (dx, dy) = disk_offset(v_max, rng);
            Position::new_unchecked(reflect(from.x() + dx), reflect(from.y() + dy))
        }
    }
}

/// Advance every node by one slot in place.
pub fn advance<R: Rng + ?Sized>(states: &mut [NodeState], spec: &MobilitySpec, rng: &mut R) -> Result<()> {
    check_states(states, spec)?;
    advance_unchecked(states, spec, rng);
    Ok(())
}

pub(crate) fn advance_unchecked<R: Rng + ?Sized>(states: &mut [NodeState], spec: &MobilitySpec, rng: &mut R) {
    for s in states.iter_mut() {
        s.pos = match (s.motion, spec) {
            (Motion::Static, _) => s.pos,
            (Motion::Free, MobilitySpec::VelocityConstrained { v_max, boundary }) => {
                velocity_step(s.pos, *v_max, *boundary, rng)
            }
            (Motion::Free, _) => uniform_position(rng),
            (Motion::Vertical { x0 }, _) => Position::new_unchecked(x0, rng.gen::<f64>()),
            (Motion::Horizontal { y0 }, _) => Position::new_unchecked(rng.gen::<f64>(), y0),
        };
    }
}

/// One move step returning the new states.
pub fn move_states<R: Rng + ?Sized>(
    states: &[NodeState],
    spec: &MobilitySpec,
    rng: &mut R,
) -> Result<Vec<NodeState>> {
    let mut next = states.to_vec();
    advance(&mut next, spec, rng)?;
    Ok(next)
}

pub fn positions_of(states: &[NodeState]) -> Vec<Position> {
    states.iter().map(|s| s.pos).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn static_spec_tags_everything_static() {
        let s = init_states(30, &MobilitySpec::Static, &mut stream(1, &[])).unwrap();
        assert!(s.iter().all(|n| n.motion == Motion::Static));
    }

    #[test]
    fn partially_random_with_all_mobile() {
        let s = init_states(25, &MobilitySpec::PartiallyRandom { mobile: 25 }, &mut stream(1, &[])).unwrap();
        assert!(s.iter().all(|n| n.motion == Motion::Free));
    }

    #[test]
    fn partially_random_counts() {
        let s = init_states(40, &MobilitySpec::PartiallyRandom { mobile: 13 }, &mut stream(2, &[])).unwrap();
        assert_eq!(s.iter().filter(|n| n.motion == Motion::Free).count(), 13);
    }

    #[test]
    fn one_dimensional_all_vertical() {
        let spec = MobilitySpec::OneDimensional { vertical: 12, horizontal: 0 };
        let s = init_states(12, &spec, &mut stream(1, &[])).unwrap();
        assert!(s.iter().all(|n| matches!(n.motion, Motion::Vertical { .. })));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut rng = stream(1, &[]);
        assert!(init_states(5, &MobilitySpec::PartiallyRandom { mobile: 6 }, &mut rng).is_err());
        let bad = MobilitySpec::OneDimensional { vertical: 2, horizontal: 2 };
        assert!(init_states(5, &bad, &mut rng).is_err());
        assert!(init_states(5, &MobilitySpec::velocity(0.0), &mut rng).is_err());
        assert!(init_states(5, &MobilitySpec::velocity(1.5), &mut rng).is_err());
    }

    #[test]
    fn mismatched_states_rejected() {
        let mut rng = stream(1, &[]);
        let states = init_states(10, &MobilitySpec::Static, &mut rng).unwrap();
        assert!(matches!(
            move_states(&states, &MobilitySpec::FullyRandom, &mut rng),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn intensities() {
        assert_eq!(MobilitySpec::FullyRandom.mobility_intensity(10), 1.0);
        assert_eq!(MobilitySpec::Static.mobility_intensity(10), 0.0);
        assert_eq!(MobilitySpec::velocity(0.3).mobility_intensity(10), 0.3);
        assert_eq!(MobilitySpec::PartiallyRandom { mobile: 50 }.mobility_intensity(100), 0.5);
        let one_d = MobilitySpec::OneDimensional { vertical: 50, horizontal: 50 };
        assert_eq!(one_d.mobility_intensity(100), 0.25);
    }

    #[test]
    fn velocity_bound_holds() {
        for boundary in [BoundaryRule::Resample, BoundaryRule::Reflect] {
            let spec = MobilitySpec::VelocityConstrained { v_max: 0.3, boundary };
            let mut rng = stream(5, &[]);
            let mut states = init_states(200, &spec, &mut rng).unwrap();
            for _ in 0..50 {
                let next = move_states(&states, &spec, &mut rng).unwrap();
                for (a, b) in states.iter().zip(&next) {
                    assert!(a.pos.distance(&b.pos) <= 0.3 + 1e-12);
                }
                states = next;
            }
        }
    }

    #[test]
    fn static_nodes_stay_put() {
        let spec = MobilitySpec::PartiallyRandom { mobile: 10 };
        let mut rng = stream(8, &[]);
        let states = init_states(30, &spec, &mut rng).unwrap();
        let next = move_states(&states, &spec, &mut rng).unwrap();
        for (a, b) in states.iter().zip(&next) {
            if a.motion == Motion::Static {
                assert_eq!(a.pos, b.pos);
            }
        }
    }

    #[test]
    fn line_movers_keep_fixed_coordinate() {
        let spec = MobilitySpec::OneDimensional { vertical: 7, horizontal: 8 };
        let mut rng = stream(8, &[]);
        let mut states = init_states(15, &spec, &mut rng).unwrap();
        let before = states.clone();
        for _ in 0..10 {
            advance(&mut states, &spec, &mut rng).unwrap();
        }
        for (a, b) in before.iter().zip(&states) {
            match a.motion {
                Motion::Vertical { x0 } => assert_eq!(b.pos.x(), x0),
                Motion::Horizontal { y0 } => assert_eq!(b.pos.y(), y0),
                _ => unreachable!(),
            }
        }
    }
}
