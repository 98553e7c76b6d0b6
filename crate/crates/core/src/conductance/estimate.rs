use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{build_snapshot, Topology};
use crate::mobility::{advance_unchecked, init_states, positions_of, MobilitySpec, NodeState};
use crate::rng::{purpose, stream};
use crate::stats::mean_stderr;

pub const BRUTE_FORCE_MAX_NODES: usize = 12;

/// A candidate informed set `S'` with `1 <= |S'| <= floor(n/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    members: FixedBitSet,
    size: usize,
}

impl Cut {
    pub fn new(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(n);
        for id in ids {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, n });
            }
            members.insert(id);
        }
        let size = members.count_ones(..);
        if size == 0 {
            return Err(Error::EmptyCut);
        }
        if size > n / 2 {
            return Err(Error::CutTooLarge { size, n });
        }
        Ok(Cut { members, size })
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(id)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }
}

/// Normalized flow `Σ_{i∈S', j∉S'} P_ij / |S'|` on one post-move topology,
/// with `P_ij = 1/|N_i|` for neighbors. Always in `[0, 1]`.
pub fn cut_flow<T: Topology + ?Sized>(topo: &T, cut: &Cut) -> Result<f64> {
    if cut.size == 0 {
        return Err(Error::EmptyCut);
    }
    if cut.node_count() != topo.node_count() {
        return Err(invalid(format!(
            "cut over {} nodes applied to topology of {}",
            cut.node_count(),
            topo.node_count()
        )));
    }
    let mut total = 0.0;
    for i in cut.members() {
        let adj = topo.adjacent(i);
        if adj.is_empty() {
            continue;
        }
        let across = adj.iter().filter(|&&j| !cut.contains(j)).count();
        total += across as f64 / adj.len() as f64;
    }
    Ok(total / cut.size as f64)
}

/// Left-half cut: the `floor(n/2)` nodes with the smallest x, ties by id.
pub fn bisection_cut(states: &[NodeState]) -> Result<Cut> {
    let n = states.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        states[a]
            .pos
            .x()
            .total_cmp(&states[b].pos.x())
            .then(states[a].id.cmp(&states[b].id))
    });
    Cut::new(n, order.into_iter().take(n / 2))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutRule {
    /// Recomputed from each sample's pre-move positions.
    Bisection,
    /// Fixed node-id set.
    Explicit(Cut),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutKind {
    Bisection,
    Explicit,
    BruteForceMin,
}

impl CutKind {
    pub fn label(self) -> &'static str {
        match self {
            CutKind::Bisection => "bisection",
            CutKind::Explicit => "explicit",
            CutKind::BruteForceMin => "brute-force-min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConductanceEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub cut_kind: CutKind,
    pub cut_size: usize,
    /// Samples whose cut had no contact flow at all.
    pub zero_flow_samples: usize,
}

fn sample_flow(n: usize, r: f64, spec: &MobilitySpec, rule: &CutRule, seed: u64, tag: u64, k: usize) -> Result<f64> {
    let mut rng = stream(seed, &[tag, k as u64]);
    let mut states = init_states(n, spec, &mut rng)?;
    let bisection;
    let cut = match rule {
        CutRule::Bisection => {
            bisection = bisection_cut(&states)?;
            &bisection
        }
        CutRule::Explicit(c) => c,
    };
    advance_unchecked(&mut states, spec, &mut rng);
    let snap = build_snapshot(positions_of(&states), r)?;
    cut_flow(&snap, cut)
}

pub(crate) fn estimate_tagged(
    n: usize,
    r: f64,
    spec: &MobilitySpec,
    rule: &CutRule,
    samples: usize,
    seed: u64,
    tag: u64,
) -> Result<ConductanceEstimate> {
    spec.validate(n)?;
    if let CutRule::Explicit(c) = rule {
        if c.node_count() != n {
            return Err(invalid(format!("cut covers {} nodes, expected {n}", c.node_count())));
        }
    }
    if n < 2 {
        return Err(Error::EmptyCut);
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| sample_flow(n, r, spec, rule, seed, tag, k))
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&values);
    let (cut_kind, cut_size) = match rule {
        CutRule::Bisection => (CutKind::Bisection, n / 2),
        CutRule::Explicit(c) => (CutKind::Explicit, c.size()),
    };
    Ok(ConductanceEstimate {
        mean,
        stderr,
        samples,
        cut_kind,
        cut_size,
        zero_flow_samples: values.iter().filter(|&&v| v == 0.0).count(),
    })
}

/// Monte Carlo estimate of the expected normalized cut flow under the
/// stationary move distribution: draw stationary states, fix the cut from
/// the pre-move positions, move once, measure the flow.
pub fn estimate_conductance(
    n: usize,
    r: f64,
    spec: &MobilitySpec,
    rule: &CutRule,
    samples: usize,
    seed: u64,
) -> Result<ConductanceEstimate> {
    if samples < 100 {
        return Err(invalid(format!("need at least 100 samples, got {samples}")));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    estimate_tagged(n, r, spec, rule, samples, seed, purpose::CONDUCTANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeSummary {
    pub size: usize,
    pub cuts: usize,
    /// Mean over states of the smallest screened flow among cuts of this size.
    pub screening_mean: f64,
    /// States whose minimizing cut has this size.
    pub argmin_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Mean over states of the minimizing cut's flow, re-estimated on fresh
    /// moves so the selection does not bias it.
    pub minimum: ConductanceEstimate,
    /// The same minimum on the screening moves (biased low by selection).
    pub screening_mean: f64,
    pub per_size: Vec<SizeSummary>,
    pub cuts_evaluated: usize,
    pub states: usize,
    pub moves_per_state: usize,
}

impl BruteForceResult {
    /// Distinct sizes of the per-state minimizing cuts.
    pub fn argmin_sizes(&self) -> Vec<usize> {
        self.per_size
            .iter()
            .filter(|s| s.argmin_count > 0)
            .map(|s| s.size)
            .collect()
    }
}

struct StateOutcome {
    refit: f64,
    screen: f64,
    size_min: Vec<f64>,
    argmin_size: usize,
}

fn mask_flows(snap: &impl Topology, masks: &[u32], nbr: &mut [u32], inv_deg: &mut [f64], out: &mut [f64]) {
    for i in 0..nbr.len() {
        let adj = snap.adjacent(i);
        nbr[i] = adj.iter().fold(0u32, |m, &j| m | (1 << j));
        inv_deg[i] = if adj.is_empty() { 0.0 } else { 1.0 / adj.len() as f64 };
    }
    for (slot, &mask) in out.iter_mut().zip(masks) {
        let mut flow = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            flow += (nbr[i] & !mask).count_ones() as f64 * inv_deg[i];
        }
        *slot += flow / mask.count_ones() as f64;
    }
}

/// Exhaustive minimization over every cut with `1 <= |S'| <= floor(n/2)`.
///
/// For each of `states` stationary pre-move configurations, every cut is
/// screened on the same `moves_per_state` moves; the minimizing cut is then
/// re-measured on independent moves from that configuration. Ties go to the
/// larger cut. The estimate averages the re-measured minima over states.
pub fn brute_force_conductance(
    n: usize,
    r: f64,
    spec: &MobilitySpec,
    states: usize,
    moves_per_state: usize,
    seed: u64,
) -> Result<BruteForceResult> {
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::TooManyNodes {
            n,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    if n < 2 {
        return Err(Error::EmptyCut);
    }
    if states < 100 {
        return Err(invalid(format!("need at least 100 states, got {states}")));
    }
    if moves_per_state == 0 {
        return Err(invalid("need at least one move per state"));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    spec.validate(n)?;

    let mut masks: Vec<u32> = (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= n / 2)
        .collect();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    let half = n / 2;

    let outcomes: Vec<StateOutcome> = (0..states)
        .into_par_iter()
        .map(|k| -> Result<StateOutcome> {
            let mut rng = stream(seed, &[purpose::BRUTE_FORCE, k as u64]);
            let start = init_states(n, spec, &mut rng)?;
            let mut nbr = vec![0u32; n];
            let mut inv_deg = vec![0.0; n];
            let mut sums = vec![0.0; masks.len()];
            let mut moved = start.clone();
            for _ in 0..moves_per_state {
                moved.copy_from_slice(&start);
                advance_unchecked(&mut moved, spec, &mut rng);
                let snap = build_snapshot(positions_of(&moved), r)?;
                mask_flows(&snap, &masks, &mut nbr, &mut inv_deg, &mut sums);
            }
            let m = moves_per_state as f64;
            let mut best = 0;
            let mut size_min = vec![f64::INFINITY; half];
            for (idx, (&mask, &sum)) in masks.iter().zip(&sums).enumerate() {
                let size = mask.count_ones() as usize;
                size_min[size - 1] = size_min[size - 1].min(sum / m);
                if sum < sums[best] {
                    best = idx;
                }
            }

            let mut refit_rng = stream(seed, &[purpose::BRUTE_FORCE_REFIT, k as u64]);
            let chosen = [masks[best]];
            let mut refit = [0.0];
            for _ in 0..moves_per_state {
                moved.copy_from_slice(&start);
                advance_unchecked(&mut moved, spec, &mut refit_rng);
                let snap = build_snapshot(positions_of(&moved), r)?;
                mask_flows(&snap, &chosen, &mut nbr, &mut inv_deg, &mut refit);
            }
            Ok(StateOutcome {
                refit: refit[0] / m,
                screen: sums[best] / m,
                size_min,
                argmin_size: masks[best].count_ones() as usize,
            })
        })
        .collect::<Result<_>>()?;

    let refits: Vec<f64> = outcomes.iter().map(|o| o.refit).collect();
    let (mean, stderr) = mean_stderr(&refits);
    let s = states as f64;
    let per_size: Vec<SizeSummary> = (1..=half)
        .map(|size| SizeSummary {
            size,
            cuts: masks.iter().filter(|m| m.count_ones() as usize == size).count(),
            screening_mean: outcomes.iter().map(|o| o.size_min[size - 1]).sum::<f64>() / s,
            argmin_count: outcomes.iter().filter(|o| o.argmin_size == size).count(),
        })
        .collect();
    let modal = per_size
        .iter()
        .max_by_key(|p| (p.argmin_count, p.size))
        .map_or(half, |p| p.size);

    Ok(BruteForceResult {
        minimum: ConductanceEstimate {
            mean,
            stderr,
            samples: states,
            cut_kind: CutKind::BruteForceMin,
            cut_size: modal,
            zero_flow_samples: refits.iter().filter(|&&v| v == 0.0).count(),
        },
        screening_mean: outcomes.iter().map(|o| o.screen).sum::<f64>() / s,
        per_size,
        cuts_evaluated: masks.len(),
        states,
        moves_per_state,
    })
}
