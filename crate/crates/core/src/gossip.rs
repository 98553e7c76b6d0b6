//! Move-and-gossip rounds and spreading-time measurement.
//!
//! In each slot every node first moves, then each node with at least one
//! neighbor contacts one of them uniformly at random. Exchanges are
//! synchronous: whether a contact transfers the message is decided from the
//! informed set at the start of the slot.

use fixedbitset::FixedBitSet;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Snapshot, Topology};
use crate::mobility::{advance_unchecked, init_states, MobilitySpec};
use crate::rng::{purpose, stream};
use crate::stats::completion_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Exchange {
    /// Both endpoints end up informed if either was.
    #[default]
    PushPull,
    /// Only the initiating node can hand the message over.
    Push,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformedSet {
    members: FixedBitSet,
    size: usize,
}

impl InformedSet {
    pub fn single(n: usize, source: usize) -> Result<Self> {
        if source >= n {
            return Err(Error::NodeOutOfRange { id: source, n });
        }
        let mut members = FixedBitSet::with_capacity(n);
        members.insert(source);
        Ok(InformedSet { members, size: 1 })
    }

    pub fn from_members(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(n);
        for id in ids {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, n });
            }
            members.insert(id);
        }
        let size = members.count_ones(..);
        Ok(InformedSet { members, size })
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

    pub fn is_complete(&self) -> bool {
        self.size == self.members.len()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    fn insert(&mut self, id: usize) {
        if !self.members.put(id) {
            self.size += 1;
        }
    }
}

/// What happened in one gossip step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RoundRecord {
    pub informed_before: usize,
    pub informed_after: usize,
    /// Contacts with exactly one informed endpoint.
    pub cross_contacts: usize,
    /// Nodes with at least one neighbor (each makes one contact).
    pub active_nodes: usize,
    pub edges_available: usize,
    /// Distinct undirected edges carrying a contact; `i -> j` and `j -> i` count once.
    pub edges_used: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoundTrace {
    pub records: Vec<RoundRecord>,
}

/// Fraction of available edges that carried a contact, pooled over the trace.
pub fn edge_use_ratio(trace: &RoundTrace) -> Result<f64> {
    if trace.records.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let available: usize = trace.records.iter().map(|r| r.edges_available).sum();
    if available == 0 {
        return Err(Error::NoEdgesAvailable);
    }
    let used: usize = trace.records.iter().map(|r| r.edges_used).sum();
    Ok(used as f64 / available as f64)
}

const NO_CONTACT: usize = usize::MAX;

fn round_into<T: Topology + ?Sized, R: Rng + ?Sized>(
    topo: &T,
    current: &InformedSet,
    next: &mut InformedSet,
    choice: &mut Vec<usize>,
    exchange: Exchange,
    rng: &mut R,
) -> RoundRecord {
    let n = topo.node_count();
    next.members.clone_from(&current.members);
    next.size = current.size;
    choice.clear();
    choice.resize(n, NO_CONTACT);

    let mut active = 0;
    let mut cross = 0;
    for (i, slot) in choice.iter_mut().enumerate() {
        let adj = topo.adjacent(i);
        if adj.is_empty() {
            continue;
        }
        let j = adj[rng.gen_range(0..adj.len())];
        *slot = j;
        active += 1;
        let (a, b) = (current.contains(i), current.contains(j));
        if a != b {
            cross += 1;
            match exchange {
                Exchange::PushPull => {
                    next.insert(i);
                    next.insert(j);
                }
                Exchange::Push => {
                    if a {
                        next.insert(j);
                    }
                }
            }
        }
    }
    let mutual = (0..n)
        .filter(|&i| {
            let j = choice[i];
            j != NO_CONTACT && i < j && choice[j] == i
        })
        .count();

    RoundRecord {
        informed_before: current.size,
        informed_after: next.size,
        cross_contacts: cross,
        active_nodes: active,
        edges_available: topo.edge_count(),
        edges_used: active - mutual,
    }
}

/// One gossip step on a post-move topology.
pub fn gossip_round<T: Topology + ?Sized, R: Rng + ?Sized>(
    topo: &T,
    informed: &InformedSet,
    exchange: Exchange,
    rng: &mut R,
) -> Result<(InformedSet, RoundRecord)> {
    if informed.node_count() != topo.node_count() {
        return Err(invalid(format!(
            "informed set covers {} nodes, topology has {}",
            informed.node_count(),
            topo.node_count()
        )));
    }
    let mut next = informed.clone();
    let mut choice = Vec::new();
    let rec = round_into(topo, informed, &mut next, &mut choice, exchange, rng);
    Ok((next, rec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadConfig {
    pub exchange: Exchange,
    pub max_slots: u64,
    pub record_trace: bool,
}

impl Default for SpreadConfig {
    fn default() -> Self {
        SpreadConfig {
            exchange: Exchange::PushPull,
            max_slots: 1_000_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadRun {
    /// First slot at which every node is informed; `None` if `max_slots` ran out.
    pub completion: Option<u64>,
    pub trace: RoundTrace,
}

/// Runs move-and-gossip from a single source until everyone is informed.
pub fn run_spreading<R: Rng + ?Sized>(
    n: usize,
    r: f64,
    spec: &MobilitySpec,
    source: usize,
    config: &SpreadConfig,
    rng: &mut R,
) -> Result<SpreadRun> {
    let mut states = init_states(n, spec, rng)?;
    let mut informed = InformedSet::single(n, source)?;
    let mut snap = Snapshot::empty(r)?;
    let mut trace = RoundTrace::default();
    if informed.is_complete() {
        return Ok(SpreadRun {
            completion: Some(0),
            trace,
        });
    }

    let moves = !matches!(spec, MobilitySpec::Static);
    let mut next = informed.clone();
    let mut choice = Vec::with_capacity(n);
    for t in 1..=config.max_slots {
        if moves || t == 1 {
            if moves {
                advance_unchecked(&mut states, spec, rng);
            }
            snap.rebuild(states.iter().map(|s| s.pos).collect());
        }
        let rec = round_into(&snap, &informed, &mut next, &mut choice, config.exchange, rng);
        std::mem::swap(&mut informed, &mut next);
        if config.record_trace {
            trace.records.push(rec);
        }
        if informed.is_complete() {
            return Ok(SpreadRun {
                completion: Some(t),
                trace,
            });
        }
    }
    Ok(SpreadRun {
        completion: None,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadingParams {
    pub n: usize,
    pub r: f64,
    pub spec: MobilitySpec,
    pub epsilon: f64,
    pub trials: usize,
    pub sources_sampled: usize,
    pub config: SpreadConfig,
}

impl SpreadingParams {
    pub fn new(n: usize, r: f64, spec: MobilitySpec) -> Self {
        SpreadingParams {
            n,
            r,
            spec,
            epsilon: 0.01,
            trials: 1000,
            sources_sampled: 5,
            config: SpreadConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("epsilon must be in (0, 1), got {}", self.epsilon)));
        }
        if self.trials == 0 || self.sources_sampled == 0 {
            return Err(invalid("trials and sources_sampled must be positive"));
        }
        if !self.r.is_finite() || self.r <= 0.0 {
            return Err(invalid(format!("radius must be positive, got {}", self.r)));
        }
        self.spec.validate(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadingResult {
    pub epsilon: f64,
    pub trials: usize,
    pub sources: Vec<usize>,
    /// `completion_times[s][k]`: trial `k` started from `sources[s]`.
    pub completion_times: Vec<Vec<Option<u64>>>,
    pub per_source_t_spr: Vec<Option<u64>>,
    /// Max over sampled sources of the `(1 - epsilon)` completion quantile;
    /// `None` when non-terminating runs reach the quantile.
    pub t_spr: Option<u64>,
    pub failed_runs: usize,
}

impl SpreadingResult {
    pub fn sources_sampled(&self) -> usize {
        self.sources.len()
    }

    pub fn total_runs(&self) -> usize {
        self.completion_times.iter().map(Vec::len).sum()
    }

    pub fn failed_fraction(&self) -> f64 {
        self.failed_runs as f64 / self.total_runs() as f64
    }

    pub fn all_completion_times(&self) -> impl Iterator<Item = Option<u64>> + '_ {
        self.completion_times.iter().flatten().copied()
    }

    fn from_times(epsilon: f64, trials: usize, sources: Vec<usize>, times: Vec<Vec<Option<u64>>>) -> Self {
        let per_source: Vec<Option<u64>> = times.iter().map(|t| completion_quantile(t, epsilon)).collect();
        let t_spr = per_source
            .iter()
            .try_fold(0u64, |acc, t| t.map(|t| acc.max(t)));
        let failed_runs = times.iter().flatten().filter(|t| t.is_none()).count();
        SpreadingResult {
            epsilon,
            trials,
            sources,
            completion_times: times,
            per_source_t_spr: per_source,
            t_spr,
            failed_runs,
        }
    }
}

/// Empirical ε-spreading time: `(1 - ε)`-quantile of completion over
/// `trials` runs per source, maximized over `sources_sampled` random sources.
pub fn spreading_time(params: &SpreadingParams, seed: u64) -> Result<SpreadingResult> {
    params.validate()?;
    let sources: Vec<usize> = if params.sources_sampled >= params.n {
        (0..params.n).collect()
    } else {
        rand::seq::index::sample(&mut stream(seed, &[purpose::SOURCE_PICK]), params.n, params.sources_sampled)
            .into_vec()
    };
    let trials = params.trials;
    let flat: Vec<Option<u64>> = (0..sources.len() * trials)
        .into_par_iter()
        .map(|k| {
            let (si, trial) = (k / trials, k % trials);
            let mut rng = stream(seed, &[purpose::SPREAD_TRIAL, si as u64, trial as u64]);
            let cfg = SpreadConfig {
                record_trace: false,
                ..params.config
            };
            run_spreading(params.n, params.r, &params.spec, sources[si], &cfg, &mut rng).map(|run| run.completion)
        })
        .collect::<Result<_>>()?;
    let times = flat.chunks(trials).map(|c| c.to_vec()).collect();
    Ok(SpreadingResult::from_times(params.epsilon, trials, sources, times))
}

/// Static cycle `0 - 1 - ... - (n-1) - 0`.
#[derive(Debug, Clone)]
pub struct RingGraph {
    adj: Vec<[usize; 2]>,
    degree: usize,
}

impl RingGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("a ring needs at least 2 nodes"));
        }
        let adj = (0..n)
            .map(|i| {
                let (a, b) = ((i + n - 1) % n, (i + 1) % n);
                if a < b {
                    [a, b]
                } else {
                    [b, a]
                }
            })
            .collect();
        Ok(RingGraph {
            adj,
            degree: if n == 2 { 1 } else { 2 },
        })
    }
}

impl Topology for RingGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, i: usize) -> &[usize] {
        &self.adj[i][..self.degree]
    }

    fn edge_count(&self) -> usize {
        if self.adj.len() == 2 {
            1
        } else {
            self.adj.len()
        }
    }
}

/// Gossip on a fixed topology from `source` until completion.
pub fn run_on_topology<T: Topology + ?Sized, R: Rng + ?Sized>(
    topo: &T,
    source: usize,
    config: &SpreadConfig,
    rng: &mut R,
) -> Result<SpreadRun> {
    let n = topo.node_count();
    let mut informed = InformedSet::single(n, source)?;
    let mut trace = RoundTrace::default();
    if informed.is_complete() {
        return Ok(SpreadRun { completion: Some(0), trace });
    }
    let mut next = informed.clone();
    let mut choice = Vec::with_capacity(n);
    for t in 1..=config.max_slots {
        let rec = round_into(topo, &informed, &mut next, &mut choice, config.exchange, rng);
        std::mem::swap(&mut informed, &mut next);
        if config.record_trace {
            trace.records.push(rec);
        }
        if informed.is_complete() {
            return Ok(SpreadRun { completion: Some(t), trace });
        }
    }
    Ok(SpreadRun { completion: None, trace })
}

/// Ring benchmark. The ring is vertex-transitive, so node 0 is the only source.
pub fn ring_spreading_time(
    n: usize,
    epsilon: f64,
    trials: usize,
    config: &SpreadConfig,
    seed: u64,
) -> Result<SpreadingResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must be in (0, 1), got {epsilon}")));
    }
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let ring = RingGraph::new(n)?;
    let cfg = SpreadConfig {
        record_trace: false,
        ..*config
    };
    let times: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, &[purpose::RING, n as u64, k as u64]);
            run_on_topology(&ring, 0, &cfg, &mut rng).map(|r| r.completion)
        })
        .collect::<Result<_>>()?;
    Ok(SpreadingResult::from_times(epsilon, trials, vec![0], vec![times]))
}
