//! Mobility-connectivity tradeoff: how much mobility a sparse network needs
//! before move-and-gossip matches the static ring benchmark.
//!
//! All three analytic thresholds share the form `c / (n r)^2`, with `c` the
//! unknown order constant (default 1). The empirical search measures the
//! actual crossing against a measured ring spreading time.

use serde::Serialize;

use crate::conductance::SPARSE_LIMIT;
use crate::error::{invalid, Error, Result};
use crate::gossip::{spreading_time, Exchange, SpreadConfig, SpreadingParams};
use crate::mobility::{MobilityKind, MobilitySpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdQuery {
    pub n: usize,
    pub r: f64,
    pub c: f64,
}

impl ThresholdQuery {
    pub fn new(n: usize, r: f64, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if !r.is_finite() || r <= 0.0 {
            return Err(invalid(format!("radius must be positive, got {r}")));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(invalid(format!("order constant must be positive, got {c}")));
        }
        Ok(ThresholdQuery { n, r, c })
    }

    pub fn nr2(&self) -> f64 {
        self.n as f64 * self.r * self.r
    }

    /// The thresholds are derived for disconnected networks only.
    pub fn sparse_warning(&self) -> bool {
        self.nr2() >= SPARSE_LIMIT
    }

    fn base_value(&self) -> f64 {
        let nr = self.n as f64 * self.r;
        self.c / (nr * nr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticThreshold {
    pub kind: MobilityKind,
    pub query: ThresholdQuery,
    /// `c / (n r)^2`: v_max, k/n or n_V n_H / n^2 depending on `kind`.
    pub value: f64,
    pub feasible: bool,
    pub sparse_warning: bool,
    /// Real root of the necessary condition (`k` or `min(n_V, n_H)`).
    pub root: Option<f64>,
    /// Smallest integer satisfying the necessary condition.
    pub minimal_count: Option<usize>,
    pub notes: Vec<String>,
}

/// Velocity needed for the sparse velocity-constrained network to match the
/// ring. Infeasible when it would exceed 1 or when `r <= 1/n`.
pub fn velocity_threshold(n: usize, r: f64, c: f64) -> Result<AnalyticThreshold> {
    let q = ThresholdQuery::new(n, r, c)?;
    let value = q.base_value();
    let feasible = value < 1.0 && n as f64 * r > 1.0;
    let mut notes = Vec::new();
    if n as f64 * r <= 1.0 {
        notes.push("r <= 1/n: even fully random mobility cannot reach ring-level spreading".to_string());
    }
    Ok(AnalyticThreshold {
        kind: MobilityKind::VelocityConstrained,
        query: q,
        value,
        feasible,
        sparse_warning: q.sparse_warning(),
        root: None,
        minimal_count: None,
        notes,
    })
}

/// Smallest integer `x` in `[0, upper]` with `f(x) >= c`, for `f` increasing there.
fn minimal_integer(root: f64, upper: usize, f: impl Fn(f64) -> f64, c: f64) -> usize {
    let mut k = root.ceil().clamp(0.0, upper as f64) as usize;
    while k > 0 && f((k - 1) as f64) >= c {
        k -= 1;
    }
    while k < upper && f(k as f64) < c {
        k += 1;
    }
    k
}

/// Mobility ratio `k/n` for partially random mobility, with the exact
/// smallest `k` satisfying `k (2n - k) r^2 >= c`.
pub fn mobility_ratio_threshold(n: usize, r: f64, c: f64) -> Result<AnalyticThreshold> {
    let q = ThresholdQuery::new(n, r, c)?;
    let nf = n as f64;
    let r2 = r * r;
    let cond = |k: f64| k * (2.0 * nf - k) * r2;
    let disc = nf * nf - c / r2;
    let (root, minimal_count, feasible) = if disc < 0.0 {
        (None, None, false)
    } else {
        let root = nf - disc.sqrt();
        (Some(root), Some(minimal_integer(root, n, cond, c)), true)
    };
    let mut notes = Vec::new();
    if let Some(k) = minimal_count {
        if k as f64 / nf > 0.1 {
            notes.push("k/n is not small; the network is effectively fully random".to_string());
        }
    }
    Ok(AnalyticThreshold {
        kind: MobilityKind::PartiallyRandom,
        query: q,
        value: q.base_value(),
        feasible,
        sparse_warning: q.sparse_warning(),
        root,
        minimal_count,
        notes,
    })
}

/// Mobility balance `n_V n_H / n^2` for one-dimensional mobility, with the
/// smallest minority side satisfying `n_V n_H r^2 >= c`.
pub fn mobility_balance_threshold(n: usize, r: f64, c: f64) -> Result<AnalyticThreshold> {
    let q = ThresholdQuery::new(n, r, c)?;
    let nf = n as f64;
    let r2 = r * r;
    let half = n / 2;
    let cond = |a: f64| a * (nf - a) * r2;
    let feasible = cond(half as f64) >= c;
    let (root, minimal_count) = if feasible {
        let root = nf / 2.0 - (nf * nf / 4.0 - c / r2).max(0.0).sqrt();
        (Some(root), Some(minimal_integer(root, half, cond, c)))
    } else {
        (None, None)
    };
    let mut notes = Vec::new();
    if q.nr2() < 1.0 {
        notes.push("r = o(1/sqrt(n)): both n_V and n_H must grow with n".to_string());
    }
    Ok(AnalyticThreshold {
        kind: MobilityKind::OneDimensional,
        query: q,
        value: q.base_value(),
        feasible,
        sparse_warning: q.sparse_warning(),
        root,
        minimal_count,
        notes,
    })
}

pub fn analytic_threshold(kind: MobilityKind, n: usize, r: f64, c: f64) -> Result<AnalyticThreshold> {
    match kind {
        MobilityKind::VelocityConstrained => velocity_threshold(n, r, c),
        MobilityKind::PartiallyRandom => mobility_ratio_threshold(n, r, c),
        MobilityKind::OneDimensional => mobility_balance_threshold(n, r, c),
        other => Err(invalid(format!(
            "no mobility threshold for {}",
            other.short_name()
        ))),
    }
}

/// Mobility spec whose intensity is `intensity`: `v_max`, `k/n` (rounded) or
/// `n_V n_H / n^2` (rounded `n_V`).
pub fn spec_for_intensity(kind: MobilityKind, n: usize, intensity: f64) -> Result<MobilitySpec> {
    match kind {
        MobilityKind::VelocityConstrained => {
            let spec = MobilitySpec::velocity(intensity);
            spec.validate(n)?;
            Ok(spec)
        }
        MobilityKind::PartiallyRandom => {
            if !(0.0..=1.0).contains(&intensity) {
                return Err(invalid(format!("mobility ratio must be in [0, 1], got {intensity}")));
            }
            Ok(MobilitySpec::PartiallyRandom {
                mobile: (intensity * n as f64).round() as usize,
            })
        }
        MobilityKind::OneDimensional => {
            if !(0.0..=0.25).contains(&intensity) {
                return Err(invalid(format!("mobility balance must be in [0, 1/4], got {intensity}")));
            }
            let vertical = ((n as f64) * (1.0 - (1.0 - 4.0 * intensity).sqrt()) / 2.0).round() as usize;
            Ok(MobilitySpec::OneDimensional {
                vertical,
                horizontal: n - vertical,
            })
        }
        other => Err(invalid(format!("no intensity knob for {}", other.short_name()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchParams {
    pub kind: MobilityKind,
    pub n: usize,
    pub r: f64,
    /// Spreading time to beat, normally the measured ring benchmark.
    pub target: u64,
    pub lower: f64,
    pub upper: f64,
    /// Stop once `(hi - lo) / hi` is at most this.
    pub tolerance: f64,
    /// Maximum number of probes, endpoints included.
    pub budget: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub sources_sampled: usize,
    pub exchange: Exchange,
    pub max_slots: u64,
    /// Allowed relative violation of monotonicity between probes.
    pub monotone_slack: f64,
}

impl SearchParams {
    pub fn new(kind: MobilityKind, n: usize, r: f64, target: u64, lower: f64, upper: f64) -> Self {
        SearchParams {
            kind,
            n,
            r,
            target,
            lower,
            upper,
            tolerance: 0.05,
            budget: 16,
            epsilon: 0.01,
            trials: 1000,
            sources_sampled: 1,
            exchange: Exchange::PushPull,
            max_slots: target.saturating_mul(4).max(16),
            monotone_slack: 0.15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub intensity: f64,
    pub t_spr: Option<u64>,
}

impl Probe {
    pub fn beats(&self, target: u64) -> bool {
        matches!(self.t_spr, Some(t) if t <= target)
    }

    fn time(&self) -> f64 {
        self.t_spr.map_or(f64::INFINITY, |t| t as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalThreshold {
    /// Smallest probed intensity that met the target.
    pub intensity: f64,
    /// Largest probed intensity that missed it.
    pub below: f64,
    pub target: u64,
    /// Every probe, sorted by intensity.
    pub trace: Vec<Probe>,
    pub converged: bool,
}

/// Bisection over mobility intensity for the point where the spreading time
/// first drops to `target`. Every probe reuses the same seed, so neighboring
/// probes share random numbers.
pub fn empirical_threshold_search(params: &SearchParams, seed: u64) -> Result<EmpiricalThreshold> {
    if !(params.lower >= 0.0 && params.lower < params.upper) {
        return Err(invalid(format!(
            "need 0 <= lower < upper, got [{}, {}]",
            params.lower, params.upper
        )));
    }
    if params.budget < 2 {
        return Err(invalid("search budget must allow both endpoints"));
    }
    let probe = |intensity: f64| -> Result<Probe> {
        let spec = spec_for_intensity(params.kind, params.n, intensity)?;
        let sp = SpreadingParams {
            n: params.n,
            r: params.r,
            spec,
            epsilon: params.epsilon,
            trials: params.trials,
            sources_sampled: params.sources_sampled,
            config: SpreadConfig {
                exchange: params.exchange,
                max_slots: params.max_slots,
                record_trace: false,
            },
        };
        Ok(Probe {
            intensity,
            t_spr: spreading_time(&sp, seed)?.t_spr,
        })
    };

    let mut trace = Vec::new();
    let mut hi = probe(params.upper)?;
    trace.push(hi);
    let no_crossing = |lo: &Probe, hi: &Probe| Error::NoCrossing {
        lo: lo.intensity,
        hi: hi.intensity,
        lo_time: lo.t_spr,
        hi_time: hi.t_spr,
        target: params.target,
    };
    if !hi.beats(params.target) {
        let lo = Probe {
            intensity: params.lower,
            t_spr: None,
        };
        return Err(no_crossing(&lo, &hi));
    }
    let mut lo = probe(params.lower)?;
    trace.push(lo);
    if lo.beats(params.target) {
        return Err(no_crossing(&lo, &hi));
    }

    let same_spec = |a: f64, b: f64| -> Result<bool> {
        Ok(spec_for_intensity(params.kind, params.n, a)? == spec_for_intensity(params.kind, params.n, b)?)
    };
    let mut converged = false;
    while trace.len() < params.budget {
        if (hi.intensity - lo.intensity) / hi.intensity <= params.tolerance {
            converged = true;
            break;
        }
        let mid = if lo.intensity > 0.0 {
            (lo.intensity * hi.intensity).sqrt()
        } else {
            0.5 * (lo.intensity + hi.intensity)
        };
        if same_spec(mid, lo.intensity)? || same_spec(mid, hi.intensity)? {
            // integer resolution of k or n_V reached
            converged = true;
            break;
        }
        let p = probe(mid)?;
        trace.push(p);
        let slack = 1.0 + params.monotone_slack;
        if p.time() > lo.time() * slack || p.time() * slack < hi.time() {
            return Err(Error::NonMonotone(format!(
                "t_spr({}) = {:?} outside [{:?}, {:?}] of bracket [{}, {}]",
                p.intensity, p.t_spr, hi.t_spr, lo.t_spr, lo.intensity, hi.intensity
            )));
        }
        if p.beats(params.target) {
            hi = p;
        } else {
            lo = p;
        }
    }
    if !converged && (hi.intensity - lo.intensity) / hi.intensity <= params.tolerance {
        converged = true;
    }
    trace.sort_by(|a, b| a.intensity.total_cmp(&b.intensity));
    Ok(EmpiricalThreshold {
        intensity: hi.intensity,
        below: lo.intensity,
        target: params.target,
        trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_scaling_and_feasibility() {
        let a = velocity_threshold(1000, 0.01, 1.0).unwrap();
        let b = velocity_threshold(2000, 0.01, 1.0).unwrap();
        assert!((a.value / b.value - 4.0).abs() < 1e-12);
        let edge = velocity_threshold(1000, 0.001, 1.0).unwrap();
        assert!((edge.value - 1.0).abs() < 1e-12);
        assert!(!edge.feasible);
        let v = velocity_threshold(10_000, 1e-3, 1.0).unwrap();
        assert!((v.value - 1e-2).abs() < 1e-15);
        assert!(v.feasible);
    }

    #[test]
    fn ratio_threshold_example() {
        let t = mobility_ratio_threshold(1000, 0.01, 1.0).unwrap();
        let k = t.minimal_count.unwrap();
        let root = t.root.unwrap();
        assert!((root - 5.0126).abs() < 1e-3, "{root}");
        assert_eq!(k, 6);
        assert!((root / 1000.0 - 0.005).abs() < 1e-4);
        assert!((t.value - 0.01).abs() < 1e-15);
        assert!(t.value > 1.0 / 1000.0);
    }

    #[test]
    fn ratio_minimality() {
        for (n, r, c) in [(1000, 0.01, 1.0), (500, 0.004, 0.7), (300, 0.02, 2.0), (64, 0.05, 1.0)] {
            let t = mobility_ratio_threshold(n, r, c).unwrap();
            let Some(k) = t.minimal_count else { continue };
            let f = |k: usize| (k * (2 * n - k)) as f64 * r * r;
            assert!(f(k) >= c);
            assert!(k == 0 || f(k - 1) < c);
        }
        assert!(!mobility_ratio_threshold(10, 0.01, 1.0).unwrap().feasible);
    }

    #[test]
    fn balance_threshold_example() {
        let t = mobility_balance_threshold(1000, 0.01, 1.0).unwrap();
        assert_eq!(t.minimal_count, Some(11));
        assert!(t.feasible);
        assert!(!mobility_balance_threshold(10, 0.01, 1.0).unwrap().feasible);
    }

    #[test]
    fn three_thresholds_agree() {
        for (n, r, c) in [(300, 0.01, 1.0), (1000, 0.002, 3.0)] {
            let v = velocity_threshold(n, r, c).unwrap().value;
            let k = mobility_ratio_threshold(n, r, c).unwrap().value;
            let b = mobility_balance_threshold(n, r, c).unwrap().value;
            assert_eq!(v, k);
            assert_eq!(k, b);
        }
    }

    #[test]
    fn intensity_specs() {
        assert_eq!(
            spec_for_intensity(MobilityKind::PartiallyRandom, 100, 0.25).unwrap(),
            MobilitySpec::PartiallyRandom { mobile: 25 }
        );
        assert_eq!(
            spec_for_intensity(MobilityKind::OneDimensional, 100, 0.25).unwrap(),
            MobilitySpec::OneDimensional { vertical: 50, horizontal: 50 }
        );
        assert_eq!(
            spec_for_intensity(MobilityKind::OneDimensional, 100, 0.0).unwrap(),
            MobilitySpec::OneDimensional { vertical: 0, horizontal: 100 }
        );
        assert!(spec_for_intensity(MobilityKind::FullyRandom, 100, 0.5).is_err());
        assert!(spec_for_intensity(MobilityKind::OneDimensional, 100, 0.3).is_err());
    }

    #[test]
    fn unreachable_target_is_a_bracketing_failure() {
        let mut p = SearchParams::new(MobilityKind::VelocityConstrained, 60, 0.01, 1, 0.1, 1.0);
        p.trials = 20;
        match empirical_threshold_search(&p, 3) {
            Err(Error::NoCrossing { hi, hi_time, .. }) => {
                assert_eq!(hi, 1.0);
                assert!(hi_time.map_or(true, |t| t > 1));
            }
            other => panic!("expected bracketing failure, got {other:?}"),
        }
    }
}
