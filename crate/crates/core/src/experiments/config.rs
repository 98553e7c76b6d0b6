//! Experiment configuration: flat `key=value` files and command-line flags
//! share one parser; flags are applied after the file and win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::gossip::Exchange;
use crate::mobility::{BoundaryRule, MobilityKind, MobilitySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Command {
    Spread,
    Conductance,
    GapSweep,
    Tradeoff,
    Ring,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spread,
        Command::Conductance,
        Command::GapSweep,
        Command::Tradeoff,
        Command::Ring,
        Command::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spread => "spread",
            Command::Conductance => "conductance",
            Command::GapSweep => "gap-sweep",
            Command::Tradeoff => "tradeoff",
            Command::Ring => "ring",
            Command::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| invalid(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutChoice {
    Bisection,
    BruteForce,
}

pub fn parse_model(s: &str) -> Result<MobilityKind> {
    match s {
        "fr" | "fully-random" => Ok(MobilityKind::FullyRandom),
        "vc" | "velocity" => Ok(MobilityKind::VelocityConstrained),
        "pr" | "partially-random" => Ok(MobilityKind::PartiallyRandom),
        "1d" | "one-dimensional" => Ok(MobilityKind::OneDimensional),
        "static" => Ok(MobilityKind::Static),
        other => Err(invalid(format!("unknown model '{other}' (expected fr, vc, pr, 1d or static)"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: Option<MobilityKind>,
    pub n: Option<usize>,
    pub r: Option<f64>,
    pub nr2_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub v_max: Option<f64>,
    pub k: Option<usize>,
    pub n_v: Option<usize>,
    pub n_h: Option<usize>,
    pub boundary: BoundaryRule,
    pub exchange: Exchange,
    pub epsilon: f64,
    pub trials: usize,
    pub sources: usize,
    pub samples: usize,
    /// Moves per sampled state when minimizing over all cuts.
    pub moves: usize,
    pub cut: CutChoice,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub c: f64,
    pub threads: Option<usize>,
    pub max_slots: u64,
    pub search: bool,
    pub search_lower: Option<f64>,
    pub search_upper: Option<f64>,
    pub tolerance: f64,
    pub budget: usize,
    pub reciprocal_gap: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: None,
            n: None,
            r: None,
            nr2_grid: vec![0.05, 0.1, 0.2, 0.4, 1.0, 2.0, 4.0, 8.0],
            n_grid: vec![64, 128, 256, 512],
            v_max: None,
            k: None,
            n_v: None,
            n_h: None,
            boundary: BoundaryRule::Resample,
            exchange: Exchange::PushPull,
            epsilon: 0.01,
            trials: 1000,
            sources: 5,
            samples: 10_000,
            moves: 100,
            cut: CutChoice::Bisection,
            seed: None,
            out: PathBuf::from("runs"),
            c: 1.0,
            threads: None,
            max_slots: 1_000_000,
            search: false,
            search_lower: None,
            search_upper: None,
            tolerance: 0.05,
            budget: 16,
            reciprocal_gap: false,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad value '{value}' for {key}")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s)).collect()
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "" | "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(invalid(format!("bad boolean '{other}' for {key}"))),
    }
}

impl ExperimentConfig {
    /// Apply one `key = value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "model" => self.model = Some(parse_model(v)?),
            "n" => self.n = Some(num(&key, v)?),
            "r" => self.r = Some(num(&key, v)?),
            "nr2-grid" => self.nr2_grid = list(&key, v)?,
            "n-grid" => self.n_grid = list(&key, v)?,
            "vmax" | "v-max" => self.v_max = Some(num(&key, v)?),
            "k" => self.k = Some(num(&key, v)?),
            "nv" | "n-v" => self.n_v = Some(num(&key, v)?),
            "nh" | "n-h" => self.n_h = Some(num(&key, v)?),
            "boundary" => {
                self.boundary = match v {
                    "resample" | "clip" => BoundaryRule::Resample,
                    "reflect" => BoundaryRule::Reflect,
                    other => return Err(invalid(format!("unknown boundary rule '{other}'"))),
                }
            }
            "exchange" => {
                self.exchange = match v {
                    "push-pull" => Exchange::PushPull,
                    "push" => Exchange::Push,
                    other => return Err(invalid(format!("unknown exchange '{other}'"))),
                }
            }
            "eps" | "epsilon" => self.epsilon = num(&key, v)?,
            "trials" => self.trials = num(&key, v)?,
            "sources" => self.sources = num(&key, v)?,
            "samples" => self.samples = num(&key, v)?,
            "moves" => self.moves = num(&key, v)?,
            "cut" => {
                self.cut = match v {
                    "bisection" => CutChoice::Bisection,
                    "brute-force" | "brute_force" => CutChoice::BruteForce,
                    other => return Err(invalid(format!("unknown cut rule '{other}'"))),
                }
            }
            "seed" => self.seed = Some(num(&key, v)?),
            "out" => self.out = PathBuf::from(v),
            "c" => self.c = num(&key, v)?,
            "threads" => self.threads = Some(num(&key, v)?),
            "max-slots" => self.max_slots = num(&key, v)?,
            "search" => self.search = flag(&key, v)?,
            "search-lower" => self.search_lower = Some(num(&key, v)?),
            "search-upper" => self.search_upper = Some(num(&key, v)?),
            "tolerance" => self.tolerance = num(&key, v)?,
            "budget" => self.budget = num(&key, v)?,
            "reciprocal-gap" => self.reciprocal_gap = flag(&key, v)?,
            other => return Err(invalid(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Apply a flat `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| invalid("--seed is required"))
    }

    pub fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| invalid("--n is required"))
    }

    pub fn require_r(&self) -> Result<f64> {
        self.r.ok_or_else(|| invalid("--r is required"))
    }

    pub fn require_model(&self) -> Result<MobilityKind> {
        self.model.ok_or_else(|| invalid("--model is required"))
    }

    /// Mobility spec for `n` nodes from the model and its parameters.
    pub fn mobility_spec(&self, n: usize) -> Result<MobilitySpec> {
        let spec = match self.require_model()? {
            MobilityKind::FullyRandom => MobilitySpec::FullyRandom,
            MobilityKind::Static => MobilitySpec::Static,
            MobilityKind::VelocityConstrained => MobilitySpec::VelocityConstrained {
                v_max: self.v_max.ok_or_else(|| invalid("--model vc requires --vmax"))?,
                boundary: self.boundary,
            },
            MobilityKind::PartiallyRandom => MobilitySpec::PartiallyRandom {
                mobile: self.k.ok_or_else(|| invalid("--model pr requires --k"))?,
            },
            MobilityKind::OneDimensional => {
                let (v, h) = match (self.n_v, self.n_h) {
                    (Some(v), Some(h)) => (v, h),
                    (Some(v), None) => (v, n.saturating_sub(v)),
                    (None, Some(h)) => (n.saturating_sub(h), h),
                    (None, None) => return Err(invalid("--model 1d requires --nv or --nh")),
                };
                MobilitySpec::OneDimensional {
                    vertical: v,
                    horizontal: h,
                }
            }
        };
        spec.validate(n)?;
        Ok(spec)
    }

    /// Validate everything `command` will use before any run starts.
    pub fn validate(&self, command: Command) -> Result<()> {
        self.seed()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("--eps must be in (0, 1), got {}", self.epsilon)));
        }
        if self.trials == 0 || self.sources == 0 {
            return Err(invalid("--trials and --sources must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("--threads must be positive"));
        }
        let check_r = |r: f64| {
            if r.is_finite() && r > 0.0 && r <= std::f64::consts::SQRT_2 {
                Ok(())
            } else {
                Err(invalid(format!("--r must be in (0, sqrt 2], got {r}")))
            }
        };
        match command {
            Command::Spread | Command::Conductance => {
                let n = self.require_n()?;
                if n == 0 {
                    return Err(invalid("--n must be positive"));
                }
                check_r(self.require_r()?)?;
                self.mobility_spec(n)?;
                if command == Command::Conductance {
                    if n < 2 {
                        return Err(invalid("conductance needs n >= 2"));
                    }
                    if self.samples < 100 {
                        return Err(invalid("--samples must be at least 100"));
                    }
                    if self.moves == 0 {
                        return Err(invalid("--moves must be positive"));
                    }
                    if self.cut == CutChoice::BruteForce && n > crate::conductance::BRUTE_FORCE_MAX_NODES {
                        return Err(invalid(format!(
                            "brute-force cuts are limited to n <= {}, got {n}",
                            crate::conductance::BRUTE_FORCE_MAX_NODES
                        )));
                    }
                }
            }
            Command::GapSweep => {
                let n = self.n.unwrap_or(500);
                if n < 2 {
                    return Err(invalid("--n must be at least 2"));
                }
                if self.nr2_grid.is_empty() || self.nr2_grid.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return Err(invalid("--nr2-grid must be a non-empty list of positive values"));
                }
                for &v in &self.nr2_grid {
                    check_r((v / n as f64).sqrt())?;
                }
                if self.model.is_some() {
                    self.mobility_spec(n)?;
                }
            }
            Command::Tradeoff => {
                let n = self.require_n()?;
                check_r(self.require_r()?)?;
                match self.require_model()? {
                    MobilityKind::VelocityConstrained | MobilityKind::PartiallyRandom | MobilityKind::OneDimensional => {}
                    other => {
                        return Err(invalid(format!(
                            "tradeoff needs --model vc, pr or 1d, got {}",
                            other.short_name()
                        )))
                    }
                }
                if n < 2 {
                    return Err(invalid("--n must be at least 2"));
                }
                if !(self.c > 0.0) {
                    return Err(invalid("--c must be positive"));
                }
                if self.search && self.budget < 2 {
                    return Err(invalid("--budget must be at least 2"));
                }
            }
            Command::Ring => {
                if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n < 2) {
                    return Err(invalid("--n-grid must list ring sizes >= 2"));
                }
            }
            Command::OracleCheck => {}
        }
        Ok(())
    }
}
