use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mobicond::experiments::{run_command, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mobicond", version, about = "Gossip spreading and mobile conductance experiments")]
struct Cli {
    /// Master seed; every run is a pure function of config and seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; each run writes to <out>/<command>-<seed>/.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Epsilon-spreading time of one network.
    Spread(Flags),
    /// Monte Carlo mobile conductance, with the closed form for fr.
    Conductance(Flags),
    /// Gap between sparse and connected spreading over an nr^2 grid.
    GapSweep(Flags),
    /// Mobility thresholds for matching the ring benchmark.
    Tradeoff(Flags),
    /// Ring-graph spreading times over an n grid.
    Ring(Flags),
    /// Self-check of the conductance machinery.
    OracleCheck(Flags),
}

#[derive(Args)]
struct Flags {
    /// fr, vc, pr, 1d or static
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    r: Option<String>,
    /// Comma-separated nr^2 values (gap-sweep)
    #[arg(long)]
    nr2_grid: Option<String>,
    /// Comma-separated ring sizes (ring)
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    /// Number of mobile nodes (pr)
    #[arg(long)]
    k: Option<String>,
    /// Vertically moving nodes (1d)
    #[arg(long)]
    nv: Option<String>,
    /// Horizontally moving nodes (1d)
    #[arg(long)]
    nh: Option<String>,
    /// resample or reflect (vc)
    #[arg(long)]
    boundary: Option<String>,
    /// push-pull or push
    #[arg(long)]
    exchange: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    sources: Option<String>,
    /// Monte Carlo samples (conductance)
    #[arg(long)]
    samples: Option<String>,
    /// Moves per sampled state when screening cuts (brute-force)
    #[arg(long)]
    moves: Option<String>,
    /// bisection or brute-force
    #[arg(long)]
    cut: Option<String>,
    /// Order constant of the thresholds (tradeoff)
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    max_slots: Option<String>,
    /// Also search for the empirical threshold (tradeoff)
    #[arg(long)]
    search: bool,
    #[arg(long)]
    search_lower: Option<String>,
    #[arg(long)]
    search_upper: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    /// Report t_spr / t_ref instead of t_ref / t_spr
    #[arg(long)]
    reciprocal_gap: bool,
}

impl Flags {
    fn settings(&self) -> Vec<(&'static str, &str)> {
        let mut out: Vec<(&'static str, &str)> = [
            ("model", &self.model),
            ("n", &self.n),
            ("r", &self.r),
            ("nr2-grid", &self.nr2_grid),
            ("n-grid", &self.n_grid),
            ("vmax", &self.vmax),
            ("k", &self.k),
            ("nv", &self.nv),
            ("nh", &self.nh),
            ("boundary", &self.boundary),
            ("exchange", &self.exchange),
            ("eps", &self.eps),
            ("trials", &self.trials),
            ("sources", &self.sources),
            ("samples", &self.samples),
            ("moves", &self.moves),
            ("cut", &self.cut),
            ("c", &self.c),
            ("max-slots", &self.max_slots),
            ("search-lower", &self.search_lower),
            ("search-upper", &self.search_upper),
            ("tolerance", &self.tolerance),
            ("budget", &self.budget),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect();
        if self.search {
            out.push(("search", "true"));
        }
        if self.reciprocal_gap {
            out.push(("reciprocal-gap", "true"));
        }
        out
    }
}

fn build_config(cli: &Cli, flags: &Flags) -> mobicond::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file_text(&std::fs::read_to_string(path)?)?;
    }
    for (k, v) in flags.settings() {
        cfg.set(k, v)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::Spread(f) => (Command::Spread, f),
        Cmd::Conductance(f) => (Command::Conductance, f),
        Cmd::GapSweep(f) => (Command::GapSweep, f),
        Cmd::Tradeoff(f) => (Command::Tradeoff, f),
        Cmd::Ring(f) => (Command::Ring, f),
        Cmd::OracleCheck(f) => (Command::OracleCheck, f),
    };
    let cfg = match build_config(&cli, flags).and_then(|cfg| cfg.validate(command).map(|_| cfg)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run_command(command, &cfg) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            println!("wrote {}", summary.dir.display());
            if summary.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
