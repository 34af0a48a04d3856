use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mepcut::mep::AnnealConfig;
use mepcut::{Error, LambdaMode};

mod commands;

/// Minimum multiway k-cut by maximum-entropy deterministic annealing.
#[derive(Parser, Debug)]
#[command(name = "mepcut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Anneal one graph and print its partition as JSON.
    Solve(SolveArgs),
    /// Compare the annealer with the isolating-cut heuristic and the exact optimum.
    Compare(CompareArgs),
    /// Simulate a graph with controlled edge dynamics.
    Dynamic(DynamicArgs),
    /// Foreground/background segmentation inside a bounding box.
    Segment(SegmentArgs),
    /// Time full anneals and single sweeps on random dense graphs.
    Bench(BenchArgs),
    /// Write generated instances.
    Gen(GenArgs),
}

/// Annealing schedule and solver settings shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Initial inverse temperature.
    #[arg(long, default_value_t = 0.01)]
    pub beta_min: f64,
    /// Final inverse temperature.
    #[arg(long, default_value_t = 40.0)]
    pub beta_max: f64,
    /// Geometric growth of beta [default: (beta_max / beta_min)^(1/10)].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Inner-loop tolerance on the largest association change.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Inner-loop sweep cap per temperature.
    #[arg(long, default_value_t = 500)]
    pub max_inner: usize,
    /// Diagonal shift: `spectral`, `auto`, or a non-negative number.
    #[arg(long, default_value = "spectral", value_parser = parse_lambda)]
    pub lambda: LambdaMode,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn config(&self) -> mepcut::Result<AnnealConfig> {
        let cfg = AnnealConfig {
            beta_min: self.beta_min,
            beta_max: self.beta_max,
            gamma: self.gamma,
            inner_tol: self.tol,
            max_inner_iters: self.max_inner,
            lambda: self.lambda,
            ..AnnealConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_lambda(s: &str) -> Result<LambdaMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Graph file: whitespace text (1-based ids) or JSON.
    pub graph: PathBuf,
    /// Enumerate every assignment instead of annealing.
    #[arg(long)]
    pub exact: bool,
    /// Largest enumeration allowed with --exact.
    #[arg(long, default_value_t = mepcut::baselines::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Directory for partition.json and trace.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Graph files to include.
    #[arg(long = "graph")]
    pub graphs: Vec<PathBuf>,
    /// Pendant-cycle instances with this many terminals.
    #[arg(long = "pendant")]
    pub pendants: Vec<usize>,
    /// Pendant edge weight for --pendant.
    #[arg(long, default_value_t = 1.98)]
    pub pendant_weight: f64,
    /// Number of seeded random instances.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 5)]
    pub n_min: usize,
    #[arg(long, default_value_t = 9)]
    pub n_max: usize,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    /// Edge probability for random instances.
    #[arg(long, default_value_t = 0.35)]
    pub edge_prob: f64,
    /// Largest enumeration for the exact column; bigger instances leave it blank.
    #[arg(long, default_value_t = mepcut::baselines::DEFAULT_BUDGET)]
    pub budget: u64,
    /// CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicMode {
    Controlled,
    FrameByFrame,
    Both,
}

#[derive(Args, Debug)]
pub struct DynamicArgs {
    /// System JSON [default: the built-in four-vertex example].
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DynamicMode::Both)]
    pub mode: DynamicMode,
    /// Frame interval of the frame-by-frame baseline.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Override the integration step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Override the horizon.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Directory for controlled.csv and frames.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentSolverArg {
    Mep,
    Maxflow,
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    /// PPM or PGM image.
    #[arg(long)]
    pub image: PathBuf,
    /// Bounding box `x,y,w,h` in pixels.
    #[arg(long)]
    pub bbox: String,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = SegmentSolverArg::Mep)]
    pub solver: SegmentSolverArg,
    /// Color scale of the edge weights, with channels in [0, 1].
    #[arg(long, default_value_t = mepcut::segmentation::DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Output mask (PGM, bounding-box sized).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver_args: SolverArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Fraction of all vertex pairs joined by an edge.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Cycle of unit edges with one pendant terminal per cycle vertex.
    Pendant {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1.98)]
        weight: f64,
        /// Write JSON instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random graph with random terminals.
    Random {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.35)]
        edge_prob: f64,
        /// Integer weights in 1..=max-weight; unit weights when absent.
        #[arg(long)]
        max_weight: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noisy disk image; prints its bounding box.
    Disk {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground-truth mask over the bounding box.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// The built-in four-vertex dynamic system as JSON.
    System {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Compare(a) => commands::compare(a),
        Command::Dynamic(a) => commands::dynamic(a),
        Command::Segment(a) => commands::segment(a),
        Command::Bench(a) => commands::bench(a),
        Command::Gen(a) => commands::gen(&a.kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // 2: bad input or parameters, 3: budget or infeasible, 4: numeric failure
        Err(f) => {
            eprintln!("error: {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
