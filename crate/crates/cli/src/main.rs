//! `harvestlab`: point evaluation, grid sweeps, region maps and strategy
//! comparison for entanglement harvesting between accelerated detectors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harvestlab::quadrature::{QuadConfig, Strategy};

#[derive(Parser)]
#[command(name = "harvestlab", version, about = "Entanglement harvesting between parallel accelerated detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E, X and the negativity at one parameter point.
    Point(PointArgs),
    /// Sweep a (c1, c2, c3) grid into a CSV record file.
    Sweep(SweepArgs),
    /// Extract entanglement regions for c3 slices and draw them as SVG.
    Region(RegionArgs),
    /// Compare two record files point by point.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Global,
    Local,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Global => Strategy::GlobalAdaptive,
            StrategyArg::Local => Strategy::LocalAdaptive,
        }
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Refinement strategy.
    #[arg(long, value_enum, default_value = "global")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Maximum number of subregions per integral.
    #[arg(long, default_value_t = 100_000)]
    max_regions: usize,
}

impl QuadArgs {
    fn config(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_regions: self.max_regions,
            strategy: self.strategy.into(),
        }
    }
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c3: Option<f64>,
    /// Coupling amplitude; enters only as the overall factor eta0².
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eta0: f64,
    /// Proper acceleration (physical input, with --separation, --omega, --sigma).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["c1", "c2", "c3"])]
    kappa: Option<f64>,
    /// Detector separation L.
    #[arg(long, alias = "L", allow_negative_numbers = true)]
    separation: Option<f64>,
    /// Energy gap.
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Switching width.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    /// Print a single-line JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.025)]
    c1_start: f64,
    #[arg(long, default_value_t = 6.0)]
    c1_stop: f64,
    #[arg(long, default_value_t = 0.025)]
    c1_step: f64,
    #[arg(long, default_value_t = 0.025)]
    c2_start: f64,
    #[arg(long, default_value_t = 3.0)]
    c2_stop: f64,
    #[arg(long, default_value_t = 0.025)]
    c2_step: f64,
    #[arg(long, default_value_t = 0.125)]
    c3_start: f64,
    #[arg(long, default_value_t = 5.0)]
    c3_stop: f64,
    #[arg(long, default_value_t = 0.125)]
    c3_step: f64,
    /// Keep every N-th value of each axis (N = 10 turns the default grid into 24×12×4).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    coarse: Option<u32>,
    /// Restrict the sweep to a single c3 value.
    #[arg(long)]
    c3_only: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    /// Worker threads [default: available cores].
    #[arg(long, env = "HARVESTLAB_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Record file.
    #[arg(long)]
    out: PathBuf,
    /// Append only the points missing from an existing record file.
    #[arg(long)]
    resume: bool,
    /// Write wall_ns = 0 so repeated runs produce identical files.
    #[arg(long)]
    no_timing: bool,
    /// Stop after this many points.
    #[arg(long)]
    max_points: Option<usize>,
    /// Re-run unconverged points once with 4× the region budget.
    #[arg(long)]
    retry_unconverged: bool,
}

#[derive(Args)]
struct RegionArgs {
    /// Sweep record file.
    #[arg(long)]
    records: PathBuf,
    /// Slices to extract [default: 0.5 1.5 2.5 3.5 4.5].
    #[arg(long, num_args = 1..)]
    c3: Vec<f64>,
    /// Directory for region_c3_<c3>.csv and .svg.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Explicit region CSV path (single slice only).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Explicit SVG path (single slice only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Pixels per grid cell.
    #[arg(long, default_value_t = 4)]
    cell_px: u32,
    #[arg(long, default_value = "#2ca02c")]
    sp_color: String,
    #[arg(long, default_value = "#1f77b4")]
    numeric_color: String,
    #[arg(long, default_value_t = 0.6)]
    overlay_alpha: f64,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(args) => commands::point(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Region(args) => commands::region(args),
        Command::Compare(args) => commands::compare(args),
    };
    match result {
        Ok(code) => code.into(),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code.into()
        }
    }
}
