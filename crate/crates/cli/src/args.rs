use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use misobc_core::capacity::{PowerGrid, DEFAULT_SAMPLES, DEFAULT_WORKERS};

#[derive(Parser, Debug)]
#[command(
    name = "misobc",
    version,
    about = "Capacity bounds and scheme simulation for the two-user MISO broadcast channel with delayed CSIT"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep C21 or C22(D) over transmit powers.
    Capacity(CapacityArgs),
    /// Compare the quantization rate R_Q(D) with C21.
    Rq(RqArgs),
    /// Outer-bound and achievable-region vertices.
    Region(RegionArgs),
    /// Per-user gap between the outer bound and the achievable region.
    Gap(GapArgs),
    /// Simulate the three-phase transmission over n blocks.
    Simulate(SimulateArgs),
    /// Rate-distortion rates.
    Rd(RdArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn parse_grid(s: &str) -> Result<PowerGrid, String> {
    s.parse().map_err(|e: misobc_core::Error| e.to_string())
}

/// Comma-separated numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl std::str::FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("invalid number '{x}': {e}")))
            .collect::<Result<_, _>>()
            .map(NumList)
    }
}

/// Flags every subcommand accepts.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,

    /// Base seed, decimal or 0x-prefixed hex.
    #[arg(long, env = "MISOBC_SEED", default_value = "0xC517", value_parser = parse_seed)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = DEFAULT_WORKERS)]
    pub workers: usize,
}

/// Transmit powers: repeated `--power` values or a `--grid` spec; the
/// default 50-point grid over [1e-2, 1e4] otherwise.
#[derive(Args, Debug, Clone)]
pub struct Powers {
    /// Transmit power P (repeatable, increasing).
    #[arg(long = "power", conflicts_with = "grid")]
    pub power: Vec<f64>,

    /// `low:high:count` (log-spaced) or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<PowerGrid>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    C21,
    C22d,
    Rq,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[arg(long, value_enum, default_value_t = Quantity::C21)]
    pub quantity: Quantity,
    #[arg(long, default_value_t = 4.0)]
    pub distortion: f64,
    #[command(flatten)]
    pub powers: Powers,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RqArgs {
    #[arg(long, default_value_t = 4.0)]
    pub distortion: f64,
    /// Exit with status 4 unless R_Q/C21 <= 1 + 3 stderr at every power.
    #[arg(long)]
    pub assert_le_one: bool,
    #[command(flatten)]
    pub powers: Powers,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    /// Power at which C21 and C22(D) are estimated.
    #[arg(long, required_unless_present_all = ["c21", "c22d"])]
    pub power: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub distortion: f64,
    /// Use this C21 value instead of estimating it.
    #[arg(long)]
    pub c21: Option<f64>,
    /// Use this C22(D) value instead of estimating it.
    #[arg(long)]
    pub c22d: Option<f64>,
    /// Write outer_vertices.csv, achievable_vertices.csv and corners.csv here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[arg(long, default_value_t = 4.0)]
    pub distortion: f64,
    /// Exit with status 4 unless every gap is within 1.81 + 3 stderr.
    #[arg(long)]
    pub assert_theorem: bool,
    /// Allow distortions below 4, where the achievable region is not certified.
    #[arg(long)]
    pub allow_any_distortion: bool,
    #[command(flatten)]
    pub powers: Powers,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Blocks (and symbols per phase).
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0)]
    pub power: f64,
    #[arg(long, default_value_t = 4.0)]
    pub distortion: f64,
    /// Message-rate back-off below C22(D).
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Phase-3 margin below C21.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Exit with status 4 if the noise or correlation checks fail.
    #[arg(long)]
    pub assert_stats: bool,
    /// Write a binary transcript dump to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdMode {
    Waterfill,
    Suboptimal,
    Wyner,
}

#[derive(Args, Debug)]
pub struct RdArgs {
    #[arg(long, value_enum)]
    pub mode: RdMode,
    /// Distortion budget D.
    #[arg(long)]
    pub budget: f64,
    /// A single source variance (waterfill / suboptimal).
    #[arg(long, conflicts_with = "sigma2")]
    pub const_sigma2: Option<f64>,
    /// Comma-separated source variance samples (waterfill / suboptimal).
    #[arg(long)]
    pub sigma2: Option<NumList>,
    /// Source variance (wyner).
    #[arg(long, default_value_t = 1.0)]
    pub sigx2: f64,
    /// Side-information noise variance (wyner).
    #[arg(long, default_value_t = 1.0)]
    pub sigu2: f64,
    /// Constant side-information gain (wyner).
    #[arg(long, group = "gain")]
    pub gain_const: Option<f64>,
    /// Uniform gain `low,high` (wyner).
    #[arg(long, group = "gain")]
    pub gain_uniform: Option<NumList>,
    /// Normal gain `mean,std` (wyner).
    #[arg(long, group = "gain")]
    pub gain_normal: Option<NumList>,
    /// Rayleigh gain with this scale (wyner).
    #[arg(long, group = "gain")]
    pub gain_rayleigh: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}
