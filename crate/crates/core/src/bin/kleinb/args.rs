use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinb::filter::{Branch, ANOMALOUS_G};
use kleinb::Spin;

#[derive(Debug, Parser)]
#[command(
    name = "kleinb",
    version,
    about = "Dirac electrons on a potential step in a parallel magnetic field"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitudes and current budget at one parameter point, as JSON.
    Amps(AmpsArgs),
    /// Amplitudes along one parameter axis, as CSV.
    Sweep(SweepArgs),
    /// Regime label on an (E, V0) grid, as CSV.
    RegimeMap(RegimeMapArgs),
    /// Spinor field on a (y, z) grid: binary grid file plus a CSV density slice.
    Field(FieldArgs),
    /// Transmission probabilities for an infinitely high step, as JSON.
    KleinLimit(KleinArgs),
    /// Arrival delay between the split spin beams for g != 2, as JSON.
    FilterDelay(FilterArgs),
    /// Invariant checks on seeded random parameter points.
    Selftest(SelftestArgs),
}

/// One scattering channel.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Total energy in units of mc².
    #[arg(long = "E", visible_alias = "energy", allow_negative_numbers = true)]
    pub energy: f64,
    /// Step height in units of mc².
    #[arg(
        long = "V0",
        visible_alias = "v0",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub v0: f64,
    /// Field strength b = ħω/(mc²).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Shared channel index of the incoming pair.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Incoming spin: up is the state (+, n-1), down is (-, n).
    #[arg(long, default_value_t = Spin::Up)]
    pub spin: Spin,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed-form amplitudes.
    #[default]
    Closed,
    /// Direct solve of the boundary equations.
    Oracle,
}

#[derive(Debug, Args)]
pub struct AmpsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Flat TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Swept parameter: E, V0, b or n.
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Explicit axis values instead of a range.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long = "E", visible_alias = "energy", allow_negative_numbers = true)]
    pub energy: Option<f64>,
    #[arg(long = "V0", visible_alias = "v0", allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub spin: Option<Spin>,
    /// Subset of output columns, in the order given.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RegimeMapArgs {
    #[arg(long = "E-start", allow_negative_numbers = true)]
    pub e_start: f64,
    #[arg(long = "E-stop", allow_negative_numbers = true)]
    pub e_stop: f64,
    #[arg(long = "E-count", default_value_t = 50)]
    pub e_count: usize,
    #[arg(long = "V0-start", allow_negative_numbers = true)]
    pub v0_start: f64,
    #[arg(long = "V0-stop", allow_negative_numbers = true)]
    pub v0_stop: f64,
    #[arg(long = "V0-count", default_value_t = 50)]
    pub v0_count: usize,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = Spin::Up)]
    pub spin: Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayloadArg {
    Density,
    Spinor,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Transverse wave number; the guiding centre is y0 = kx/b.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub kx: f64,
    #[arg(long, default_value_t = 512)]
    pub ny: usize,
    #[arg(long, default_value_t = 512)]
    pub nz: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = PayloadArg::Density)]
    pub payload: PayloadArg,
    /// Binary grid output path.
    #[arg(long)]
    pub out: PathBuf,
    /// CSV density slice along z; defaults to the grid path with a `.csv` extension.
    #[arg(long)]
    pub slice: Option<PathBuf>,
    /// Row of the slice; defaults to the guiding centre.
    #[arg(long, allow_negative_numbers = true)]
    pub slice_y: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KleinArgs {
    #[arg(long = "E", visible_alias = "energy", allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = Spin::Up)]
    pub spin: Spin,
    /// Also evaluate |T|², |T'|² at this finite step height.
    #[arg(long = "V0", visible_alias = "v0")]
    pub v0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(
        long = "E",
        visible_alias = "energy",
        default_value_t = 2.0,
        allow_negative_numbers = true
    )]
    pub energy: f64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = ANOMALOUS_G, allow_negative_numbers = true)]
    pub g: f64,
    /// Flight distance in Compton lengths ħ/(mc).
    #[arg(long, default_value_t = 1e6, allow_negative_numbers = true)]
    pub d: f64,
    #[arg(long, default_value = "reflected")]
    pub branch: Branch,
    /// Step height, used by the transmitted branch.
    #[arg(
        long = "V0",
        visible_alias = "v0",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub v0: f64,
    /// Also report the delay in seconds and the distance in metres.
    #[arg(long)]
    pub si: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Number of random parameter points.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    /// Seed; overrides KLEINB_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the outcomes as JSON.
    #[arg(long)]
    pub json: bool,
}
