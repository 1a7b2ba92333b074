use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sensorsched", version, about = "Index tables, itineraries, bandit tournaments and LQG thresholds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the index λ(x) over a grid of states.
    Index(IndexArgs),
    /// Itinerary and threshold word for one state.
    Word(WordArgs),
    /// Run a policy tournament on a scenario file.
    Simulate(SimulateArgs),
    /// Solve an LQG problem with costly observations.
    Lqg(LqgArgs),
    /// Numerical indexability checks and DP cross-validation.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct ArmArgs {
    /// Multiplier r in (0, 1]; φ0(x) = r²x + 1 when a0 = 0.
    #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
    pub r: Option<f64>,
    /// Passive slope ρ = r² instead of r.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub a0: f64,
    /// Active precision; accepts `inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[command(flatten)]
    pub arm: ArmArgs,
    #[arg(long)]
    pub beta: f64,
    /// Cost spec such as `linear`, `entropy`, `power:-1.5`, `10*linear`.
    #[arg(long, default_value = "linear")]
    pub cost: String,
    /// Log-spaced grid lo:hi:n.
    #[arg(long, conflicts_with_all = ["grid_lin", "x"])]
    pub grid_log: Option<String>,
    /// Evenly spaced grid lo:hi:n.
    #[arg(long, conflicts_with = "x")]
    pub grid_lin: Option<String>,
    /// Comma-separated states.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Undiscounted limit (β → 1) computed from the periodic orbit; β is ignored.
    #[arg(long)]
    pub limit: bool,
    /// Periods summed in limit mode.
    #[arg(long, default_value_t = 200)]
    pub periods: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WordArgs {
    #[command(flatten)]
    pub arm: ArmArgs,
    #[arg(long)]
    pub x: f64,
    /// Threshold of the itinerary; defaults to x.
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub len: usize,
    /// Longest period searched for the threshold word.
    #[arg(long, default_value_t = 64)]
    pub max_period: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "whittle,myopic,round_robin,random")]
    pub policies: Vec<String>,
    /// Directory receiving one <policy>.csv trace per policy.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LqgArgs {
    /// Problem JSON file; replaces the numeric flags.
    #[arg(long, conflicts_with_all = ["a", "b", "d", "f", "beta"])]
    pub config: Option<PathBuf>,
    #[arg(long = "A", allow_hyphen_values = true, required_unless_present = "config")]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true, required_unless_present = "config")]
    pub b: Option<f64>,
    #[arg(long = "D", required_unless_present = "config")]
    pub d: Option<f64>,
    #[arg(long = "F", required_unless_present = "config")]
    pub f: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    pub beta: Option<f64>,
    /// State noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x: f64,
    /// Passive observation noise variance; `inf` means no observation.
    #[arg(long, default_value_t = f64::INFINITY)]
    pub sigma_y0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_y1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    /// Also compare the policy against a brute-force grid DP.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub arm: ArmArgs,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value = "linear")]
    pub cost: String,
    /// State range lo:hi for the sampled checks.
    #[arg(long, default_value = "0.01:5")]
    pub x_range: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1000)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// States at which the DP is solved at ν = λ(x) ± δ (needs a finite passive fixed point).
    #[arg(long, default_value_t = 3)]
    pub dp_checks: usize,
    #[arg(long, default_value_t = 4096)]
    pub dp_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}
