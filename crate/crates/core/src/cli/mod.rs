//! Batch front-end. Every subcommand writes its declared files and prints
//! one JSON line on stdout. Exit status: 0 success, 1 usage or I/O error,
//! 2 numerical failure.

mod commands;
mod config;
mod output;
pub mod reproduce;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use config::ConfigFile;
pub use output::{num, svg_plot, Series};

use crate::error::Error;
use crate::integrators::InterpolantKind;
use crate::lowprec::{ArithmeticMode, MapId};
use crate::orbit_graph::{MeasureId, NanPolicy};

#[derive(Parser, Debug)]
#[command(name = "bealab", version, about = "Backward error and chaos experiments")]
pub struct Cli {
    /// `key = value` file; its values take precedence over flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate a system and write the dense trajectory.
    Simulate(SimulateArgs),
    /// Residual of a computed dense solution.
    Residual(ResidualArgs),
    /// Largest Lyapunov exponent.
    Lyapunov(LyapunovArgs),
    /// Separation time of two disturbed copies (one ε) or its ln(1/ε) fit (several).
    Separation(SeparationArgs),
    /// Leapfrog on Hénon–Heiles with modified-Hamiltonian drift.
    Leapfrog(LeapfrogArgs),
    /// Modified Hamiltonian and correction terms at one state.
    Energy(EnergyArgs),
    /// Functional graph of a minifloat map.
    OrbitGraph(OrbitGraphArgs),
    /// Exact Gauss orbits shadowing minifloat pseudo-orbits.
    Shadow(ShadowArgs),
    /// Longest cycle and transient against format size.
    Scaling(ScalingArgs),
    /// Time statistics of a trajectory.
    Stats(StatsArgs),
    /// Re-run every reproduction criterion into a report.
    Reproduce(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate(_) => "simulate",
            Self::Residual(_) => "residual",
            Self::Lyapunov(_) => "lyapunov",
            Self::Separation(_) => "separation",
            Self::Leapfrog(_) => "leapfrog",
            Self::Energy(_) => "energy",
            Self::OrbitGraph(_) => "orbit-graph",
            Self::Shadow(_) => "shadow",
            Self::Scaling(_) => "scaling",
            Self::Stats(_) => "stats",
            Self::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Lorenz,
    HenonHeiles,
    ForcedOscillator,
}

#[derive(Args, Debug, Clone)]
pub struct SystemOpts {
    #[arg(long, value_enum, default_value_t = SystemArg::Lorenz)]
    pub system: SystemArg,
    #[arg(long, default_value_t = 10.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 28.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 8.0 / 3.0)]
    pub beta: f64,
    /// Forcing amplitude of the oscillator.
    #[arg(long, default_value_t = 0.0)]
    pub forcing: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    /// Initial state, comma separated. Defaults: Lorenz (1,0,0); Hénon–Heiles
    /// (p1,p2,q1,q2) all 0.12; oscillator at rest.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y0: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InterpolantArg {
    MethodOrder,
    CubicHermite,
}

impl From<InterpolantArg> for InterpolantKind {
    fn from(a: InterpolantArg) -> Self {
        match a {
            InterpolantArg::MethodOrder => InterpolantKind::MethodOrder,
            InterpolantArg::CubicHermite => InterpolantKind::CubicHermite,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolveOpts {
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub atol: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = InterpolantArg::MethodOrder)]
    pub interpolant: InterpolantArg,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemOpts,
    #[command(flatten)]
    pub solve: SolveOpts,
    /// Output spacing; solver nodes when absent.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
    /// Projection of the first two components.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Adaptive Dormand–Prince 5(4).
    Dp5,
    /// Fixed-step explicit Euler.
    Euler,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub system: SystemOpts,
    #[command(flatten)]
    pub solve: SolveOpts,
    #[arg(long, value_enum, default_value_t = MethodArg::Dp5)]
    pub method: MethodArg,
    /// Step size for `--method euler`.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Measure against the modified Euler field with this coefficient.
    #[arg(long, allow_hyphen_values = true)]
    pub modified_coefficient: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub samples_per_step: usize,
    /// Also divide by max(1, |y|).
    #[arg(long)]
    pub relative: bool,
    #[arg(long, default_value = "residual.csv")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub system: SystemOpts,
    #[arg(long, default_value_t = 1000.0)]
    pub t_total: f64,
    #[arg(long, default_value_t = crate::chaos_metrics::DEFAULT_RENORM_INTERVAL)]
    pub renorm_interval: f64,
    #[arg(long, default_value_t = crate::chaos_metrics::DEFAULT_DELTA0)]
    pub delta0: f64,
    #[arg(long, default_value_t = crate::chaos_metrics::DEFAULT_TRANSIENT)]
    pub transient: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DisturbanceArg {
    MultiSine,
    SeededPiecewise,
}

#[derive(Args, Debug)]
pub struct SeparationArgs {
    #[command(flatten)]
    pub system: SystemOpts,
    /// One value runs a single pair; several run the ln(1/ε) regression.
    #[arg(long, value_delimiter = ',', default_value = "1e-9")]
    pub epsilons: Vec<f64>,
    /// Seed pairs as `a:b`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1:2")]
    pub seed_pairs: Vec<String>,
    #[arg(long, value_enum, default_value_t = DisturbanceArg::MultiSine)]
    pub disturbance: DisturbanceArg,
    #[arg(long, default_value_t = crate::chaos_metrics::DEFAULT_SEPARATION_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    #[arg(long, default_value = "separation.csv")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LeapfrogArgs {
    #[arg(long, default_value_t = 81.0 / 64.0)]
    pub h: f64,
    #[arg(long, default_value_t = 16000)]
    pub steps: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,2,4")]
    pub orders: Vec<u8>,
    /// Initial (p1,p2,q1,q2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.12,0.12,0.12,0.12")]
    pub state: Vec<f64>,
    /// Spurious-chaos threshold as a fraction of |H0(start)|.
    #[arg(long, default_value_t = crate::backward_error::DEFAULT_SPURIOUS_FRACTION)]
    pub threshold_fraction: f64,
    #[arg(long, default_value = "leapfrog.csv")]
    pub out: PathBuf,
    /// (q1, q2) scatter of the run.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.12,0.12,0.12,0.12")]
    pub state: Vec<f64>,
    #[arg(long, default_value_t = 81.0 / 64.0)]
    pub h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Gauss,
    Logistic,
    Bernoulli,
}

impl From<MapArg> for MapId {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Gauss => MapId::Gauss,
            MapArg::Logistic => MapId::Logistic,
            MapArg::Bernoulli => MapId::Bernoulli,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Stepwise,
    SingleRounding,
}

impl From<ModeArg> for ArithmeticMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Stepwise => ArithmeticMode::Stepwise,
            ModeArg::SingleRounding => ArithmeticMode::SingleRounding,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NanPolicyArg {
    FirstNode,
    Sink,
}

impl From<NanPolicyArg> for NanPolicy {
    fn from(p: NanPolicyArg) -> Self {
        match p {
            NanPolicyArg::FirstNode => NanPolicy::FirstNode,
            NanPolicyArg::Sink => NanPolicy::Sink,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Gauss,
    Lebesgue,
}

impl From<MeasureArg> for MeasureId {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Gauss => MeasureId::Gauss,
            MeasureArg::Lebesgue => MeasureId::Lebesgue,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct GraphOpts {
    /// `eEmM`, e.g. e3m4 or e5m10.
    #[arg(long, default_value = "e3m4")]
    pub format: String,
    #[arg(long, value_enum, default_value_t = MapArg::Gauss)]
    pub map: MapArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Stepwise)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = NanPolicyArg::FirstNode)]
    pub nan_policy: NanPolicyArg,
}

#[derive(Args, Debug)]
pub struct OrbitGraphArgs {
    #[command(flatten)]
    pub graph: GraphOpts,
    #[arg(long, value_enum, default_value_t = MeasureArg::Gauss)]
    pub measure: MeasureArg,
    #[arg(long)]
    pub edges_out: Option<PathBuf>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    #[arg(long)]
    pub dot_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ShadowArgs {
    #[command(flatten)]
    pub graph: GraphOpts,
    /// 1-based start node; all nodes when absent and `--samples` is 0.
    #[arg(long)]
    pub start: Option<usize>,
    /// Random starts instead of all nodes.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub max_len: usize,
    #[arg(long, default_value = "shadow.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value_t = MapArg::Gauss)]
    pub map: MapArg,
    #[arg(long, value_delimiter = ',', default_value = "e3m4,e4m3,e5m2,e4m5,e5m10")]
    pub formats: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Stepwise)]
    pub mode: ModeArg,
    #[arg(long, default_value = "scaling.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub system: SystemOpts,
    #[command(flatten)]
    pub solve: SolveOpts,
    /// Window `a,b`.
    #[arg(long, value_delimiter = ',', default_value = "10,50")]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    /// Second tolerance for a robustness comparison.
    #[arg(long)]
    pub compare_tol: Option<f64>,
    #[arg(long, default_value = "histogram.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long, default_value = "reproduction")]
    pub out_dir: PathBuf,
}

/// Outcome of a subcommand: the JSON summary and whether the numerics
/// failed in a way that should set exit status 2.
pub struct Outcome {
    pub summary: Value,
    pub numerical_failure: bool,
}

fn parse(argv: &[OsString]) -> Result<Cli, clap::Error> {
    let command = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let matches = command.try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

/// Parses `argv`, merges the config file, runs, prints the summary line
/// and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            let name = cli.command.name();
            let known = known_flags(name);
            let extra = match ConfigFile::load(path) {
                Ok(c) => c.args_filtered(name, |k| known.iter().any(|f| f == k)),
                Err(e) => return fail(cli.command.name(), &e),
            };
            argv.extend(extra.into_iter().map(OsString::from));
            match parse(&argv) {
                Ok(c) => c,
                Err(e) => {
                    let _ = e.print();
                    return 1;
                }
            }
        }
    };
    let name = cli.command.name();
    match commands::dispatch(cli.command) {
        Ok(out) => {
            println!("{}", out.summary);
            if out.numerical_failure {
                2
            } else {
                0
            }
        }
        Err(e) => fail(name, &e),
    }
}

/// Long flag names accepted by subcommand `name`.
fn known_flags(name: &str) -> Vec<String> {
    Cli::command()
        .find_subcommand(name)
        .map(|s| s.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect())
        .unwrap_or_default()
}

fn fail(command: &str, e: &Error) -> i32 {
    eprintln!("error: {e}");
    let code = if e.is_numerical() { 2 } else { 1 };
    println!("{}", json!({ "command": command, "status": "error", "error": e.to_string(), "exit_code": code }));
    code
}

/// Entry point of the `bealab` binary.
pub fn main() -> ! {
    std::process::exit(run(std::env::args_os()))
}
