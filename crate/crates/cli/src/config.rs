//! Command parameters. Each argument struct doubles as the serialized experiment
//! configuration, so `--dump-config` followed by `--config` replays a run exactly.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use kmtlab::coupling::{CouplingStrategy, Weight};
use kmtlab::oracles::EPOCH_TABLE_LIMIT;
use kmtlab::regularity::{DEFAULT_Q_MAX, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Output {
    /// Destination file; stdout when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Command default when absent.
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: CommandArgs,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for replication-level parallelism; 0 means all cores.
    #[serde(default)]
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandArgs {
    /// Sakhanenko and Bernstein parameters with relation slacks.
    Regularity(RegularityArgs),
    /// Bound series over z and m grids.
    Bound(BoundArgs),
    /// Simulated coupling and Monte Carlo tail estimate.
    Couple(CoupleArgs),
    /// Oracle batteries or a batch of check requests.
    Verify(VerifyArgs),
    /// Uniform tail profile over a family of laws.
    Family(FamilyArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RegularityArgs {
    /// Distribution spec: a JSON file, `-` for stdin, or inline JSON.
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long = "qmax", default_value_t = DEFAULT_Q_MAX)]
    pub q_max: u32,
    /// Variance floor for the Bernstein relation; defaults to the spec's own σ.
    #[arg(long)]
    pub ubar_sigma: Option<f64>,
    /// Exponential-moment level; defaults to λ(P)/2.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub k_grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Exp,
    Power,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    /// exp: take λ = λ(P) and σ from this spec instead of --lambda/--sigma.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// exp: the universal constant c.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// z for exp, ε for power.
    #[arg(long, value_delimiter = ',', required = true)]
    pub z_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub m_grid: Vec<u64>,
    /// power: CSV with columns u, a, ubar_a (u_n = E|X_n|^q / ā_n^q).
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// power: JSON bound on the weights past the horizon, e.g. {"type":"geometric","ratio":0.5}.
    #[arg(long)]
    pub tail: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    /// power: the universal constant C(q).
    #[arg(long, default_value_t = 1.0)]
    pub cq: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CoupleArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value = "per_variable_quantile")]
    pub strategy: CouplingStrategy,
    /// `log` or `pow:<q>`.
    #[arg(long, default_value = "log")]
    pub weight: Weight,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub m: Vec<usize>,
    /// Path length K.
    #[arg(short = 'K', long = "horizon")]
    #[serde(rename = "K")]
    pub k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Also write the path of replication 0 as CSV (k, x, y, lambda).
    #[arg(long)]
    pub run_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Partitions,
    All,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 10_000)]
    pub cases: usize,
    /// JSON list of check requests; replaces the randomized suites.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    #[arg(long, default_value_t = EPOCH_TABLE_LIMIT)]
    pub epoch_limit: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FamilyArgs {
    /// Family sweep JSON (file, `-`, or inline): {"specs": [...], "m_grid": [...], ...}.
    #[arg(long)]
    pub sweep: String,
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// Profile E[e^{t|X|} 1{e^{t|X|} ≥ K}] over the sweep's k_grid instead.
    #[arg(long)]
    pub t_star: Option<f64>,
}
