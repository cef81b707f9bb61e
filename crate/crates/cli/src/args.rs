use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Betti numbers, persistent Betti numbers and homology/cohomology tests on
/// simplicial complexes, with exact oracles next to every stochastic answer.
#[derive(Parser, Debug)]
#[command(name = "homology-lab", version, about, term_width = 80)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed; falls back to HOMOLOGY_LAB_SEED, then to a fresh seed
    /// that is printed on standard error.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Size of the worker pool. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Skip the exact answer that stochastic runs print for small inputs.
    #[arg(long, global = true)]
    pub no_oracle: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti number of one complex, or a profile over a Vietoris–Rips sweep.
    Betti(BettiArgs),
    /// Persistent Betti number of an inclusion K1 ⊆ K2.
    PersistentBetti(PersistentArgs),
    /// Is a cycle a boundary?
    TestTrivial(TrivialArgs),
    /// Are two cycles homologous?
    TestEquiv(EquivArgs),
    /// One-sided stochastic cycle check.
    DetectCycle(DetectArgs),
    /// Follow one or two cycles through a filtration.
    Track(TrackArgs),
    /// Lower bound on a Betti number from sampled cycles.
    BettiTrack(BettiTrackArgs),
    /// Write a canonical or random complex.
    Gen(GenArgs),
    /// Write an operator as MatrixMarket text.
    DumpOperator(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Stochastic,
}

#[derive(Args, Debug, Clone)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "stochastic")]
    pub mode: Mode,

    /// Step threshold: a number in (0, 1), `oracle` or `normalization`.
    /// Defaults to `oracle` when an exact answer is affordable.
    #[arg(long)]
    pub delta: Option<String>,

    /// Chebyshev degree.
    #[arg(long, default_value_t = 64)]
    pub degree: usize,

    /// Number of probe vectors.
    #[arg(long, default_value_t = 200)]
    pub probes: usize,

    /// `rademacher` or `hadamard`.
    #[arg(long, default_value = "rademacher")]
    pub probe_kind: String,
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    /// Complex file.
    #[arg(long, required_unless_present = "points", conflicts_with = "points")]
    pub input: Option<PathBuf>,

    /// Point cloud (JSON array of coordinate arrays) for a threshold sweep.
    #[arg(long, requires = "thresholds")]
    pub points: Option<PathBuf>,

    /// Comma-separated, increasing Vietoris–Rips thresholds.
    #[arg(long, allow_hyphen_values = true)]
    pub thresholds: Option<String>,

    /// Top simplex dimension of the sweep complexes.
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,

    #[arg(long)]
    pub r: usize,

    /// Write the sweep profile as CSV.
    #[arg(long)]
    pub emit_plot_data: Option<PathBuf>,

    /// Write the Laplacian as MatrixMarket.
    #[arg(long)]
    pub dump_operator: Option<PathBuf>,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct FiltrationInput {
    /// Manifest `{"k1": path, "k2": path}`.
    #[arg(long, conflicts_with_all = ["k1", "k2"])]
    pub filtration: Option<PathBuf>,

    #[arg(long, requires = "k2")]
    pub k1: Option<PathBuf>,

    #[arg(long, requires = "k1")]
    pub k2: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PersistentArgs {
    #[command(flatten)]
    pub input: FiltrationInput,

    #[arg(long)]
    pub r: usize,

    /// Write the persistent Laplacian as MatrixMarket.
    #[arg(long)]
    pub dump_operator: Option<PathBuf>,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct TrivialArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Chain file.
    #[arg(long)]
    pub chain: PathBuf,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivMethod {
    Homology,
    Cohomology,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// The two chain files.
    #[arg(long, num_args = 2, required = true)]
    pub chain: Vec<PathBuf>,

    #[arg(long, value_enum, default_value = "homology")]
    pub method: EquivMethod,

    /// Random cocycles drawn by the cohomology method.
    #[arg(long, default_value_t = 8)]
    pub witnesses: usize,

    /// Write the deciding witness cochain as JSON.
    #[arg(long)]
    pub dump_witness: Option<PathBuf>,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub chain: PathBuf,

    /// Target error rate; ceil(1/eta) measurements are simulated.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
}

#[derive(Args, Debug)]
pub struct TrackArgs {
    /// Filtration stages, smallest first.
    #[arg(long = "stage", required = true)]
    pub stages: Vec<PathBuf>,

    /// One or two chain files on the first stage.
    #[arg(long, required = true)]
    pub chain: Vec<PathBuf>,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct BettiTrackArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub r: usize,

    /// Number of random cycles to sample when no chains are given.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,

    /// Explicit cycle representatives instead of samples.
    #[arg(long)]
    pub chain: Vec<PathBuf>,

    #[command(flatten)]
    pub est: EstimatorArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// point, circle, hollow_triangle, filled_triangle, tetrahedron_boundary,
    /// torus, sphere2, figure_eight, filled_square, two_hollow_triangles,
    /// vietoris_rips or random_vietoris_rips.
    #[arg(long)]
    pub kind: String,

    /// Circle length.
    #[arg(long)]
    pub m: Option<usize>,

    /// Point cloud for vietoris_rips.
    #[arg(long)]
    pub points: Option<PathBuf>,

    #[arg(long)]
    pub threshold: Option<f64>,

    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,

    #[arg(long)]
    pub n_points: Option<usize>,

    #[arg(long, default_value_t = 2)]
    pub ambient_dim: usize,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Boundary,
    Coboundary,
    Laplacian,
    NormalizedLaplacian,
    PersistentLaplacian,
}

#[derive(Args, Debug)]
pub struct DumpArgs {
    /// Complex file (all operators but the persistent Laplacian).
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[command(flatten)]
    pub filtration: FiltrationInput,

    #[arg(long, value_enum)]
    pub operator: OperatorKind,

    #[arg(long)]
    pub r: usize,

    #[arg(long)]
    pub out: PathBuf,
}
