use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use trawlkit::{LevySeed, ModelSpec, PeriodicFunction, Result, TrawlFunction};

#[derive(Debug, Parser, Serialize)]
#[command(name = "trawlkit", version, about = "Simulate and fit periodic trawl processes", args_override_self = true)]
pub struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Also write SVG line charts.
    #[arg(long, global = true)]
    pub plot: bool,
    #[command(subcommand)]
    #[serde(skip)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate sample paths on the grid 0, Δ, …, nΔ.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Lebesgue measures of the simulation slices.
    #[command(args_override_self = true)]
    Slices(SlicesArgs),
    /// Sample autocorrelation of a series.
    #[command(args_override_self = true)]
    Acf(AcfArgs),
    /// Asymptotic variances of the sample mean, autocovariances and autocorrelations.
    #[command(args_override_self = true)]
    Asymvar(AsymvarArgs),
    /// Estimate model parameters from a series.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Split a series in two and fit both trawl families to each part.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum FitCommand {
    /// Exponential trawl with known period.
    #[command(name = "mom-exp", args_override_self = true)]
    MomExp(MomArgs),
    /// supGamma trawl with known period and α.
    #[command(name = "mom-supgamma", args_override_self = true)]
    MomSupgamma(MomSupgammaArgs),
    /// Generalised method of moments on the mean and lagged second moments.
    #[command(name = "gmm", args_override_self = true)]
    Gmm(GmmArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Trawl function: exp(λ), supgamma(α,H) or tabulated(step;g0,g1,…).
    #[arg(long, default_value = "exp(1)")]
    pub trawl: String,
    /// Periodic kernel: one, sine(τ) or fourier(τ;a0,a1,b1,…).
    #[arg(long = "p", default_value = "one")]
    pub p: String,
    /// Lévy seed: gaussian(μ,σ²), poisson(ν), gamma(shape,rate), negbin(size,prob) or cauchy(scale).
    #[arg(long, default_value = "gaussian(0,1)")]
    pub levy: String,
    /// Sampling step Δ.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
}

impl ModelArgs {
    pub fn model(&self, n: usize) -> Result<ModelSpec> {
        let trawl: TrawlFunction = self.trawl.parse()?;
        let p: PeriodicFunction = self.p.parse()?;
        let seed: LevySeed = self.levy.parse()?;
        ModelSpec::new(seed, trawl, p, self.delta, n)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Number of grid steps.
    #[arg(long)]
    pub n: usize,
    /// Leading points to discard (default: where 99% of the trawl mass is covered).
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Independent paths, written in replicate order.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Drop slices below this fraction of the trawl mass (0 keeps all).
    #[arg(long, default_value_t = 0.0)]
    pub min_slice_fraction: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SlicesArgs {
    #[arg(long, default_value = "exp(1)")]
    pub trawl: String,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    pub input: PathBuf,
    /// Time column (name or 0-based index).
    #[arg(long, default_value = "0")]
    pub date_col: String,
    /// Value column (name or 0-based index).
    #[arg(long, default_value = "1")]
    pub value_col: String,
    /// Sampling step; inferred from the time column when absent.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct AcfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 30)]
    pub lags: usize,
    /// Use raw second moments instead of deviations from the mean.
    #[arg(long)]
    pub uncentered: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymvarArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Largest lag h of the autocovariance / autocorrelation vectors.
    #[arg(long, default_value_t = 5)]
    pub lags: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MomArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Period τ of the kernel in time units (a multiple of Δ).
    #[arg(long)]
    pub tau: f64,
    /// Lags shown in the fitted-ACF plot.
    #[arg(long, default_value_t = 50)]
    pub plot_lags: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MomSupgammaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mom: MomArgs,
    /// Known scale α of the supGamma trawl.
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GmmArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// exp-gaussian, exp-poisson, supgamma-gaussian or exp-sine-gaussian(τ).
    #[arg(long)]
    pub model: String,
    /// Number of lags m in the moment vector.
    #[arg(long, default_value_t = 5)]
    pub lags: usize,
    /// `identity` or a CSV file holding the (m+2)×(m+2) weight matrix.
    #[arg(long, default_value = "identity")]
    pub weight: String,
    /// Optimizer starts (the first is data driven).
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Bartlett bandwidth of the long-run covariance.
    #[arg(long)]
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// First date (or time) of the second segment.
    #[arg(long)]
    pub split: String,
    /// Period τ in time units.
    #[arg(long, default_value_t = 7.0)]
    pub tau: f64,
    /// supGamma α for the first segment; fitted to the ACF when absent.
    #[arg(long)]
    pub alpha_ts1: Option<f64>,
    /// supGamma α for the second segment; fitted to the ACF when absent.
    #[arg(long)]
    pub alpha_ts2: Option<f64>,
    /// Lags used by the preliminary α fit.
    #[arg(long, default_value_t = 60)]
    pub prefit_lags: usize,
    /// Lags shown in the ACF plots.
    #[arg(long, default_value_t = 50)]
    pub plot_lags: usize,
}
