//! Generalised method of moments on the mean and the lag-`0..=m` second
//! moments `D(k, θ) = E(Y_0 Y_{kΔ}) = γ_θ(kΔ) + μ(θ)²`.
//!
//! `h(Y_t, θ) = (Y_t − μ, Y_t² − D(0), Y_t Y_{t+1} − D(1), …, Y_t Y_{t+m} − D(m))`
//! is averaged over `t = 1..=n−m` and `g_nᵀ A g_n` is minimised. The
//! covariance of `√(n−m)(θ̂ − θ₀)` is the sandwich `M Σ̂ Mᵀ` with
//! `M = (G₀ᵀAG₀)^{−1}G₀ᵀA` and a Bartlett-kernel long-run covariance `Σ̂`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::simplex::{nelder_mead, SimplexOptions};
use crate::error::{Error, Result};
use crate::kernels::{PeriodicFunction, TrawlFunction};
use crate::levy::LevySeed;
use crate::model::ModelSpec;
use crate::moments::{theoretical_acov, theoretical_moments};
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GmmFamily {
    /// `θ = (λ, μ, σ²)`: exponential trawl, `p ≡ 1`, Gaussian(μ, σ²) seed.
    ExpGaussian,
    /// `θ = (λ, ν)`: exponential trawl, `p ≡ 1`, Poisson(ν) seed.
    ExpPoisson,
    /// `θ = (α, H, μ, σ²)`: supGamma trawl, `p ≡ 1`, Gaussian seed.
    SupGammaGaussian,
    /// `θ = (λ, μ, σ²)`: exponential trawl, sine kernel of known period.
    ExpSineGaussian { tau: f64 },
}

impl GmmFamily {
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            GmmFamily::ExpGaussian | GmmFamily::ExpSineGaussian { .. } => &["lambda", "mu", "sigma2"],
            GmmFamily::ExpPoisson => &["lambda", "rate"],
            GmmFamily::SupGammaGaussian => &["alpha", "H", "mu", "sigma2"],
        }
    }

    pub fn dim(&self) -> usize {
        self.parameter_names().len()
    }

    pub fn default_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            GmmFamily::ExpGaussian | GmmFamily::ExpSineGaussian { .. } => {
                vec![(1e-4, 1e4), (-1e6, 1e6), (1e-8, 1e8)]
            }
            GmmFamily::ExpPoisson => vec![(1e-4, 1e4), (1e-8, 1e8)],
            GmmFamily::SupGammaGaussian => vec![(1e-4, 1e4), (1.01, 100.0), (-1e6, 1e6), (1e-8, 1e8)],
        }
    }

    /// The periodic trawl model with parameters `θ`.
    pub fn model(&self, theta: &[f64], delta: f64) -> Result<ModelSpec> {
        if theta.len() != self.dim() {
            return Err(Error::Domain(format!("{self} has {} parameters, got {}", self.dim(), theta.len())));
        }
        let (seed, trawl, kernel) = match *self {
            GmmFamily::ExpGaussian => (
                LevySeed::Gaussian { mu: theta[1], sigma2: theta[2] },
                TrawlFunction::exponential(theta[0])?,
                PeriodicFunction::One,
            ),
            GmmFamily::ExpPoisson => (
                LevySeed::Poisson { rate: theta[1] },
                TrawlFunction::exponential(theta[0])?,
                PeriodicFunction::One,
            ),
            GmmFamily::SupGammaGaussian => (
                LevySeed::Gaussian { mu: theta[2], sigma2: theta[3] },
                TrawlFunction::sup_gamma(theta[0], theta[1])?,
                PeriodicFunction::One,
            ),
            GmmFamily::ExpSineGaussian { tau } => (
                LevySeed::Gaussian { mu: theta[1], sigma2: theta[2] },
                TrawlFunction::exponential(theta[0])?,
                PeriodicFunction::sine(tau)?,
            ),
        };
        ModelSpec::new(seed, trawl, kernel, delta, 0)
    }

    /// `(μ(θ), D(0, θ), …, D(m, θ))`.
    pub fn moment_map(&self, theta: &[f64], delta: f64, m: usize) -> Result<Vec<f64>> {
        let model = self.model(theta, delta)?;
        let (mu, _) = theoretical_moments(&model)?;
        let mut out = Vec::with_capacity(m + 2);
        out.push(mu);
        for k in 0..=m {
            out.push(theoretical_acov(&model, k as f64 * delta)? + mu * mu);
        }
        Ok(out)
    }

    /// Data-driven starting point from the sample mean, variance and lag-1
    /// autocorrelation.
    fn initial_guess(&self, mean: f64, var: f64, rho1: f64, delta: f64) -> Vec<f64> {
        let lambda = if rho1 > 0.0 && rho1 < 1.0 { -rho1.ln() / delta } else { 1.0 / delta };
        match *self {
            GmmFamily::ExpGaussian => vec![lambda, mean * lambda, var * lambda],
            GmmFamily::ExpPoisson => vec![lambda, (mean * lambda).max(var * lambda).max(1e-3)],
            GmmFamily::SupGammaGaussian => {
                let (alpha, h) = (1.0 / lambda, 3.0);
                let mass = alpha / (h - 1.0);
                vec![alpha, h, mean / mass, var / mass]
            }
            GmmFamily::ExpSineGaussian { tau } => {
                let w = 2.0 * std::f64::consts::PI / tau;
                let m1 = w / (lambda * lambda + w * w);
                let m2 = w * w / (lambda * (lambda * lambda + 4.0 * w * w)) * 2.0;
                vec![lambda, mean / m1, var / m2]
            }
        }
    }
}

impl fmt::Display for GmmFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GmmFamily::ExpGaussian => write!(f, "exp-gaussian"),
            GmmFamily::ExpPoisson => write!(f, "exp-poisson"),
            GmmFamily::SupGammaGaussian => write!(f, "supgamma-gaussian"),
            GmmFamily::ExpSineGaussian { tau } => write!(f, "exp-sine-gaussian({tau})"),
        }
    }
}

impl FromStr for GmmFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "exp-gaussian" => return Ok(GmmFamily::ExpGaussian),
            "exp-poisson" => return Ok(GmmFamily::ExpPoisson),
            "supgamma-gaussian" => return Ok(GmmFamily::SupGammaGaussian),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("exp-sine-gaussian(").and_then(|r| r.strip_suffix(')')) {
            let tau: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad period in '{s}'")))?;
            return Ok(GmmFamily::ExpSineGaussian { tau });
        }
        Err(Error::Config(format!(
            "unknown GMM model '{s}' (expected exp-gaussian, exp-poisson, supgamma-gaussian, exp-sine-gaussian(τ))"
        )))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmmSpec {
    pub family: GmmFamily,
    /// Number of lags `m`.
    pub lags: usize,
    /// Weight matrix `A` of size `m + 2`; identity when `None`.
    pub weight: Option<DMatrix<f64>>,
    pub bounds: Vec<(f64, f64)>,
    pub restarts: usize,
    pub seed: u64,
    /// Bartlett bandwidth of the long-run covariance; `⌊4((n−m)/100)^{2/9}⌋`
    /// when `None`.
    pub hac_bandwidth: Option<usize>,
    /// Explicit starting point; data-driven when `None`.
    pub start: Option<Vec<f64>>,
}

impl GmmSpec {
    pub fn new(family: GmmFamily, lags: usize) -> Self {
        GmmSpec {
            family,
            lags,
            weight: None,
            bounds: family.default_bounds(),
            restarts: 5,
            seed: 0,
            hac_bandwidth: None,
            start: None,
        }
    }

    pub fn with_weight(mut self, a: DMatrix<f64>) -> Self {
        self.weight = Some(a);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Self {
        self.start = Some(start);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.lags < 2 {
            return Err(Error::Config(format!("GMM needs at least 2 lags, got {}", self.lags)));
        }
        if self.bounds.len() != self.family.dim()
            || self.bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::Config("GMM bounds must be finite with lo < hi for every parameter".into()));
        }
        if let Some(a) = &self.weight {
            let k = self.lags + 2;
            if a.nrows() != k || a.ncols() != k {
                return Err(Error::Config(format!("weight matrix must be {k}×{k}")));
            }
        }
        if self.restarts == 0 {
            return Err(Error::Config("at least one optimizer start is needed".into()));
        }
        Ok(())
    }

    fn weight_matrix(&self) -> DMatrix<f64> {
        self.weight.clone().unwrap_or_else(|| DMatrix::identity(self.lags + 2, self.lags + 2))
    }
}

/// Sample moments `(Ȳ, D̂(0), …, D̂(m))` over `t = 1..=n−m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMoments {
    pub values: Vec<f64>,
    pub count: usize,
}

impl SampleMoments {
    pub fn new(series: &[f64], m: usize) -> Result<Self> {
        let n = series.len();
        if n < m + 3 {
            return Err(Error::DegenerateSeries(format!("GMM with {m} lags needs more than {} observations", m + 2)));
        }
        let count = n - m;
        let mut values = vec![series[..count].iter().sum::<f64>() / count as f64];
        for k in 0..=m {
            values.push((0..count).map(|t| series[t] * series[t + k]).sum::<f64>() / count as f64);
        }
        Ok(SampleMoments { values, count })
    }
}

/// `g_nᵀ A g_n` with `g_n = sample − theoretical` moments.
pub fn gmm_objective(sample: &SampleMoments, spec: &GmmSpec, theta: &[f64], delta: f64) -> Result<f64> {
    let theo = spec.family.moment_map(theta, delta, spec.lags)?;
    let g = DVector::from_iterator(theo.len(), sample.values.iter().zip(&theo).map(|(s, t)| s - t));
    Ok((g.transpose() * spec.weight_matrix() * &g)[(0, 0)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmmFit {
    pub family: GmmFamily,
    pub theta: Vec<f64>,
    /// `M Σ̂ Mᵀ`, the covariance of the limit of `√(n−m)(θ̂ − θ₀)`.
    pub covariance: DMatrix<f64>,
    pub std_errors: Vec<f64>,
    pub objective: f64,
    /// Number of moment vectors averaged (`n − m`).
    pub count: usize,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// Search coordinates: `log θ` for parameters with a positive lower bound.
struct Coordinates {
    log: Vec<bool>,
    bounds: Vec<(f64, f64)>,
}

impl Coordinates {
    fn new(bounds: &[(f64, f64)]) -> Self {
        let log: Vec<bool> = bounds.iter().map(|(lo, _)| *lo > 0.0).collect();
        let bounds = bounds
            .iter()
            .zip(&log)
            .map(|(&(lo, hi), &l)| if l { (lo.ln(), hi.ln()) } else { (lo, hi) })
            .collect();
        Coordinates { log, bounds }
    }

    fn to_theta(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.log).map(|(v, &l)| if l { v.exp() } else { *v }).collect()
    }

    fn to_z(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.log)
            .zip(&self.bounds)
            .map(|((v, &l), &(lo, hi))| {
                let z = if l { v.max(f64::MIN_POSITIVE).ln() } else { *v };
                z.clamp(lo, hi)
            })
            .collect()
    }
}

/// Fits `θ` by minimising `g_nᵀ A g_n` with a bounded simplex search from a
/// data-driven start plus `restarts − 1` random perturbations.
pub fn gmm_fit(series: &[f64], spec: &GmmSpec, delta: f64) -> Result<GmmFit> {
    spec.validate()?;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("Δ must be positive, got {delta}")));
    }
    let m = spec.lags;
    let sample = SampleMoments::new(series, m)?;
    let coords = Coordinates::new(&spec.bounds);
    let objective = |z: &[f64]| {
        let theta = coords.to_theta(z);
        gmm_objective(&sample, spec, &theta, delta).unwrap_or(f64::INFINITY)
    };
    let mean = sample.values[0];
    let var = sample.values[1] - mean * mean;
    let rho1 = (sample.values[2] - mean * mean) / var;
    let start = match &spec.start {
        Some(s) => s.clone(),
        None => spec.family.initial_guess(mean, var, rho1, delta),
    };
    let z0 = coords.to_z(&start);
    let mut rng = RandomStream::new(spec.seed, 0).derive(0x6d6d);
    let opts = SimplexOptions::default();
    let mut best: Option<super::simplex::SimplexResult> = None;
    let mut trace = Vec::new();
    let mut evaluations = 0;
    for r in 0..spec.restarts {
        let zs: Vec<f64> = if r == 0 {
            z0.clone()
        } else {
            z0.iter()
                .zip(&coords.bounds)
                .map(|(z, &(lo, hi))| {
                    (z + 0.5 * z.abs().max(1.0) * (rng.random::<f64>() * 2.0 - 1.0)).clamp(lo, hi)
                })
                .collect()
        };
        // restart once from the optimum to escape a collapsed simplex
        let first = nelder_mead(&objective, &zs, &coords.bounds, &opts);
        let mut res = nelder_mead(&objective, &first.x, &coords.bounds, &opts);
        evaluations += first.evaluations + res.evaluations;
        res.converged |= first.converged;
        if first.value < res.value {
            res.x = first.x;
            res.value = first.value;
        }
        trace.push(format!("start {r}: objective {:.6e}, converged {}", res.value, res.converged));
        if res.converged && best.as_ref().map_or(true, |b| res.value < b.value) {
            best = Some(res);
        }
    }
    let best = best.ok_or_else(|| Error::Convergence(format!("simplex search did not converge: {}", trace.join("; "))))?;
    let theta = coords.to_theta(&best.x);
    let mut warnings = Vec::new();
    for (i, (&v, &(lo, hi))) in theta.iter().zip(&spec.bounds).enumerate() {
        if (v - lo).abs() <= 1e-6 * lo.abs().max(1e-12) || (hi - v).abs() <= 1e-6 * hi.abs().max(1e-12) {
            warnings.push(format!("{} = {v} is on the boundary of the parameter box", spec.family.parameter_names()[i]));
        }
    }
    let covariance = sandwich(series, spec, &theta, delta, &sample)?;
    let std_errors = (0..covariance.nrows())
        .map(|i| (covariance[(i, i)].max(0.0) / sample.count as f64).sqrt())
        .collect();
    Ok(GmmFit {
        family: spec.family,
        theta,
        covariance,
        std_errors,
        objective: best.value,
        count: sample.count,
        evaluations,
        warnings,
    })
}

/// Default Bartlett bandwidth `⌊4(N/100)^{2/9}⌋`.
pub fn default_bandwidth(count: usize) -> usize {
    (4.0 * (count as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Bartlett-kernel long-run covariance of the rows of `h` (demeaned).
pub fn newey_west(h: &DMatrix<f64>, bandwidth: usize) -> DMatrix<f64> {
    let (n, k) = (h.nrows(), h.ncols());
    let mean = h.row_mean();
    let mut c = h.clone();
    for mut row in c.row_iter_mut() {
        row -= &mean;
    }
    let gamma = |l: usize| {
        let a = c.rows(l, n - l);
        let b = c.rows(0, n - l);
        a.transpose() * b / n as f64
    };
    let mut s = gamma(0);
    for l in 1..=bandwidth.min(n.saturating_sub(1)) {
        let w = 1.0 - l as f64 / (bandwidth as f64 + 1.0);
        let g = gamma(l);
        s += (&g + g.transpose()) * w;
    }
    debug_assert_eq!(s.nrows(), k);
    s
}

/// Central finite-difference Jacobian `G₀ = ∂g_n/∂θ = −∂(μ, D)/∂θ`.
pub fn moment_jacobian(family: GmmFamily, theta: &[f64], delta: f64, m: usize) -> Result<DMatrix<f64>> {
    let k = m + 2;
    let mut g0 = DMatrix::zeros(k, theta.len());
    for j in 0..theta.len() {
        let h = 1e-6 * theta[j].abs().max(1.0);
        let (mut a, mut b) = (theta.to_vec(), theta.to_vec());
        a[j] += h;
        b[j] -= h;
        let fa = family.moment_map(&a, delta, m)?;
        let fb = family.moment_map(&b, delta, m)?;
        for i in 0..k {
            g0[(i, j)] = -(fa[i] - fb[i]) / (2.0 * h);
        }
    }
    Ok(g0)
}

fn sandwich(series: &[f64], spec: &GmmSpec, theta: &[f64], delta: f64, sample: &SampleMoments) -> Result<DMatrix<f64>> {
    let m = spec.lags;
    let theo = spec.family.moment_map(theta, delta, m)?;
    let count = sample.count;
    let h = DMatrix::from_fn(count, m + 2, |t, i| {
        if i == 0 {
            series[t] - theo[0]
        } else {
            series[t] * series[t + i - 1] - theo[i]
        }
    });
    let bw = spec.hac_bandwidth.unwrap_or_else(|| default_bandwidth(count));
    let sigma = newey_west(&h, bw);
    let g0 = moment_jacobian(spec.family, theta, delta, m)?;
    let a = spec.weight_matrix();
    let bread = (g0.transpose() * &a * &g0)
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSeries("G₀ᵀAG₀ is singular: parameters not identified by these moments".into()))?;
    let mm = bread * g0.transpose() * a;
    let cov = &mm * sigma * mm.transpose();
    Ok((&cov + cov.transpose()) * 0.5)
}
