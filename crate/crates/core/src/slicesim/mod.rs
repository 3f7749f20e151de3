//! Slice-based simulation of periodic trawl processes on a time grid.
//!
//! The union of the trawl sets `A_{kΔ}`, `k = 0..n`, is partitioned into
//! disjoint slices `S_{ij}`. Column `j ≥ 2` holds the strip of times
//! `((j−2)Δ, (j−1)Δ]`, column 1 everything before time 0. With
//!
//! ```text
//! b[k] = ∫_{(k−1)Δ}^{kΔ} g,   d[k] = ∫_{(k−1)Δ}^∞ g,
//! c[k] = b[k] − b[k+1],      e[k] = d[k] − d[k+1],
//! ```
//!
//! row `k` of column `j ≥ 2` has measure `c[k]` (for `k ≤ n+1−j`), the last
//! stored row `n+2−j` has `b[n+2−j]`, and column 1 is `(e[1..n], d[n+1])`.
//! The grid values are
//!
//! ```text
//! Y_{kΔ} = Σ_{j=1}^{k+1} p((k+2−j)Δ) Σ_{i=k+2−j}^{n+2−j} L(S_{ij}).
//! ```

mod oracle;

pub use oracle::{simulate_grid_oracle, simulate_grid_oracle_with, GridOracleConfig};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kernels::{PeriodicFunction, TrawlFunction};
use crate::levy::SliceLaw;
use crate::model::ModelSpec;
use crate::moments::SeasonalKind;
use crate::rng::RandomStream;

/// Lebesgue measures of the slices, stored through the vectors `b, c, d, e`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMatrix {
    pub n: usize,
    pub delta: f64,
    /// `b[k−1] = ∫_{(k−1)Δ}^{kΔ} g`, `k = 1..=n+1`.
    pub b: Vec<f64>,
    /// `c[k−1] = b[k] − b[k+1]`, `k = 1..=n`.
    pub c: Vec<f64>,
    /// `d[k−1] = ∫_{(k−1)Δ}^∞ g`, `k = 1..=n+1`.
    pub d: Vec<f64>,
    /// `e[k−1] = d[k] − d[k+1]`, `k = 1..=n`.
    pub e: Vec<f64>,
}

impl SliceMatrix {
    /// `s_{ij}` with 1-based indices; zero outside the stored triangle.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        if i == 0 || j == 0 || i > n + 1 || j > n + 2 - i {
            return 0.0;
        }
        if j == 1 {
            return if i <= n { self.e[i - 1] } else { self.d[n] };
        }
        if j == n + 2 - i {
            self.b[i - 1]
        } else {
            self.c[i - 1]
        }
    }

    /// Dense `(n+1)×(n+1)` matrix, for small `n`.
    pub fn dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n + 1, self.n + 1, |i, j| self.get(i + 1, j + 1))
    }

    /// Total measure of the slices making up the trawl set of `Y_{kΔ}`.
    pub fn entering_mass(&self, k: usize) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for j in 1..=k + 1 {
            for i in (k + 2 - j)..=(n + 2 - j) {
                total += self.get(i, j);
            }
        }
        total
    }
}

/// Slice measures for `g` on the grid `0, Δ, …, nΔ`.
pub fn compute_slices(g: &TrawlFunction, n: usize, delta: f64) -> Result<SliceMatrix> {
    if n == 0 {
        return domain("need at least one grid step");
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("Δ must be positive, got {delta}"));
    }
    if !g.total_mass().is_finite() {
        return domain("trawl function is not integrable");
    }
    let b = (1..=n + 1)
        .map(|k| g.integral((k - 1) as f64 * delta, k as f64 * delta))
        .collect::<Result<Vec<_>>>()?;
    let d: Vec<f64> = (1..=n + 1).map(|k| g.tail((k - 1) as f64 * delta)).collect();
    // rounding can push a difference of equal neighbours slightly negative
    let c: Vec<f64> = (0..n).map(|k| (b[k] - b[k + 1]).max(0.0)).collect();
    // d[k] − d[k+1] is b[k]; use the directly integrated value
    let e: Vec<f64> = b[..n].to_vec();
    Ok(SliceMatrix { n, delta, b, c, d, e })
}

/// Weighted grid values from a dense matrix of slice variables.
pub fn add_weighted_slices(l: &DMatrix<f64>, w: &[f64]) -> Result<Vec<f64>> {
    if l.nrows() != l.ncols() || l.nrows() == 0 {
        return domain(format!("slice matrix must be square, got {}×{}", l.nrows(), l.ncols()));
    }
    let n = l.nrows() - 1;
    if w.len() != n + 1 {
        return domain(format!("weight vector needs {} entries, got {}", n + 1, w.len()));
    }
    let mut x = vec![0.0; n + 1];
    for k in 0..=n {
        let mut tmp = 0.0;
        for j in 1..=k + 1 {
            let col: f64 = ((k + 2 - j)..=(n + 2 - j)).map(|i| l[(i - 1, j - 1)]).sum();
            tmp += w[k + 1 - j] * col;
        }
        x[k] = tmp;
    }
    Ok(x)
}

/// A simulated path on the grid after burn-in.
#[derive(Clone, Debug, PartialEq)]
pub struct SimPath {
    pub delta: f64,
    /// `Y` at grid points `burn_in, …, n` (times `burn_in·Δ, …, nΔ`).
    pub values: Vec<f64>,
    pub burn_in: usize,
    pub master_seed: u64,
    pub replicate: u64,
}

impl SimPath {
    /// Time stamps of the retained values.
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| (self.burn_in + i) as f64 * self.delta).collect()
    }
}

/// Simulation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Number of grid steps; the grid is `0, Δ, …, nΔ`.
    pub n: usize,
    /// Leading points to discard; `None` uses `⌈T₉₉/Δ⌉`.
    pub burn_in: Option<usize>,
    /// Evaluate weights at `(k+1−j)Δ` instead of `(k+2−j)Δ`.
    pub weight_shift: bool,
    /// Slices whose measure is below this fraction of `∫g` are set to zero.
    /// `0` keeps every slice of positive measure (exact).
    pub min_slice_fraction: f64,
}

impl SimConfig {
    pub fn new(n: usize) -> Self {
        SimConfig { n, burn_in: None, weight_shift: false, min_slice_fraction: 0.0 }
    }

    pub fn burn_in(mut self, b: usize) -> Self {
        self.burn_in = Some(b);
        self
    }

    pub fn weight_shift(mut self, on: bool) -> Self {
        self.weight_shift = on;
        self
    }

    pub fn min_slice_fraction(mut self, f: f64) -> Self {
        self.min_slice_fraction = f;
        self
    }
}

/// `⌈T₉₉/Δ⌉` with `∫_{T₉₉}^∞ g = 0.01 ∫_0^∞ g`.
pub fn default_burn_in(g: &TrawlFunction, delta: f64) -> usize {
    if g.total_mass() <= 0.0 {
        return 0;
    }
    (g.tail_quantile(0.01) / delta).ceil() as usize
}

/// Weights `w[r−1] = p(rΔ)` (or `p((r−1)Δ)` when shifted), `r = 1..=n+1`.
pub fn slice_weights(p: &PeriodicFunction, n: usize, delta: f64, shift: bool) -> Vec<f64> {
    let off = if shift { 0 } else { 1 };
    (0..=n).map(|r| p.eval((r + off) as f64 * delta)).collect()
}

/// Precomputed laws and weights shared by all replicates of one model.
pub struct SlicePlan {
    n: usize,
    delta: f64,
    burn_in: usize,
    body: Vec<SliceLaw>,
    bottom: Vec<SliceLaw>,
    first: Vec<SliceLaw>,
    // one past the last row with a nonzero body law
    body_rows: usize,
    weights: Vec<f64>,
    constant_weights: bool,
}

impl SlicePlan {
    pub fn new(model: &ModelSpec, cfg: &SimConfig) -> Result<Self> {
        model.validate()?;
        model.kernel.require_kernel()?;
        let n = cfg.n;
        let delta = model.delta;
        let burn_in = cfg.burn_in.unwrap_or_else(|| default_burn_in(&model.trawl, delta));
        if burn_in >= n {
            return Err(Error::Config(format!("burn-in {burn_in} must be smaller than n = {n}")));
        }
        if !(cfg.min_slice_fraction >= 0.0) {
            return Err(Error::Config("slice cutoff must be nonnegative".into()));
        }
        let s = compute_slices(&model.trawl, n, delta)?;
        let cutoff = cfg.min_slice_fraction * model.trawl.total_mass();
        let law = |m: f64| {
            if m <= cutoff {
                Ok(SliceLaw::Zero)
            } else {
                model.seed.slice_law(m)
            }
        };
        let body = s.c.iter().map(|&m| law(m)).collect::<Result<Vec<_>>>()?;
        let bottom = s.b.iter().map(|&m| law(m)).collect::<Result<Vec<_>>>()?;
        let mut first = s.e.iter().map(|&m| law(m)).collect::<Result<Vec<_>>>()?;
        first.push(law(s.d[n])?);
        let body_rows = body.iter().rposition(|l| !matches!(l, SliceLaw::Zero)).map_or(0, |i| i + 1);
        let weights = slice_weights(&model.kernel, n, delta, cfg.weight_shift);
        let constant_weights = weights.iter().all(|&w| w == weights[0]);
        Ok(SlicePlan { n, delta, burn_in, body, bottom, first, body_rows, weights, constant_weights })
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// Full path `Y_0, …, Y_{nΔ}` (before burn-in removal).
    pub fn draw_full(&self, rng: &mut RandomStream) -> Vec<f64> {
        let n = self.n;
        let w = &self.weights;
        let mut y = vec![0.0; n + 1];
        // column 1: Y_k collects rows k+1..=n+1 with weight p((k+1)Δ)
        let mut suffix = 0.0;
        let mut col: Vec<f64> = self.first.iter().map(|l| l.sample(rng)).collect();
        for i in (0..=n).rev() {
            suffix += col[i];
            col[i] = suffix;
        }
        for k in 0..=n {
            y[k] += w[k] * col[k];
        }
        // columns j = 2..=n+1; age r = k+2−j
        let mut diff = vec![0.0; n + 2];
        let mut vals = vec![0.0; self.body_rows.min(n)];
        for j in 2..=n + 1 {
            let bottom_row = n + 2 - j;
            let top = self.body_rows.min(bottom_row - 1);
            for (v, law) in vals[..top].iter_mut().zip(&self.body) {
                *v = law.sample(rng);
            }
            let bottom = self.bottom[bottom_row - 1].sample(rng);
            let mut s = 0.0;
            for r in (1..=top).rev() {
                s += vals[r - 1];
                y[j - 2 + r] += w[r - 1] * s;
            }
            if bottom != 0.0 {
                if self.constant_weights {
                    diff[j - 1] += w[0] * bottom;
                    diff[j - 1 + bottom_row] -= w[0] * bottom;
                } else {
                    for r in 1..=bottom_row {
                        y[j - 2 + r] += w[r - 1] * bottom;
                    }
                }
            }
        }
        if self.constant_weights {
            let mut run = 0.0;
            for k in 0..=n {
                run += diff[k];
                y[k] += run;
            }
        }
        y
    }

    pub fn draw(&self, master_seed: u64, replicate: u64) -> SimPath {
        let mut rng = RandomStream::for_replicate(master_seed, replicate);
        let full = self.draw_full(&mut rng);
        SimPath {
            delta: self.delta,
            values: full[self.burn_in..].to_vec(),
            burn_in: self.burn_in,
            master_seed,
            replicate,
        }
    }
}

/// One replicate (index 0) of the periodic trawl process.
pub fn simulate(model: &ModelSpec, cfg: &SimConfig, master_seed: u64) -> Result<SimPath> {
    Ok(SlicePlan::new(model, cfg)?.draw(master_seed, 0))
}

/// Replicates `0..count`, in parallel; replicate `r` only depends on
/// `(master_seed, r)`.
pub fn simulate_replicates(model: &ModelSpec, cfg: &SimConfig, master_seed: u64, count: usize) -> Result<Vec<SimPath>> {
    let plan = SlicePlan::new(model, cfg)?;
    Ok((0..count as u64).into_par_iter().map(|r| plan.draw(master_seed, r)).collect())
}

/// Deterministic seasonality applied to a path of a plain trawl process.
pub fn apply_seasonality(path: &SimPath, q: &PeriodicFunction, kind: SeasonalKind) -> Vec<f64> {
    path.times()
        .iter()
        .zip(&path.values)
        .map(|(&t, &x)| match kind {
            SeasonalKind::Additive => q.eval(t) + x,
            SeasonalKind::Multiplicative => q.eval(t) * x,
        })
        .collect()
}
