//! Asymptotic covariances of the sample mean, sample autocovariances and
//! sample autocorrelations of `Y` observed on the grid `ΔZ`, the checks of
//! the summability conditions behind them, and the θ-weak-dependence
//! coefficient.
//!
//! With `f(x, u) = p(u) 1{0 < x < g(u)} 1{u ≥ 0}`,
//!
//! ```text
//! V_Δ    = Σ_j γ(jΔ)
//! v_pq   = κ₄ ∫∫ G_p G_q dx du + Σ_l [γ(lΔ)γ((l+p−q)Δ) + γ((l−q)Δ)γ((l+p)Δ)]
//! w_pq   = (v_pq − ρ_p v_0q − ρ_q v_p0 + ρ_p ρ_q v_00) / γ(0)²
//! G_k(x, u) = Σ_j f(x, u+jΔ) f(x, u+(j+k)Δ),   u ∈ [0, Δ]
//! ```
//!
//! Because `g` is decreasing, `G_k(·, u)` is a step function of `x` that
//! equals the partial sum `S_k,m(u) = Σ_{j ≤ m−k} p(u+jΔ) p(u+(j+k)Δ)` on
//! `(g(u+(m+1)Δ), g(u+mΔ)]`, which turns the `x`-integral into a sum.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{periodic_shifted_integral, quadrature::gauss_legendre, MemoryClass, Quadrature};
use crate::kernels::{PeriodicFunction, TrawlFunction};
use crate::model::ModelSpec;
use crate::moments::theoretical_acov;
use crate::special::hurwitz_zeta;

/// Relative size below which a neglected series remainder is accepted.
const SERIES_TOL: f64 = 1e-12;
/// Explicit lag range before the Euler–Maclaurin tail for smooth
/// power-law autocovariances.
const EM_LAG: usize = 4000;
/// Lag caps for plain truncation.
const MAX_LAG_CLOSED: usize = 1_000_000;
const MAX_LAG_QUADRATURE: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticCovariances {
    pub delta: f64,
    /// `V_Δ`, the limit of `n Var(Ȳ_n)`.
    pub v_delta: f64,
    /// `(v_pq)`, `p, q = 0..=h`.
    pub v_matrix: DMatrix<f64>,
    /// `(w_pq)`, `p, q = 1..=h`.
    pub w_matrix: DMatrix<f64>,
    /// Largest lag summed explicitly.
    pub truncation_lag: usize,
    /// Bound on the relative truncation error of the lag sums.
    pub achieved_tolerance: f64,
}

/// A lag series together with its truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_lag: usize,
    /// Relative bound on the neglected remainder (0 when the remainder is
    /// summed in closed or asymptotic form).
    pub tolerance: f64,
}

fn require_short_memory(model: &ModelSpec) -> Result<()> {
    if model.trawl.memory_class() == MemoryClass::Long {
        return Err(Error::AssumptionViolation(format!(
            "{} has long memory: Σ|γ(jΔ)| diverges and the central limit theorems do not apply",
            model.trawl
        )));
    }
    Ok(())
}

fn second_order(model: &ModelSpec) -> Result<(f64, f64)> {
    model.validate()?;
    model.kernel.require_kernel()?;
    let c = model.seed.cumulants().map_err(|e| Error::AssumptionViolation(format!("{e}")))?;
    Ok((c.k2, c.k4))
}

/// `Σ_{l>L} f(l)` for a smooth, eventually monotone `f` by Euler–Maclaurin.
fn em_tail(f: &dyn Fn(f64) -> f64, big_l: f64) -> Result<f64> {
    // x = L e^s makes power-law tails decay exponentially in s
    let integral = Quadrature::with_tolerance(1e-300, 1e-13)
        .integrate_to_infinity(|s| {
            let x = big_l * s.exp();
            if x.is_finite() {
                f(x) * x
            } else {
                0.0
            }
        }, 0.0)?
        .value;
    let h = 1.0;
    let d1 = (f(big_l + h) - f(big_l - h)) / (2.0 * h);
    let d3 = (f(big_l + 2.0 * h) - 2.0 * f(big_l + h) + 2.0 * f(big_l - h) - f(big_l - 2.0 * h)) / (2.0 * h * h * h);
    Ok(integral - 0.5 * f(big_l) - d1 / 12.0 + d3 / 720.0)
}

/// Lattice autocovariances `γ(lΔ)` with their truncation.
struct LagAcov {
    delta: f64,
    k2: f64,
    trawl: TrawlFunction,
    /// `p ≡ 1`: `γ(x) = κ₂ ∫_{|x|Δ}^∞ g` for real `x`.
    closed: bool,
    /// Smooth power-law decay handled by [`em_tail`].
    em: bool,
    /// Explicit range `|l| ≤ lag`.
    lag: usize,
    table: Vec<f64>,
    bound_scale: f64,
}

impl LagAcov {
    fn new(model: &ModelSpec, extra: usize) -> Result<Self> {
        let (k2, _) = second_order(model)?;
        require_short_memory(model)?;
        let g = model.trawl.clone();
        let delta = model.delta;
        let closed = model.kernel.is_one();
        let em = closed && matches!(g, TrawlFunction::SupGamma { .. });
        let bound_scale = k2 * model.kernel.sup_abs().powi(2);
        let g0 = theoretical_acov(model, 0.0)?;
        let lag = if em {
            EM_LAG.max(8 * extra)
        } else {
            let cap = if closed { MAX_LAG_CLOSED } else { MAX_LAG_QUADRATURE };
            let ok = |l: usize| {
                let x = l.saturating_sub(extra) as f64 * delta;
                bound_scale * g.lattice_tail_sum(x, delta) <= SERIES_TOL * g0.abs()
            };
            smallest_lag(ok, cap).max(extra + 1)
        };
        let len = lag + extra + 1;
        let table = if closed {
            Vec::new()
        } else {
            (0..len).map(|l| theoretical_acov(model, l as f64 * delta)).collect::<Result<Vec<_>>>()?
        };
        Ok(LagAcov { delta, k2, trawl: g, closed, em, lag, table, bound_scale })
    }

    fn at(&self, l: f64) -> f64 {
        let a = l.abs();
        if self.closed {
            self.k2 * self.trawl.tail(a * self.delta)
        } else {
            self.table.get(a.round() as usize).copied().unwrap_or(0.0)
        }
    }

    fn gamma0(&self) -> f64 {
        self.at(0.0)
    }

    /// Bound on `Σ_{l ≥ x} |γ(lΔ)|`.
    fn abs_sum_bound(&self, x: f64) -> f64 {
        self.bound_scale * self.trawl.lattice_tail_sum(x.max(0.0) * self.delta, self.delta)
    }

    /// `Σ_{l∈Z} φ(l)`: explicit for `|l| ≤ lag`, Euler–Maclaurin tails when
    /// `γ` is smooth in the lag.
    fn sum_over_z(&self, phi: &dyn Fn(f64) -> f64) -> Result<f64> {
        let big_l = self.lag as i64;
        let mut s = pairwise_sum((-big_l..=big_l).map(|l| phi(l as f64)));
        if self.em {
            s += em_tail(phi, big_l as f64)?;
            s += em_tail(&|x| phi(-x), big_l as f64)?;
        }
        Ok(s)
    }

    /// Relative bound for the neglected part of a sum of products of two
    /// autocovariances with shifts up to `extra`.
    fn pair_tolerance(&self, extra: usize) -> f64 {
        if self.em {
            return 0.0;
        }
        let x = self.lag.saturating_sub(extra) as f64;
        let first = self.bound_scale * self.trawl.tail(x * self.delta);
        4.0 * first * self.abs_sum_bound(x) / self.gamma0().powi(2)
    }
}

/// Smallest lag in `[1, cap]` satisfying a monotone predicate (`cap` if none).
fn smallest_lag(ok: impl Fn(usize) -> bool, cap: usize) -> usize {
    let mut hi = 1;
    while !ok(hi) {
        if hi >= cap {
            return cap;
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Pairwise summation, deterministic in the order of the terms.
fn pairwise_sum(it: impl Iterator<Item = f64>) -> f64 {
    fn rec(v: &[f64]) -> f64 {
        if v.len() <= 64 {
            v.iter().sum()
        } else {
            let (a, b) = v.split_at(v.len() / 2);
            rec(a) + rec(b)
        }
    }
    rec(&it.collect::<Vec<_>>())
}

/// `V_Δ` in closed form for `p ≡ 1`.
fn v_delta_closed_form(g: &TrawlFunction, delta: f64, k2: f64) -> Result<f64> {
    Ok(k2 * match g {
        TrawlFunction::Exponential { lambda } => {
            // (1 + e^{λΔ}) / (λ(e^{λΔ} − 1)), written to avoid overflow
            let e = (-lambda * delta).exp();
            (1.0 + e) / (lambda * -(-lambda * delta).exp_m1())
        }
        TrawlFunction::SupGamma { alpha, h } => {
            let a = alpha / delta;
            alpha / (h - 1.0) * (2.0 * a.powf(h - 1.0) * hurwitz_zeta(h - 1.0, a)? - 1.0)
        }
        TrawlFunction::Tabulated(_) => 2.0 * g.lattice_tail_sum(0.0, delta) - g.total_mass(),
    })
}

/// `V_Δ = Σ_j γ(jΔ)`, the asymptotic variance of `√n Ȳ_n`.
pub fn sample_mean_variance(model: &ModelSpec) -> Result<f64> {
    let (k2, _) = second_order(model)?;
    require_short_memory(model)?;
    if model.kernel.is_one() {
        return v_delta_closed_form(&model.trawl, model.delta, k2);
    }
    Ok(sample_mean_variance_series(model)?.value)
}

/// `V_Δ` as the truncated series `γ(0) + 2 Σ_{j≥1} γ(jΔ)`.
pub fn sample_mean_variance_series(model: &ModelSpec) -> Result<SeriesValue> {
    let acov = LagAcov::new(model, 0)?;
    let big_l = acov.lag;
    let mut value = acov.gamma0() + 2.0 * pairwise_sum((1..=big_l).map(|j| acov.at(j as f64)));
    let mut tolerance = 0.0;
    if acov.em {
        value += 2.0 * em_tail(&|x| acov.at(x), big_l as f64)?;
    } else {
        tolerance = 2.0 * acov.abs_sum_bound(big_l as f64 + 1.0) / value.abs();
    }
    Ok(SeriesValue { value, truncation_lag: big_l, tolerance })
}

/// `(v_pq)_{p,q=0..=h}`, the limit of `n Cov(γ̂*(pΔ), γ̂*(qΔ))`.
pub fn acov_limit_matrix(model: &ModelSpec, h: usize) -> Result<DMatrix<f64>> {
    Ok(acov_limit(model, h)?.0)
}

fn acov_limit(model: &ModelSpec, h: usize) -> Result<(DMatrix<f64>, LagAcov, f64)> {
    let (_, k4) = second_order(model)?;
    let acov = LagAcov::new(model, h)?;
    let (gterm, gtol) = if k4 == 0.0 {
        (DMatrix::zeros(h + 1, h + 1), 0.0)
    } else if model.kernel.is_one() {
        (g_term_closed(&model.trawl, model.delta, h), 0.0)
    } else {
        let lags: Vec<usize> = (0..=h).collect();
        g_term_quadrature(model, &lags, &vec![0.0; h + 1])?
    };
    let mut v = DMatrix::zeros(h + 1, h + 1);
    for p in 0..=h {
        for q in p..=h {
            let (pf, qf) = (p as f64, q as f64);
            let s = acov.sum_over_z(&|l| acov.at(l) * acov.at(l + pf - qf) + acov.at(l - qf) * acov.at(l + pf))?;
            let val = k4 * gterm[(p, q)] + s;
            v[(p, q)] = val;
            v[(q, p)] = val;
        }
    }
    let tol = acov.pair_tolerance(h) + gtol;
    Ok((v, acov, tol))
}

/// `∫∫ G_p G_q` for `p ≡ 1`:
/// `(2M+1−p−q) T_M + 2 Σ_{m>M} T_m` with `M = max(p, q)`, `T_m = ∫_{mΔ}^∞ g`.
fn g_term_closed(g: &TrawlFunction, delta: f64, h: usize) -> DMatrix<f64> {
    DMatrix::from_fn(h + 1, h + 1, |p, q| {
        let m = p.max(q);
        let coeff = (2 * m + 1 - p - q) as f64;
        coeff * g.tail(m as f64 * delta) + 2.0 * g.lattice_tail_sum((m + 1) as f64 * delta, delta)
    })
}

/// `∫∫ (G_a − r_a G_0)(G_b − r_b G_0)` for `a, b` in `lags`, by composite
/// Gauss–Legendre in `u` and the step-function reduction in `x`. Returns
/// the matrix and a relative bound on the truncation in `m`.
fn g_term_quadrature(model: &ModelSpec, lags: &[usize], r: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let (g, p, delta) = (&model.trawl, &model.kernel, model.delta);
    let kmax = lags.iter().copied().max().unwrap_or(0);
    let sup4 = p.sup_abs().powi(4);
    let rmax = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    // Remainder of Σ_{m>J} (g_m − g_{m+1}) (m+1)² bounded through tails of g.
    let remainder = |j: usize| {
        let k = (j + 2) as f64;
        let tail_sum = (2.0 * k + 1.0) * g.eval(k * delta)
            + ((2.0 * k + 1.0) * g.tail(k * delta) + 2.0 * g.second_tail(k * delta) / delta) / delta;
        sup4 * (1.0 + rmax).powi(2) * ((j + 3) as f64).powi(2) * g.eval((j + 1) as f64 * delta) + tail_sum * sup4 * (1.0 + rmax).powi(2)
    };
    let scale = sup4 * g.eval(0.0);
    let jmax = smallest_lag(|j| remainder(j) <= 1e-13 * scale, MAX_LAG_QUADRATURE).max(kmax + 1);
    let (nodes, weights) = gauss_legendre(16);
    let panels = 16;
    let width = delta / panels as f64;
    let n = lags.len();
    let mut out = DMatrix::zeros(n, n);
    let mut pv = vec![0.0; jmax + kmax + 2];
    let mut gv = vec![0.0; jmax + 2];
    let mut s = vec![vec![0.0; jmax + 1]; kmax + 1];
    let mut a = vec![vec![0.0; jmax + 1]; n];
    for panel in 0..panels {
        let lo = panel as f64 * width;
        for (x, w) in nodes.iter().zip(&weights) {
            let u = lo + 0.5 * width * (x + 1.0);
            let wu = 0.5 * width * w;
            for (i, v) in pv.iter_mut().enumerate() {
                *v = p.eval(u + i as f64 * delta);
            }
            for (m, v) in gv.iter_mut().enumerate() {
                *v = g.eval(u + m as f64 * delta);
            }
            for (k, sk) in s.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (m, v) in sk.iter_mut().enumerate() {
                    if m >= k {
                        acc += pv[m - k] * pv[m];
                    }
                    *v = acc;
                }
            }
            for (i, &k) in lags.iter().enumerate() {
                for m in 0..=jmax {
                    a[i][m] = s[k][m] - r[i] * s[0][m];
                }
            }
            for i in 0..n {
                for j in i..n {
                    let mut acc = 0.0;
                    for m in 0..=jmax {
                        acc += (gv[m] - gv[m + 1]) * a[i][m] * a[j][m];
                    }
                    out[(i, j)] += wu * acc;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = out[(j, i)];
        }
    }
    let denom = out.iter().fold(0.0f64, |m, v: &f64| m.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok((out, remainder(jmax) * delta / denom))
}

/// `∫∫ (G_p − r_p G_0)(G_q − r_q G_0)` for `p ≡ 1` from the step-function
/// sum, with the linear-growth tail summed by parts.
fn g_term_expanded_closed(g: &TrawlFunction, delta: f64, lags: &[usize], r: &[f64]) -> DMatrix<f64> {
    let kmax = lags.iter().copied().max().unwrap_or(0);
    let b = |m: usize| g.integral(m as f64 * delta, (m + 1) as f64 * delta).unwrap_or(0.0);
    let t = |m: usize| g.tail(m as f64 * delta);
    let n = lags.len();
    DMatrix::from_fn(n, n, |i, j| {
        let (p, q) = (lags[i], lags[j]);
        let (rp, rq) = (r[i], r[j]);
        let a = |k: usize, rk: f64, m: usize| (m + 1).saturating_sub(k) as f64 - rk * (m + 1) as f64;
        let mut acc = 0.0;
        for m in 0..kmax {
            acc += (b(m) - b(m + 1)) * a(p, rp, m) * a(q, rq, m);
        }
        // m ≥ K: A_k,m = α_k (m+1) − k, Q(m) − Q(m−1) = α_p α_q (2m+1) − (α_p q + α_q p)
        let kk = kmax;
        let (ap, aq) = (1.0 - rp, 1.0 - rq);
        let (pf, qf) = (p as f64, q as f64);
        let sum_b = t(kk + 1);
        let sum_mb = (kk + 1) as f64 * t(kk + 1) + g.lattice_tail_sum((kk + 2) as f64 * delta, delta);
        acc += a(p, rp, kk) * a(q, rq, kk) * b(kk);
        acc += ap * aq * (2.0 * sum_mb + sum_b) - (ap * qf + aq * pf) * sum_b;
        acc
    })
}

/// `(w_pq)_{p,q=1..=h}` from `v` by the Bartlett combination.
pub fn acf_limit_matrix(model: &ModelSpec, h: usize) -> Result<DMatrix<f64>> {
    let (v, acov, _) = acov_limit(model, h)?;
    let g0 = acov.gamma0();
    if g0 == 0.0 {
        return Err(Error::DegenerateSeries("the process has zero variance".into()));
    }
    let rho: Vec<f64> = (0..=h).map(|k| acov.at(k as f64) / g0).collect();
    Ok(bartlett_from_acov(&v, &rho, g0))
}

/// `w_pq = (v_pq − ρ_p v_0q − ρ_q v_p0 + ρ_p ρ_q v_00)/γ(0)²`, `p, q ≥ 1`.
pub fn bartlett_from_acov(v: &DMatrix<f64>, rho: &[f64], gamma0: f64) -> DMatrix<f64> {
    let h = v.nrows() - 1;
    DMatrix::from_fn(h, h, |i, j| {
        let (p, q) = (i + 1, j + 1);
        (v[(p, q)] - rho[p] * v[(0, q)] - rho[q] * v[(p, 0)] + rho[p] * rho[q] * v[(0, 0)]) / (gamma0 * gamma0)
    })
}

fn bartlett_summand(rho: &dyn Fn(f64) -> f64, l: f64, p: f64, q: f64) -> f64 {
    let (rp, rq, rl) = (rho(p), rho(q), rho(l));
    rho(l + q) * rho(l + p) + rho(l - q) * rho(l + p) - 2.0 * rho(l + q) * rl * rp - 2.0 * rl * rho(l + p) * rq
        + 2.0 * rp * rq * rl * rl
}

/// `(w_pq)` from the expanded form: the fourth-cumulant integral of
/// `(G_p − ρ_p G_0)(G_q − ρ_q G_0)` plus the autocorrelation series.
pub fn acf_limit_matrix_expanded(model: &ModelSpec, h: usize) -> Result<DMatrix<f64>> {
    let (_, k4) = second_order(model)?;
    let acov = LagAcov::new(model, h)?;
    let g0 = acov.gamma0();
    if g0 == 0.0 {
        return Err(Error::DegenerateSeries("the process has zero variance".into()));
    }
    let lags: Vec<usize> = (1..=h).collect();
    let r: Vec<f64> = lags.iter().map(|&k| acov.at(k as f64) / g0).collect();
    let gterm = if k4 == 0.0 {
        DMatrix::zeros(h, h)
    } else if model.kernel.is_one() {
        g_term_expanded_closed(&model.trawl, model.delta, &lags, &r)
    } else {
        g_term_quadrature(model, &lags, &r)?.0
    };
    let rho = |x: f64| acov.at(x) / g0;
    let mut w = DMatrix::zeros(h, h);
    for i in 0..h {
        for j in i..h {
            let (p, q) = ((i + 1) as f64, (j + 1) as f64);
            let s = acov.sum_over_z(&|l| bartlett_summand(&rho, l, p, q))?;
            let val = k4 / (g0 * g0) * gterm[(i, j)] + s;
            w[(i, j)] = val;
            w[(j, i)] = val;
        }
    }
    Ok(w)
}

/// Gaussian (`κ₄ = 0`) Bartlett matrix `(w_pq)_{p,q=1..=h}` from an
/// autocorrelation function given on lags `0..=max_lag` (zero beyond).
pub fn bartlett_plugin(rho: &dyn Fn(usize) -> f64, h: usize, max_lag: usize) -> DMatrix<f64> {
    let r = |x: f64| {
        let a = x.abs().round() as usize;
        if a > max_lag + h {
            0.0
        } else {
            rho(a)
        }
    };
    let big_l = max_lag as i64;
    let mut w = DMatrix::zeros(h, h);
    for i in 0..h {
        for j in i..h {
            let (p, q) = ((i + 1) as f64, (j + 1) as f64);
            let val = pairwise_sum((-big_l..=big_l).map(|l| bartlett_summand(&r, l as f64, p, q)));
            w[(i, j)] = val;
            w[(j, i)] = val;
        }
    }
    w
}

/// `V_Δ`, `v` and `w` for lags up to `h`.
pub fn asymptotic_covariances(model: &ModelSpec, h: usize) -> Result<AsymptoticCovariances> {
    if h == 0 {
        return Err(Error::Domain("at least one lag is needed".into()));
    }
    let v_delta = sample_mean_variance(model)?;
    let (v, acov, tol) = acov_limit(model, h)?;
    let g0 = acov.gamma0();
    if g0 == 0.0 {
        return Err(Error::DegenerateSeries("the process has zero variance".into()));
    }
    let rho: Vec<f64> = (0..=h).map(|k| acov.at(k as f64) / g0).collect();
    let w = bartlett_from_acov(&v, &rho, g0);
    Ok(AsymptoticCovariances {
        delta: model.delta,
        v_delta,
        v_matrix: v,
        w_matrix: w,
        truncation_lag: acov.lag,
        achieved_tolerance: tol,
    })
}

/// Which summability conditions and limit theorems hold for a model.
#[derive(Clone, Debug, PartialEq)]
pub struct CltDiagnostics {
    pub delta: f64,
    /// `Σ_j |γ(jΔ)| < ∞`.
    pub sum_abs_acov: bool,
    /// `Σ_j γ(jΔ)² < ∞`.
    pub sum_sq_acov: bool,
    pub finite_variance: bool,
    pub finite_fourth_moment: bool,
    /// Asymptotic normality of the sample mean.
    pub sample_mean_clt: bool,
    /// Joint asymptotic normality of sample autocovariances and
    /// autocorrelations.
    pub acf_clt: bool,
    pub notes: Vec<String>,
}

/// Summability checks behind the limit theorems. The periodic kernel is
/// bounded, so the conditions are those of the trawl function itself.
pub fn check_clt_assumptions(model: &ModelSpec, delta: f64) -> CltDiagnostics {
    let (sum_abs_acov, sum_sq_acov) = match model.trawl {
        TrawlFunction::SupGamma { h, .. } => (h > 2.0, h > 1.5),
        _ => (true, true),
    };
    let finite_variance = model.seed.has_finite_variance();
    let finite_fourth_moment = model.seed.has_finite_fourth_moment();
    let mut notes = Vec::new();
    if !sum_abs_acov {
        notes.push(format!("{}: Σ|γ(jΔ)| diverges (long memory, needs H > 2)", model.trawl));
    }
    if !sum_sq_acov {
        notes.push(format!("{}: Σγ(jΔ)² diverges (needs H > 3/2)", model.trawl));
    }
    if !finite_variance {
        notes.push(format!("{} has infinite variance", model.seed));
    } else if !finite_fourth_moment {
        notes.push(format!("{} has no finite fourth moment", model.seed));
    }
    if !model.kernel.has_kernel() {
        notes.push("a tabulated correlation factor does not determine the kernel p".into());
    }
    let kernel = model.kernel.has_kernel();
    CltDiagnostics {
        delta,
        sum_abs_acov,
        sum_sq_acov,
        finite_variance,
        finite_fourth_moment,
        sample_mean_clt: kernel && finite_variance && sum_abs_acov,
        acf_clt: kernel && finite_fourth_moment && sum_abs_acov,
        notes,
    }
}

impl std::fmt::Display for CltDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "sum |gamma(j delta)| finite: {}", yn(self.sum_abs_acov))?;
        writeln!(f, "sum gamma(j delta)^2 finite: {}", yn(self.sum_sq_acov))?;
        writeln!(f, "finite variance: {}", yn(self.finite_variance))?;
        writeln!(f, "finite fourth moment: {}", yn(self.finite_fourth_moment))?;
        writeln!(f, "sample mean CLT applies: {}", yn(self.sample_mean_clt))?;
        writeln!(f, "sample ACF CLT applies: {}", yn(self.acf_clt))?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// `∫_r^∞ φ(p(s)) g(s) ds`.
fn shifted_tail_integral(g: &TrawlFunction, p: &PeriodicFunction, r: f64, phi: impl Fn(f64) -> f64) -> Result<f64> {
    match p.period() {
        None => Ok(phi(1.0) * g.tail(r)),
        Some(tau) => periodic_shifted_integral(g, tau, r, |v| phi(p.eval(r + v))),
    }
}

/// θ-weak-dependence coefficient `θ_Y(r)`.
///
/// Finite-variation seeds use `(∫|ξ|ν(dξ) + |γ₀|) ∫_r^∞ |p| g`, all others
/// `(Var(L') ∫_r^∞ p² g + E(L')² (∫_r^∞ p g)²)^{1/2}`.
pub fn weak_dependence_theta(model: &ModelSpec, r: f64) -> Result<f64> {
    model.validate()?;
    model.kernel.require_kernel()?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r must be nonnegative, got {r}")));
    }
    let (g, p) = (&model.trawl, &model.kernel);
    let t = model.seed.triplet();
    if t.has_finite_variation() {
        let c = t.measure.abs_first_moment() + t.drift().abs();
        return Ok(c * shifted_tail_integral(g, p, r, f64::abs)?);
    }
    let (k1, k2) = model
        .seed
        .mean_variance()
        .map_err(|e| Error::AssumptionViolation(format!("θ-weak dependence needs a finite variance: {e}")))?;
    let sq = shifted_tail_integral(g, p, r, |x| x * x)?;
    let lin = if k1 == 0.0 { 0.0 } else { shifted_tail_integral(g, p, r, |x| x)? };
    Ok((k2 * sq + k1 * k1 * lin * lin).max(0.0).sqrt())
}
