//! Theoretical moments of periodic trawl processes and sample statistics.
//!
//! For `Y_t = ∫∫ p(t−s) 1{0<x<g(t−s)} L(dx,ds)`:
//!
//! ```text
//! E Y_t          = E(L') ∫ p g
//! Var Y_t        = Var(L') ∫ p² g
//! Cov(Y_0, Y_t)  = Var(L') ∫_0^∞ p(u) p(t+u) g(t+u) du
//! ```

use crate::error::{domain, Error, Result};
use crate::kernels::{cross_integral, weighted_mass, PeriodicFunction};
use crate::model::ModelSpec;

/// Sample or theoretical autocorrelations at lags `0, Δ, …, H_max·Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Acf {
    pub delta: f64,
    pub values: Vec<f64>,
    /// `true` for `ρ̂` (mean removed), `false` for `ρ̂*`.
    pub centered: bool,
    /// Length of the series the estimate came from (0 for theoretical).
    pub n: usize,
}

impl Acf {
    pub fn max_lag(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn at(&self, h: usize) -> Option<f64> {
        self.values.get(h).copied()
    }
}

/// `(E Y_t, Var Y_t)`.
pub fn theoretical_moments(model: &ModelSpec) -> Result<(f64, f64)> {
    model.kernel.require_kernel()?;
    let (k1, k2) = model.seed.mean_variance()?;
    let mean = if k1 == 0.0 { 0.0 } else { k1 * weighted_mass(&model.trawl, &model.kernel)? };
    let var = k2 * cross_integral(&model.trawl, &model.kernel, 0.0)?;
    Ok((mean, var))
}

/// `Cov(Y_0, Y_t)` for `t ≥ 0`.
pub fn theoretical_acov(model: &ModelSpec, t: f64) -> Result<f64> {
    model.kernel.require_kernel()?;
    let (_, k2) = model.seed.mean_variance()?;
    Ok(k2 * cross_integral(&model.trawl, &model.kernel, t)?)
}

/// `Cor(Y_0, Y_t)` for `t ≥ 0`.
pub fn theoretical_acf(model: &ModelSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("lag must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let g = &model.trawl;
    if let PeriodicFunction::TabulatedC { .. } = model.kernel {
        return Ok(model.kernel.eval(t) * g.tail(t) / g.total_mass());
    }
    let v = cross_integral(g, &model.kernel, 0.0)?;
    if v == 0.0 {
        return domain("process has zero variance");
    }
    Ok(cross_integral(g, &model.kernel, t)? / v)
}

/// Autocovariances `γ(lΔ)`, `l = 0..=max_lag`.
pub fn lattice_acov(model: &ModelSpec, max_lag: usize) -> Result<Vec<f64>> {
    (0..=max_lag).map(|l| theoretical_acov(model, l as f64 * model.delta)).collect()
}

/// Autocorrelations `ρ(lΔ)`, `l = 0..=max_lag`.
pub fn theoretical_acf_lattice(model: &ModelSpec, max_lag: usize) -> Result<Acf> {
    let values = (0..=max_lag)
        .map(|l| theoretical_acf(model, l as f64 * model.delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(Acf { delta: model.delta, values, centered: true, n: 0 })
}

/// Deterministic seasonality added to or multiplied onto a trawl process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeasonalKind {
    /// `X^a_t = q(t) + X_t`.
    Additive,
    /// `X^m_t = q(t) X_t`.
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeasonalMoments {
    /// `E X_t` of the variant at time `t`.
    pub mean: f64,
    /// `Var X_t` of the variant at time `t`.
    pub variance: f64,
    /// `Cov(X_0, X_t)` of the variant.
    pub acov: f64,
    /// Correlation as defined for the variant; for the multiplicative
    /// variant this is `q(0)/q(t) · Cor(X_0, X_t)`, i.e. the covariance
    /// normalised by `Var X_t`.
    pub acor: Option<f64>,
}

/// First and second order structure of the seasonal variants of a plain
/// trawl process (`p ≡ 1`).
pub fn seasonal_variant_moments(
    model: &ModelSpec,
    q: &PeriodicFunction,
    kind: SeasonalKind,
    t: f64,
) -> Result<SeasonalMoments> {
    if !model.kernel.is_one() {
        return Err(Error::Config("seasonal variants are defined for p ≡ 1".into()));
    }
    q.require_kernel()?;
    let (mean, var) = theoretical_moments(model)?;
    let acov = theoretical_acov(model, t)?;
    let acor = theoretical_acf(model, t)?;
    let (q0, qt) = (q.eval(0.0), q.eval(t));
    Ok(match kind {
        SeasonalKind::Additive => SeasonalMoments { mean: qt + mean, variance: var, acov, acor: Some(acor) },
        SeasonalKind::Multiplicative => {
            if qt.abs() <= 1e-12 * q.sup_abs() {
                return domain(format!("q({t}) = 0, the multiplicative correlation is undefined"));
            }
            SeasonalMoments {
                mean: qt * mean,
                variance: qt * qt * var,
                acov: q0 * qt * acov,
                acor: Some(q0 / qt * acor),
            }
        }
    })
}

/// `Ȳ`.
pub fn sample_mean(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::DegenerateSeries("empty series".into()));
    }
    Ok(series.iter().sum::<f64>() / series.len() as f64)
}

fn lagged_sum(series: &[f64], h: usize, shift: f64) -> f64 {
    series
        .iter()
        .zip(&series[h..])
        .map(|(a, b)| (a - shift) * (b - shift))
        .sum()
}

/// `γ̂(h) = n⁻¹ Σ_{j=1}^{n−h} (Y_j − Ȳ)(Y_{j+h} − Ȳ)`, or the uncentered
/// `γ̂*(h)` without the mean.
pub fn sample_acov(series: &[f64], h: usize, centered: bool) -> Result<f64> {
    let n = series.len();
    if h >= n {
        return domain(format!("lag {h} needs a series longer than {n}"));
    }
    let shift = if centered { sample_mean(series)? } else { 0.0 };
    Ok(lagged_sum(series, h, shift) / n as f64)
}

/// Sample autocorrelations up to lag `max_lag`.
pub fn sample_acf(series: &[f64], delta: f64, max_lag: usize, centered: bool) -> Result<Acf> {
    let n = series.len();
    if max_lag >= n {
        return domain(format!("lag {max_lag} needs a series longer than {n}"));
    }
    if !(delta > 0.0) {
        return domain(format!("Δ must be positive, got {delta}"));
    }
    let shift = if centered { sample_mean(series)? } else { 0.0 };
    let g0 = lagged_sum(series, 0, shift);
    if g0 == 0.0 || !g0.is_finite() {
        return Err(Error::DegenerateSeries("zero sample variance".into()));
    }
    let values = (0..=max_lag)
        .map(|h| if h == 0 { 1.0 } else { lagged_sum(series, h, shift) / g0 })
        .collect();
    Ok(Acf { delta, values, centered, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{correlation_factor_c, Quadrature, TrawlFunction};
    use crate::levy::LevySeed;
    use std::f64::consts::PI;

    fn model(seed: LevySeed, g: TrawlFunction, p: PeriodicFunction) -> ModelSpec {
        ModelSpec::new(seed, g, p, 1.0, 100).unwrap()
    }

    fn gauss(mu: f64) -> LevySeed {
        LevySeed::Gaussian { mu, sigma2: 1.0 }
    }

    #[test]
    fn moment_examples() {
        let m = model(gauss(0.0), TrawlFunction::exponential(2.0).unwrap(), PeriodicFunction::One);
        assert_eq!(theoretical_moments(&m).unwrap(), (0.0, 0.5));
        let m = model(
            LevySeed::Poisson { rate: 2.0 },
            TrawlFunction::sup_gamma(1.0, 3.0).unwrap(),
            PeriodicFunction::One,
        );
        let (mean, var) = theoretical_moments(&m).unwrap();
        assert!((mean - 1.0).abs() < 1e-15 && (var - 1.0).abs() < 1e-15);
        let m = model(gauss(1.0), TrawlFunction::exponential(0.5).unwrap(), PeriodicFunction::sine(3.0).unwrap());
        let (mean, _) = theoretical_moments(&m).unwrap();
        let closed = 2.0 * PI * 3.0 / (0.25 * 9.0 + 4.0 * PI * PI);
        assert!((mean - closed).abs() < 1e-15);
        assert!((mean - 0.4517199).abs() < 1e-6);
        let c = model(LevySeed::Cauchy { scale: 1.0 }, TrawlFunction::exponential(1.0).unwrap(), PeriodicFunction::One);
        assert!(matches!(theoretical_moments(&c), Err(Error::UnsupportedMoment(_))));
    }

    #[test]
    fn acov_acf_examples() {
        let m = model(gauss(0.0), TrawlFunction::exponential(1.0).unwrap(), PeriodicFunction::One);
        assert!((theoretical_acov(&m, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((theoretical_acf(&m, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let m = model(gauss(0.0), TrawlFunction::sup_gamma(1.0, 3.0).unwrap(), PeriodicFunction::One);
        assert!((theoretical_acf(&m, 1.0).unwrap() - 0.25).abs() < 1e-15);

        let (lambda, tau) = (0.5, 3.0);
        let m = model(gauss(0.0), TrawlFunction::exponential(lambda).unwrap(), PeriodicFunction::sine(tau).unwrap());
        let rho = theoretical_acf(&m, 1.0).unwrap();
        assert!((rho + 0.2405657).abs() < 1e-6);
        // direct quadrature of ∫ p(u)p(1+u)g(1+u)du over many periods
        let q = Quadrature::with_tolerance(1e-15, 1e-14);
        let p = PeriodicFunction::sine(tau).unwrap();
        let mut direct = 0.0;
        for k in 0..40 {
            let (a, b) = (k as f64 * tau, (k + 1) as f64 * tau);
            direct += q
                .integrate(|u| p.eval(u) * p.eval(1.0 + u) * (-lambda * (1.0 + u)).exp(), a, b)
                .unwrap()
                .value;
        }
        let var = 8.0 * PI * PI / (lambda.powi(3) * tau * tau + 16.0 * PI * PI * lambda);
        assert!((theoretical_acov(&m, 1.0).unwrap() - direct).abs() < 1e-8);
        assert!((direct - (-0.5f64).exp() * -0.396626 * var).abs() < 1e-6);
        assert_eq!(theoretical_acov(&m, 0.0).unwrap(), theoretical_moments(&m).unwrap().1);
        assert_eq!(theoretical_acf(&m, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn factorisation() {
        let ps = [PeriodicFunction::sine(2.0).unwrap(), "fourier(2;0.4,1,0.2)".parse().unwrap()];
        let gs = [TrawlFunction::exponential(0.7).unwrap(), TrawlFunction::sup_gamma(1.5, 2.4).unwrap()];
        for p in &ps {
            for g in &gs {
                let m = model(gauss(0.0), g.clone(), p.clone());
                for &t in &[0.3, 1.1, 4.0] {
                    let lhs = theoretical_acf(&m, t).unwrap();
                    let rhs = correlation_factor_c(g, p, t).unwrap() * g.tail(t) / g.total_mass();
                    assert!((lhs - rhs).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn seasonal_variants() {
        let m = model(gauss(0.5), TrawlFunction::exponential(1.0).unwrap(), PeriodicFunction::One);
        let q: PeriodicFunction = "fourier(3;2,1,0)".parse().unwrap();
        let (mean, var) = theoretical_moments(&m).unwrap();
        let a = seasonal_variant_moments(&m, &q, SeasonalKind::Additive, 1.0).unwrap();
        assert_eq!(a.variance, var);
        assert!((a.mean - (q.eval(1.0) + mean)).abs() < 1e-15);
        let two: PeriodicFunction = "fourier(3;2)".parse().unwrap();
        let mm = seasonal_variant_moments(&m, &two, SeasonalKind::Multiplicative, 1.0).unwrap();
        assert!((mm.acor.unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let zero_at_1: PeriodicFunction = "fourier(4;0,1)".parse().unwrap();
        assert!(seasonal_variant_moments(&m, &zero_at_1, SeasonalKind::Multiplicative, 2.0).is_err());
        let ms = model(gauss(0.0), TrawlFunction::exponential(1.0).unwrap(), PeriodicFunction::sine(3.0).unwrap());
        assert!(seasonal_variant_moments(&ms, &q, SeasonalKind::Additive, 1.0).is_err());
    }

    #[test]
    fn sample_statistics() {
        let s = [1.0, 2.0, 3.0];
        assert!((sample_acov(&s, 0, true).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(sample_acov(&s, 1, true).unwrap().abs() < 1e-15);
        assert!((sample_acov(&s, 0, false).unwrap() - 14.0 / 3.0).abs() < 1e-15);
        assert!(sample_acov(&s, 3, true).is_err());
        assert!(matches!(sample_acf(&[2.0; 10], 1.0, 2, true), Err(Error::DegenerateSeries(_))));
        let acf = sample_acf(&[1.0, 3.0, 2.0, 5.0, 4.0], 0.5, 2, true).unwrap();
        assert_eq!(acf.values[0], 1.0);
        assert_eq!(acf.n, 5);
    }
}
