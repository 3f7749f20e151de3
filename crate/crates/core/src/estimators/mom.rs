//! Method-of-moments estimators built on two empirical autocorrelations.
//!
//! Exponential trawl, `ρ(lΔ) = c(lΔ) e^{−λlΔ}`; supGamma trawl,
//! `ρ(lΔ) = c(lΔ) (1 + lΔ/α)^{1−H}`. With `τ = τ̃Δ` and `T = 1 + τ̃`,
//! periodicity gives `c(TΔ) = c(Δ)`, so `ρ(Δ)` and `ρ(TΔ)` identify the
//! memory parameter; `ĉ(lΔ)` follows for `l = 1..=τ̃`.

use std::fmt;

use nalgebra::DMatrix;

use crate::asymptotics::bartlett_plugin;
use crate::error::{Error, Result};
use crate::moments::Acf;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomFamily {
    Exponential,
    SupGamma { alpha: f64 },
}

impl fmt::Display for MomFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomFamily::Exponential => write!(f, "exponential"),
            MomFamily::SupGamma { alpha } => write!(f, "supgamma(alpha={alpha})"),
        }
    }
}

/// Point estimate with its delta-method variance.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarFit {
    pub estimate: f64,
    /// Variance of the limit of `√n (θ̂ − θ)`.
    pub asymptotic_variance: Option<f64>,
    pub std_error: Option<f64>,
    pub warnings: Vec<String>,
}

impl ScalarFit {
    pub fn confidence_interval(&self) -> Option<(f64, f64)> {
        self.std_error.map(|s| (self.estimate - Z_95 * s, self.estimate + Z_95 * s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomFitResult {
    pub family: MomFamily,
    /// `λ̂` or `Ĥ`.
    pub kernel_estimate: f64,
    /// `ĉ(lΔ)` for `l = 1..=τ̃`.
    pub c_estimates: Vec<f64>,
    /// `D W Dᵀ`, the covariance of the limit of `√n` times the error of
    /// `(θ̂, ĉ(Δ), …, ĉ(τ̃Δ))`.
    pub covariance: Option<DMatrix<f64>>,
    pub std_errors: Option<Vec<f64>>,
    pub delta: f64,
    pub tau_tilde: usize,
    pub n: usize,
    pub warnings: Vec<String>,
}

impl MomFitResult {
    /// `(θ̂, ĉ(Δ), …, ĉ(τ̃Δ))`.
    pub fn parameters(&self) -> Vec<f64> {
        std::iter::once(self.kernel_estimate).chain(self.c_estimates.iter().copied()).collect()
    }

    /// Names matching [`MomFitResult::parameters`].
    pub fn parameter_names(&self) -> Vec<String> {
        let head = match self.family {
            MomFamily::Exponential => "lambda".to_string(),
            MomFamily::SupGamma { .. } => "H".to_string(),
        };
        std::iter::once(head).chain((1..=self.tau_tilde).map(|l| format!("c({l})"))).collect()
    }

    /// `(ĉ(0) = 1, ĉ(Δ), …, ĉ((τ̃−1)Δ))`, one period of the correlation
    /// factor.
    pub fn c_profile(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.c_estimates.iter().take(self.tau_tilde.saturating_sub(1)).copied()).collect()
    }

    /// Fitted `ρ(lΔ)` with `c` extended periodically.
    pub fn fitted_acf(&self, l: usize) -> f64 {
        if l == 0 {
            return 1.0;
        }
        let c = self.c_estimates[(l - 1) % self.tau_tilde];
        c * decay(self.family, self.kernel_estimate, l as f64 * self.delta)
    }
}

fn decay(family: MomFamily, theta: f64, t: f64) -> f64 {
    match family {
        MomFamily::Exponential => (-theta * t).exp(),
        MomFamily::SupGamma { alpha } => ((1.0 - theta) * (t / alpha).ln_1p()).exp(),
    }
}

fn check_ratio(num: f64, den: f64, what: &str) -> Result<f64> {
    let r = num / den;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("{what} = {num}/{den} must be positive and finite")));
    }
    Ok(r)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("Δ must be positive, got {delta}")));
    }
    Ok(())
}

/// `λ̂ = −log(ρ(Δ)/c(Δ))/Δ`.
pub fn mom_exp_known_c(rho1: f64, c_delta: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(-check_ratio(rho1, c_delta, "ρ(Δ)/c(Δ)")?.ln() / delta)
}

/// `λ̂` with `Σ = w₁₁ e^{2λΔ}/(c(Δ)² Δ²)` and standard error `√(Σ/n)`.
pub fn mom_exp_known_c_fit(rho1: f64, c_delta: f64, delta: f64, w11: f64, n: usize) -> Result<ScalarFit> {
    let lambda = mom_exp_known_c(rho1, c_delta, delta)?;
    let var = w11 * (2.0 * lambda * delta).exp() / (c_delta * c_delta * delta * delta);
    Ok(ScalarFit {
        estimate: lambda,
        asymptotic_variance: Some(var),
        std_error: (n > 0).then(|| (var / n as f64).sqrt()),
        warnings: Vec::new(),
    })
}

/// `Ĥ = 1 − log(ρ(Δ)/c(Δ))/log(1 + Δ/α)`.
pub fn mom_supgamma_known_c(rho1: f64, c_delta: f64, alpha: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    Ok(1.0 - check_ratio(rho1, c_delta, "ρ(Δ)/c(Δ)")?.ln() / (delta / alpha).ln_1p())
}

/// `Ĥ` with `Σ = w₁₁ (1+Δ/α)^{2H−2}/(log(1+Δ/α)² c(Δ)²)`; the variance is
/// withheld for `Ĥ ≤ 2`, where the limit theory does not apply.
pub fn mom_supgamma_known_c_fit(
    rho1: f64,
    c_delta: f64,
    alpha: f64,
    delta: f64,
    w11: Option<f64>,
    n: usize,
) -> Result<ScalarFit> {
    let h = mom_supgamma_known_c(rho1, c_delta, alpha, delta)?;
    let mut warnings = Vec::new();
    let var = if h <= 2.0 {
        warnings.push(format!("Ĥ = {h} ≤ 2 (long memory): asymptotic normality does not hold, no standard error"));
        None
    } else {
        w11.map(|w| {
            let l = (delta / alpha).ln_1p();
            w * (1.0 + delta / alpha).powf(2.0 * h - 2.0) / (l * l * c_delta * c_delta)
        })
    };
    Ok(ScalarFit {
        estimate: h,
        asymptotic_variance: var,
        std_error: var.filter(|_| n > 0).map(|v| (v / n as f64).sqrt()),
        warnings,
    })
}

fn known_tau_inputs(acf: &Acf, tau_tilde: usize, delta: f64) -> Result<Vec<f64>> {
    check_delta(delta)?;
    if tau_tilde == 0 {
        return Err(Error::Domain("τ̃ must be at least 1".into()));
    }
    let t = tau_tilde + 1;
    if acf.max_lag() < t {
        return Err(Error::Input(format!("the ACF has {} lags, {t} are needed", acf.max_lag())));
    }
    let rho = acf.values[1..=t].to_vec();
    check_ratio(rho[t - 1], rho[0], "ρ(TΔ)/ρ(Δ)")?;
    Ok(rho)
}

/// `F(ρ₁, …, ρ_T)` for the exponential trawl:
/// `F₁ = log(ρ_T/ρ₁)/(Δ(1−T))`, `F_{l+1} = ρ_l e^{lΔF₁}`.
pub fn exp_known_tau_map(rho: &[f64], delta: f64) -> Result<Vec<f64>> {
    let t = rho.len();
    if t < 2 {
        return Err(Error::Domain("at least two autocorrelations are needed".into()));
    }
    let lambda = check_ratio(rho[t - 1], rho[0], "ρ(TΔ)/ρ(Δ)")?.ln() / (delta * (1.0 - t as f64));
    Ok(std::iter::once(lambda)
        .chain((1..t).map(|l| rho[l - 1] * (l as f64 * delta * lambda).exp()))
        .collect())
}

/// Jacobian `∂F_i/∂ρ_j` of [`exp_known_tau_map`].
pub fn exp_known_tau_jacobian(rho: &[f64], delta: f64) -> Result<DMatrix<f64>> {
    let f = exp_known_tau_map(rho, delta)?;
    let t = rho.len();
    let tf = t as f64;
    let d1 = 1.0 / (delta * (tf - 1.0) * rho[0]);
    let dt = 1.0 / (delta * (1.0 - tf) * rho[t - 1]);
    let mut d = DMatrix::zeros(t, t);
    d[(0, 0)] = d1;
    d[(0, t - 1)] = dt;
    for l in 1..t {
        let lf = l as f64;
        d[(l, l - 1)] += (lf * delta * f[0]).exp();
        d[(l, 0)] += f[l] * lf * delta * d1;
        d[(l, t - 1)] += f[l] * lf * delta * dt;
    }
    Ok(d)
}

/// `F(ρ₁, …, ρ_T)` for the supGamma trawl:
/// `F₁ = 1 + log(ρ_T/ρ₁)/log((α+Δ)/(α+TΔ))`, `F_{l+1} = ρ_l (1+lΔ/α)^{F₁−1}`.
pub fn supgamma_known_tau_map(rho: &[f64], alpha: f64, delta: f64) -> Result<Vec<f64>> {
    let t = rho.len();
    if t < 2 {
        return Err(Error::Domain("at least two autocorrelations are needed".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    let k = ((alpha + delta) / (alpha + t as f64 * delta)).ln();
    let h = 1.0 + check_ratio(rho[t - 1], rho[0], "ρ(TΔ)/ρ(Δ)")?.ln() / k;
    Ok(std::iter::once(h)
        .chain((1..t).map(|l| rho[l - 1] * ((h - 1.0) * (l as f64 * delta / alpha).ln_1p()).exp()))
        .collect())
}

/// Jacobian `∂F_i/∂ρ_j` of [`supgamma_known_tau_map`].
pub fn supgamma_known_tau_jacobian(rho: &[f64], alpha: f64, delta: f64) -> Result<DMatrix<f64>> {
    let f = supgamma_known_tau_map(rho, alpha, delta)?;
    let t = rho.len();
    let k = ((alpha + delta) / (alpha + t as f64 * delta)).ln();
    let d1 = -1.0 / (rho[0] * k);
    let dt = 1.0 / (rho[t - 1] * k);
    let mut d = DMatrix::zeros(t, t);
    d[(0, 0)] = d1;
    d[(0, t - 1)] = dt;
    for l in 1..t {
        let lg = (l as f64 * delta / alpha).ln_1p();
        d[(l, l - 1)] += ((f[0] - 1.0) * lg).exp();
        d[(l, 0)] += f[l] * lg * d1;
        d[(l, t - 1)] += f[l] * lg * dt;
    }
    Ok(d)
}

/// Lags after which the plug-in autocorrelation is treated as zero.
fn plugin_lag(family: MomFamily, theta: f64, delta: f64) -> usize {
    match family {
        MomFamily::Exponential => ((28.0 / (theta * delta)).ceil() as usize).clamp(1, 100_000),
        MomFamily::SupGamma { alpha } => {
            // (1 + lΔ/α)^{2(1−H)} < 1e-12
            let l = alpha / delta * ((12.0 * 10f64.ln() / (2.0 * (theta - 1.0))).exp() - 1.0);
            (l.ceil() as usize).clamp(1, 20_000)
        }
    }
}

fn finish(
    family: MomFamily,
    f: Vec<f64>,
    jac: DMatrix<f64>,
    w: Option<DMatrix<f64>>,
    acf: &Acf,
    tau_tilde: usize,
    delta: f64,
    mut warnings: Vec<String>,
) -> MomFitResult {
    let mut fit = MomFitResult {
        family,
        kernel_estimate: f[0],
        c_estimates: f[1..].to_vec(),
        covariance: None,
        std_errors: None,
        delta,
        tau_tilde,
        n: acf.n,
        warnings: Vec::new(),
    };
    let w = w.or_else(|| {
        let usable = match family {
            MomFamily::Exponential => f[0] > 0.0,
            MomFamily::SupGamma { .. } => f[0] > 2.0,
        };
        if !usable {
            warnings.push(match family {
                MomFamily::Exponential => format!("λ̂ = {} ≤ 0: no plug-in covariance", f[0]),
                MomFamily::SupGamma { .. } => format!(
                    "Ĥ = {} ≤ 2 (long memory): asymptotic normality does not hold, no covariance",
                    f[0]
                ),
            });
            return None;
        }
        let max_lag = plugin_lag(family, f[0], delta);
        Some(bartlett_plugin(&|l| fit.fitted_acf(l), tau_tilde + 1, max_lag))
    });
    if let Some(w) = w {
        let cov = &jac * w * jac.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        if acf.n > 0 {
            fit.std_errors = Some((0..cov.nrows()).map(|i| (cov[(i, i)].max(0.0) / acf.n as f64).sqrt()).collect());
        }
        fit.covariance = Some(cov);
    }
    fit.warnings = warnings;
    fit
}

/// Known-period estimator for the exponential trawl. `w` overrides the
/// Gaussian Bartlett plug-in computed from the fitted autocorrelations.
pub fn mom_exp_known_tau(acf: &Acf, tau_tilde: usize, delta: f64) -> Result<MomFitResult> {
    mom_exp_known_tau_with(acf, tau_tilde, delta, None)
}

pub fn mom_exp_known_tau_with(acf: &Acf, tau_tilde: usize, delta: f64, w: Option<DMatrix<f64>>) -> Result<MomFitResult> {
    let rho = known_tau_inputs(acf, tau_tilde, delta)?;
    let f = exp_known_tau_map(&rho, delta)?;
    let jac = exp_known_tau_jacobian(&rho, delta)?;
    Ok(finish(MomFamily::Exponential, f, jac, w, acf, tau_tilde, delta, Vec::new()))
}

/// Known-period estimator for the supGamma trawl with known `α`.
pub fn mom_supgamma_known_tau(acf: &Acf, tau_tilde: usize, alpha: f64, delta: f64) -> Result<MomFitResult> {
    mom_supgamma_known_tau_with(acf, tau_tilde, alpha, delta, None)
}

pub fn mom_supgamma_known_tau_with(
    acf: &Acf,
    tau_tilde: usize,
    alpha: f64,
    delta: f64,
    w: Option<DMatrix<f64>>,
) -> Result<MomFitResult> {
    let rho = known_tau_inputs(acf, tau_tilde, delta)?;
    let f = supgamma_known_tau_map(&rho, alpha, delta)?;
    let jac = supgamma_known_tau_jacobian(&rho, alpha, delta)?;
    Ok(finish(MomFamily::SupGamma { alpha }, f, jac, w, acf, tau_tilde, delta, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acf(values: Vec<f64>, n: usize) -> Acf {
        Acf { delta: 1.0, values, centered: false, n }
    }

    fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut d = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1e-3);
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[j] += h;
            b[j] -= h;
            let (fa, fb) = (f(&a), f(&b));
            for i in 0..n {
                d[(i, j)] = (fa[i] - fb[i]) / (2.0 * h);
            }
        }
        d
    }

    #[test]
    fn known_c_examples() {
        assert!((mom_exp_known_c((-0.3f64).exp(), 1.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((mom_exp_known_c(0.8 * (-0.3f64).exp(), 0.8, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((mom_exp_known_c((-0.3f64).exp(), 1.0, 0.5).unwrap() - 0.6).abs() < 1e-15);
        assert!(mom_exp_known_c(-0.1, 1.0, 1.0).is_err());
        assert!(mom_exp_known_c(0.0, 1.0, 1.0).is_err());
        let h = 2f64.powf(-0.5);
        assert!((mom_supgamma_known_c(h, 1.0, 1.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((mom_supgamma_known_c(0.9 * h, 0.9, 1.0, 1.0).unwrap() - 1.5).abs() < 1e-14);
        let fit = mom_supgamma_known_c_fit(h, 1.0, 1.0, 1.0, Some(1.0), 100).unwrap();
        assert!(fit.std_error.is_none() && !fit.warnings.is_empty());
    }

    #[test]
    fn known_c_variance() {
        let fit = mom_exp_known_c_fit((-0.6f64).exp(), 1.0, 0.5, 0.3, 100).unwrap();
        let want = 0.3 * (1.2f64).exp() / 0.25;
        assert!((fit.asymptotic_variance.unwrap() - want).abs() < 1e-14);
        assert!((fit.std_error.unwrap() - (want / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn known_tau_examples() {
        let mut v = vec![1.0; 9];
        v[1] = 0.8 * (-0.3f64).exp();
        v[8] = 0.8 * (-2.4f64).exp();
        let fit = mom_exp_known_tau(&acf(v, 0), 7, 1.0).unwrap();
        assert!((fit.kernel_estimate - 0.3).abs() < 1e-14);
        assert!((fit.c_estimates[0] - 0.8).abs() < 1e-14);
        assert_eq!(fit.c_estimates.len(), 7);
        assert_eq!(fit.c_profile().len(), 7);
        assert!(fit.std_errors.is_none() && fit.covariance.is_some());

        let mut v = vec![1.0; 9];
        v[1] = 0.9 * 2f64.powf(-0.5);
        v[8] = 0.9 * 9f64.powf(-0.5);
        let fit = mom_supgamma_known_tau(&acf(v, 0), 7, 1.0, 1.0).unwrap();
        assert!((fit.kernel_estimate - 1.5).abs() < 1e-13);
        assert!((fit.c_estimates[0] - 0.9).abs() < 1e-13, "{:?}", fit.c_estimates);
        assert!(fit.covariance.is_none());
    }

    #[test]
    fn known_tau_errors() {
        let mut v = vec![0.5; 9];
        v[8] = -0.1;
        assert!(matches!(mom_exp_known_tau(&acf(v, 0), 7, 1.0), Err(Error::Domain(_))));
        assert!(matches!(mom_exp_known_tau(&acf(vec![1.0, 0.5, 0.3], 0), 7, 1.0), Err(Error::Input(_))));
        let mut v = vec![0.5; 9];
        v[1] = 0.0;
        assert!(mom_supgamma_known_tau(&acf(v, 0), 7, 1.0, 1.0).is_err());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let rho: Vec<f64> = (1..=8).map(|l| (0.9 - 0.05 * l as f64) * (-0.2 * l as f64).exp()).collect();
        let a = exp_known_tau_jacobian(&rho, 0.7).unwrap();
        let b = fd_jacobian(|r| exp_known_tau_map(r, 0.7).unwrap(), &rho);
        assert!((&a - &b).abs().max() < 1e-6 * a.abs().max());
        let a = supgamma_known_tau_jacobian(&rho, 1.3, 0.7).unwrap();
        let b = fd_jacobian(|r| supgamma_known_tau_map(r, 1.3, 0.7).unwrap(), &rho);
        assert!((&a - &b).abs().max() < 1e-6 * a.abs().max());
    }

    #[test]
    fn delta_method_covariance_is_symmetric_psd() {
        let c = [0.7, 0.2, -0.4, 0.1, 0.6];
        let lam = 0.3;
        let mut v = vec![1.0];
        for l in 1..=6usize {
            v.push(c[(l - 1) % 5] * (-lam * l as f64).exp());
        }
        let fit = mom_exp_known_tau(&acf(v, 500), 5, 1.0).unwrap();
        assert!((fit.kernel_estimate - lam).abs() < 1e-13);
        let cov = fit.covariance.unwrap();
        assert!((&cov - cov.transpose()).abs().max() < 1e-12);
        assert!(cov.symmetric_eigen().eigenvalues.min() > -1e-8);
        assert_eq!(fit.std_errors.unwrap().len(), 6);
    }
}
