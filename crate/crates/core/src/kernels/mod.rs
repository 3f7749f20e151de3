//! Trawl functions `g`, periodic kernels `p`, the correlation factor `c` and
//! the integrals built from them.
//!
//! Integrals of the form `∫_0^∞ P(v) g(s + v) dv` with a `τ`-periodic `P` are
//! folded onto one period,
//!
//! ```text
//! ∫_0^τ P(v) Σ_{k≥0} g(s + v + kτ) dv,
//! ```
//!
//! where the periodised trawl function has a closed form for the exponential
//! (geometric series) and supGamma (Hurwitz zeta) families.

pub mod periodic;
pub mod quadrature;
pub mod trawl;

use std::f64::consts::PI;

pub use periodic::{eval_p, PeriodicFunction};
pub use quadrature::{gauss_legendre, QuadResult, Quadrature};
pub use trawl::{trawl_integral, MemoryClass, TabulatedTrawl, TrawlFunction};

use crate::error::{domain, Result};

fn quad() -> Quadrature {
    Quadrature::with_tolerance(1e-13, 1e-12)
}

/// `∫_0^∞ P(v) g(s + v) dv` for a `τ`-periodic `P`.
pub fn periodic_shifted_integral<F: Fn(f64) -> f64>(
    g: &TrawlFunction,
    tau: f64,
    shift: f64,
    integrand: F,
) -> Result<f64> {
    if let Some(end) = g.support_end() {
        // compact support: integrate directly
        let hi = (end - shift).max(0.0);
        if hi == 0.0 {
            return Ok(0.0);
        }
        let mut breaks = vec![0.0];
        let mut x = tau;
        while x < hi {
            breaks.push(x);
            x += tau;
        }
        breaks.push(hi);
        return Ok(quad().integrate_with_breaks(|v| integrand(v) * g.eval(shift + v), &breaks)?.value);
    }
    let r = quad().integrate(|v| integrand(v) * g.periodized(shift + v, tau), 0.0, tau)?;
    Ok(r.value)
}

/// Exponential trawl with sine kernel: `(λ, ω = 2π/τ)`.
fn exp_sine(g: &TrawlFunction, p: &PeriodicFunction) -> Option<(f64, f64)> {
    match (g, p) {
        (TrawlFunction::Exponential { lambda }, PeriodicFunction::Sine { tau }) => Some((*lambda, 2.0 * PI / tau)),
        _ => None,
    }
}

/// `∫_0^∞ p(u) g(u) du`.
pub fn weighted_mass(g: &TrawlFunction, p: &PeriodicFunction) -> Result<f64> {
    p.require_kernel()?;
    if let Some((l, w)) = exp_sine(g, p) {
        return Ok(w / (l * l + w * w));
    }
    match p.period() {
        None => Ok(g.total_mass()),
        Some(tau) => periodic_shifted_integral(g, tau, 0.0, |v| p.eval(v)),
    }
}

/// `∫_0^∞ p(u)² g(u) du`.
pub fn weighted_square_mass(g: &TrawlFunction, p: &PeriodicFunction) -> Result<f64> {
    cross_integral(g, p, 0.0)
}

/// `∫_0^∞ p(u) p(t + u) g(t + u) du`, the covariance integral at lag `t ≥ 0`.
pub fn cross_integral(g: &TrawlFunction, p: &PeriodicFunction, t: f64) -> Result<f64> {
    p.require_kernel()?;
    if !(t >= 0.0) {
        return domain(format!("lag must be nonnegative, got {t}"));
    }
    if let Some((l, w)) = exp_sine(g, p) {
        let (s, c) = (w * t).sin_cos();
        return Ok((-l * t).exp() * w / (l * l + 4.0 * w * w) * (2.0 * w * c / l + s));
    }
    match p.period() {
        None => Ok(g.tail(t)),
        Some(tau) => periodic_shifted_integral(g, tau, t, |v| p.eval(v) * p.eval(t + v)),
    }
}

/// Correlation factor `c(t)` with `Cor(Y_0, Y_t) = c(t) ∫_t^∞ g / ∫_0^∞ g`.
pub fn correlation_factor_c(g: &TrawlFunction, p: &PeriodicFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("lag must be nonnegative, got {t}"));
    }
    match p {
        PeriodicFunction::One => return Ok(1.0),
        PeriodicFunction::TabulatedC { .. } => return Ok(p.eval(t)),
        _ => {}
    }
    if let Some((l, w)) = exp_sine(g, p) {
        let (s, c) = (w * t).sin_cos();
        return Ok(c + l * s / (2.0 * w));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let var = weighted_square_mass(g, p)?;
    if var == 0.0 {
        return domain("kernel p vanishes on the trawl, c is undefined");
    }
    let tail = g.tail(t);
    if tail == 0.0 {
        return domain(format!("trawl mass beyond lag {t} is zero, c is undefined"));
    }
    Ok(cross_integral(g, p, t)? / var * g.total_mass() / tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: integrate period by period on the original axis until the
    // trawl tail is negligible.
    fn direct(g: &TrawlFunction, tau: f64, f: impl Fn(f64) -> f64) -> f64 {
        let q = Quadrature::with_tolerance(1e-15, 1e-13);
        let mut total = 0.0;
        let mut k = 0.0;
        loop {
            let (a, b) = (k * tau, (k + 1.0) * tau);
            total += q.integrate(&f, a, b).unwrap().value;
            if g.tail(b) < 1e-17 * g.total_mass() || k > 1e5 {
                break;
            }
            k += 1.0;
        }
        total
    }

    #[test]
    fn reference_values_for_c() {
        let g = TrawlFunction::exponential(0.5).unwrap();
        let p = PeriodicFunction::sine(3.0).unwrap();
        assert!((correlation_factor_c(&g, &p, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation_factor_c(&g, &p, 1.0).unwrap() + 0.396626).abs() < 1e-6);
        assert!((correlation_factor_c(&g, &p, 3.0).unwrap() - 1.0).abs() < 1e-12);
        let s = TrawlFunction::sup_gamma(1.0, 3.0).unwrap();
        assert!((correlation_factor_c(&s, &p, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(correlation_factor_c(&s, &PeriodicFunction::One, 2.3).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_matches_quadrature_route() {
        // Fourier(τ; 0, 1) is the sine kernel but takes the generic path.
        for &lambda in &[0.2, 1.0, 5.0] {
            let g = TrawlFunction::exponential(lambda).unwrap();
            let s = PeriodicFunction::sine(3.0).unwrap();
            let f: PeriodicFunction = "fourier(3;0,1)".parse().unwrap();
            assert!((weighted_mass(&g, &s).unwrap() - weighted_mass(&g, &f).unwrap()).abs() < 1e-11);
            for i in 0..=60 {
                let t = i as f64 * 0.1;
                let a = correlation_factor_c(&g, &s, t).unwrap();
                let b = correlation_factor_c(&g, &f, t).unwrap();
                assert!((a - b).abs() < 1e-8, "λ={lambda} t={t}: {a} vs {b}");
                let ca = cross_integral(&g, &s, t).unwrap();
                let cb = cross_integral(&g, &f, t).unwrap();
                assert!((ca - cb).abs() < 1e-11, "λ={lambda} t={t}");
            }
        }
    }

    #[test]
    fn periodised_route_matches_direct_quadrature() {
        let p: PeriodicFunction = "fourier(2;0.5,1,0.3,-0.2,0.4)".parse().unwrap();
        for g in [TrawlFunction::sup_gamma(1.5, 3.5).unwrap(), TrawlFunction::exponential(0.8).unwrap()] {
            for &t in &[0.0, 0.7, 2.9] {
                let a = cross_integral(&g, &p, t).unwrap();
                let b = direct(&g, 2.0, |u| p.eval(u) * p.eval(t + u) * g.eval(t + u));
                assert!((a - b).abs() < 1e-9, "{g} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn c_is_periodic_for_exponential_trawls() {
        let p: PeriodicFunction = "fourier(2;0.5,1,0.3)".parse().unwrap();
        let g = TrawlFunction::exponential(0.6).unwrap();
        for i in 0..20 {
            let t = 0.05 + i as f64 * 0.17;
            let a = correlation_factor_c(&g, &p, t).unwrap();
            let b = correlation_factor_c(&g, &p, t + 2.0).unwrap();
            assert!((a - b).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn c_is_asymptotically_periodic_for_sup_gamma() {
        // g(t+u)/∫_t^∞ g does not factor for supGamma, so c(t) − c(t+τ) only
        // vanishes as t grows.
        let p: PeriodicFunction = "fourier(2;0.5,1,0.3)".parse().unwrap();
        let g = TrawlFunction::sup_gamma(2.0, 2.5).unwrap();
        let gap = |t: f64| {
            (correlation_factor_c(&g, &p, t).unwrap() - correlation_factor_c(&g, &p, t + 2.0).unwrap()).abs()
        };
        assert!(gap(1.0) > 1e-3);
        assert!(gap(100.0) < 1e-4);
        assert!(gap(1000.0) < 1e-6);
    }

    #[test]
    fn additivity() {
        let g = TrawlFunction::sup_gamma(0.7, 2.2).unwrap();
        let (a, b, c) = (0.3, 1.9, 7.5);
        let lhs = trawl_integral(&g, a, b).unwrap() + trawl_integral(&g, b, c).unwrap();
        assert!((lhs - trawl_integral(&g, a, c).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tabulated_c_has_no_kernel() {
        let g = TrawlFunction::exponential(1.0).unwrap();
        let p = PeriodicFunction::tabulated_c(7.0, vec![1.0, 0.7, 0.5, 0.45, 0.44, 0.5, 0.6]).unwrap();
        assert!(weighted_mass(&g, &p).is_err());
        assert!((correlation_factor_c(&g, &p, 1.0).unwrap() - 0.7).abs() < 1e-15);
    }
}
