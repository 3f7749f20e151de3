//! Lévy seeds and the infinitely divisible laws of trawl slices.
//!
//! A seed `L'` is described by its characteristic triplet `(ζ, a, ν)` with
//! cumulant function
//!
//! ```text
//! C(θ) = iθζ − θ²a/2 + ∫ (e^{iθξ} − 1 − iθξ 1{|ξ|≤1}) ν(dξ).
//! ```
//!
//! A slice of Lebesgue measure `s` carries the law with cumulant `s·C(θ)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Cauchy, Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::parse::{expect_arity, fmt_num, parse_numbers, split_call};

/// Parametric families of Lévy seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevySeed {
    /// Gaussian with mean `mu` and variance `sigma2`.
    Gaussian { mu: f64, sigma2: f64 },
    /// Poisson with intensity `rate` (unit jumps).
    Poisson { rate: f64 },
    /// Gamma with shape `shape` and rate `rate`.
    Gamma { shape: f64, rate: f64 },
    /// Negative binomial with `size` r and success probability `prob` p.
    NegBin { size: f64, prob: f64 },
    /// Symmetric Cauchy with scale `scale`.
    Cauchy { scale: f64 },
}

/// The Lévy measure part of a triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevyMeasure {
    Zero,
    /// `rate · δ_1`.
    UnitJumps { rate: f64 },
    /// `shape · ξ^{-1} e^{-rate ξ} dξ` on `(0, ∞)`.
    Gamma { shape: f64, rate: f64 },
    /// `size · Σ_{j≥1} (1−prob)^j / j · δ_j`.
    Logarithmic { size: f64, prob: f64 },
    /// `scale / (π ξ²) dξ` on `ℝ \ {0}`.
    Cauchy { scale: f64 },
}

/// Characteristic triplet `(ζ, a, ν)` of a seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyTriplet {
    pub zeta: f64,
    pub gaussian_variance: f64,
    pub measure: LevyMeasure,
}

/// First four cumulants of the seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cumulants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl Cumulants {
    pub fn mean(&self) -> f64 {
        self.k1
    }

    pub fn variance(&self) -> f64 {
        self.k2
    }

    /// Kurtosis `η = κ₄/κ₂² + 3`.
    pub fn kurtosis(&self) -> f64 {
        self.k4 / (self.k2 * self.k2) + 3.0
    }
}

impl LevyMeasure {
    /// `∫ (e^{iθξ} − 1 − iθξ 1{|ξ|≤1}) ν(dξ)`.
    pub fn compensated_integral(&self, theta: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            LevyMeasure::Zero => Complex64::new(0.0, 0.0),
            LevyMeasure::UnitJumps { rate } => rate * ((i * theta).exp() - 1.0 - i * theta),
            LevyMeasure::Gamma { shape, rate } => {
                let small = shape * (1.0 - (-rate).exp()) / rate;
                -shape * (Complex64::new(1.0, 0.0) - i * theta / rate).ln() - i * theta * small
            }
            LevyMeasure::Logarithmic { size, prob } => {
                let q = 1.0 - prob;
                let big = size * (Complex64::new(prob, 0.0) / (1.0 - q * (i * theta).exp())).ln();
                big - i * theta * size * q
            }
            LevyMeasure::Cauchy { scale } => Complex64::new(-scale * theta.abs(), 0.0),
        }
    }

    /// `∫ ξ^m ν(dξ)` for `m ≥ 2`, or `∫_{|ξ|>1} ξ ν(dξ)` for `m = 1`.
    fn moment(&self, m: u32) -> Option<f64> {
        match *self {
            LevyMeasure::Zero => Some(0.0),
            LevyMeasure::UnitJumps { rate } => Some(if m == 1 { 0.0 } else { rate }),
            LevyMeasure::Gamma { shape, rate } => {
                if m == 1 {
                    Some(shape * (-rate).exp() / rate)
                } else {
                    let fact: f64 = (1..m).map(|k| k as f64).product();
                    Some(shape * fact / rate.powi(m as i32))
                }
            }
            LevyMeasure::Logarithmic { size, prob } => {
                let q = 1.0 - prob;
                // Σ_j j^{m−1} q^j in closed form (polylog of negative order).
                let s = match m {
                    1 => q / prob - q,
                    2 => q / (prob * prob),
                    3 => q * (1.0 + q) / prob.powi(3),
                    4 => q * (1.0 + 4.0 * q + q * q) / prob.powi(4),
                    _ => return None,
                };
                Some(size * s)
            }
            LevyMeasure::Cauchy { .. } => None,
        }
    }

    /// `∫ |ξ| ν(dξ)`, infinite when the measure has infinite variation.
    pub fn abs_first_moment(&self) -> f64 {
        match *self {
            LevyMeasure::Zero => 0.0,
            LevyMeasure::UnitJumps { rate } => rate,
            LevyMeasure::Gamma { shape, rate } => shape / rate,
            LevyMeasure::Logarithmic { size, prob } => size * (1.0 - prob) / prob,
            LevyMeasure::Cauchy { .. } => f64::INFINITY,
        }
    }

    /// `∫_{|ξ|≤1} ξ ν(dξ)` when finite.
    pub fn small_jump_mean(&self) -> f64 {
        match *self {
            LevyMeasure::Zero => 0.0,
            LevyMeasure::UnitJumps { rate } => rate,
            LevyMeasure::Gamma { shape, rate } => shape * (1.0 - (-rate).exp()) / rate,
            LevyMeasure::Logarithmic { size, prob } => size * (1.0 - prob),
            LevyMeasure::Cauchy { .. } => 0.0,
        }
    }
}

impl LevyTriplet {
    pub fn cumulant(&self, theta: f64) -> Complex64 {
        Complex64::new(-0.5 * theta * theta * self.gaussian_variance, theta * self.zeta)
            + self.measure.compensated_integral(theta)
    }

    /// `a = 0` and `∫ |ξ| ν(dξ) < ∞`.
    pub fn has_finite_variation(&self) -> bool {
        self.gaussian_variance == 0.0 && self.measure.abs_first_moment().is_finite()
    }

    /// Drift `γ₀ = ζ − ∫_{|ξ|≤1} ξ ν(dξ)` of a finite-variation seed.
    pub fn drift(&self) -> f64 {
        self.zeta - self.measure.small_jump_mean()
    }
}

impl LevySeed {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LevySeed::Gaussian { mu, sigma2 } => mu.is_finite() && sigma2.is_finite() && sigma2 >= 0.0,
            LevySeed::Poisson { rate } => rate.is_finite() && rate > 0.0,
            LevySeed::Gamma { shape, rate } => {
                shape.is_finite() && rate.is_finite() && shape > 0.0 && rate > 0.0
            }
            LevySeed::NegBin { size, prob } => size.is_finite() && size > 0.0 && prob > 0.0 && prob < 1.0,
            LevySeed::Cauchy { scale } => scale.is_finite() && scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid Lévy seed parameters: {self}")))
        }
    }

    pub fn triplet(&self) -> LevyTriplet {
        match *self {
            LevySeed::Gaussian { mu, sigma2 } => LevyTriplet {
                zeta: mu,
                gaussian_variance: sigma2,
                measure: LevyMeasure::Zero,
            },
            LevySeed::Poisson { rate } => LevyTriplet {
                zeta: rate,
                gaussian_variance: 0.0,
                measure: LevyMeasure::UnitJumps { rate },
            },
            LevySeed::Gamma { shape, rate } => LevyTriplet {
                zeta: shape * (1.0 - (-rate).exp()) / rate,
                gaussian_variance: 0.0,
                measure: LevyMeasure::Gamma { shape, rate },
            },
            LevySeed::NegBin { size, prob } => LevyTriplet {
                zeta: size * (1.0 - prob),
                gaussian_variance: 0.0,
                measure: LevyMeasure::Logarithmic { size, prob },
            },
            LevySeed::Cauchy { scale } => LevyTriplet {
                zeta: 0.0,
                gaussian_variance: 0.0,
                measure: LevyMeasure::Cauchy { scale },
            },
        }
    }

    /// Cumulant function `C(θ) = log E e^{iθL'}` evaluated through the triplet.
    pub fn cumulant(&self, theta: f64) -> Complex64 {
        self.triplet().cumulant(theta)
    }

    /// Closed-form log characteristic function of the family.
    pub fn log_characteristic_function(&self, theta: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            LevySeed::Gaussian { mu, sigma2 } => Complex64::new(-0.5 * sigma2 * theta * theta, mu * theta),
            LevySeed::Poisson { rate } => rate * ((i * theta).exp() - 1.0),
            LevySeed::Gamma { shape, rate } => -shape * (1.0 - i * theta / rate).ln(),
            LevySeed::NegBin { size, prob } => {
                size * (Complex64::new(prob, 0.0) / (1.0 - (1.0 - prob) * (i * theta).exp())).ln()
            }
            LevySeed::Cauchy { scale } => Complex64::new(-scale * theta.abs(), 0.0),
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        !matches!(self, LevySeed::Cauchy { .. })
    }

    pub fn has_finite_fourth_moment(&self) -> bool {
        self.has_finite_variance()
    }

    /// First four cumulants, from the triplet: `κ₁ = ζ + ∫_{|ξ|>1} ξ ν`,
    /// `κ₂ = a + ∫ ξ² ν`, `κ_m = ∫ ξ^m ν` for `m ≥ 3`.
    pub fn cumulants(&self) -> Result<Cumulants> {
        let t = self.triplet();
        let m = |k: u32| {
            t.measure.moment(k).ok_or_else(|| {
                Error::UnsupportedMoment(format!("{self} has no finite moment of order {k}"))
            })
        };
        Ok(Cumulants {
            k1: t.zeta + m(1)?,
            k2: t.gaussian_variance + m(2)?,
            k3: m(3)?,
            k4: m(4)?,
        })
    }

    /// Mean and variance of the seed.
    pub fn mean_variance(&self) -> Result<(f64, f64)> {
        let c = self.cumulants()?;
        Ok((c.k1, c.k2))
    }

    /// Law of the seed integrated over a set of Lebesgue measure `leb`.
    pub fn slice_law(&self, leb: f64) -> Result<SliceLaw> {
        if !(leb >= 0.0) || !leb.is_finite() {
            return domain(format!("slice measure must be finite and non-negative, got {leb}"));
        }
        if leb == 0.0 {
            return Ok(SliceLaw::Zero);
        }
        let err = |e: &dyn fmt::Display| Error::Domain(format!("slice law for {self} at measure {leb}: {e}"));
        Ok(match *self {
            LevySeed::Gaussian { mu, sigma2 } => SliceLaw::Gaussian {
                mean: mu * leb,
                sd: (sigma2 * leb).sqrt(),
            },
            LevySeed::Poisson { rate } => SliceLaw::Poisson(Poisson::new(rate * leb).map_err(|e| err(&e))?),
            LevySeed::Gamma { shape, rate } => {
                SliceLaw::Gamma(Gamma::new(shape * leb, 1.0 / rate).map_err(|e| err(&e))?)
            }
            LevySeed::NegBin { size, prob } => SliceLaw::NegBin(
                Gamma::new(size * leb, (1.0 - prob) / prob).map_err(|e| err(&e))?,
            ),
            LevySeed::Cauchy { scale } => SliceLaw::Cauchy(Cauchy::new(0.0, scale * leb).map_err(|e| err(&e))?),
        })
    }
}

/// First four cumulants of the seed.
pub fn cumulants_1_to_4(seed: &LevySeed) -> Result<Cumulants> {
    seed.cumulants()
}

/// One draw of `L(A)` with `Leb(A) = leb`.
pub fn sample_slice<R: Rng + ?Sized>(seed: &LevySeed, leb: f64, rng: &mut R) -> Result<f64> {
    Ok(seed.slice_law(leb)?.sample(rng))
}

/// Sampler for the law of `L(A)` with a fixed `Leb(A)`.
#[derive(Clone, Copy, Debug)]
pub enum SliceLaw {
    Zero,
    Gaussian { mean: f64, sd: f64 },
    Poisson(Poisson<f64>),
    Gamma(Gamma<f64>),
    /// Gamma–Poisson mixture; holds the mixing gamma.
    NegBin(Gamma<f64>),
    Cauchy(Cauchy<f64>),
}

impl SliceLaw {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SliceLaw::Zero => 0.0,
            SliceLaw::Gaussian { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            SliceLaw::Poisson(p) => p.sample(rng),
            SliceLaw::Gamma(g) => g.sample(rng),
            SliceLaw::NegBin(g) => {
                let lam = g.sample(rng);
                if lam > 0.0 {
                    Poisson::new(lam).map(|p| p.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            SliceLaw::Cauchy(c) => c.sample(rng),
        }
    }
}

impl fmt::Display for LevySeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LevySeed::Gaussian { mu, sigma2 } => write!(f, "gaussian({},{})", fmt_num(mu), fmt_num(sigma2)),
            LevySeed::Poisson { rate } => write!(f, "poisson({})", fmt_num(rate)),
            LevySeed::Gamma { shape, rate } => write!(f, "gamma({},{})", fmt_num(shape), fmt_num(rate)),
            LevySeed::NegBin { size, prob } => write!(f, "negbin({},{})", fmt_num(size), fmt_num(prob)),
            LevySeed::Cauchy { scale } => write!(f, "cauchy({})", fmt_num(scale)),
        }
    }
}

impl FromStr for LevySeed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        let v = parse_numbers(&args, &name)?;
        let seed = match name.as_str() {
            "gaussian" | "normal" => {
                expect_arity(&v, 2, "gaussian")?;
                LevySeed::Gaussian { mu: v[0], sigma2: v[1] }
            }
            "poisson" => {
                expect_arity(&v, 1, "poisson")?;
                LevySeed::Poisson { rate: v[0] }
            }
            "gamma" => {
                expect_arity(&v, 2, "gamma")?;
                LevySeed::Gamma { shape: v[0], rate: v[1] }
            }
            "negbin" => {
                expect_arity(&v, 2, "negbin")?;
                LevySeed::NegBin { size: v[0], prob: v[1] }
            }
            "cauchy" => {
                expect_arity(&v, 1, "cauchy")?;
                LevySeed::Cauchy { scale: v[0] }
            }
            other => return Err(Error::Config(format!("unknown Lévy seed `{other}`"))),
        };
        seed.validate()?;
        Ok(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn seeds() -> Vec<LevySeed> {
        vec![
            LevySeed::Gaussian { mu: 0.3, sigma2: 2.0 },
            LevySeed::Poisson { rate: 1.7 },
            LevySeed::Gamma { shape: 2.5, rate: 0.8 },
            LevySeed::NegBin { size: 3.0, prob: 0.4 },
            LevySeed::Cauchy { scale: 1.3 },
        ]
    }

    #[test]
    fn triplet_route_matches_closed_form() {
        for seed in seeds() {
            for &theta in &[-3.0, -0.7, 0.0, 0.25, 1.0, 4.5] {
                let a = seed.cumulant(theta);
                let b = seed.log_characteristic_function(theta);
                assert!((a - b).norm() < 1e-12, "{seed} θ={theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cumulants_match_derivatives_of_cumulant_function() {
        // κ_m = i^{-m} C^{(m)}(0), approximated by central differences.
        let h = 1e-2;
        for seed in seeds().into_iter().filter(|s| s.has_finite_variance()) {
            let c = |k: i32| seed.cumulant(k as f64 * h);
            let d1 = (c(-2) - c(2) * 1.0 + 8.0 * (c(1) - c(-1))) / (12.0 * h);
            let d2 = (-c(2) + 16.0 * c(1) - 30.0 * c(0) + 16.0 * c(-1) - c(-2)) / (12.0 * h * h);
            let d3 = (-c(3) + 8.0 * c(2) - 13.0 * c(1) + 13.0 * c(-1) - 8.0 * c(-2) + c(-3)) / (8.0 * h.powi(3));
            let d4 = (-c(3) + 12.0 * c(2) - 39.0 * c(1) + 56.0 * c(0) - 39.0 * c(-1) + 12.0 * c(-2) - c(-3))
                / (6.0 * h.powi(4));
            let k = seed.cumulants().unwrap();
            assert!((d1.im - k.k1).abs() < 1e-6, "{seed} k1");
            assert!((-d2.re - k.k2).abs() < 1e-5, "{seed} k2");
            assert!((-d3.im - k.k3).abs() < 1e-3 * (1.0 + k.k3.abs()), "{seed} k3");
            assert!((d4.re - k.k4).abs() < 1e-2 * (1.0 + k.k4.abs()), "{seed} k4 {} {}", d4.re, k.k4);
        }
    }

    #[test]
    fn gamma_cumulants_closed_form() {
        let k = LevySeed::Gamma { shape: 2.0, rate: 4.0 }.cumulants().unwrap();
        assert!((k.k1 - 0.5).abs() < 1e-15);
        assert!((k.k2 - 2.0 / 16.0).abs() < 1e-15);
        assert!((k.k3 - 4.0 / 64.0).abs() < 1e-15);
        assert!((k.k4 - 12.0 / 256.0).abs() < 1e-15);
        let p = LevySeed::Poisson { rate: 2.0 }.cumulants().unwrap();
        assert_eq!((p.k1, p.k2, p.k3, p.k4), (2.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn cauchy_has_no_moments() {
        let c = LevySeed::Cauchy { scale: 1.0 };
        assert!(matches!(c.cumulants(), Err(Error::UnsupportedMoment(_))));
        assert!(!c.triplet().has_finite_variation());
    }

    #[test]
    fn slice_law_edge_cases() {
        let g = LevySeed::Gaussian { mu: 0.0, sigma2: 1.0 };
        assert!(matches!(g.slice_law(-1.0), Err(Error::Domain(_))));
        let mut rng = RandomStream::new(1, 0);
        for seed in seeds() {
            assert_eq!(seed.slice_law(0.0).unwrap().sample(&mut rng), 0.0);
        }
    }

    #[test]
    fn slice_law_moments() {
        let mut rng = RandomStream::new(11, 0);
        let s = 0.37;
        for seed in seeds().into_iter().filter(|s| s.has_finite_variance()) {
            let law = seed.slice_law(s).unwrap();
            let n = 200_000;
            let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
            let k = seed.cumulants().unwrap();
            let se = (k.k2 * s / n as f64).sqrt();
            assert!((m - k.k1 * s).abs() < 5.0 * se, "{seed} mean {m}");
            assert!((v / (k.k2 * s) - 1.0).abs() < 0.05, "{seed} var {v}");
        }
    }

    #[test]
    fn finite_variation_drift() {
        let t = LevySeed::Poisson { rate: 2.0 }.triplet();
        assert!(t.has_finite_variation());
        assert_eq!(t.drift(), 0.0);
        let t = LevySeed::Gamma { shape: 2.0, rate: 3.0 }.triplet();
        assert!(t.drift().abs() < 1e-15);
        assert!(!LevySeed::Gaussian { mu: 0.0, sigma2: 1.0 }.triplet().has_finite_variation());
    }

    #[test]
    fn parse_roundtrip() {
        for seed in seeds() {
            let s = seed.to_string();
            assert_eq!(s.parse::<LevySeed>().unwrap(), seed);
        }
        assert!("gaussian(0,-1)".parse::<LevySeed>().is_err());
        assert!("stable(1)".parse::<LevySeed>().is_err());
        assert!("negbin(1,1)".parse::<LevySeed>().is_err());
    }
}
