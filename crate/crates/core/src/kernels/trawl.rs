use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::parse::{expect_arity, fmt_num, parse_numbers, split_call};
use crate::special::hurwitz_zeta;

/// Monotone decreasing trawl function `g` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TrawlFunction {
    /// `g(x) = e^{-λx}`.
    Exponential { lambda: f64 },
    /// `g(x) = (1 + x/α)^{-H}`.
    SupGamma { alpha: f64, h: f64 },
    /// Values of `g` on the grid `0, step, 2·step, …`, linearly interpolated
    /// and zero beyond the last node.
    Tabulated(TabulatedTrawl),
}

/// Memory class of a trawl function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryClass {
    Short,
    Long,
}

/// Piecewise-linear tabulated trawl function with cached integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedTrawl {
    step: f64,
    values: Vec<f64>,
    // cum[i] = ∫_{x_i}^∞ g, cum2[i] = ∫_{x_i}^∞ tail
    cum: Vec<f64>,
    cum2: Vec<f64>,
}

impl TabulatedTrawl {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Config(format!("tabulated trawl step must be positive, got {step}")));
        }
        if values.len() < 2 {
            return Err(Error::Config("tabulated trawl needs at least two nodes".into()));
        }
        for w in values.windows(2) {
            if !(w[1] <= w[0]) {
                return Err(Error::Config("tabulated trawl values must be nonincreasing".into()));
            }
        }
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::Config("tabulated trawl values must be finite and nonnegative".into()));
        }
        let m = values.len();
        let mut cum = vec![0.0; m];
        let mut cum2 = vec![0.0; m];
        for i in (0..m - 1).rev() {
            let seg = 0.5 * step * (values[i] + values[i + 1]);
            cum[i] = cum[i + 1] + seg;
        }
        let mut t = TabulatedTrawl { step, values, cum, cum2: Vec::new() };
        for i in (0..m - 1).rev() {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            // the tail is quadratic on each segment, so Simpson is exact
            let seg = step / 6.0 * (t.tail(a) + 4.0 * t.tail(0.5 * (a + b)) + t.tail(b));
            cum2[i] = cum2[i + 1] + seg;
        }
        t.cum2 = cum2;
        Ok(t)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn end(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if x >= self.end() {
            return None;
        }
        let pos = x.max(0.0) / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        Some((i, pos - i as f64))
    }

    fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, f)) => self.values[i] + f * (self.values[i + 1] - self.values[i]),
        }
    }

    fn tail(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, _)) => {
                let b = (i + 1) as f64 * self.step;
                0.5 * (b - x) * (self.eval(x) + self.values[i + 1]) + self.cum[i + 1]
            }
        }
    }

    fn second_tail(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, _)) => {
                let b = (i + 1) as f64 * self.step;
                let seg = (b - x) / 6.0 * (self.tail(x) + 4.0 * self.tail(0.5 * (x + b)) + self.tail(b));
                seg + self.cum2[i + 1]
            }
        }
    }
}

impl TrawlFunction {
    pub fn exponential(lambda: f64) -> Result<Self> {
        let g = TrawlFunction::Exponential { lambda };
        g.validate()?;
        Ok(g)
    }

    pub fn sup_gamma(alpha: f64, h: f64) -> Result<Self> {
        let g = TrawlFunction::SupGamma { alpha, h };
        g.validate()?;
        Ok(g)
    }

    pub fn tabulated(step: f64, values: Vec<f64>) -> Result<Self> {
        Ok(TrawlFunction::Tabulated(TabulatedTrawl::new(step, values)?))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TrawlFunction::Exponential { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::Config(format!("exponential trawl needs λ > 0, got {lambda}")))
            }
            TrawlFunction::SupGamma { alpha, .. } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::Config(format!("supGamma trawl needs α > 0, got {alpha}")))
            }
            TrawlFunction::SupGamma { h, .. } if !(h > 1.0 && h.is_finite()) => Err(Error::Config(format!(
                "supGamma trawl needs H > 1 for a finite trawl mass, got {h}"
            ))),
            _ => Ok(()),
        }
    }

    /// `g(x)`; zero for negative arguments.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            TrawlFunction::Exponential { lambda } => (-lambda * x).exp(),
            TrawlFunction::SupGamma { alpha, h } => (-h * (x / alpha).ln_1p()).exp(),
            TrawlFunction::Tabulated(t) => t.eval(x),
        }
    }

    /// `∫_x^∞ g(u) du` for `x ≥ 0`.
    pub fn tail(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        if x.is_infinite() {
            return 0.0;
        }
        match self {
            TrawlFunction::Exponential { lambda } => (-lambda * x).exp() / lambda,
            TrawlFunction::SupGamma { alpha, h } => alpha / (h - 1.0) * ((1.0 - h) * (x / alpha).ln_1p()).exp(),
            TrawlFunction::Tabulated(t) => t.tail(x),
        }
    }

    /// `∫_0^∞ g(u) du`.
    pub fn total_mass(&self) -> f64 {
        self.tail(0.0)
    }

    /// `∫_lo^hi g(u) du`, accurate in relative terms for short intervals far
    /// in the tail.
    pub fn integral(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0) || !(hi >= lo) {
            return domain(format!("trawl integral needs 0 ≤ lo ≤ hi, got [{lo}, {hi}]"));
        }
        if hi == lo {
            return Ok(0.0);
        }
        Ok(match self {
            TrawlFunction::Exponential { lambda } => {
                if hi.is_infinite() {
                    (-lambda * lo).exp() / lambda
                } else {
                    (-lambda * lo).exp() * -(-lambda * (hi - lo)).exp_m1() / lambda
                }
            }
            TrawlFunction::SupGamma { alpha, h } => {
                let head = self.tail(lo);
                if hi.is_infinite() {
                    head
                } else {
                    head * -((1.0 - h) * ((hi - lo) / (alpha + lo)).ln_1p()).exp_m1()
                }
            }
            TrawlFunction::Tabulated(t) => t.tail(lo) - t.tail(hi),
        })
    }

    /// `∫_x^∞ ∫_u^∞ g(v) dv du`, infinite for `H ≤ 2`.
    pub fn second_tail(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            TrawlFunction::Exponential { lambda } => (-lambda * x).exp() / (lambda * lambda),
            TrawlFunction::SupGamma { alpha, h } => {
                if *h <= 2.0 {
                    f64::INFINITY
                } else {
                    alpha * alpha / ((h - 1.0) * (h - 2.0)) * ((2.0 - h) * (x / alpha).ln_1p()).exp()
                }
            }
            TrawlFunction::Tabulated(t) => t.second_tail(x),
        }
    }

    /// `Σ_{k≥0} g(x + kτ)`.
    pub fn periodized(&self, x: f64, period: f64) -> f64 {
        match self {
            TrawlFunction::Exponential { lambda } => (-lambda * x).exp() / -(-lambda * period).exp_m1(),
            TrawlFunction::SupGamma { alpha, h } => {
                let scale = (alpha / period).powf(*h);
                scale * hurwitz_zeta(*h, (alpha + x) / period).unwrap_or(f64::NAN)
            }
            TrawlFunction::Tabulated(t) => {
                let mut s = 0.0;
                let mut u = x;
                while u < t.end() {
                    s += t.eval(u);
                    u += period;
                }
                s
            }
        }
    }

    /// `Σ_{m≥0} tail(x + m·step)`; infinite for `H ≤ 2`.
    pub fn lattice_tail_sum(&self, x: f64, step: f64) -> f64 {
        match self {
            TrawlFunction::Exponential { lambda } => self.tail(x) / -(-lambda * step).exp_m1(),
            TrawlFunction::SupGamma { alpha, h } => {
                if *h <= 2.0 {
                    return f64::INFINITY;
                }
                // tail(x) = α/(H−1) (α/step)^{H−1} (m + (α+x)/step)^{1−H}
                let c = alpha / (h - 1.0) * (alpha / step).powf(h - 1.0);
                c * hurwitz_zeta(h - 1.0, (alpha + x) / step).unwrap_or(f64::NAN)
            }
            TrawlFunction::Tabulated(t) => {
                let mut s = 0.0;
                let mut u = x;
                while u < t.end() {
                    s += t.tail(u);
                    u += step;
                }
                s
            }
        }
    }

    /// Smallest `T` with `∫_T^∞ g ≤ q ∫_0^∞ g`, for `q ∈ (0, 1]`.
    pub fn tail_quantile(&self, q: f64) -> f64 {
        match self {
            TrawlFunction::Exponential { lambda } => -q.ln() / lambda,
            TrawlFunction::SupGamma { alpha, h } => alpha * ((q.ln() / (1.0 - h)).exp() - 1.0),
            TrawlFunction::Tabulated(t) => {
                let target = q * t.tail(0.0);
                let (mut lo, mut hi) = (0.0, t.end());
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if t.tail(mid) > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// End of the support, if compact.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            TrawlFunction::Tabulated(t) => Some(t.end()),
            _ => None,
        }
    }

    /// Short memory iff `Σ_k ∫_{kΔ}^∞ g < ∞`, i.e. everything but `H ≤ 2`.
    pub fn memory_class(&self) -> MemoryClass {
        match self {
            TrawlFunction::SupGamma { h, .. } if *h <= 2.0 => MemoryClass::Long,
            _ => MemoryClass::Short,
        }
    }
}

/// `∫_lo^hi g(u) du` (with `hi = ∞` allowed).
pub fn trawl_integral(g: &TrawlFunction, lo: f64, hi: f64) -> Result<f64> {
    g.integral(lo, hi)
}

impl fmt::Display for TrawlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrawlFunction::Exponential { lambda } => write!(f, "exp({})", fmt_num(*lambda)),
            TrawlFunction::SupGamma { alpha, h } => write!(f, "supgamma({},{})", fmt_num(*alpha), fmt_num(*h)),
            TrawlFunction::Tabulated(t) => {
                write!(f, "tabulated({};", fmt_num(t.step))?;
                let vals: Vec<String> = t.values.iter().map(|v| fmt_num(*v)).collect();
                write!(f, "{})", vals.join(","))
            }
        }
    }
}

impl FromStr for TrawlFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        match name.as_str() {
            "exp" | "exponential" => {
                let v = parse_numbers(&args, "exp")?;
                expect_arity(&v, 1, "exp")?;
                TrawlFunction::exponential(v[0])
            }
            "supgamma" => {
                let v = parse_numbers(&args, "supgamma")?;
                expect_arity(&v, 2, "supgamma")?;
                TrawlFunction::sup_gamma(v[0], v[1])
            }
            "tabulated" => {
                let (step, rest) = args
                    .split_once(';')
                    .ok_or_else(|| Error::Config("tabulated(step;g0,g1,...) expected".into()))?;
                let step = parse_numbers(step, "tabulated")?;
                expect_arity(&step, 1, "tabulated step")?;
                TrawlFunction::tabulated(step[0], parse_numbers(rest, "tabulated")?)
            }
            other => Err(Error::Config(format!("unknown trawl function `{other}`"))),
        }
    }
}
