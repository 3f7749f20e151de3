use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parse::{fmt_num, parse_numbers, split_call};

/// Periodic kernel `p` with period `τ`.
#[derive(Clone, Debug, PartialEq)]
pub enum PeriodicFunction {
    /// `p ≡ 1`.
    One,
    /// `p(x) = sin(2πx/τ)`.
    Sine { tau: f64 },
    /// `p(x) = a0 + Σ_k [a_k cos(2πkx/τ) + b_k sin(2πkx/τ)]`.
    Fourier { tau: f64, a0: f64, terms: Vec<(f64, f64)> },
    /// Correlation factor `c` tabulated at `0, Δ, …, (τ̃−1)Δ` with `τ = τ̃Δ`.
    /// Carries no kernel `p`; evaluation returns the interpolated `c`.
    TabulatedC { tau: f64, values: Vec<f64> },
}

impl PeriodicFunction {
    pub fn sine(tau: f64) -> Result<Self> {
        let p = PeriodicFunction::Sine { tau };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated_c(tau: f64, values: Vec<f64>) -> Result<Self> {
        let p = PeriodicFunction::TabulatedC { tau, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad_tau = |tau: f64| !(tau > 0.0 && tau.is_finite());
        match self {
            PeriodicFunction::One => Ok(()),
            PeriodicFunction::Sine { tau } | PeriodicFunction::Fourier { tau, .. } if bad_tau(*tau) => {
                Err(Error::Config(format!("period must be positive, got {tau}")))
            }
            PeriodicFunction::Fourier { a0, terms, .. } => {
                if !a0.is_finite() || terms.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    Err(Error::Config("Fourier coefficients must be finite".into()))
                } else if *a0 == 0.0 && terms.iter().all(|&(a, b)| a == 0.0 && b == 0.0) {
                    Err(Error::Config("Fourier kernel is identically zero".into()))
                } else {
                    Ok(())
                }
            }
            PeriodicFunction::TabulatedC { tau, values } => {
                if bad_tau(*tau) {
                    Err(Error::Config(format!("period must be positive, got {tau}")))
                } else if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    Err(Error::Config("tabulated c needs finite values".into()))
                } else {
                    Ok(())
                }
            }
            PeriodicFunction::Sine { .. } => Ok(()),
        }
    }

    /// Period `τ`, or `None` for the constant kernel.
    pub fn period(&self) -> Option<f64> {
        match self {
            PeriodicFunction::One => None,
            PeriodicFunction::Sine { tau }
            | PeriodicFunction::Fourier { tau, .. }
            | PeriodicFunction::TabulatedC { tau, .. } => Some(*tau),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, PeriodicFunction::One)
    }

    /// Whether the variant carries a kernel `p` (everything but `TabulatedC`).
    pub fn has_kernel(&self) -> bool {
        !matches!(self, PeriodicFunction::TabulatedC { .. })
    }

    pub(crate) fn require_kernel(&self) -> Result<()> {
        if self.has_kernel() {
            Ok(())
        } else {
            Err(Error::Config(
                "a tabulated correlation factor does not determine the kernel p; this operation needs p".into(),
            ))
        }
    }

    /// `p(x)`; the argument is reduced modulo `τ` first (the remainder is
    /// computed exactly).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PeriodicFunction::One => 1.0,
            PeriodicFunction::Sine { tau } => (2.0 * PI * (x.rem_euclid(*tau) / tau)).sin(),
            PeriodicFunction::Fourier { tau, a0, terms } => {
                let phase = 2.0 * PI * (x.rem_euclid(*tau) / tau);
                terms.iter().enumerate().fold(*a0, |acc, (k, (a, b))| {
                    let (s, c) = ((k + 1) as f64 * phase).sin_cos();
                    acc + a * c + b * s
                })
            }
            PeriodicFunction::TabulatedC { tau, values } => {
                let m = values.len();
                let pos = x.rem_euclid(*tau) / tau * m as f64;
                let i = (pos.floor() as usize).min(m - 1);
                let f = pos - i as f64;
                let next = values[(i + 1) % m];
                values[i] + f * (next - values[i])
            }
        }
    }

    /// Upper bound on `sup |p|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            PeriodicFunction::One | PeriodicFunction::Sine { .. } => 1.0,
            PeriodicFunction::Fourier { a0, terms, .. } => {
                a0.abs() + terms.iter().map(|(a, b)| a.hypot(*b)).sum::<f64>()
            }
            PeriodicFunction::TabulatedC { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

/// `p(x)`.
pub fn eval_p(p: &PeriodicFunction, x: f64) -> f64 {
    p.eval(x)
}

impl fmt::Display for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodicFunction::One => write!(f, "one"),
            PeriodicFunction::Sine { tau } => write!(f, "sine({})", fmt_num(*tau)),
            PeriodicFunction::Fourier { tau, a0, terms } => {
                let mut parts = Vec::new();
                if *a0 != 0.0 {
                    parts.push(fmt_num(*a0));
                }
                for (a, b) in terms {
                    parts.push(fmt_num(*a));
                    parts.push(fmt_num(*b));
                }
                write!(f, "fourier({};{})", fmt_num(*tau), parts.join(","))
            }
            PeriodicFunction::TabulatedC { tau, values } => {
                let parts: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
                write!(f, "tabulated-c({};{})", fmt_num(*tau), parts.join(","))
            }
        }
    }
}

impl FromStr for PeriodicFunction {
    type Err = Error;

    /// Accepts `one`, `sine(tau)`, `fourier(tau;a1,b1,...)` (an odd number
    /// of coefficients starts with the constant `a0`) and
    /// `tabulated-c(tau;c0,c1,...)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("one") || t == "1" {
            return Ok(PeriodicFunction::One);
        }
        let (name, args) = split_call(t)?;
        let split = |args: &str| -> Result<(f64, Vec<f64>)> {
            let (tau, rest) = args
                .split_once(';')
                .ok_or_else(|| Error::Config(format!("{name}(tau;...) expected")))?;
            let tau = tau
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad period `{tau}`")))?;
            Ok((tau, parse_numbers(rest, &name)?))
        };
        let p = match name.as_str() {
            "sine" | "sin" => {
                let v = parse_numbers(&args, "sine")?;
                if v.len() != 1 {
                    return Err(Error::Config("sine takes one argument (tau)".into()));
                }
                PeriodicFunction::Sine { tau: v[0] }
            }
            "fourier" => {
                let (tau, mut v) = split(&args)?;
                let a0 = if v.len() % 2 == 1 { v.remove(0) } else { 0.0 };
                let terms = v.chunks(2).map(|c| (c[0], c[1])).collect();
                PeriodicFunction::Fourier { tau, a0, terms }
            }
            "tabulated-c" | "tabulatedc" => {
                let (tau, values) = split(&args)?;
                PeriodicFunction::TabulatedC { tau, values }
            }
            other => return Err(Error::Config(format!("unknown periodic function `{other}`"))),
        };
        p.validate()?;
        Ok(p)
    }
}
