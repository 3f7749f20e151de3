use std::fmt;

use crate::error::{Error, Result};
use crate::kernels::{PeriodicFunction, TrawlFunction};
use crate::levy::LevySeed;

/// A periodic trawl model observed on the grid `0, Δ, …, nΔ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub seed: LevySeed,
    pub trawl: TrawlFunction,
    pub kernel: PeriodicFunction,
    pub delta: f64,
    pub n: usize,
}

impl ModelSpec {
    pub fn new(seed: LevySeed, trawl: TrawlFunction, kernel: PeriodicFunction, delta: f64, n: usize) -> Result<Self> {
        let m = ModelSpec { seed, trawl, kernel, delta, n };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.seed.validate()?;
        self.trawl.validate()?;
        self.kernel.validate()?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("Δ must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    /// Same model with another sampling step.
    pub fn with_delta(&self, delta: f64) -> Self {
        ModelSpec { delta, ..self.clone() }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trawl={} p={} levy={} delta={} n={}",
            self.trawl, self.kernel, self.seed, self.delta, self.n
        )
    }
}
