//! Shared fixtures for the benchmarks.

use trawlkit::{LevySeed, PeriodicFunction, TrawlFunction};

pub fn exp_trawl() -> TrawlFunction {
    TrawlFunction::Exponential { lambda: 1.0 }
}

pub fn sup_gamma_trawl() -> TrawlFunction {
    TrawlFunction::SupGamma { alpha: 1.0, h: 3.0 }
}

pub fn sine() -> PeriodicFunction {
    PeriodicFunction::Sine { tau: 3.0 }
}

pub fn gaussian() -> LevySeed {
    LevySeed::Gaussian { mu: 0.0, sigma2: 1.0 }
}
