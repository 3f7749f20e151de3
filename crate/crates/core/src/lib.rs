//! Periodic trawl processes.
//!
//! A periodic trawl process is
//!
//! ```text
//! Y_t = ∫∫ p(t − s) 1{0 < x < g(t − s)} L(dx, ds),
//! ```
//!
//! with a homogeneous Lévy basis `L`, a monotone trawl function `g` and a
//! periodic kernel `p`. The crate provides the moment structure, exact
//! simulation on a time grid through slice partitions, asymptotic variances
//! of sample means and autocorrelations, and method-of-moments / GMM
//! estimators.

pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod io;
pub mod kernels;
pub mod levy;
pub mod model;
pub mod moments;
mod parse;
pub mod rng;
pub mod slicesim;
pub mod special;

pub use error::{Error, Result};
pub use kernels::{PeriodicFunction, TrawlFunction};
pub use levy::LevySeed;
pub use model::ModelSpec;
pub use moments::Acf;
pub use rng::RandomStream;
