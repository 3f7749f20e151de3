//! Method-of-moments and GMM estimators for periodic trawl processes.

pub mod gmm;
pub mod mom;
pub mod prefit;
pub mod simplex;

pub use gmm::{gmm_fit, gmm_objective, GmmFamily, GmmFit, GmmSpec, SampleMoments};
pub use mom::{
    exp_known_tau_jacobian, exp_known_tau_map, mom_exp_known_c, mom_exp_known_c_fit, mom_exp_known_tau,
    mom_exp_known_tau_with, mom_supgamma_known_c, mom_supgamma_known_c_fit, mom_supgamma_known_tau,
    mom_supgamma_known_tau_with, supgamma_known_tau_jacobian, supgamma_known_tau_map, MomFamily, MomFitResult,
    ScalarFit, Z_95,
};
pub use prefit::{supgamma_acf_prefit, AcfPrefit};
