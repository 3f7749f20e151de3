use nalgebra::DMatrix;
use proptest::prelude::*;
use trawlkit::estimators::{
    gmm_objective, mom_exp_known_tau, mom_supgamma_known_tau, GmmFamily, GmmSpec, SampleMoments,
};
use trawlkit::io::{read_csv, write_csv, ColumnSpec, TimeSeriesFile, Timestamp};
use trawlkit::kernels::correlation_factor_c;
use trawlkit::moments::{sample_acf, theoretical_acf};
use trawlkit::slicesim::{compute_slices, simulate, simulate_replicates, SimConfig, SlicePlan};
use trawlkit::{Acf, LevySeed, ModelSpec, PeriodicFunction, TrawlFunction};

fn periodic_acf(c: &[f64], decay: impl Fn(f64) -> f64, delta: f64) -> Acf {
    let tt = c.len();
    let values = (0..=tt + 1)
        .map(|l| if l == 0 { 1.0 } else { c[(l - 1) % tt] * decay(l as f64 * delta) })
        .collect();
    Acf { delta, values, centered: true, n: 1000 }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slice_masses_telescope(lambda in 0.05f64..5.0, delta in 0.05f64..2.0, n in 1usize..60) {
        let g = TrawlFunction::exponential(lambda).unwrap();
        let s = compute_slices(&g, n, delta).unwrap();
        for k in 0..=n {
            prop_assert!(rel(s.entering_mass(k), g.total_mass()) < 1e-9);
        }
    }

    #[test]
    fn supgamma_slice_masses_telescope(alpha in 0.2f64..5.0, h in 2.1f64..6.0, delta in 0.05f64..2.0, n in 1usize..40) {
        let g = TrawlFunction::sup_gamma(alpha, h).unwrap();
        let s = compute_slices(&g, n, delta).unwrap();
        for k in 0..=n {
            prop_assert!(rel(s.entering_mass(k), g.total_mass()) < 1e-9);
        }
    }

    #[test]
    fn exponential_inversion_is_exact(
        lambda in 0.01f64..2.0,
        delta in 0.1f64..2.0,
        c in prop::collection::vec(-1.0f64..1.0, 2..10),
        c1 in 0.05f64..1.0,
    ) {
        let mut c = c;
        c[0] = c1;
        prop_assume!(lambda * delta * (c.len() + 1) as f64 <= 10.0);
        let acf = periodic_acf(&c, |t| (-lambda * t).exp(), delta);
        let fit = mom_exp_known_tau(&acf, c.len(), delta).unwrap();
        prop_assert!(rel(fit.kernel_estimate, lambda) < 1e-12, "{} vs {lambda}", fit.kernel_estimate);
        for (a, b) in fit.c_estimates.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn supgamma_inversion_is_exact(
        h in 1.05f64..5.0,
        alpha in 0.1f64..10.0,
        delta in 0.1f64..2.0,
        c in prop::collection::vec(-1.0f64..1.0, 2..10),
        c1 in 0.05f64..1.0,
    ) {
        let mut c = c;
        c[0] = c1;
        let acf = periodic_acf(&c, |t| (1.0 + t / alpha).powf(1.0 - h), delta);
        let fit = mom_supgamma_known_tau(&acf, c.len(), alpha, delta).unwrap();
        prop_assert!(rel(fit.kernel_estimate, h) < 1e-12, "{} vs {h}", fit.kernel_estimate);
        for (a, b) in fit.c_estimates.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn delta_method_covariance_is_psd(lambda in 0.05f64..1.5, c in prop::collection::vec(0.1f64..1.0, 2..8)) {
        let acf = periodic_acf(&c, |t| (-lambda * t).exp(), 1.0);
        let fit = mom_exp_known_tau(&acf, c.len(), 1.0).unwrap();
        let cov = fit.covariance.unwrap();
        prop_assert!((&cov - cov.transpose()).abs().max() <= 1e-12 * cov.abs().max());
        let eig = cov.symmetric_eigen().eigenvalues;
        prop_assert!(eig.min() >= -1e-8 * eig.max().max(1.0));
    }

    #[test]
    fn csv_round_trip_is_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..50)) {
        let stamps = (0..values.len()).map(|i| Timestamp::Real(i as f64)).collect();
        let ts = TimeSeriesFile::new(stamps, values, 1.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &ts).unwrap();
        let (back, report) = read_csv(buf.as_slice(), &ColumnSpec { delta: Some(1.0), ..Default::default() }).unwrap();
        prop_assert!(report.is_clean());
        prop_assert_eq!(back, ts);
    }

    #[test]
    fn gmm_objective_vanishes_at_population_moments(lambda in 0.1f64..3.0, mu in -2.0f64..2.0, s2 in 0.1f64..3.0, m in 2usize..8) {
        let family = GmmFamily::ExpGaussian;
        let theta = [lambda, mu, s2];
        let sample = SampleMoments { values: family.moment_map(&theta, 0.5, m).unwrap(), count: 100 };
        let spec = GmmSpec::new(family, m);
        prop_assert_eq!(gmm_objective(&sample, &spec, &theta, 0.5).unwrap(), 0.0);
        let off = gmm_objective(&sample, &spec, &[lambda * 1.5, mu, s2], 0.5).unwrap();
        prop_assert!(off > 0.0);
    }

    #[test]
    fn correlation_factor_is_periodic(lambda in 0.05f64..5.0, tau in 0.5f64..5.0, t in 0.0f64..5.0) {
        let g = TrawlFunction::exponential(lambda).unwrap();
        let p = PeriodicFunction::sine(tau).unwrap();
        prop_assert!((correlation_factor_c(&g, &p, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let a = correlation_factor_c(&g, &p, t).unwrap();
        let b = correlation_factor_c(&g, &p, t + tau).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn theoretical_acf_is_bounded(lambda in 0.05f64..5.0, tau in 0.5f64..5.0, t in 0.0f64..20.0) {
        let model = ModelSpec::new(
            LevySeed::Gaussian { mu: 0.0, sigma2: 1.0 },
            TrawlFunction::exponential(lambda).unwrap(),
            PeriodicFunction::sine(tau).unwrap(),
            1.0,
            0,
        ).unwrap();
        let r = theoretical_acf(&model, t).unwrap();
        prop_assert!(r.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn sample_acf_is_normalised(values in prop::collection::vec(-100.0f64..100.0, 5..80)) {
        prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-6));
        let acf = sample_acf(&values, 1.0, 4, true).unwrap();
        prop_assert!((acf.values[0] - 1.0).abs() < 1e-12);
        for v in &acf.values {
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn replicates_are_reproducible_and_ordered() {
    let model = ModelSpec::new(
        LevySeed::Poisson { rate: 2.0 },
        TrawlFunction::exponential(0.7).unwrap(),
        PeriodicFunction::sine(3.0).unwrap(),
        0.5,
        0,
    )
    .unwrap();
    let cfg = SimConfig::new(200).burn_in(20);
    let batch = simulate_replicates(&model, &cfg, 42, 6).unwrap();
    let plan = SlicePlan::new(&model, &cfg).unwrap();
    for (r, path) in batch.iter().enumerate() {
        assert_eq!(path.replicate, r as u64);
        assert_eq!(path.values, plan.draw(42, r as u64).values);
    }
    assert_eq!(simulate(&model, &cfg, 42).unwrap().values, batch[0].values);
    assert_ne!(batch[0].values, batch[1].values);
}

#[test]
fn gmm_weight_scaling_leaves_the_estimate_unchanged() {
    use trawlkit::estimators::gmm_fit;
    let family = GmmFamily::ExpGaussian;
    let model = family.model(&[1.0, 0.2, 1.0], 0.1).unwrap();
    for seed in [1u64, 2, 3] {
        let path = simulate(&model, &SimConfig::new(5000).burn_in(200), seed).unwrap();
        let spec = GmmSpec::new(family, 4).with_seed(seed);
        let a = gmm_fit(&path.values, &spec, 0.1).unwrap();
        let b = gmm_fit(&path.values, &spec.clone().with_weight(DMatrix::identity(6, 6) * 2.0), 0.1).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!((x - y).abs() <= 1e-8, "{:?} vs {:?}", a.theta, b.theta);
        }
        assert!((b.objective - 2.0 * a.objective).abs() <= 1e-12 * b.objective.max(1e-300));
    }
}
