use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trawlkit::asymptotics::{acf_limit_matrix, sample_mean_variance};
use trawlkit::estimators::{gmm_fit, mom_exp_known_tau, GmmFamily, GmmSpec};
use trawlkit::kernels::{correlation_factor_c, cross_integral};
use trawlkit::moments::sample_acf;
use trawlkit::slicesim::{compute_slices, simulate, SimConfig};
use trawlkit::ModelSpec;
use trawlkit_bench::{exp_trawl, gaussian, sine, sup_gamma_trawl};

fn kernels(c: &mut Criterion) {
    let g = exp_trawl();
    let h = sup_gamma_trawl();
    let p = sine();
    c.bench_function("cross_integral/exp-sine", |b| b.iter(|| cross_integral(&g, &p, black_box(1.3)).unwrap()));
    c.bench_function("cross_integral/supgamma-sine", |b| b.iter(|| cross_integral(&h, &p, black_box(1.3)).unwrap()));
    c.bench_function("correlation_factor/supgamma-sine", |b| {
        b.iter(|| correlation_factor_c(&h, &p, black_box(0.7)).unwrap())
    });
}

fn slices(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_slices");
    for n in [500usize, 5000] {
        group.bench_with_input(BenchmarkId::new("exp", n), &n, |b, &n| b.iter(|| compute_slices(&exp_trawl(), n, 0.1).unwrap()));
        group.bench_with_input(BenchmarkId::new("supgamma", n), &n, |b, &n| {
            b.iter(|| compute_slices(&sup_gamma_trawl(), n, 0.1).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let model = ModelSpec::new(gaussian(), exp_trawl(), sine(), 0.1, 0).unwrap();
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for n in [1000usize, 5000] {
        let cfg = SimConfig::new(n).burn_in(100);
        group.bench_with_input(BenchmarkId::new("exp-sine", n), &cfg, |b, cfg| b.iter(|| simulate(&model, cfg, 1).unwrap()));
    }
    group.finish();
}

fn asymptotics(c: &mut Criterion) {
    let exp = ModelSpec::new(gaussian(), exp_trawl(), trawlkit::PeriodicFunction::One, 0.1, 0).unwrap();
    let sg = ModelSpec::new(gaussian(), sup_gamma_trawl(), trawlkit::PeriodicFunction::One, 0.1, 0).unwrap();
    c.bench_function("sample_mean_variance/supgamma", |b| b.iter(|| sample_mean_variance(&sg).unwrap()));
    c.bench_function("acf_limit_matrix/exp h=5", |b| b.iter(|| acf_limit_matrix(&exp, 5).unwrap()));
}

fn estimators(c: &mut Criterion) {
    let family = GmmFamily::ExpGaussian;
    let model = family.model(&[1.0, 0.0, 1.0], 0.1).unwrap();
    let path = simulate(&model, &SimConfig::new(10_000).burn_in(200), 3).unwrap();
    let acf = sample_acf(&path.values, 0.1, 8, true).unwrap();
    c.bench_function("mom_exp_known_tau/tau=7", |b| b.iter(|| mom_exp_known_tau(&acf, 7, 0.1).unwrap()));
    let spec = GmmSpec::new(family, 5);
    let mut group = c.benchmark_group("gmm");
    group.sample_size(10);
    group.bench_function("exp-gaussian n=1e4", |b| b.iter(|| gmm_fit(&path.values, &spec, 0.1).unwrap()));
    group.finish();
}

criterion_group!(benches, kernels, slices, simulation, asymptotics, estimators);
criterion_main!(benches);
