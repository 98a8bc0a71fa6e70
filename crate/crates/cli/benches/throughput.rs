//! Throughput benchmarks for the core fitting and interval paths.
//!
//! Benchmark IDs are suffixed with the active execution mode so results from
//! `cargo bench` (parallel, the default feature set) and
//! `cargo bench --no-default-features` (sequential) can be compared side by
//! side in criterion's reports.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use gpcp_core::conformal::{fcp_gp_interval, jplus_gp_interval, AsymJplusGpProfile, ScoreConfig};
use gpcp_core::exec;
use gpcp_core::gp::{fit, Dataset, FittedGP};
use gpcp_core::testbed::get_function;
use gpcp_core::{CovarianceSpec, DEFAULT_NUGGET};

const MODE: &str = if exec::PARALLEL {
    "parallel"
} else {
    "sequential"
};

fn training_fixture(n: usize) -> (Dataset, CovarianceSpec) {
    let f = get_function("branin").expect("known tag");
    let points = f.sample_uniform(n, 42).expect("sampling");
    let values = f.eval_rows(&points).expect("evaluation");
    let data = Dataset::new(points, ndarray::Array1::from(values)).expect("valid dataset");
    let spec = CovarianceSpec::new(2000.0, vec![4.0, 6.0], 2).expect("valid spec");
    (data, spec)
}

fn fitted_fixture(n: usize) -> (FittedGP, Vec<Vec<f64>>) {
    let (data, spec) = training_fixture(n);
    let model = fit(&spec, &data, DEFAULT_NUGGET).expect("fit");
    let f = get_function("branin").expect("known tag");
    let test = f.sample_uniform(32, 4242).expect("sampling");
    let xs: Vec<Vec<f64>> = (0..test.nrows()).map(|i| test.row(i).to_vec()).collect();
    (model, xs)
}

fn bench_fit(c: &mut Criterion) {
    let (data, spec) = training_fixture(96);
    c.bench_function(&format!("fit_n96/{MODE}"), |b| {
        b.iter(|| fit(black_box(&spec), black_box(&data), DEFAULT_NUGGET).expect("fit"))
    });
}

fn bench_loo_predict(c: &mut Criterion) {
    let (model, xs) = fitted_fixture(96);
    c.bench_function(&format!("loo_predict_all_n96/{MODE}"), |b| {
        b.iter(|| model.loo_predict_all(black_box(&xs[0])).expect("posterior"))
    });
}

fn bench_interval_batch(c: &mut Criterion) {
    let (model, xs) = fitted_fixture(96);
    let cfg = ScoreConfig::default();
    c.bench_function(&format!("jplus_gp_batch32_n96/{MODE}"), |b| {
        b.iter(|| {
            exec::map_slice(black_box(&xs), |x| {
                jplus_gp_interval(&model, &cfg, x, 0.9).expect("interval")
            })
        })
    });
    c.bench_function(&format!("fcp_gp_batch32_n96/{MODE}"), |b| {
        b.iter(|| {
            exec::map_slice(black_box(&xs), |x| {
                fcp_gp_interval(&model, &cfg, x, 0.9).expect("interval")
            })
        })
    });
    c.bench_function(&format!("asym_jplus_gp_batch32_n96/{MODE}"), |b| {
        b.iter(|| {
            exec::map_slice(black_box(&xs), |x| {
                AsymJplusGpProfile::new(&model, &cfg, x)
                    .and_then(|p| p.interval(0.9))
                    .expect("interval")
            })
        })
    });
}

criterion_group!(benches, bench_fit, bench_loo_predict, bench_interval_batch);
criterion_main!(benches);
