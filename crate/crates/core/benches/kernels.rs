//! Sequential vs parallel execution of the hot kernels.
//!
//! Run with `cargo bench -p mbl-quench`; build with `--no-default-features`
//! to confirm the parallel policy degrades to the sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mbl_quench::entropy::{purity_sum_doubled, wre_naive_with, WrePath, DEFAULT_WRE_FAST_CAP};
use mbl_quench::hilbert::haar_random;
use mbl_quench::liom::{fit_gge, gge_probabilities, gge_saturation_entropies_with, scrooge_wre_with};
use mbl_quench::runner::{compute_growth, haar_baseline_with, Case, ExperimentConfig};
use mbl_quench::{Exec, SeededRng};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn wre(c: &mut Criterion) {
    let mut g = c.benchmark_group("wre_naive");
    g.sample_size(10);
    for l in [8, 10, 12] {
        let psi = haar_random(&mut SeededRng::new(1, 0), l).unwrap();
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, l), &psi, |b, psi| b.iter(|| wre_naive_with(black_box(psi), exec)));
        }
    }
    g.finish();

    let mut g = c.benchmark_group("wre_doubled");
    g.sample_size(10);
    for l in [6, 8] {
        let psi = haar_random(&mut SeededRng::new(2, 0), l).unwrap();
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, l), &psi, |b, psi| {
                b.iter(|| purity_sum_doubled(black_box(psi), DEFAULT_WRE_FAST_CAP, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn gge(c: &mut Criterion) {
    let mut g = c.benchmark_group("gge_saturation");
    g.sample_size(10);
    let l = 10;
    let psi = haar_random(&mut SeededRng::new(3, 0), l).unwrap();
    let params = fit_gge(&psi.magnetizations(), &mbl_quench::liom::nn_connected(&psi)).unwrap();
    let ens = gge_probabilities(&params);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(name, l), |b| b.iter(|| gge_saturation_entropies_with(black_box(&ens), exec)));
    }
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(format!("scrooge_{name}"), 8), |b| {
            let ens8 = mbl_quench::liom::DiagonalEnsemble::uniform(8);
            b.iter(|| scrooge_wre_with(&ens8, &mut SeededRng::new(4, 0), 32, exec).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("haar_baseline");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(name, 10), |b| {
            b.iter(|| haar_baseline_with(&mut SeededRng::new(5, 0), 10, 32, WrePath::Naive, exec).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("growth_sweep");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = ExperimentConfig {
            case: Case::I,
            n_sites: 8,
            t0_grid: vec![0.0, 1.0, 3.0, 10.0],
            realizations: 4,
            exec,
            ..ExperimentConfig::default()
        };
        g.bench_function(BenchmarkId::new(name, 8), |b| b.iter(|| compute_growth(black_box(&cfg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, wre, gge, sampling, sweep);
criterion_main!(benches);
