use criterion::{black_box, criterion_group, criterion_main, Criterion};

use affine_fourier::algebraic::{certify_pisot, IntPolynomial};
use affine_fourier::detmeasure::consistency_check;
use affine_fourier::fourier::{self, ScanSystem};
use affine_fourier::ifs;
use affine_fourier::induced::{nu_hat_det, InducedSystem};
use affine_fourier::Kernel;

fn bench_mu_hat(c: &mut Criterion) {
    let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0).unwrap();
    c.bench_function("mu_hat cantor xi=1", |b| {
        b.iter(|| fourier::mu_hat(&cantor, black_box(&[1.0]), 1e-12).unwrap())
    });

    let simplex = ifs::standard_simplex_ifs(3, 0.5).unwrap();
    c.bench_function("mu_hat simplex d=3", |b| {
        b.iter(|| fourier::mu_hat(&simplex, black_box(&[2.7, 2.7, 2.7]), 1e-12).unwrap())
    });
}

fn bench_split_evaluator(c: &mut Criterion) {
    let ctx = certify_pisot(&IntPolynomial::from_coeffs(&[1, -1, -1]).unwrap()).unwrap();
    c.bench_function("split evaluator phi k=30", |b| {
        b.iter(|| {
            fourier::mu_hat_at_alpha_k(ScanSystem::Bernoulli1d, &ctx, black_box(30), 1e-12).unwrap()
        })
    });
}

fn bench_determinant_ladder(c: &mut Criterion) {
    let sys = InducedSystem::new(0.5, Kernel::toeplitz(0.5).unwrap()).unwrap();
    c.bench_function("nu_hat_det toeplitz t=1.3", |b| {
        b.iter(|| nu_hat_det(&sys, black_box(1.3), 1e-10).unwrap())
    });
}

fn bench_consistency(c: &mut Criterion) {
    let kernel = Kernel::toeplitz(0.7).unwrap();
    c.bench_function("consistency sweep F={2,5} k=3", |b| {
        b.iter(|| consistency_check(&kernel, black_box(&[2, 5]), 3).unwrap())
    });
}

criterion_group!(
    benches,
    bench_mu_hat,
    bench_split_evaluator,
    bench_determinant_ladder,
    bench_consistency
);
criterion_main!(benches);
