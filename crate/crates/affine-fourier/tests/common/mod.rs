//! Shared helpers for the integration suites.

use affine_fourier::Kernel;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random symmetric contraction kernel: `Q diag(u) Qᵗ` with uniform
/// eigenvalues in `[0,1]` and a Haar-ish orthogonal factor from QR.
pub fn random_contraction(n: usize, seed: u64) -> Kernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
    let q = g.qr().q();
    let mut diag = DMatrix::zeros(n, n);
    for i in 0..n {
        diag[(i, i)] = rng.gen::<f64>();
    }
    Kernel::dense(&q * diag * q.transpose()).expect("construction yields a contraction")
}

/// Deterministic uniform draws in `[lo, hi]`.
#[allow(dead_code)]
pub fn uniform_grid_random(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| lo + (hi - lo) * rng.gen::<f64>())
        .collect()
}
