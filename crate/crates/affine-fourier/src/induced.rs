//! Fourier transforms of measures induced on ℝ by determinantal measures
//! through the binary encoding `π(ω) = Σ ωₖ λᵏ`.
//!
//! The working formula is the determinant truncation
//!
//! ```text
//! ν̂_T(t) = lim_n det(I_n + D_n(λt) T_{F_n}),   D_n = diag(e(λᵏt) − 1)
//! ```
//!
//! with `F_n = {1..n}` always the leading principal block.  The limit is
//! approached on a truncation ladder with stagnation detection; the brute
//! force `Σ_ω e(Σ ωₖ λᵏ t) det W(ω)` over all `2ⁿ` configurations serves as
//! the independent oracle at small n.  The Toeplitz kernel `p·a^{|i−j|}`
//! admits closed forms (correlation determinants `(1−a²)^{n−1}`, principal
//! minors) that are implemented next to the determinant route.

use nalgebra::DMatrix;

use crate::detmeasure::{w_matrix_unchecked, CylinderSpec, Kernel};
use crate::linalg;
use crate::{e, Complex64, Error, Result};

/// Truncation ladder cap.
pub const DEFAULT_MAX_ORDER: usize = 64;

/// Default stagnation threshold.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Deltas must stay below tolerance for this many consecutive orders.
const STAGNATION_RUN: usize = 3;

/// A kernel paired with a contraction ratio: the induced system `ν_T`.
#[derive(Debug, Clone)]
pub struct InducedSystem {
    pub lambda: f64,
    pub kernel: Kernel,
}

impl InducedSystem {
    pub fn new(lambda: f64, kernel: Kernel) -> Result<Self> {
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
        }
        Ok(Self { lambda, kernel })
    }
}

/// Outcome of a determinant truncation ladder.
#[derive(Debug, Clone)]
pub struct DetTransformResult {
    pub value: Complex64,
    /// Order at which the ladder stopped.
    pub n_used: usize,
    /// `(n, value_n)` pairs along the ladder.
    pub convergence_trace: Vec<(usize, Complex64)>,
    /// `|value_n − value_{n−1}|` at the stopping order.
    pub stagnation: f64,
    /// False when the ladder hit the max order without stagnating; the
    /// value is still reported, never silently.
    pub converged: bool,
}

/// `det(I_n + D_n(λt) T_{F_n})` for an arbitrary entry function.
fn det_order_from(entry: &dyn Fn(usize, usize) -> f64, lambda: f64, t: f64, n: usize) -> Complex64 {
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        let d_i = e(lambda.powi(i as i32 + 1) * t) - Complex64::new(1.0, 0.0);
        for j in 0..n {
            let delta = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            m[(i, j)] = delta + d_i * entry(i + 1, j + 1);
        }
    }
    linalg::det_complex(&m)
}

fn ladder(
    entry: &dyn Fn(usize, usize) -> f64,
    lambda: f64,
    t: f64,
    tol: f64,
    max_order: usize,
) -> Result<DetTransformResult> {
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let max_order = max_order.max(2);
    let mut trace = Vec::new();
    let mut prev = Complex64::new(0.0, 0.0);
    let mut run = 0usize;
    let mut last_delta = f64::INFINITY;
    for n in 2..=max_order {
        let v = det_order_from(entry, lambda, t, n);
        trace.push((n, v));
        if n > 2 {
            last_delta = (v - prev).norm();
            run = if last_delta < tol { run + 1 } else { 0 };
        }
        prev = v;
        if run >= STAGNATION_RUN {
            return Ok(DetTransformResult {
                value: v,
                n_used: n,
                convergence_trace: trace,
                stagnation: last_delta,
                converged: true,
            });
        }
    }
    Ok(DetTransformResult {
        value: prev,
        n_used: max_order,
        convergence_trace: trace,
        stagnation: last_delta,
        converged: false,
    })
}

/// Fixed-order determinant `det(I_n + D_n(λt) T_{F_n})`.
pub fn nu_hat_det_order(sys: &InducedSystem, t: f64, n: usize) -> Complex64 {
    det_order_from(&|i, j| sys.kernel.entry(i, j), sys.lambda, t, n)
}

/// Determinant ladder for `ν̂_T(t)` with stagnation detection.
pub fn nu_hat_det(sys: &InducedSystem, t: f64, tol: f64) -> Result<DetTransformResult> {
    nu_hat_det_with(sys, t, tol, DEFAULT_MAX_ORDER)
}

/// Like [`nu_hat_det`] with an explicit ladder cap.
pub fn nu_hat_det_with(
    sys: &InducedSystem,
    t: f64,
    tol: f64,
    max_order: usize,
) -> Result<DetTransformResult> {
    let out = ladder(
        &|i, j| sys.kernel.entry(i, j),
        sys.lambda,
        t,
        tol,
        max_order,
    )?;
    // spectral validity on the largest principal block actually used
    sys.kernel.ensure_spectrum(out.n_used)?;
    Ok(out)
}

/// Exhaustive-enumeration cap for the brute-force oracle.
pub const MAX_BRUTEFORCE: usize = 14;

/// The limit formula evaluated literally at order n:
/// `Σ_{ω ∈ {0,1}ⁿ} e(Σ ωₖ λᵏ t) · det W_{F_n}(ω)`.
///
/// Independent of the determinant route; the two must agree at matched
/// order to the elimination roundoff.
pub fn nu_hat_bruteforce(sys: &InducedSystem, t: f64, n: usize) -> Result<Complex64> {
    if n == 0 || n > MAX_BRUTEFORCE {
        return Err(Error::Invalid(format!(
            "brute force order {n} outside 1..={MAX_BRUTEFORCE}"
        )));
    }
    let indices: Vec<usize> = (1..=n).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u64..(1u64 << n) {
        let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        let cyl = CylinderSpec::new(indices.clone(), bits.clone())?;
        let w = w_matrix_unchecked(&|i, j| sys.kernel.entry(i, j), &cyl);
        let phase: f64 = bits
            .iter()
            .enumerate()
            .map(|(k, &b)| b as f64 * sys.lambda.powi(k as i32 + 1))
            .sum();
        acc += e(phase * t) * linalg::det_real(&w);
    }
    Ok(acc)
}

/// First-order trace asymptotic with its measured gap.
#[derive(Debug, Clone, Copy)]
pub struct TraceAsymptotic {
    /// `exp(Σ_{k≤n} (e(λᵏt) − 1)·T_{k,k})`
    pub value: Complex64,
    /// `|asymptotic − det|` at matched order; diagnostic only.
    pub gap: f64,
}

/// The `det(I+S) ≈ exp(trace S)` companion to [`nu_hat_det_order`].
pub fn nu_hat_trace_asymptotic(sys: &InducedSystem, t: f64, n: usize) -> TraceAsymptotic {
    let mut s = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        s += (e(sys.lambda.powi(k as i32) * t) - Complex64::new(1.0, 0.0)) * sys.kernel.entry(k, k);
    }
    let value = s.exp();
    let gap = (value - nu_hat_det_order(sys, t, n)).norm();
    TraceAsymptotic { value, gap }
}

/// Bernoulli product term and its deviation from the determinant.
#[derive(Debug, Clone, Copy)]
pub struct ToeplitzApprox {
    /// `∏_{k≤n} (p·e(λᵏt) + 1 − p)`
    pub product: Complex64,
    /// `det(I_n + D_n T_{F_n})` for the kernel `p·a^{|i−j|}`
    pub det: Complex64,
    /// `|det − product|`
    pub deviation: f64,
}

/// Compare the determinant for the kernel `p·a^{|i−j|}` against the plain
/// Bernoulli product at order n, reporting the deviation.
pub fn toeplitz_product_approx(
    p: f64,
    a: f64,
    lambda: f64,
    t: f64,
    n: usize,
) -> Result<ToeplitzApprox> {
    let sys = InducedSystem::new(lambda, Kernel::toeplitz_general(p, a)?)?;
    let mut product = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        product *= p * e(lambda.powi(k as i32) * t) + (1.0 - p);
    }
    let det = nu_hat_det_order(&sys, t, n);
    Ok(ToeplitzApprox {
        product,
        det,
        deviation: (det - product).norm(),
    })
}

/// The unit-diagonal correlation matrix `(a^{|i−j|})` of order n.
fn correlation_matrix(a: f64, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| a.powi(i.abs_diff(j) as i32))
}

/// `det(Aₙ)` for the correlation matrix, by elimination.
pub fn toeplitz_correlation_det(a: f64, n: usize) -> f64 {
    linalg::det_real(&correlation_matrix(a, n))
}

/// Minor `Tₙ(k̂)`: determinant after omitting row and column k (1-based).
pub fn toeplitz_minor(a: f64, n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("minor index {k} outside 1..={n}")));
    }
    let full = correlation_matrix(a, n);
    let m = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let r = if i + 1 >= k { i + 1 } else { i };
        let c = if j + 1 >= k { j + 1 } else { j };
        full[(r, c)]
    });
    Ok(linalg::det_real(&m))
}

/// The printed closed form `Pₙ(t)` with its gap to the determinant.
#[derive(Debug, Clone, Copy)]
pub struct PnEvaluation {
    /// `1 + p^{n−1} Σₖ Tₙ(k̂) ∏_{j≠k} D(λʲt) + pⁿ(1−a²)^{n−1} ∏ₖ D(λᵏt)`
    pub pn: Complex64,
    /// `|Pₙ − det(Iₙ + DₙT_{Fₙ})|`, recorded rather than asserted: the
    /// printed form keeps only the extreme Grassmann terms.
    pub det_gap: f64,
}

/// Assemble `Pₙ(t)` from the correlation minors and `D(t) = e(t) − 1`.
pub fn toeplitz_exact_pn(p: f64, a: f64, lambda: f64, t: f64, n: usize) -> Result<PnEvaluation> {
    if n == 0 || n > 16 {
        return Err(Error::Invalid(format!("P_n order {n} outside 1..=16")));
    }
    let d = |x: f64| e(x) - Complex64::new(1.0, 0.0);
    let d_vals: Vec<Complex64> = (1..=n).map(|k| d(lambda.powi(k as i32) * t)).collect();
    let all: Complex64 = d_vals.iter().product();
    let mut minor_sum = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let prod_except: Complex64 = d_vals
            .iter()
            .enumerate()
            .filter(|&(j, _)| j + 1 != k)
            .map(|(_, &v)| v)
            .product();
        minor_sum += toeplitz_minor(a, n, k)? * prod_except;
    }
    let pn = Complex64::new(1.0, 0.0)
        + p.powi(n as i32 - 1) * minor_sum
        + p.powi(n as i32) * (1.0 - a * a).powi(n as i32 - 1) * all;
    let sys = InducedSystem::new(lambda, Kernel::toeplitz_general(p, a)?)?;
    let det_gap = (pn - nu_hat_det_order(&sys, t, n)).norm();
    Ok(PnEvaluation { pn, det_gap })
}

/// Ladder result for `det_λ` along with the per-order agreement against
/// `det(Iₙ + DₙT)`.
#[derive(Debug, Clone)]
pub struct DetLambdaResult {
    pub result: DetTransformResult,
    /// Max over orders of `|det((Dₙ+I)T + (I−T)) − det(Iₙ + DₙT)|`; the two
    /// matrices are algebraically identical, so this measures roundoff only.
    pub identity_residual_max: f64,
}

/// The infinite determinant
/// `det_λ(T)(t) = limₙ det((Dₙ(λt)+Iₙ)T_{Fₙ} + (Iₙ − T_{Fₙ}))`.
///
/// `(D+I)T + (I−T) = I + DT`, so this must track [`nu_hat_det`] to machine
/// precision at every order; the residual is asserted below `1e-10` and
/// reported.
pub fn det_lambda(kernel: &Kernel, lambda: f64, t: f64, tol: f64) -> Result<DetLambdaResult> {
    det_lambda_with(kernel, lambda, t, tol, DEFAULT_MAX_ORDER)
}

pub fn det_lambda_with(
    kernel: &Kernel,
    lambda: f64,
    t: f64,
    tol: f64,
    max_order: usize,
) -> Result<DetLambdaResult> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
    }
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let max_order = max_order.max(2);
    let sys = InducedSystem::new(lambda, kernel.clone())?;
    let det_lambda_order = |n: usize| -> Complex64 {
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            let di_plus_1 = e(lambda.powi(i as i32 + 1) * t);
            for j in 0..n {
                let t_ij = kernel.entry(i + 1, j + 1);
                let delta = if i == j { 1.0 } else { 0.0 };
                m[(i, j)] = di_plus_1 * t_ij + (delta - t_ij);
            }
        }
        linalg::det_complex(&m)
    };

    let mut trace = Vec::new();
    let mut identity_residual_max = 0.0f64;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut run = 0usize;
    let mut last_delta = f64::INFINITY;
    let mut out: Option<DetTransformResult> = None;
    for n in 2..=max_order {
        let v = det_lambda_order(n);
        let residual = (v - nu_hat_det_order(&sys, t, n)).norm();
        identity_residual_max = identity_residual_max.max(residual);
        if residual > 1e-10 {
            return Err(Error::Numeric(format!(
                "det_lambda departed from det(I + DT) by {residual:.3e} at order {n}"
            )));
        }
        trace.push((n, v));
        if n > 2 {
            last_delta = (v - prev).norm();
            run = if last_delta < tol { run + 1 } else { 0 };
        }
        prev = v;
        if run >= STAGNATION_RUN {
            out = Some(DetTransformResult {
                value: v,
                n_used: n,
                convergence_trace: trace,
                stagnation: last_delta,
                converged: true,
            });
            break;
        }
    }
    let result = out.unwrap_or(DetTransformResult {
        value: prev,
        n_used: max_order,
        convergence_trace: Vec::new(),
        stagnation: last_delta,
        converged: false,
    });
    Ok(DetLambdaResult {
        result,
        identity_residual_max,
    })
}

/// Minimum eigenvalue of the Hermitian Gram matrix `[F(tᵢ − tⱼ)]` built
/// from `det_λ` values on the grid.
pub fn positive_definite_check(kernel: &Kernel, lambda: f64, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() || grid.len() > 64 {
        return Err(Error::Invalid("grid size must be in 1..=64".into()));
    }
    let m = grid.len();
    // dedupe differences; uniform grids collapse to O(m) distinct values
    let f_of = |s: f64| -> Result<Complex64> {
        Ok(det_lambda(kernel, lambda, s, DEFAULT_TOL)?.result.value)
    };
    let mut gram = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let mut cache: Vec<(u64, Complex64)> = Vec::new();
    for i in 0..m {
        for j in 0..=i {
            let s = grid[i] - grid[j];
            let key = s.abs().to_bits();
            let found = cache.iter().find(|&&(k, _)| k == key).map(|&(_, v)| v);
            let val_abs = match found {
                Some(v) => v,
                None => {
                    let v = f_of(s.abs())?;
                    cache.push((key, v));
                    v
                }
            };
            let val = if s >= 0.0 { val_abs } else { val_abs.conj() };
            gram[(i, j)] = val;
            gram[(j, i)] = val.conj();
        }
    }
    let eigs = linalg::hermitian_eigenvalues(&gram);
    Ok(eigs[0])
}

/// `|det_λ(T) − det_λ(T^σ)|` at matched truncation order, where `σ` is a
/// permutation of `{1..m}` extended by the identity and
/// `T^σ_{i,j} = T_{σ(i),σ(j)}`.
pub fn unitary_invariance_check(
    kernel: &Kernel,
    perm: &[usize],
    lambda: f64,
    t: f64,
    order: usize,
) -> Result<f64> {
    let m = perm.len();
    let mut seen = vec![false; m];
    for &p in perm {
        if p == 0 || p > m || seen[p - 1] {
            return Err(Error::Invalid("not a permutation of 1..=m".into()));
        }
        seen[p - 1] = true;
    }
    if order < m {
        return Err(Error::Invalid(format!(
            "evaluation order {order} below permutation support {m}"
        )));
    }
    let sigma = |i: usize| if i <= m { perm[i - 1] } else { i };
    let base = det_order_from(&|i, j| kernel.entry(i, j), lambda, t, order);
    let permuted = det_order_from(&|i, j| kernel.entry(sigma(i), sigma(j)), lambda, t, order);
    Ok((base - permuted).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_contraction(n: usize, seed: u64) -> Kernel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let qr = g.qr();
        let q = qr.q();
        let mut diag = DMatrix::zeros(n, n);
        for i in 0..n {
            diag[(i, i)] = rng.gen::<f64>();
        }
        Kernel::dense(&q * diag * q.transpose()).unwrap()
    }

    #[test]
    fn det_at_zero_frequency_is_one() {
        let sys = InducedSystem::new(0.5, Kernel::toeplitz(0.4).unwrap()).unwrap();
        for n in [2usize, 5, 9] {
            let v = nu_hat_det_order(&sys, 0.0, n);
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let r = nu_hat_det(&sys, 0.0, 1e-10).unwrap();
        assert!(r.converged);
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_recovers_bernoulli_product() {
        let p = 0.3;
        let lam = 0.5;
        let t = 1.3;
        let sys = InducedSystem::new(lam, Kernel::diagonal(p).unwrap()).unwrap();
        let n = 9;
        let det = nu_hat_det_order(&sys, t, n);
        let mut product = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            product *= p * e(lam.powi(k as i32) * t) + (1.0 - p);
        }
        assert!((det - product).norm() < 1e-13);
    }

    #[test]
    fn brute_force_matches_determinant() {
        // one-term sanity case first: n=1 diagonal → (1−p) + p e(λt)
        let p = 0.4;
        let lam = 0.6;
        let sys = InducedSystem::new(lam, Kernel::diagonal(p).unwrap()).unwrap();
        let bf = nu_hat_bruteforce(&sys, 0.9, 1).unwrap();
        let want = (1.0 - p) + p * e(lam * 0.9);
        assert!((bf - want).norm() < 1e-14);

        // t=0 → total mass 1
        let dense = InducedSystem::new(0.4, random_contraction(6, 5)).unwrap();
        assert!(
            (nu_hat_bruteforce(&dense, 0.0, 6).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12
        );

        // dense random 6×6, λ=0.4, t=1.7
        let det = nu_hat_det_order(&dense, 1.7, 6);
        let bf = nu_hat_bruteforce(&dense, 1.7, 6).unwrap();
        assert!((det - bf).norm() <= 1e-9, "gap {}", (det - bf).norm());

        // order-10 toeplitz
        let sys = InducedSystem::new(0.5, Kernel::toeplitz(0.5).unwrap()).unwrap();
        let det = nu_hat_det_order(&sys, 1.3, 10);
        let bf = nu_hat_bruteforce(&sys, 1.3, 10).unwrap();
        assert!((det - bf).norm() <= 1e-9);

        assert!(nu_hat_bruteforce(&sys, 1.0, 15).is_err());
    }

    #[test]
    fn ladder_stagnates_and_reports() {
        let sys = InducedSystem::new(0.5, Kernel::toeplitz(0.4).unwrap()).unwrap();
        let r = nu_hat_det(&sys, 1.1, 1e-10).unwrap();
        assert!(r.converged);
        assert!(r.n_used >= 2);
        assert!(r.stagnation < 1e-10);
        assert!(!r.convergence_trace.is_empty());

        // an unreachable tolerance is flagged, not silent
        let r = nu_hat_det_with(&sys, 1.1, 1e-300, 12).unwrap();
        assert!(!r.converged);
        assert_eq!(r.n_used, 12);
    }

    #[test]
    fn trace_asymptotic_gap_shrinks_quadratically() {
        let sys = InducedSystem::new(0.5, Kernel::diagonal(0.35).unwrap()).unwrap();
        let gaps: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&t| nu_hat_trace_asymptotic(&sys, t, 24).gap)
            .collect();
        // log det − trace = O(‖S‖²): halving t divides the gap by ≈ 4
        let r1 = gaps[0] / gaps[1];
        let r2 = gaps[1] / gaps[2];
        assert!(r1 > 3.0 && r1 < 5.0, "ratio {r1}");
        assert!(r2 > 3.0 && r2 < 5.0, "ratio {r2}");

        let zero = nu_hat_trace_asymptotic(&sys, 0.0, 8);
        assert!((zero.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn toeplitz_limits() {
        // a → 0: kernel reduces to p·I and dev hits machine zero
        let ap = toeplitz_product_approx(0.3, 1e-12, 0.5, 1.3, 8).unwrap();
        assert!(ap.deviation < 1e-10);

        // p → 0: both det and product tend to 1
        let ap = toeplitz_product_approx(1e-9, 0.5, 0.5, 1.3, 8).unwrap();
        assert!((ap.det - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        assert!((ap.product - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn correlation_closed_forms() {
        // det(Aₙ) = (1−a²)^{n−1}; at a=0.5, n=3 → 0.5625
        assert!((toeplitz_correlation_det(0.5, 3) - 0.5625).abs() < 1e-12);
        for &a in &[0.2f64, 0.5, 0.8] {
            for n in 1..=10 {
                let want = (1.0 - a * a).powi(n as i32 - 1);
                assert!(
                    (toeplitz_correlation_det(a, n) - want).abs() <= 1e-10,
                    "a={a} n={n}"
                );
            }
        }
        // minors at n=3: T(1̂)=1−a², T(2̂)=1−a⁴, T(3̂)=1−a²
        let a = 0.5;
        assert!((toeplitz_minor(a, 3, 1).unwrap() - 0.75).abs() < 1e-12);
        assert!((toeplitz_minor(a, 3, 2).unwrap() - 0.9375).abs() < 1e-12);
        assert!((toeplitz_minor(a, 3, 3).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pn_gap_is_recorded() {
        // the printed P_n drops the middle Grassmann terms; the gap is a
        // diagnostic, not an assertion target
        let pe = toeplitz_exact_pn(0.3, 0.5, 0.5, 1.3, 6).unwrap();
        assert!(pe.det_gap.is_finite());
    }

    #[test]
    fn det_lambda_tracks_determinant() {
        let kernel = random_contraction(6, 9);
        let dl = det_lambda(&kernel, 0.5, 1.7, 1e-10).unwrap();
        assert!(dl.identity_residual_max <= 1e-13);
        assert!(dl.result.converged);

        // F(0) = 1
        let at0 = det_lambda(&kernel, 0.5, 0.0, 1e-10).unwrap();
        assert!((at0.result.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry() {
        let sys = InducedSystem::new(0.45, Kernel::toeplitz(0.3).unwrap()).unwrap();
        let plus = nu_hat_det(&sys, 2.2, 1e-10).unwrap().value;
        let minus = nu_hat_det(&sys, -2.2, 1e-10).unwrap().value;
        assert!((plus.conj() - minus).norm() <= 1e-12);
    }

    #[test]
    fn transform_modulus_bounded() {
        let sys = InducedSystem::new(0.5, Kernel::toeplitz(0.6).unwrap()).unwrap();
        for i in 0..20 {
            let t = -5.0 + i as f64 * 0.5;
            let v = nu_hat_det(&sys, t, 1e-10).unwrap().value;
            assert!(v.norm() <= 1.0 + 1e-9, "t={t}: {}", v.norm());
        }
    }

    #[test]
    fn gram_positive_for_diagonal() {
        let grid: Vec<f64> = (0..8).map(|i| -2.0 + i as f64 * (4.0 / 7.0)).collect();
        let min = positive_definite_check(&Kernel::diagonal(0.5).unwrap(), 0.5, &grid).unwrap();
        assert!(min >= -1e-8, "min eigenvalue {min}");

        // single point → F(0) = 1
        let one = positive_definite_check(&Kernel::diagonal(0.5).unwrap(), 0.5, &[0.7]).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_identity_and_diagonal() {
        let kernel = random_contraction(6, 11);
        // identity permutation → exactly zero
        let r = unitary_invariance_check(&kernel, &[1, 2, 3, 4, 5, 6], 0.5, 1.0, 20).unwrap();
        assert_eq!(r, 0.0);
        // swap(1,2) on a diagonal kernel leaves the kernel unchanged
        let diag = Kernel::diagonal(0.4).unwrap();
        let r = unitary_invariance_check(&diag, &[2, 1], 0.5, 1.0, 20).unwrap();
        assert!(r <= 1e-15);
        // malformed permutations rejected
        assert!(unitary_invariance_check(&diag, &[1, 1], 0.5, 1.0, 20).is_err());
        assert!(unitary_invariance_check(&diag, &[1, 2, 3], 0.5, 1.0, 2).is_err());
    }
}
