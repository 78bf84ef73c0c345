//! Affine iterated function systems `τ_b(x) = A⁻¹(x + b)` in ℝ^d.
//!
//! An [`AffineIfs`] is the triple `(A, B, p)`: an expansive matrix, a digit
//! set, and probability weights.  The module also carries the symbolic side
//! (finite words, the binary encoding `ω ↦ Σ ωₖ λᵏ`) and a chaos-game
//! sampler used for Monte Carlo cross-checks of the transform evaluators.
//!
//! Two one-dimensional digit conventions appear downstream and both are
//! supported: `B = {−1, 1}` (Bernoulli convolutions, cosine factors) and
//! `B = {0, 1}` (binary encoding, translation lemmas).  Each constructor
//! states its convention.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

/// Expansivity margin: every eigenvalue modulus must exceed `1 + margin`.
pub const EXPANSIVE_MARGIN: f64 = 1e-8;

/// Probability weights must sum to 1 within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// An affine IFS `(A, B, p)` with expansive `A`.
#[derive(Debug, Clone)]
pub struct AffineIfs {
    dim: usize,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    digits: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

/// Serialized form: `{dim, A: row-major list, B: list of vectors, p: list}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfsSpec {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    pub p: Vec<f64>,
}

impl AffineIfs {
    /// Validate and build a system from a matrix (row-major), digits, weights.
    pub fn new(
        dim: usize,
        a_row_major: &[f64],
        digits: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be >= 1".into()));
        }
        if a_row_major.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "matrix needs {} entries, got {}",
                dim * dim,
                a_row_major.len()
            )));
        }
        if digits.len() < 2 {
            return Err(Error::Invalid("need at least two digits".into()));
        }
        if digits.len() != weights.len() {
            return Err(Error::Invalid("digit and weight counts differ".into()));
        }
        if digits.iter().any(|b| b.len() != dim) {
            return Err(Error::Invalid("digit vector of wrong dimension".into()));
        }
        if weights.iter().any(|&p| p <= 0.0) {
            return Err(Error::Invalid("weights must be positive".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Invalid(format!("weights sum to {sum}, not 1")));
        }
        let a = DMatrix::from_row_slice(dim, dim, a_row_major);
        for m in linalg::eigenvalue_moduli(&a) {
            if m <= 1.0 + EXPANSIVE_MARGIN {
                return Err(Error::NotExpansive(m));
            }
        }
        let a_inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("matrix not invertible".into()))?;
        Ok(Self {
            dim,
            a,
            a_inv,
            digits: digits.into_iter().map(DVector::from_vec).collect(),
            weights,
        })
    }

    pub fn from_spec(spec: &IfsSpec) -> Result<Self> {
        Self::new(spec.dim, &spec.a, spec.b.clone(), spec.p.clone())
    }

    pub fn to_spec(&self) -> IfsSpec {
        IfsSpec {
            dim: self.dim,
            a: self.a.transpose().as_slice().to_vec(), // row-major
            b: self.digits.iter().map(|d| d.as_slice().to_vec()).collect(),
            p: self.weights.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn matrix_inverse(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn digits(&self) -> &[DVector<f64>] {
        &self.digits
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_maps(&self) -> usize {
        self.digits.len()
    }

    /// `τ_b(x) = A⁻¹(x + b)` for digit index `b`.
    pub fn apply_map(&self, b: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.a_inv * (x + &self.digits[b])
    }

    /// If `A = λ⁻¹ I`, return λ.
    pub fn scalar_ratio(&self) -> Option<f64> {
        let lam_inv = self.a[(0, 0)];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let want = if i == j { lam_inv } else { 0.0 };
                if (self.a[(i, j)] - want).abs() > 1e-12 * lam_inv.abs().max(1.0) {
                    return None;
                }
            }
        }
        Some(1.0 / lam_inv)
    }

    /// Radius `R` with the attractor inside the centered box `[−R, R]^d`,
    /// from `‖x‖ ≤ ‖A⁻¹‖(‖x‖ + max‖b‖)` when `‖A⁻¹‖ < 1`.
    pub fn bounding_radius(&self) -> f64 {
        let max_b = self.digits.iter().map(|b| b.norm()).fold(0.0f64, f64::max);
        // Frobenius norm bounds the operator 2-norm from above; for the
        // non-normal matrices here some power has norm < 1 even when the
        // inverse itself does not.
        let mut m = self.a_inv.clone();
        let mut prefix = 0.0f64;
        for _ in 0..128 {
            let nm = m.norm();
            if nm < 1.0 {
                return (prefix + nm * max_b / (1.0 - nm)).max(max_b / (1.0 - nm));
            }
            prefix += nm * max_b;
            m = &m * &self.a_inv;
        }
        f64::INFINITY
    }
}

/// The simplex system of ℝ^d: `A = λ⁻¹I`, digits `{0, e_1, ..., e_d}`,
/// uniform weights `1/(d+1)`.
pub fn standard_simplex_ifs(dim: usize, lambda: f64) -> Result<AffineIfs> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
    }
    let mut a = vec![0.0; dim * dim];
    for i in 0..dim {
        a[i * dim + i] = 1.0 / lambda;
    }
    let mut digits = vec![vec![0.0; dim]];
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        digits.push(e);
    }
    let w = 1.0 / (dim as f64 + 1.0);
    AffineIfs::new(dim, &a, digits, vec![w; dim + 1])
}

/// The 1D Bernoulli convolution system: digits `{−1, 1}`, weights `1/2`.
pub fn bernoulli_pm_ifs(lambda: f64) -> Result<AffineIfs> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
    }
    AffineIfs::new(
        1,
        &[1.0 / lambda],
        vec![vec![-1.0], vec![1.0]],
        vec![0.5, 0.5],
    )
}

/// The 1D binary system `τ_0 = λx`, `τ_1 = λ(x+1)`: digits `{0, 1}`.
///
/// This is the convention the encoding `ω ↦ Σ ωₖ λᵏ` intertwines with.
pub fn binary_ifs(lambda: f64) -> Result<AffineIfs> {
    binary_ifs_weighted(lambda, 0.5)
}

/// Binary system with `P(digit 1) = p`.
pub fn binary_ifs_weighted(lambda: f64, p: f64) -> Result<AffineIfs> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Invalid(format!("weight {p} outside (0,1)")));
    }
    AffineIfs::new(
        1,
        &[1.0 / lambda],
        vec![vec![0.0], vec![1.0]],
        vec![1.0 - p, p],
    )
}

/// Translate the invariant measure by `t`: same matrix, digits `b + A t`.
pub fn translated_ifs(ifs: &AffineIfs, t: &[f64]) -> Result<AffineIfs> {
    if t.len() != ifs.dim {
        return Err(Error::Invalid("translation of wrong dimension".into()));
    }
    let shift = &ifs.a * DVector::from_column_slice(t);
    let digits = ifs
        .digits
        .iter()
        .map(|b| (b + &shift).as_slice().to_vec())
        .collect();
    AffineIfs::new(
        ifs.dim,
        ifs.to_spec().a.as_slice(),
        digits,
        ifs.weights.clone(),
    )
}

/// Finite word over the digit alphabet `{0, ..., m−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolWord {
    letters: Vec<u8>,
}

impl SymbolWord {
    pub fn new(letters: Vec<u8>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Prepend symbol `b`: the right-shift `σ_b`.
    pub fn shifted(&self, b: u8) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(b);
        letters.extend_from_slice(&self.letters);
        Self { letters }
    }
}

/// Result of encoding a finite binary word.
#[derive(Debug, Clone, Copy)]
pub struct Encoded {
    /// `Σ ωₖ λᵏ` over the word's letters.
    pub value: f64,
    /// Zero when the word is exact with all-zero tail; otherwise the
    /// worst-case contribution `λ^{len+1}/(1−λ)` of an unknown tail.
    pub tail_uncertainty: f64,
}

/// Encode a finite binary word under the system's contraction ratio:
/// `π(ω) = Σ_{k=1}^{len} ω_k λ^k`, the finite word read with all-zero tail.
///
/// Requires the 1D binary system (digits `{0,1}`).
pub fn encode(ifs: &AffineIfs, word: &SymbolWord, exact_tail: bool) -> Result<Encoded> {
    let lambda = binary_lambda(ifs)?;
    if word.letters.iter().any(|&l| l > 1) {
        return Err(Error::Invalid("encode requires a binary word".into()));
    }
    // Horner from the tail end keeps the sum exact to one rounding each.
    let mut value = 0.0f64;
    for &l in word.letters.iter().rev() {
        value = lambda * (value + l as f64);
    }
    let tail_uncertainty = if exact_tail {
        0.0
    } else {
        lambda.powi(word.len() as i32 + 1) / (1.0 - lambda)
    };
    Ok(Encoded {
        value,
        tail_uncertainty,
    })
}

fn binary_lambda(ifs: &AffineIfs) -> Result<f64> {
    if ifs.dim != 1 || ifs.num_maps() != 2 {
        return Err(Error::Invalid(
            "binary encoding needs the 1D two-map system".into(),
        ));
    }
    let lambda = ifs
        .scalar_ratio()
        .ok_or_else(|| Error::Invalid("binary encoding needs scalar A".into()))?;
    let b0 = ifs.digits[0][0];
    let b1 = ifs.digits[1][0];
    if b0 != 0.0 || b1 != 1.0 {
        return Err(Error::Invalid(format!(
            "binary encoding needs digits {{0,1}}, got {{{b0},{b1}}}"
        )));
    }
    Ok(lambda)
}

/// Monte Carlo sample of the invariant measure.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    dim: usize,
    /// Flat sample buffer, `dim` coordinates per point.
    samples: Vec<f64>,
    pub seed: u64,
}

const BURN_IN: usize = 64;

/// Chaos-game sampler: iterate a random map sequence, discard a 64-step
/// burn-in, record `n` points.  Deterministic given the seed.
pub fn chaos_game(ifs: &AffineIfs, n: usize, seed: u64) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // cumulative weights for inverse-cdf digit draws
    let mut cdf = Vec::with_capacity(ifs.num_maps());
    let mut acc = 0.0;
    for &w in &ifs.weights {
        acc += w;
        cdf.push(acc);
    }
    let draw = |rng: &mut ChaCha8Rng| -> usize {
        let u: f64 = rng.gen();
        cdf.iter().position(|&c| u <= c).unwrap_or(cdf.len() - 1)
    };
    let mut x = DVector::<f64>::zeros(ifs.dim);
    for _ in 0..BURN_IN {
        let b = draw(&mut rng);
        x = ifs.apply_map(b, &x);
    }
    let mut samples = Vec::with_capacity(n * ifs.dim);
    for _ in 0..n {
        let b = draw(&mut rng);
        x = ifs.apply_map(b, &x);
        samples.extend_from_slice(x.as_slice());
    }
    Ok(EmpiricalMeasure {
        dim: ifs.dim,
        samples,
        seed,
    })
}

impl EmpiricalMeasure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.dim)
    }

    /// Empirical characteristic function `(1/n) Σ e(ξ·x_j)`.
    pub fn characteristic_function(&self, xi: &[f64]) -> crate::Complex64 {
        let mut sum = crate::Complex64::new(0.0, 0.0);
        for p in self.iter_points() {
            let dot: f64 = p.iter().zip(xi).map(|(a, b)| a * b).sum();
            sum += crate::e(dot);
        }
        sum / self.len() as f64
    }

    /// CSV rows `x_1,…,x_d`, one sample per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.iter_points() {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_construction() {
        let ifs = standard_simplex_ifs(2, 0.5).unwrap();
        assert_eq!(ifs.num_maps(), 3);
        assert!((ifs.weights()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ifs.scalar_ratio(), Some(0.5));
        assert!(standard_simplex_ifs(1, 1.0).is_err());
    }

    #[test]
    fn cantor_variant_with_pm_digits() {
        let ifs = bernoulli_pm_ifs(1.0 / 3.0).unwrap();
        assert_eq!(ifs.digits()[0][0], -1.0);
        assert_eq!(ifs.digits()[1][0], 1.0);
    }

    #[test]
    fn encode_examples() {
        let ifs = binary_ifs(1.0 / 3.0).unwrap();
        let one = encode(&ifs, &SymbolWord::new(vec![1]), true).unwrap();
        assert!((one.value - 1.0 / 3.0).abs() < 1e-15);
        let w = encode(&ifs, &SymbolWord::new(vec![1, 1]), true).unwrap();
        assert!((w.value - 4.0 / 9.0).abs() < 1e-15);

        // λ=1/2, long all-ones word → value → 1, geometric series λ/(1−λ)
        let half = binary_ifs(0.5).unwrap();
        let ones = encode(&half, &SymbolWord::new(vec![1; 50]), false).unwrap();
        assert!((ones.value + ones.tail_uncertainty - 1.0).abs() < 1e-12);

        assert!(encode(&half, &SymbolWord::new(vec![2]), true).is_err());
    }

    #[test]
    fn encode_intertwines_shifts() {
        // π(σ_b ω) = τ_b(π(ω))
        let ifs = binary_ifs(1.0 / 3.0).unwrap();
        let w = SymbolWord::new(vec![1, 0, 1, 1, 0, 1]);
        let base = encode(&ifs, &w, true).unwrap().value;
        for b in [0u8, 1u8] {
            let shifted = encode(&ifs, &w.shifted(b), true).unwrap().value;
            let tau = ifs.apply_map(b as usize, &DVector::from_vec(vec![base]))[0];
            assert!((shifted - tau).abs() < 1e-12, "b={b}");
        }
    }

    #[test]
    fn translated_digits() {
        // 1D (λ, B={0,1}), t → B_t = {t/λ, (t+λ)/λ}
        let lambda = 0.4;
        let ifs = binary_ifs(lambda).unwrap();
        let t = 0.3;
        let tr = translated_ifs(&ifs, &[t]).unwrap();
        assert!((tr.digits()[0][0] - t / lambda).abs() < 1e-14);
        assert!((tr.digits()[1][0] - (t + lambda) / lambda).abs() < 1e-14);

        // t = 0 → identical digits
        let same = translated_ifs(&ifs, &[0.0]).unwrap();
        assert_eq!(same.digits()[0][0], 0.0);
        assert_eq!(same.digits()[1][0], 1.0);

        // t = λ^n/2 → {λ^{n-1}/2, λ^{n-1}/2 + 1}
        let half = binary_ifs(0.5).unwrap();
        let n = 5;
        let tn = 0.5f64.powi(n) / 2.0;
        let trn = translated_ifs(&half, &[tn]).unwrap();
        assert!((trn.digits()[0][0] - 0.5f64.powi(n - 1) / 2.0).abs() < 1e-15);
        assert!((trn.digits()[1][0] - (0.5f64.powi(n - 1) / 2.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn translation_composes_exactly() {
        // dyadic data so the float algebra is exact
        let ifs = binary_ifs(0.5).unwrap();
        let once = translated_ifs(&translated_ifs(&ifs, &[0.25]).unwrap(), &[0.5]).unwrap();
        let joint = translated_ifs(&ifs, &[0.75]).unwrap();
        for i in 0..2 {
            assert_eq!(once.digits()[i][0], joint.digits()[i][0]);
        }
    }

    #[test]
    fn chaos_game_cantor_gap() {
        // middle-thirds Cantor on [0,1]: digits {0,2}, λ=1/3 → the open
        // middle third carries no samples
        let ifs = AffineIfs::new(1, &[3.0], vec![vec![0.0], vec![2.0]], vec![0.5, 0.5]).unwrap();
        let emp = chaos_game(&ifs, 100_000, 7).unwrap();
        let in_gap = emp
            .iter_points()
            .filter(|p| p[0] > 1.0 / 3.0 && p[0] < 2.0 / 3.0)
            .count();
        assert!(
            (in_gap as f64) <= 1e-3 * emp.len() as f64,
            "{in_gap} samples in the middle third"
        );
    }

    #[test]
    fn chaos_game_stays_in_bounding_box() {
        let ifs = standard_simplex_ifs(2, 0.5).unwrap();
        let r = ifs.bounding_radius();
        assert!(r.is_finite());
        let emp = chaos_game(&ifs, 20_000, 11).unwrap();
        for p in emp.iter_points() {
            assert!(p.iter().all(|&c| c.abs() <= r + 1e-9));
        }
    }

    #[test]
    fn chaos_game_rejects_empty() {
        let ifs = binary_ifs(0.5).unwrap();
        assert!(chaos_game(&ifs, 0, 1).is_err());
    }

    #[test]
    fn chaos_game_deterministic() {
        let ifs = standard_simplex_ifs(2, 0.5).unwrap();
        let a = chaos_game(&ifs, 512, 42).unwrap();
        let b = chaos_game(&ifs, 512, 42).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn spec_round_trip() {
        let ifs = standard_simplex_ifs(2, 0.5).unwrap();
        let spec = ifs.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: IfsSpec = serde_json::from_str(&json).unwrap();
        let rebuilt = AffineIfs::from_spec(&back).unwrap();
        assert_eq!(rebuilt.num_maps(), 3);
        assert_eq!(rebuilt.matrix()[(0, 0)], 2.0);
    }

    #[test]
    fn rejects_non_expansive() {
        assert!(AffineIfs::new(1, &[1.0], vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).is_err());
        // rotation by 90°: moduli exactly 1
        assert!(AffineIfs::new(
            2,
            &[0.0, -1.0, 1.0, 0.0],
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5]
        )
        .is_err());
    }
}
