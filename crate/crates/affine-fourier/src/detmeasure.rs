//! Determinantal measures `μ_T` on `{0,1}^ℕ` from kernel contractions.
//!
//! A symmetric kernel `T` with every principal-minor spectrum in `[0,1]`
//! induces a Borel probability measure on binary sequences through
//!
//! ```text
//! μ_T(G(ξ)) = det W(ξ),   W(ξ)_{i,j} = ξ_i δ_{i,j} + (−1)^{ξ_i}(δ_{i,j} − T_{i,j})
//! ```
//!
//! on cylinders `G(ξ)`.  Row `i` of `W(ξ)` is the `T` row when `ξ_i = 1` and
//! the `I − T` row when `ξ_i = 0`.  Kolmogorov consistency (checked here as
//! an explicit residual) extends the set function to the Borel σ-algebra.
//!
//! Dense kernels are finite symmetric matrices with implicit zero extension.
//! The extension is real for the determinant truncations in [`crate::induced`]
//! (their index sets are always `{1..n}`), but cylinder-level operations
//! error when the cylinder leaves the stored support rather than fabricate
//! entries silently.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

/// Spectrum spot-check order applied at construction.
pub const DEFAULT_SPECTRUM_CHECK_ORDER: usize = 16;

/// Eigenvalues of principal blocks must land in `[−band, 1+band]`.
pub const SPECTRUM_BAND: f64 = 1e-10;

/// Cylinder probabilities may undershoot/overshoot `[0,1]` by at most this
/// before the kernel is declared invalid.
pub const PROBABILITY_BAND: f64 = 1e-12;

/// A symmetric kernel contraction, indexed from 1.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// `T = p·I`: the p-Bernoulli product measure.
    Diagonal { p: f64 },
    /// `T_{i,j} = ((1−a)/(1+a))·a^{|i−j|}`, the unit-symbol Toeplitz kernel.
    Toeplitz { a: f64 },
    /// `T_{i,j} = p·a^{|i−j|}`, the two-parameter Toeplitz kernel.
    ToeplitzGeneral { p: f64, a: f64 },
    /// Finite symmetric matrix, zero off its support.
    Dense { matrix: DMatrix<f64> },
}

/// Serialized kernel: `{variant, p?, a?, matrix?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelSpec {
    Diagonal { p: f64 },
    Toeplitz { a: f64 },
    ToeplitzGeneral { p: f64, a: f64 },
    Dense { matrix: Vec<Vec<f64>> },
}

impl Kernel {
    pub fn diagonal(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::KernelInvalid(format!("p = {p} outside [0,1]")));
        }
        Ok(Kernel::Diagonal { p })
    }

    pub fn toeplitz(a: f64) -> Result<Self> {
        if !(0.0 < a && a < 1.0) {
            return Err(Error::KernelInvalid(format!("a = {a} outside (0,1)")));
        }
        let k = Kernel::Toeplitz { a };
        k.ensure_spectrum(DEFAULT_SPECTRUM_CHECK_ORDER)
            .map_err(|e| Error::KernelInvalid(e.to_string()))?;
        Ok(k)
    }

    pub fn toeplitz_general(p: f64, a: f64) -> Result<Self> {
        if !(0.0 < p && p < 1.0) || !(0.0 < a && a < 1.0) {
            return Err(Error::KernelInvalid(format!(
                "(p, a) = ({p}, {a}) outside (0,1)²"
            )));
        }
        let k = Kernel::ToeplitzGeneral { p, a };
        k.ensure_spectrum(DEFAULT_SPECTRUM_CHECK_ORDER)
            .map_err(|e| Error::KernelInvalid(e.to_string()))?;
        Ok(k)
    }

    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::KernelInvalid("dense kernel must be square".into()));
        }
        let n = matrix.nrows();
        for i in 0..n {
            for j in i + 1..n {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 {
                    return Err(Error::KernelInvalid(format!(
                        "asymmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let k = Kernel::Dense { matrix };
        k.ensure_spectrum(n)
            .map_err(|e| Error::KernelInvalid(e.to_string()))?;
        Ok(k)
    }

    pub fn from_spec(spec: &KernelSpec) -> Result<Self> {
        match spec {
            KernelSpec::Diagonal { p } => Self::diagonal(*p),
            KernelSpec::Toeplitz { a } => Self::toeplitz(*a),
            KernelSpec::ToeplitzGeneral { p, a } => Self::toeplitz_general(*p, *a),
            KernelSpec::Dense { matrix } => {
                let n = matrix.len();
                if matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::KernelInvalid("ragged dense matrix".into()));
                }
                let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
                Self::dense(DMatrix::from_row_slice(n, n, &flat))
            }
        }
    }

    pub fn to_spec(&self) -> KernelSpec {
        match self {
            Kernel::Diagonal { p } => KernelSpec::Diagonal { p: *p },
            Kernel::Toeplitz { a } => KernelSpec::Toeplitz { a: *a },
            Kernel::ToeplitzGeneral { p, a } => KernelSpec::ToeplitzGeneral { p: *p, a: *a },
            Kernel::Dense { matrix } => KernelSpec::Dense {
                matrix: (0..matrix.nrows())
                    .map(|i| (0..matrix.ncols()).map(|j| matrix[(i, j)]).collect())
                    .collect(),
            },
        }
    }

    /// Kernel entry `T_{i,j}`, 1-based, zero off a dense support.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i >= 1 && j >= 1);
        match self {
            Kernel::Diagonal { p } => {
                if i == j {
                    *p
                } else {
                    0.0
                }
            }
            Kernel::Toeplitz { a } => (1.0 - a) / (1.0 + a) * a.powi(i.abs_diff(j) as i32),
            Kernel::ToeplitzGeneral { p, a } => p * a.powi(i.abs_diff(j) as i32),
            Kernel::Dense { matrix } => {
                let n = matrix.nrows();
                if i <= n && j <= n {
                    matrix[(i - 1, j - 1)]
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest index with stored entries, `None` when unbounded.
    pub fn support_bound(&self) -> Option<usize> {
        match self {
            Kernel::Dense { matrix } => Some(matrix.nrows()),
            _ => None,
        }
    }

    /// Leading `n×n` principal block.
    pub fn leading_block(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| self.entry(i + 1, j + 1))
    }

    /// Check the spectrum of the leading `n×n` block lies in
    /// `[−band, 1+band]`; errors name the offending order and eigenvalue.
    ///
    /// A violation found here mid-run is a numeric failure; the constructors
    /// rewrap it as a validation error when it surfaces at build time.
    pub fn ensure_spectrum(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        let eigs = linalg::symmetric_eigenvalues(&self.leading_block(n));
        for ev in eigs {
            if !(-SPECTRUM_BAND..=1.0 + SPECTRUM_BAND).contains(&ev) {
                return Err(Error::SpectrumViolation(format!(
                    "eigenvalue {ev} of order-{n} block outside [0,1] ({})",
                    self.describe()
                )));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self {
            Kernel::Diagonal { p } => format!("diagonal p={p}"),
            Kernel::Toeplitz { a } => format!("toeplitz a={a}"),
            Kernel::ToeplitzGeneral { p, a } => format!("toeplitz_general p={p} a={a}"),
            Kernel::Dense { matrix } => format!("dense {}x{}", matrix.nrows(), matrix.ncols()),
        }
    }

    /// `Σ_k |T_{1,k}|`, the summability hypothesis of the shift
    /// absolute-continuity corollary, in closed form where the kernel has
    /// one.  Finite for every variant here.
    pub fn row_one_abs_sum(&self) -> f64 {
        match self {
            Kernel::Diagonal { p } => *p,
            Kernel::Toeplitz { a } => (1.0 - a) / (1.0 + a) / (1.0 - a),
            Kernel::ToeplitzGeneral { p, a } => p / (1.0 - a),
            Kernel::Dense { matrix } => (0..matrix.ncols()).map(|j| matrix[(0, j)].abs()).sum(),
        }
    }

    fn check_support(&self, max_index: usize) -> Result<()> {
        if let Some(n) = self.support_bound() {
            if max_index > n {
                return Err(Error::Cylinder(format!(
                    "index {max_index} beyond dense support {n}"
                )));
            }
        }
        Ok(())
    }
}

/// A finite index set `F` with a bit per index: the cylinder `G(ξ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSpec {
    indices: Vec<usize>,
    bits: Vec<u8>,
}

/// Serialized cylinder: `{"F": [...], "xi": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylinderSpecJson {
    #[serde(rename = "F")]
    pub f: Vec<usize>,
    pub xi: Vec<u8>,
}

impl CylinderSpec {
    pub fn new(indices: Vec<usize>, bits: Vec<u8>) -> Result<Self> {
        if indices.len() != bits.len() {
            return Err(Error::Cylinder("index/bit length mismatch".into()));
        }
        if indices.contains(&0) {
            return Err(Error::Cylinder("indices start at 1".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Cylinder(
                "indices must be strictly increasing".into(),
            ));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Cylinder("bits must be 0 or 1".into()));
        }
        Ok(Self { indices, bits })
    }

    pub fn from_json(j: &CylinderSpecJson) -> Result<Self> {
        Self::new(j.f.clone(), j.xi.clone())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Extend by `k ∉ F` carrying bit `b`.
    pub fn insert(&self, k: usize, b: u8) -> Result<Self> {
        if self.indices.contains(&k) {
            return Err(Error::Cylinder(format!("index {k} already present")));
        }
        let mut indices = self.indices.clone();
        let mut bits = self.bits.clone();
        let pos = indices.partition_point(|&i| i < k);
        indices.insert(pos, k);
        bits.insert(pos, b);
        Self::new(indices, bits)
    }

    /// Prepend symbol `b`: indices shift by one and `1` joins with bit `b`.
    pub fn shifted(&self, b: u8) -> Result<Self> {
        let mut indices = vec![1usize];
        indices.extend(self.indices.iter().map(|&i| i + 1));
        let mut bits = vec![b];
        bits.extend_from_slice(&self.bits);
        Self::new(indices, bits)
    }
}

/// W assembly from a raw entry function; no support checks.  The induced
/// determinant truncations use this with the zero extension.
pub(crate) fn w_matrix_unchecked(
    entry: &dyn Fn(usize, usize) -> f64,
    cyl: &CylinderSpec,
) -> DMatrix<f64> {
    let f = cyl.indices();
    let bits = cyl.bits();
    // ξ_i δ_ij + (−1)^{ξ_i}(δ_ij − T_ij), written per case so the diagonal
    // kernel reproduces p / 1−p without a spurious rounding step
    DMatrix::from_fn(f.len(), f.len(), |r, c| {
        let (i, j) = (f[r], f[c]);
        let t = entry(i, j);
        match (bits[r], i == j) {
            (1, _) => t,
            (0, true) => 1.0 - t,
            (0, false) => -t,
            _ => unreachable!(),
        }
    })
}

/// The `#F × #F` matrix `W(ξ)` with rows/columns indexed by `F` in order.
pub fn w_matrix(kernel: &Kernel, cyl: &CylinderSpec) -> Result<DMatrix<f64>> {
    if let Some(&max) = cyl.indices().last() {
        kernel.check_support(max)?;
    }
    Ok(w_matrix_unchecked(&|i, j| kernel.entry(i, j), cyl))
}

/// `μ_T(G(ξ)) = det W(ξ)`, clamped into `[0,1]` when within the tolerance
/// band and rejected as a kernel violation otherwise.
pub fn cylinder_prob(kernel: &Kernel, cyl: &CylinderSpec) -> Result<f64> {
    let det = linalg::det_real(&w_matrix(kernel, cyl)?);
    if !(-PROBABILITY_BAND..=1.0 + PROBABILITY_BAND).contains(&det) {
        return Err(Error::ProbabilityBand { value: det });
    }
    Ok(det.clamp(0.0, 1.0))
}

/// Kolmogorov additivity residual: max over `ξ ∈ {0,1}^F` of
/// `|μ(G(ξ₊)) + μ(G(ξ₋)) − μ(G(ξ))|` for the insertion point `k ∉ F`.
pub fn consistency_check(kernel: &Kernel, f: &[usize], k: usize) -> Result<f64> {
    if f.contains(&k) {
        return Err(Error::Cylinder(format!("insertion point {k} already in F")));
    }
    let mut worst = 0.0f64;
    for mask in 0u64..(1u64 << f.len()) {
        let bits: Vec<u8> = (0..f.len()).map(|i| ((mask >> i) & 1) as u8).collect();
        let cyl = CylinderSpec::new(f.to_vec(), bits)?;
        let base = linalg::det_real(&w_matrix(kernel, &cyl)?);
        let plus = linalg::det_real(&w_matrix(kernel, &cyl.insert(k, 1)?)?);
        let minus = linalg::det_real(&w_matrix(kernel, &cyl.insert(k, 0)?)?);
        worst = worst.max((plus + minus - base).abs());
    }
    Ok(worst)
}

/// Residuals of the shift recursion
/// `W(σ₀ξ) + W(σ₁ξ) = [[1, 0], [c, 2W′(ξ)]]` under the two index
/// conventions for the shifted kernel `T′`.
///
/// The first row of the sum is `(1, 0, …, 0)` and the lower-left column is
/// `2(2ξ_f − 1)T_{f+1,1}` directly from the W rule; the conventions differ
/// in the lower-right block.  The two-sided shift `T′_{i,j} = T_{i+1,j+1}`
/// makes the identity exact; the one-sided row shift `T′_{i,j} = T_{i+1,j}`
/// is reported alongside for comparison.
#[derive(Debug, Clone, Copy)]
pub struct ShiftRecursionResiduals {
    pub two_sided: f64,
    pub one_sided: f64,
}

pub fn shift_recursion_check(
    kernel: &Kernel,
    cyl: &CylinderSpec,
) -> Result<ShiftRecursionResiduals> {
    let w0 = w_matrix(kernel, &cyl.shifted(0)?)?;
    let w1 = w_matrix(kernel, &cyl.shifted(1)?)?;
    let sum = &w0 + &w1;
    let m = cyl.len();

    let expected = |entry: &dyn Fn(usize, usize) -> f64| -> DMatrix<f64> {
        let inner = w_matrix_unchecked(entry, cyl);
        DMatrix::from_fn(m + 1, m + 1, |r, c| {
            if r == 0 {
                if c == 0 {
                    1.0
                } else {
                    0.0
                }
            } else if c == 0 {
                let f_r = cyl.indices()[r - 1];
                let sign = 2.0 * cyl.bits()[r - 1] as f64 - 1.0;
                2.0 * sign * kernel.entry(f_r + 1, 1)
            } else {
                2.0 * inner[(r - 1, c - 1)]
            }
        })
    };

    let two = expected(&|i, j| kernel.entry(i + 1, j + 1));
    let one = expected(&|i, j| kernel.entry(i + 1, j));
    let max_abs = |d: DMatrix<f64>| d.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(ShiftRecursionResiduals {
        two_sided: max_abs(&sum - two),
        one_sided: max_abs(&sum - one),
    })
}

/// Maximum length for exact chain-rule sampling.
pub const MAX_SAMPLE_LEN: usize = 24;

/// Band for the chain-rule conditionals before erroring.
pub const CONDITIONAL_BAND: f64 = 1e-9;

/// Draw one configuration of the first `n` coordinates from `μ_T` by the
/// chain rule on cylinder probabilities.  Deterministic per seed.
pub fn sample_configuration(kernel: &Kernel, n: usize, seed: u64) -> Result<Vec<u8>> {
    if n == 0 || n > MAX_SAMPLE_LEN {
        return Err(Error::Invalid(format!(
            "sample length {n} outside 1..={MAX_SAMPLE_LEN}"
        )));
    }
    kernel.check_support(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = Vec::with_capacity(n);
    let mut bits: Vec<u8> = Vec::with_capacity(n);
    let mut prefix_prob = 1.0f64;
    for i in 1..=n {
        indices.push(i);
        bits.push(1);
        let with_one = linalg::det_real(&w_matrix(
            kernel,
            &CylinderSpec::new(indices.clone(), bits.clone())?,
        )?);
        let cond = if prefix_prob <= 0.0 {
            0.0
        } else {
            with_one / prefix_prob
        };
        if !(-CONDITIONAL_BAND..=1.0 + CONDITIONAL_BAND).contains(&cond) {
            return Err(Error::ConditionalBand { value: cond });
        }
        let cond = cond.clamp(0.0, 1.0);
        let draw: f64 = rng.gen();
        if draw < cond {
            prefix_prob *= cond;
        } else {
            *bits.last_mut().unwrap() = 0;
            prefix_prob *= 1.0 - cond;
        }
    }
    Ok(bits)
}
