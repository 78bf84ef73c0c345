//! The transform `μ̂_{(A,B,p)}(ξ) = ∏ₖ m_B((Aᵗ)⁻ᵏ ξ)` as a controlled
//! truncation, restrictions to rays, and non-decay scans along Pisot
//! geometric frequency sequences.
//!
//! Truncation contract: the engine stops at depth `K` once the remaining
//! log-product is certifiably below the requested tolerance, using
//! `|m_B(x) − 1| ≤ 2π Σ p_b |b·x|` and a geometric envelope for
//! `Σ_{j>K} ‖(Aᵗ)⁻ʲ ξ‖`.  `tail_bound` in the result is that certified
//! bound on `|log remainder|`.
//!
//! Scan contract: at `ξ = α^k` the factor arguments `λⁿ α^k = α^{k−n}` are
//! never formed as floating powers; the exact-trace fractional offsets from
//! [`crate::algebraic`] supply `e(α^m) = e(δ_m)` with full precision, which
//! is what keeps split-vs-direct residuals at the 1e−9 scale out to k = 40.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::algebraic::{GeometricTheta, PisotContext};
use crate::ifs::AffineIfs;
use crate::{e, Complex64, Error, Result};

/// Default truncation tolerance for the infinite products.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_DEPTH: usize = 100_000;

/// Truncated infinite-product value with its certified tail bound.
#[derive(Debug, Clone)]
pub struct ProductEvaluation {
    pub value: Complex64,
    /// Number of factors multiplied.
    pub depth: usize,
    /// Certified bound on `|log remainder|` of the dropped tail.
    pub tail_bound: f64,
    /// Individual factors, when requested.
    pub factors: Option<Vec<Complex64>>,
}

/// `m_B(x) = Σ_b p_b e(b·x)`, one factor of the infinite product.
pub fn m_b(ifs: &AffineIfs, x: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, &p) in ifs.digits().iter().zip(ifs.weights()) {
        let dot: f64 = b.iter().zip(x).map(|(bi, xi)| bi * xi).sum();
        acc += p * e(dot);
    }
    acc
}

/// Geometric envelope constant `S` with `Σ_{j≥1} ‖(Aᵗ)⁻ʲ v‖ ≤ S·‖v‖`.
///
/// Uses Frobenius norms of successive powers (an upper bound on the 2-norm)
/// and submultiplicativity once some power's norm drops below 1; such a power
/// exists because the spectral radius of `(Aᵗ)⁻¹` is below 1.
fn inverse_power_envelope(a_t_inv: &DMatrix<f64>) -> Result<f64> {
    let mut m = a_t_inv.clone();
    let mut partial = 0.0f64;
    for _ in 1..=256 {
        let norm = m.norm();
        partial += norm;
        if norm < 1.0 {
            return Ok(partial / (1.0 - norm));
        }
        m = &m * a_t_inv;
    }
    Err(Error::Numeric(
        "no contracting power of the inverse transpose within 256 steps".into(),
    ))
}

fn mu_hat_impl(
    ifs: &AffineIfs,
    xi: &[f64],
    tol: f64,
    log_factors: bool,
) -> Result<ProductEvaluation> {
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    if xi.len() != ifs.dim() {
        return Err(Error::Invalid("frequency of wrong dimension".into()));
    }
    let a_t_inv = ifs.matrix_inverse().transpose();
    let envelope = inverse_power_envelope(&a_t_inv)?;
    // |m_B(x) − 1| ≤ Σ p_b |e(b·x) − 1| ≤ 2π Σ p_b ‖b‖ · ‖x‖
    let lip: f64 = 2.0
        * PI
        * ifs
            .digits()
            .iter()
            .zip(ifs.weights())
            .map(|(b, &p)| p * b.norm())
            .sum::<f64>();

    let mut y = DVector::from_column_slice(xi);
    let mut value = Complex64::new(1.0, 0.0);
    let mut factors = log_factors.then(Vec::new);
    let mut depth = 0usize;
    loop {
        y = &a_t_inv * &y;
        let f = m_b(ifs, y.as_slice());
        value *= f;
        if let Some(v) = factors.as_mut() {
            v.push(f);
        }
        depth += 1;
        let per_factor = lip * y.norm() * envelope;
        if per_factor <= 0.25 {
            let tail_bound = 2.0 * per_factor;
            if tail_bound < tol {
                return Ok(ProductEvaluation {
                    value,
                    depth,
                    tail_bound,
                    factors,
                });
            }
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence {
                max_order: depth,
                last_delta: lip * y.norm(),
            });
        }
    }
}

/// Evaluate `μ̂_{(A,B,p)}(ξ)` to a certified tail bound below `tol`.
pub fn mu_hat(ifs: &AffineIfs, xi: &[f64], tol: f64) -> Result<ProductEvaluation> {
    mu_hat_impl(ifs, xi, tol, false)
}

/// Like [`mu_hat`], additionally recording every factor.
pub fn mu_hat_logged(ifs: &AffineIfs, xi: &[f64], tol: f64) -> Result<ProductEvaluation> {
    mu_hat_impl(ifs, xi, tol, true)
}

/// Restriction of a scalar system (`A = λ⁻¹I`) to the line `ξ·W`.
#[derive(Debug, Clone)]
pub struct RayRestriction {
    ifs: AffineIfs,
    direction: Vec<f64>,
    lambda: f64,
}

impl RayRestriction {
    pub fn new(ifs: AffineIfs, direction: Vec<f64>) -> Result<Self> {
        if direction.len() != ifs.dim() {
            return Err(Error::Invalid("direction of wrong dimension".into()));
        }
        if direction.iter().all(|&w| w == 0.0) {
            return Err(Error::Invalid("direction must be nonzero".into()));
        }
        let lambda = ifs
            .scalar_ratio()
            .ok_or_else(|| Error::Invalid("ray restriction needs A = λ⁻¹ I".into()))?;
        Ok(Self {
            ifs,
            direction,
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// `m_{B,W}(x) = m_B(x·W)`.
    pub fn factor(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &p) in self.ifs.digits().iter().zip(self.ifs.weights()) {
            let dot: f64 = b.iter().zip(&self.direction).map(|(bi, wi)| bi * wi).sum();
            acc += p * e(dot * x);
        }
        acc
    }

    fn lip(&self) -> f64 {
        2.0 * PI
            * self
                .ifs
                .digits()
                .iter()
                .zip(self.ifs.weights())
                .map(|(b, &p)| {
                    let dot: f64 = b.iter().zip(&self.direction).map(|(bi, wi)| bi * wi).sum();
                    p * dot.abs()
                })
                .sum::<f64>()
    }
}

/// Single-variable product `∏ₙ m_{B,W}(λⁿ ξ)` along the ray.
pub fn mu_hat_ray(ray: &RayRestriction, xi: f64, tol: f64) -> Result<ProductEvaluation> {
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let lam = ray.lambda;
    let lip = ray.lip();
    let mut value = Complex64::new(1.0, 0.0);
    let mut depth = 0usize;
    loop {
        depth += 1;
        let x = lam.powi(depth as i32) * xi;
        value *= ray.factor(x);
        let tail_sum = x.abs() * lam / (1.0 - lam);
        if lip * tail_sum <= 0.25 {
            let tail_bound = 2.0 * lip * tail_sum;
            if tail_bound < tol {
                return Ok(ProductEvaluation {
                    value,
                    depth,
                    tail_bound,
                    factors: None,
                });
            }
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence {
                max_order: depth,
                last_delta: lip * x.abs(),
            });
        }
    }
}

/// The ray systems the split evaluator and the scans support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSystem {
    /// 1D digits `{−1, 1}`, weights `1/2`: factors `cos(2πx)`.
    Bernoulli1d,
    /// d-dimensional simplex system along `[1, …, 1]ᵗ`:
    /// factors `(1 + d·e(x))/(d+1)`.
    Simplex { d: usize },
    /// 2D simplex along an integer direction `[n1, n2]ᵗ`:
    /// factors `(1 + e(n1·x) + e(n2·x))/3`.
    IntegerDirection { n1: i64, n2: i64 },
}

impl ScanSystem {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScanSystem::Simplex { d: 0 } => {
                Err(Error::Invalid("simplex dimension must be >= 1".into()))
            }
            ScanSystem::IntegerDirection { n1, n2 } if n1 == 0 && n2 == 0 => {
                Err(Error::Invalid("direction must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }

    /// The complex ray factor at scalar argument `x`.
    pub fn factor(&self, x: f64) -> Complex64 {
        match *self {
            ScanSystem::Bernoulli1d => Complex64::new((2.0 * PI * x).cos(), 0.0),
            ScanSystem::Simplex { d } => {
                (Complex64::new(1.0, 0.0) + d as f64 * e(x)) / (d as f64 + 1.0)
            }
            ScanSystem::IntegerDirection { n1, n2 } => {
                (Complex64::new(1.0, 0.0) + e(n1 as f64 * x) + e(n2 as f64 * x)) / 3.0
            }
        }
    }

    /// The real cosine form bounding `Re m_{B,W}` from below; the certified
    /// floors run over its absolute value.
    pub fn cosine_form(&self, x: f64) -> f64 {
        match *self {
            ScanSystem::Bernoulli1d => (2.0 * PI * x).cos(),
            ScanSystem::Simplex { d } => (1.0 + d as f64 * (2.0 * PI * x).cos()) / (d as f64 + 1.0),
            ScanSystem::IntegerDirection { n1, n2 } => {
                (1.0 + (2.0 * PI * n1 as f64 * x).cos() + (2.0 * PI * n2 as f64 * x).cos()) / 3.0
            }
        }
    }

    /// `1 − cosine_form(x) ≤ eps_coeff · x²` for all x.
    fn eps_coeff(&self) -> f64 {
        match *self {
            ScanSystem::Bernoulli1d => 2.0 * PI * PI,
            ScanSystem::Simplex { d } => 2.0 * PI * PI * d as f64 / (d as f64 + 1.0),
            ScanSystem::IntegerDirection { n1, n2 } => {
                2.0 * PI * PI * ((n1 * n1 + n2 * n2) as f64) / 3.0
            }
        }
    }

    /// `|factor(x) − 1| ≤ lip · |x|`.
    fn lip(&self) -> f64 {
        match *self {
            ScanSystem::Bernoulli1d => 2.0 * PI,
            ScanSystem::Simplex { d } => 2.0 * PI * d as f64 / (d as f64 + 1.0),
            ScanSystem::IntegerDirection { n1, n2 } => {
                2.0 * PI * (n1.abs() + n2.abs()) as f64 / 3.0
            }
        }
    }

    /// The θ-product factor used in the certified bound: for integer
    /// directions both coordinates are dominated by the same `θⁿ`, so the
    /// `d = 2` simplex form applies.
    fn theta_form(&self, x: f64) -> f64 {
        match *self {
            ScanSystem::IntegerDirection { .. } => ScanSystem::Simplex { d: 2 }.cosine_form(x),
            other => other.cosine_form(x),
        }
    }

    /// Scaling of the mod-1 bound needed before `dist(n_i α^k, ℤ) < θ^k`.
    fn multiplier(&self) -> f64 {
        match *self {
            ScanSystem::IntegerDirection { n1, n2 } => n1.abs().max(n2.abs()) as f64,
            _ => 1.0,
        }
    }

    /// The full-dimensional IFS this ray system restricts.
    pub fn base_ifs(&self, lambda: f64) -> Result<AffineIfs> {
        match *self {
            ScanSystem::Bernoulli1d => crate::ifs::bernoulli_pm_ifs(lambda),
            ScanSystem::Simplex { d } => crate::ifs::standard_simplex_ifs(d, lambda),
            ScanSystem::IntegerDirection { .. } => crate::ifs::standard_simplex_ifs(2, lambda),
        }
    }
}

/// Certified lower bound for `∏_{n=start}^∞ |form(λⁿ)|`.
#[derive(Debug, Clone, Copy)]
pub struct TailFloor {
    pub floor: f64,
    /// Index from which the Taylor tail bound takes over.
    pub taylor_start: usize,
    /// Head factors evaluated directly.
    pub head_factors: usize,
}

fn certified_abs_tail(
    form: &dyn Fn(f64) -> f64,
    eps_coeff: f64,
    lambda: f64,
    start: usize,
) -> Result<TailFloor> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("ratio {lambda} outside (0,1)")));
    }
    // ε_n ≤ eps_coeff·λ^{2n}; past M require ε_n < min(λ²/2, 0.49) so that
    // ln(1−ε) ≥ −2ε applies, giving log tail ≥ −2·eps_coeff·λ^{2M}/(1−λ²).
    let cap = (lambda * lambda / 2.0).min(0.49);
    let mut m = start.max(1);
    while eps_coeff * lambda.powi(2 * m as i32) >= cap {
        m += 1;
        if m > MAX_DEPTH {
            return Err(Error::Numeric("tail floor start search exhausted".into()));
        }
    }
    let mut head = 1.0f64;
    for n in start..m {
        let f = form(lambda.powi(n as i32)).abs();
        if f <= 1e-14 {
            return Err(Error::ZeroFactor { index: n, value: f });
        }
        head *= f;
    }
    let tail_log = 2.0 * eps_coeff * lambda.powi(2 * m as i32) / (1.0 - lambda * lambda);
    Ok(TailFloor {
        floor: head * (-tail_log).exp(),
        taylor_start: m,
        head_factors: m - start,
    })
}

/// Certified positive floor for `∏_{n=N}^∞ (1/(d+1))(1 + d·cos(2πλⁿ))`
/// (plain `cos(2πλⁿ)` when `d = 1`), constructed from the Taylor recipe
/// with the skipped head factors evaluated directly.
pub fn cosine_tail_floor(d: usize, lambda: f64, start: usize) -> Result<TailFloor> {
    if d == 0 {
        return Err(Error::Invalid("dimension must be >= 1".into()));
    }
    let system = if d == 1 {
        ScanSystem::Bernoulli1d
    } else {
        ScanSystem::Simplex { d }
    };
    certified_abs_tail(
        &|x| system.cosine_form(x),
        system.eps_coeff(),
        lambda,
        start,
    )
}

/// Split evaluation of `μ̂` at `ξ = α^k`.
#[derive(Debug, Clone)]
pub struct SplitEvaluation {
    pub k: usize,
    /// Head × tail: finite product over `m(αⁿ)` for `n < k` (exact-offset
    /// arguments) times the k-independent tail `∏_{n≥1} m(λⁿ)`.
    pub split: Complex64,
    /// Single direct product `∏ₙ m(λⁿ α^k)`.
    pub direct: Complex64,
    pub residual: f64,
    pub head: Complex64,
    pub tail: ProductEvaluation,
}

/// Truncate `∏_{n≥1} factor(λⁿ·scale)` with a certified bound below `tol`.
fn ray_product(
    system: &ScanSystem,
    lambda: f64,
    scale: f64,
    tol: f64,
) -> Result<ProductEvaluation> {
    let lip = system.lip();
    let mut value = Complex64::new(1.0, 0.0);
    let mut depth = 0usize;
    loop {
        depth += 1;
        let x = lambda.powi(depth as i32) * scale;
        value *= system.factor(x);
        let tail_sum = x.abs() * lambda / (1.0 - lambda);
        if lip * tail_sum <= 0.25 {
            let tail_bound = 2.0 * lip * tail_sum;
            if tail_bound < tol {
                return Ok(ProductEvaluation {
                    value,
                    depth,
                    tail_bound,
                    factors: None,
                });
            }
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence {
                max_order: depth,
                last_delta: lip * x.abs(),
            });
        }
    }
}

/// Evaluate `μ̂(α^k)` by the split form, with the direct product and the
/// residual between the two routes.
///
/// Split: `∏_{n=0}^{k−1} m(αⁿ) · ∏_{n≥1} m(λⁿ)` with `e(αⁿ) = e(δₙ)` from
/// the exact trace offsets.  Direct: `∏_{n≥1} m(λⁿ α^k)` where arguments
/// with `n ≤ k` reduce to the same offsets and the rest are `λ^{n−k}`.
pub fn mu_hat_at_alpha_k(
    system: ScanSystem,
    ctx: &PisotContext,
    k: usize,
    tol: f64,
) -> Result<SplitEvaluation> {
    system.validate()?;
    let lambda = 1.0 / ctx.alpha();
    let tail = ray_product(&system, lambda, 1.0, tol)?;

    let mut head = Complex64::new(1.0, 0.0);
    for n in 0..k {
        head *= system.factor(ctx.alpha_pow_mod1(n).signed_offset);
    }
    let split = head * tail.value;

    // Direct product, offset-correct arguments, same truncation rule.
    let lip = system.lip();
    let mut direct = Complex64::new(1.0, 0.0);
    let mut n = 1usize;
    loop {
        let (x, small) = if n <= k {
            (ctx.alpha_pow_mod1(k - n).signed_offset, false)
        } else {
            (lambda.powi((n - k) as i32), true)
        };
        direct *= system.factor(x);
        if small {
            let tail_sum = x.abs() * lambda / (1.0 - lambda);
            if lip * tail_sum <= 0.25 && 2.0 * lip * tail_sum < tol {
                break;
            }
        }
        n += 1;
        if n > MAX_DEPTH {
            return Err(Error::NoConvergence {
                max_order: n,
                last_delta: f64::NAN,
            });
        }
    }

    Ok(SplitEvaluation {
        k,
        residual: (split - direct).norm(),
        split,
        direct,
        head,
        tail,
    })
}

/// The certified, k-independent lower bound assembled the way the non-decay
/// theorems do: λ-tail floor × head constant × θ-product floor.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedBound {
    pub value: f64,
    pub theta: f64,
    /// Index `N` from which `dist(α^n, ℤ) < θⁿ < 1/4`.
    pub theta_start: usize,
    /// `∏_{n=0}^{N−1} |m(αⁿ)|`, exact-offset arguments.
    pub head: f64,
    /// Certified floor for `∏_{n≥1} |m(λⁿ)|`.
    pub lambda_tail: f64,
    /// Certified floor for `∏_{n≥N} theta_form(θⁿ)`.
    pub theta_tail: f64,
}

/// Non-decay scan along `ξ = α^k`, `k = 0..=k_max`.
#[derive(Debug)]
pub struct ErdosScan {
    pub system: ScanSystem,
    pub evaluations: Vec<SplitEvaluation>,
    /// `|μ̂(α^k)|` per k.
    pub values: Vec<f64>,
    /// Empirical floor `min_k |μ̂(α^k)|`.
    pub floor: f64,
    pub split_residual_max: f64,
    pub certified: CertifiedBound,
    /// Largest truncation tail bound across the evaluations.
    pub tail_bound: f64,
}

/// Positivity screen for the θ grid: the first 200 factors of the θ-product
/// must stay away from zero (Taylor tail factors are automatically positive
/// once θⁿ < 1/4).
fn theta_screen(system: ScanSystem, theta: f64) -> bool {
    let mut x = 1.0f64;
    for _ in 0..=200 {
        if system.theta_form(x).abs() <= 1e-12 {
            return false;
        }
        x *= theta;
    }
    true
}

fn assemble_certified_bound(
    system: ScanSystem,
    ctx: &PisotContext,
    gt: &GeometricTheta,
) -> Result<CertifiedBound> {
    let lambda = 1.0 / ctx.alpha();
    let lambda_tail =
        certified_abs_tail(&|x| system.cosine_form(x), system.eps_coeff(), lambda, 1)?;
    let theta_d = match system {
        ScanSystem::IntegerDirection { .. } => ScanSystem::Simplex { d: 2 },
        other => other,
    };
    let theta_tail = certified_abs_tail(
        &|x| theta_d.cosine_form(x),
        theta_d.eps_coeff(),
        gt.theta,
        gt.start_index,
    )?;
    let mut head = 1.0f64;
    for n in 0..gt.start_index {
        head *= system.factor(ctx.alpha_pow_mod1(n).signed_offset).norm();
    }
    Ok(CertifiedBound {
        value: lambda_tail.floor * head * theta_tail.floor,
        theta: gt.theta,
        theta_start: gt.start_index,
        head,
        lambda_tail: lambda_tail.floor,
        theta_tail: theta_tail.floor,
    })
}

/// Scan `|μ̂(α^k)|` for `k ≤ k_max` through the split evaluator, together
/// with the certified lower bound.
pub fn erdos_scan(
    system: ScanSystem,
    ctx: &PisotContext,
    k_max: usize,
    tol: f64,
) -> Result<ErdosScan> {
    system.validate()?;
    let gt =
        ctx.geometric_theta_screened(system.multiplier(), &|theta| theta_screen(system, theta))?;
    let certified = assemble_certified_bound(system, ctx, &gt)?;

    let mut evaluations = Vec::with_capacity(k_max + 1);
    let mut values = Vec::with_capacity(k_max + 1);
    let mut floor = f64::INFINITY;
    let mut split_residual_max = 0.0f64;
    let mut tail_bound = 0.0f64;
    for k in 0..=k_max {
        let ev = mu_hat_at_alpha_k(system, ctx, k, tol)?;
        let v = ev.split.norm();
        floor = floor.min(v);
        split_residual_max = split_residual_max.max(ev.residual);
        tail_bound = tail_bound.max(ev.tail.tail_bound);
        values.push(v);
        evaluations.push(ev);
    }
    Ok(ErdosScan {
        system,
        evaluations,
        values,
        floor,
        split_residual_max,
        certified,
        tail_bound,
    })
}

/// Scan result for the triangular Pisot matrix family
/// `A = [[α, 0], [b, c]]` at frequencies `α^k [1, 0]ᵗ`.
#[derive(Debug)]
pub struct PisotMatrixScan {
    /// The ray scan it reduces to (`W = [0, 1]ᵗ` factors `(2 + e(x))/3`).
    pub scan: ErdosScan,
    /// `|μ̂|` from the general-matrix evaluator at each k.
    pub general_values: Vec<f64>,
    /// `|general − reduced|` per k.
    pub agreement: Vec<f64>,
}

/// Evaluate the triangular-family matrix system both ways: through the general
/// expansive-matrix evaluator and through the reduction
/// `(Aᵗ)⁻ⁿ α^k [1,0]ᵗ = [α^{k−n}, 0]ᵗ`, asserting agreement.
pub fn pisot_matrix_scan(
    ctx: &PisotContext,
    b: f64,
    c: f64,
    k_max: usize,
    tol: f64,
) -> Result<PisotMatrixScan> {
    if c <= 1.0 + crate::ifs::EXPANSIVE_MARGIN {
        return Err(Error::NotExpansive(c));
    }
    let alpha = ctx.alpha();
    let ifs = AffineIfs::new(
        2,
        &[alpha, 0.0, b, c],
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0 / 3.0; 3],
    )?;
    let system = ScanSystem::IntegerDirection { n1: 0, n2: 1 };
    let scan = erdos_scan(system, ctx, k_max, tol)?;
    let mut general_values = Vec::with_capacity(k_max + 1);
    let mut agreement = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let xi = [ctx.alpha_pow_f64(k), 0.0];
        let gen = mu_hat(&ifs, &xi, tol)?;
        general_values.push(gen.value.norm());
        agreement.push((gen.value - scan.evaluations[k].split).norm());
    }
    Ok(PisotMatrixScan {
        scan,
        general_values,
        agreement,
    })
}
