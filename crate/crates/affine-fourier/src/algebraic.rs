//! Exact and floating arithmetic for algebraic integers.
//!
//! The central object is [`PisotContext`]: a certified Pisot number `α`
//! together with its Galois conjugates, the integer trace recurrence, and
//! high-accuracy fractional parts of `α^k`.
//!
//! Fractional parts are never computed as `powf(α, k)` — doubles lose the
//! fractional part entirely once `α^k` outgrows 2⁵³ (near `k ≈ 70` for the
//! golden ratio).  Instead `α^k = s_k + δ_k` where `s_k = Σᵢ αᵢ^k` is an
//! exact integer obtained from the linear recurrence with the minimal
//! polynomial's coefficients, and `δ_k = −Σ_{i≥2} αᵢ^k` is a sum of powers of
//! the contracting conjugates, accurate to machine precision for every `k`.

use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Complex64, Error, Result};

/// Monic integer-coefficient polynomial, coefficients stored descending.
///
/// Irreducibility is not checked; callers supply minimal polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from descending coefficients `[1, a_1, ..., a_n]`.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::DegreeZero);
        }
        if !coeffs[0].is_one() {
            return Err(Error::NotMonic(coeffs[0].to_string()));
        }
        Ok(Self { coeffs })
    }

    /// Build from descending `i64` coefficients.
    pub fn from_coeffs(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parse either the string form `"x^3 - x - 1"` or a descending
    /// coefficient list `"[1,0,-1,-1]"`.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.starts_with('[') {
            let vals: Vec<i64> = serde_json::from_str(s)
                .map_err(|e| Error::Parse(format!("coefficient list: {e}")))?;
            return Self::from_coeffs(&vals);
        }
        parse_poly_string(s)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `a_i` of `x^{n-i}` (so `coeff(0) = 1`).
    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Horner evaluation at a complex point, coefficients rounded to f64.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            acc = acc * z + Complex64::new(big_to_f64(c), 0.0);
        }
        acc
    }

    /// Derivative evaluation at a complex point.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let n = self.degree();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().take(n).enumerate() {
            let power = (n - i) as f64;
            acc = acc * z + Complex64::new(big_to_f64(c) * power, 0.0);
        }
        acc
    }

    fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| big_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = n - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || power == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}

fn parse_poly_string(s: &str) -> Result<IntPolynomial> {
    // Terms like "x^3", "- 2x", "+ 7", separated by +/-.
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let bytes = compact.as_bytes();
    let mut i = 0;
    let mut sign = 1i64;
    if bytes[0] == b'+' || bytes[0] == b'-' {
        sign = if bytes[0] == b'-' { -1 } else { 1 };
        i = 1;
    }
    while i < bytes.len() {
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &compact[start..i];
        let (coeff, power) = parse_term(term)?;
        terms.push((coeff * sign, power));
        if i < bytes.len() {
            sign = if bytes[i] == b'-' { -1 } else { 1 };
            i += 1;
            if i == bytes.len() {
                return Err(Error::Parse("trailing sign".into()));
            }
        }
    }
    let degree = terms.iter().map(|&(_, p)| p).max().unwrap_or(0);
    if degree == 0 {
        return Err(Error::DegreeZero);
    }
    let mut coeffs = vec![BigInt::zero(); degree + 1];
    for (c, p) in terms {
        coeffs[degree - p] += c;
    }
    IntPolynomial::new(coeffs)
}

fn parse_term(term: &str) -> Result<(BigInt, usize)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    match term.find('x') {
        None => {
            let c: BigInt = term
                .parse()
                .map_err(|_| Error::Parse(format!("bad constant '{term}'")))?;
            Ok((c, 0))
        }
        Some(pos) => {
            let coeff_str = term[..pos].trim_end_matches('*');
            let coeff: BigInt = if coeff_str.is_empty() {
                BigInt::one()
            } else {
                coeff_str
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{coeff_str}'")))?
            };
            let rest = &term[pos + 1..];
            let power = if rest.is_empty() {
                1
            } else if let Some(p) = rest.strip_prefix('^') {
                p.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad exponent '{p}'")))?
            } else {
                return Err(Error::Parse(format!("bad term '{term}'")));
            };
            Ok((coeff, power))
        }
    }
}

/// Result of root finding, with the dominant real root flagged.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Index of the real root of largest modulus, when one exists.
    pub dominant_real: Option<usize>,
}

const ROOT_RESIDUAL_TOL: f64 = 1e-10;
const ABERTH_MAX_ITER: usize = 200;
/// Imaginary parts below this (relative to modulus) collapse to the real axis.
const REAL_AXIS_TOL: f64 = 1e-9;

/// All complex roots of a monic integer polynomial.
///
/// Companion-matrix eigenvalues provide starting points; simultaneous
/// Aberth–Ehrlich refinement sharpens them.  Residual tolerance is
/// `1e-10 · (1 + max|coeff|)`.
pub fn roots(p: &IntPolynomial) -> Result<RootSet> {
    let n = p.degree();
    let limit = ROOT_RESIDUAL_TOL * (1.0 + p.max_abs_coeff());

    let mut zs: Vec<Complex64> = if n == 1 {
        vec![Complex64::new(-big_to_f64(p.coeff(1)), 0.0)]
    } else {
        let mut companion = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -big_to_f64(p.coeff(n - i));
        }
        // nalgebra lays the last column as -a_n, -a_{n-1}, ... against
        // subdiagonal ones; eigenvalues are the roots of x^n + a_1 x^{n-1} + ...
        companion
            .complex_eigenvalues()
            .iter()
            .map(|c| Complex64::new(c.re, c.im))
            .collect()
    };

    // Aberth–Ehrlich simultaneous refinement.
    for _ in 0..ABERTH_MAX_ITER {
        let mut worst = 0.0f64;
        let mut next = zs.clone();
        for (i, &z) in zs.iter().enumerate() {
            let pv = p.eval(z);
            worst = worst.max(pv.norm());
            let dv = p.eval_derivative(z);
            if dv.norm() == 0.0 {
                continue;
            }
            let newton = pv / dv;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &w) in zs.iter().enumerate() {
                if j != i {
                    let diff = z - w;
                    if diff.norm_sqr() > 1e-300 {
                        repulsion += Complex64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            if denom.norm() > 1e-12 {
                next[i] = z - newton / denom;
            } else {
                next[i] = z - newton;
            }
        }
        zs = next;
        if worst <= limit * 0.5 {
            break;
        }
    }

    // Snap near-real roots onto the axis so real dominant roots are exact.
    for z in zs.iter_mut() {
        if z.im.abs() <= REAL_AXIS_TOL * (1.0 + z.norm()) {
            z.im = 0.0;
        }
    }

    let residuals: Vec<f64> = zs.iter().map(|&z| p.eval(z).norm()).collect();
    if let Some(&worst) = residuals
        .iter()
        .max_by(|a, b| a.partial_cmp(b).unwrap())
        .filter(|&&w| w > limit)
    {
        return Err(Error::RootRefinement {
            worst_residual: worst,
            limit,
        });
    }

    let dominant_real = zs
        .iter()
        .enumerate()
        .filter(|(_, z)| z.im == 0.0)
        .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
        .map(|(i, _)| i);

    Ok(RootSet {
        roots: zs,
        residuals,
        dominant_real,
    })
}

/// Distance of `α^k` to the integers, with the signed fractional offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mod1Value {
    /// Distance to the nearest integer, in `[0, 0.5]`.
    pub value: f64,
    /// Signed offset `α^k − nearest integer`, in `(−0.5, 0.5]`.
    pub signed_offset: f64,
    /// Exponent index.
    pub k: usize,
}

/// Conjugates must clear the unit circle by this margin to certify;
/// Salem-like inputs with a conjugate inside the band are rejected as
/// indeterminate rather than silently passed.
pub const PISOT_MARGIN: f64 = 1e-8;

/// A certified Pisot number with the machinery derived from it.
#[derive(Debug)]
pub struct PisotContext {
    minpoly: IntPolynomial,
    alpha: f64,
    conjugates: Vec<Complex64>,
    conjugate_max: f64,
    trace_cache: Mutex<Vec<BigInt>>,
}

/// Certify that the dominant root of `p` is a Pisot number.
///
/// Succeeds iff the dominant real root exceeds `1` and every other root has
/// modulus below `1 − margin`; moduli inside `[1−margin, 1+margin]` yield an
/// explicit indeterminate rejection, never a false certificate.
pub fn certify_pisot(p: &IntPolynomial) -> Result<PisotContext> {
    let found = roots(p)?;
    let dominant_idx = found
        .dominant_real
        .ok_or_else(|| Error::NotPisot("no real root (dominant root must be real > 1)".into()))?;
    let alpha = found.roots[dominant_idx].re;
    if alpha <= 1.0 + PISOT_MARGIN {
        if alpha > 1.0 - PISOT_MARGIN {
            return Err(Error::PisotIndeterminate { modulus: alpha });
        }
        return Err(Error::NotPisot(format!(
            "dominant real root {alpha} is not > 1"
        )));
    }
    let mut conjugates = Vec::with_capacity(p.degree() - 1);
    let mut conjugate_max = 0.0f64;
    for (i, &z) in found.roots.iter().enumerate() {
        if i == dominant_idx {
            continue;
        }
        let m = z.norm();
        if m >= 1.0 - PISOT_MARGIN {
            if m <= 1.0 + PISOT_MARGIN {
                return Err(Error::PisotIndeterminate { modulus: m });
            }
            return Err(Error::NotPisot(format!(
                "conjugate {z} has modulus {m} >= 1"
            )));
        }
        conjugate_max = conjugate_max.max(m);
        conjugates.push(z);
    }
    Ok(PisotContext {
        minpoly: p.clone(),
        alpha,
        conjugates,
        conjugate_max,
        trace_cache: Mutex::new(Vec::new()),
    })
}

impl PisotContext {
    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn conjugates(&self) -> &[Complex64] {
        &self.conjugates
    }

    pub fn conjugate_max(&self) -> f64 {
        self.conjugate_max
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    /// Exact integer trace `s_k = Σᵢ αᵢ^k`.
    ///
    /// Seeded by Newton's identities for `k ≤ n`, then continued with the
    /// linear recurrence `s_k = −a_1 s_{k−1} − ... − a_n s_{k−n}`.  Cached;
    /// the cache fill is compute-then-publish and safe for concurrent use.
    pub fn trace(&self, k: usize) -> BigInt {
        let mut cache = self.trace_cache.lock().unwrap();
        if cache.is_empty() {
            cache.push(BigInt::from(self.degree()));
        }
        let n = self.degree();
        let a = self.minpoly.coeffs();
        while cache.len() <= k {
            let m = cache.len();
            let mut s = BigInt::zero();
            if m <= n {
                // Newton: p_m = -m a_m - Σ_{i=1}^{m-1} a_i p_{m-i}
                s -= BigInt::from(m as i64) * &a[m];
                for i in 1..m {
                    let term = &a[i] * &cache[m - i];
                    s -= term;
                }
            } else {
                for i in 1..=n {
                    let term = &a[i] * &cache[m - i];
                    s -= term;
                }
            }
            cache.push(s);
        }
        cache[k].clone()
    }

    /// Sum of the k-th powers of the contracting conjugates, `Σ_{i≥2} αᵢ^k`.
    fn conjugate_power_sum(&self, k: usize) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for &c in &self.conjugates {
            sum += c.powu(k as u32);
        }
        sum.re
    }

    /// `α^k` as a double, reconstructed as `s_k + δ_k`.
    ///
    /// Exact to one ulp of `α^k` for every k where the value is representable,
    /// unlike repeated floating multiplication.
    pub fn alpha_pow_f64(&self, k: usize) -> f64 {
        let s = self.trace(k).to_f64().unwrap_or(f64::INFINITY);
        s - self.conjugate_power_sum(k)
    }

    /// Distance of `α^k` to ℤ via the exact-trace path.
    pub fn alpha_pow_mod1(&self, k: usize) -> Mod1Value {
        // α^k − s_k = −Σ_{i≥2} αᵢ^k; fold to (−0.5, 0.5].
        let delta = -self.conjugate_power_sum(k);
        let folded = delta - delta.round();
        Mod1Value {
            value: folded.abs(),
            signed_offset: folded,
            k,
        }
    }

    /// Smallest `N` with `(n−1)·conjugate_max^k · multiplier < θ^k` and
    /// `θ^k < 1/4` at `k = N` (the ratio argument extends both to `k > N`).
    ///
    /// The multiplier accommodates integer direction vectors, where the
    /// relevant distances are `dist(n_i α^k, ℤ) ≤ |n_i| · dist-bound`.
    pub fn theta_index(&self, theta: f64, multiplier: f64) -> Result<usize> {
        if theta <= self.conjugate_max || theta >= 1.0 {
            return Err(Error::ThetaTooSmall {
                theta,
                conjugate_max: self.conjugate_max,
            });
        }
        let coeff = (self.degree().saturating_sub(1)) as f64 * multiplier.max(1.0);
        let mut n = 1usize;
        loop {
            let th = theta.powi(n as i32);
            if coeff * self.conjugate_max.powi(n as i32) < th && th < 0.25 {
                return Ok(n);
            }
            n += 1;
            if n > 100_000 {
                return Err(Error::Numeric(format!(
                    "theta index search exhausted for theta={theta}"
                )));
            }
        }
    }

    /// Deterministic θ selection on the grid
    /// `conjugate_max + j·(1−conjugate_max)/32`, j = 1..32: the smallest grid
    /// value admitting an index per [`Self::theta_index`] and accepted by the
    /// caller's positivity screen.
    pub fn geometric_theta_screened(
        &self,
        multiplier: f64,
        screen: &dyn Fn(f64) -> bool,
    ) -> Result<GeometricTheta> {
        let step = (1.0 - self.conjugate_max) / 32.0;
        for j in 1..32 {
            let theta = self.conjugate_max + j as f64 * step;
            if theta >= 1.0 {
                break;
            }
            if !screen(theta) {
                continue;
            }
            if let Ok(start_index) = self.theta_index(theta, multiplier) {
                let verified_up_to = self.verify_theta(theta, start_index);
                return Ok(GeometricTheta {
                    theta,
                    start_index,
                    verified_up_to,
                });
            }
        }
        Err(Error::Numeric(
            "no admissible theta on the selection grid".into(),
        ))
    }

    /// θ selection with no extra screen beyond the geometric constraints.
    pub fn geometric_theta(&self) -> Result<GeometricTheta> {
        self.geometric_theta_screened(1.0, &|_| true)
    }

    /// Check `dist(α^k, ℤ) ≤ θ^k` for `k = N .. N+20` against the exact
    /// fractional parts; returns the last verified k.
    fn verify_theta(&self, theta: f64, n: usize) -> usize {
        let mut last = n;
        for k in n..=n + 20 {
            if self.alpha_pow_mod1(k).value <= theta.powi(k as i32) {
                last = k;
            } else {
                return last;
            }
        }
        last
    }
}

/// A θ dominating the mod-1 decay of `α^k`, with the index it starts at.
#[derive(Debug, Clone, Copy)]
pub struct GeometricTheta {
    pub theta: f64,
    /// Smallest index from which `dist(α^k, ℤ) < θ^k < 1/4` is certified.
    pub start_index: usize,
    /// Numerically spot-checked against the exact fractional parts up to here.
    pub verified_up_to: usize,
}
