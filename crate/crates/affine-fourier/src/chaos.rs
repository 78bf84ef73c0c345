//! Translation-distance lower bounds via Fourier data and the chaos
//! classification of translated systems.
//!
//! For any probability measure, `(μ − T_t μ)^(ξ) = (1 − e(tξ))·μ̂(ξ)`, so
//! every frequency gives the certified bound
//! `‖μ − T_t μ‖ ≥ |1 − e(tξ)|·|μ̂(ξ)|`.  True total-variation distances have
//! no closed form here; this module only ever reports such theorem-backed
//! lower bounds, which is enough to separate the translates `T_{λⁿ/2} μ`
//! from `μ` uniformly when `1/λ` is Pisot: the witness `ξ = αⁿ` makes
//! `t·ξ = 1/2` and the bound is exactly `2|μ̂(αⁿ)|`, which the non-decay
//! scan keeps away from zero.

use crate::algebraic::PisotContext;
use crate::fourier::{self, ScanSystem};
use crate::ifs::AffineIfs;
use crate::{e, Error, Result};

/// A certified lower bound on `‖μ − T_t μ‖`.
#[derive(Debug, Clone, Copy)]
pub struct TvLowerBound {
    /// Translation amount.
    pub t: f64,
    /// Frequency achieving the bound.
    pub witness_xi: f64,
    pub bound: f64,
}

/// Best bound over a frequency grid: `max_ξ |1 − e(tξ)|·|μ̂(ξ)|`.
pub fn tv_lower_bound(ifs: &AffineIfs, t: f64, xi_grid: &[f64], tol: f64) -> Result<TvLowerBound> {
    if ifs.dim() != 1 {
        return Err(Error::Invalid(
            "translation bounds are one-dimensional".into(),
        ));
    }
    if xi_grid.is_empty() {
        return Err(Error::Invalid("frequency grid must be nonempty".into()));
    }
    if xi_grid.contains(&0.0) {
        return Err(Error::Invalid(
            "frequency grid entries must be nonzero".into(),
        ));
    }
    let mut best = TvLowerBound {
        t,
        witness_xi: xi_grid[0],
        bound: -1.0,
    };
    for &xi in xi_grid {
        let mu = fourier::mu_hat(ifs, &[xi], tol)?.value.norm();
        let bound = (crate::Complex64::new(1.0, 0.0) - e(t * xi)).norm() * mu;
        if bound > best.bound {
            best = TvLowerBound {
                t,
                witness_xi: xi,
                bound,
            };
        }
    }
    Ok(best)
}

/// Separation bounds for the translate sequence `t_n = λⁿ/2` of the 1D
/// Bernoulli convolution measure, forced witness `ξ = αⁿ` (so `t_n ξ = 1/2`
/// and the bound equals `2|μ̂(αⁿ)|` from the split evaluator).
pub fn separation_scan(ctx: &PisotContext, n_max: usize, tol: f64) -> Result<Vec<TvLowerBound>> {
    let lambda = 1.0 / ctx.alpha();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ev = fourier::mu_hat_at_alpha_k(ScanSystem::Bernoulli1d, ctx, n, tol)?;
        out.push(TvLowerBound {
            t: lambda.powi(n as i32) / 2.0,
            witness_xi: ctx.alpha_pow_f64(n),
            bound: 2.0 * ev.split.norm(),
        });
    }
    Ok(out)
}

/// One-sided chaos verdict.
///
/// The Fourier method only ever certifies separation; absence of a
/// certificate proves nothing, so there is no "not chaotic" outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum ChaosVerdict {
    /// Translates by `t_n = λⁿ/2 → 0` stay TV-separated by at least `eps`.
    ChaoticCertified {
        eps: f64,
        floor: f64,
    },
    NoEvidence {
        reason: String,
    },
}

/// Classify the 1D two-map system with ratio λ.
///
/// Certified iff a Pisot certificate for `1/λ` is supplied and the
/// separation floor over `n ≤ n_max` reaches `eps`.
pub fn chaos_classify(
    lambda: f64,
    ctx: Option<&PisotContext>,
    eps: f64,
    n_max: usize,
    tol: f64,
) -> Result<ChaosVerdict> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!("lambda {lambda} outside (0,1)")));
    }
    if eps <= 0.0 {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let Some(ctx) = ctx else {
        return Ok(ChaosVerdict::NoEvidence {
            reason: "no Pisot certificate for 1/lambda".into(),
        });
    };
    if (lambda * ctx.alpha() - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid(format!(
            "certificate is for alpha = {}, not 1/lambda = {}",
            ctx.alpha(),
            1.0 / lambda
        )));
    }
    let bounds = separation_scan(ctx, n_max, tol)?;
    let floor = bounds.iter().map(|b| b.bound).fold(f64::INFINITY, f64::min);
    if floor >= eps {
        Ok(ChaosVerdict::ChaoticCertified { eps, floor })
    } else {
        Ok(ChaosVerdict::NoEvidence {
            reason: format!("separation floor {floor:.6e} below eps {eps:.6e}"),
        })
    }
}

/// Infimum estimate and its witness for the α-gradation functional.
#[derive(Debug, Clone, Copy)]
pub struct GradationEstimate {
    pub infimum: f64,
    pub witness_k: usize,
    pub witness_n: usize,
}

/// Certified lower-bound side of `inf_{k,n} |k|^a ‖μ − T_{λⁿ/k} μ‖`:
/// the infimum over `2 ≤ k ≤ k_max`, `n ≤ n_max` of
/// `k^a · 2 sin(π/k) · |μ̂(αⁿ)|`.
pub fn alpha_gradation(
    ctx: &PisotContext,
    alpha_exponent: f64,
    k_max: usize,
    n_max: usize,
    tol: f64,
) -> Result<GradationEstimate> {
    if alpha_exponent < 0.0 {
        return Err(Error::Invalid("exponent must be >= 0".into()));
    }
    if k_max < 2 {
        return Err(Error::Invalid("k_max must be >= 2".into()));
    }
    let mut best = GradationEstimate {
        infimum: f64::INFINITY,
        witness_k: 2,
        witness_n: 0,
    };
    for n in 0..=n_max {
        let mu = fourier::mu_hat_at_alpha_k(ScanSystem::Bernoulli1d, ctx, n, tol)?
            .split
            .norm();
        for k in 2..=k_max {
            let kf = k as f64;
            let value = kf.powf(alpha_exponent) * 2.0 * (std::f64::consts::PI / kf).sin() * mu;
            if value < best.infimum {
                best = GradationEstimate {
                    infimum: value,
                    witness_k: k,
                    witness_n: n,
                };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{certify_pisot, IntPolynomial};
    use crate::ifs;

    fn phi_ctx() -> PisotContext {
        certify_pisot(&IntPolynomial::from_coeffs(&[1, -1, -1]).unwrap()).unwrap()
    }

    fn cantor_ctx() -> PisotContext {
        certify_pisot(&IntPolynomial::from_coeffs(&[1, -3]).unwrap()).unwrap()
    }

    #[test]
    fn tv_bound_examples() {
        let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0).unwrap();
        // t = 0 → identical measures
        let zero = tv_lower_bound(&cantor, 0.0, &[1.0, 2.0], 1e-12).unwrap();
        assert_eq!(zero.bound, 0.0);

        // t = 1/2 with ξ = 1 in the grid: bound ≥ 2·0.371437
        let b = tv_lower_bound(&cantor, 0.5, &[0.7, 1.0, 1.9], 1e-12).unwrap();
        assert!(b.bound >= 2.0 * 0.3714373 - 1e-6, "bound {}", b.bound);
        assert_eq!(b.witness_xi, 1.0);
        assert!(b.bound <= 2.0 + 1e-9);

        assert!(tv_lower_bound(&cantor, 0.5, &[0.0], 1e-12).is_err());
        assert!(tv_lower_bound(&cantor, 0.5, &[], 1e-12).is_err());
    }

    #[test]
    fn tv_bound_monotone_under_refinement() {
        let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0).unwrap();
        let coarse = tv_lower_bound(&cantor, 0.37, &[0.5, 1.0], 1e-12).unwrap();
        let fine = tv_lower_bound(&cantor, 0.37, &[0.5, 1.0, 1.5, 2.5], 1e-12).unwrap();
        assert!(fine.bound >= coarse.bound);
    }

    #[test]
    fn separation_matches_split_evaluator() {
        let ctx = phi_ctx();
        let bounds = separation_scan(&ctx, 12, 1e-12).unwrap();
        for (n, b) in bounds.iter().enumerate() {
            let ev = fourier::mu_hat_at_alpha_k(ScanSystem::Bernoulli1d, &ctx, n, 1e-12).unwrap();
            assert!((b.bound - 2.0 * ev.split.norm()).abs() <= 1e-12);
            assert!(b.bound > 0.0);
        }
        // t_n halves geometrically
        assert!((bounds[1].t / bounds[0].t - 1.0 / ctx.alpha()).abs() < 1e-12);
    }

    #[test]
    fn cantor_separation_constant() {
        let ctx = cantor_ctx();
        let bounds = separation_scan(&ctx, 10, 1e-12).unwrap();
        let first = bounds[0].bound;
        for b in &bounds {
            assert!((b.bound - first).abs() < 1e-10);
        }
        assert!((first - 2.0 * 0.371437356708766).abs() < 1e-9);
    }

    #[test]
    fn classify_certifies_pisot_ratios() {
        let phi = phi_ctx();
        let lambda = 1.0 / phi.alpha();
        let floor = separation_scan(&phi, 20, 1e-12)
            .unwrap()
            .iter()
            .map(|b| b.bound)
            .fold(f64::INFINITY, f64::min);
        let verdict = chaos_classify(lambda, Some(&phi), floor, 20, 1e-12).unwrap();
        assert!(matches!(verdict, ChaosVerdict::ChaoticCertified { .. }));

        // monotone in eps
        let verdict = chaos_classify(lambda, Some(&phi), floor / 64.0, 20, 1e-12).unwrap();
        assert!(matches!(verdict, ChaosVerdict::ChaoticCertified { .. }));

        // generic ratio without a certificate → no evidence
        let verdict = chaos_classify(0.51, None, 1e-6, 10, 1e-12).unwrap();
        assert!(matches!(verdict, ChaosVerdict::NoEvidence { .. }));

        // mismatched certificate is a validation error
        assert!(chaos_classify(0.5, Some(&phi), 1e-6, 10, 1e-12).is_err());
    }

    #[test]
    fn gradation_examples() {
        let ctx = phi_ctx();
        // k = 2 term equals the separation bound
        let sep = separation_scan(&ctx, 5, 1e-12).unwrap();
        let grad = alpha_gradation(&ctx, 0.0, 2, 5, 1e-12).unwrap();
        let min_sep = sep.iter().map(|b| b.bound).fold(f64::INFINITY, f64::min);
        assert!((grad.infimum - min_sep).abs() < 1e-12);

        // exponent 1, large k: k·2sin(π/k) → 2π
        let k = 5000.0f64;
        let factor = k * 2.0 * (std::f64::consts::PI / k).sin();
        assert!((factor - 2.0 * std::f64::consts::PI).abs() < 1e-5);

        // positive infimum over k ≤ 50, n ≤ 20 at exponent 1
        let grad = alpha_gradation(&ctx, 1.0, 50, 20, 1e-12).unwrap();
        assert!(grad.infimum > 0.0);
    }
}
