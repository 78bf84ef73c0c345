//! Fourier asymptotics for fractal measures.
//!
//! This crate evaluates the Fourier transform of two families of compactly
//! supported measures on `ℝ^d` as controlled truncations, and certifies
//! non-decay of the transform along geometric frequency paths:
//!
//! * **Affine-IFS equilibrium measures.** An iterated function system
//!   `τ_b(x) = A⁻¹(x + b)` with an expansive matrix `A`, digit set `B` and
//!   probability weights `p` has a unique invariant measure whose transform
//!   is the infinite product `∏ₖ m_B((Aᵗ)⁻ᵏ ξ)`.  The [`fourier`] module
//!   truncates this product with a certified tail bound, and the scan
//!   machinery evaluates it along `ξ = α^k` for a Pisot number `α = 1/λ`,
//!   where the power sequence stays uniformly bounded away from zero.
//!
//! * **Determinantal-induced measures.** A symmetric kernel contraction `T`
//!   on `ℓ²` with spectrum in `[0,1]` defines a measure on `{0,1}^ℕ` through
//!   cylinder determinants, and the binary encoding `ω ↦ Σ ωₖ λᵏ` pushes it
//!   onto the line.  The [`detmeasure`] and [`induced`] modules compute the
//!   cylinder probabilities, the determinant truncations of the induced
//!   transform, and the Toeplitz closed forms.
//!
//! The [`algebraic`] module supplies the exact arithmetic both families rely
//! on: Pisot certification and fractional parts of `α^k` recovered from the
//! integer trace recurrence rather than from floating powers.
//!
//! ```
//! use affine_fourier::{algebraic, fourier, ifs};
//!
//! // the Cantor transform ∏ cos(2πξ/3ⁿ) at ξ = 1
//! let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0)?;
//! let ev = fourier::mu_hat(&cantor, &[1.0], 1e-12)?;
//! assert!((ev.value.re - (-0.3714373567)).abs() < 1e-9);
//!
//! // golden-ratio scan: |μ̂(φᵏ)| stays above the certified floor
//! let phi = algebraic::certify_pisot(&affine_fourier::IntPolynomial::parse("x^2 - x - 1")?)?;
//! let scan = fourier::erdos_scan(fourier::ScanSystem::Bernoulli1d, &phi, 20, 1e-12)?;
//! assert!(scan.floor >= scan.certified.value);
//! # Ok::<(), affine_fourier::Error>(())
//! ```

pub mod algebraic;
pub mod chaos;
pub mod detmeasure;
pub mod fourier;
pub mod ifs;
pub mod induced;
mod linalg;

mod error;

pub use error::{Error, ErrorKind, Result};

pub use algebraic::{GeometricTheta, IntPolynomial, Mod1Value, PisotContext};
pub use chaos::{ChaosVerdict, TvLowerBound};
pub use detmeasure::{CylinderSpec, Kernel};
pub use fourier::{ErdosScan, ProductEvaluation, RayRestriction, ScanSystem};
pub use ifs::{AffineIfs, EmpiricalMeasure, SymbolWord};
pub use induced::{DetTransformResult, InducedSystem};

/// Complex double used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// `e(x) = exp(i 2π x)`, the unit-frequency character.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * x).sin_cos();
    Complex64::new(c, s)
}
