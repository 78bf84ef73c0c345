//! Property tests for the cross-cutting invariants.

mod common;

use affine_fourier::detmeasure::{consistency_check, cylinder_prob, CylinderSpec};
use affine_fourier::fourier::{self, ScanSystem};
use affine_fourier::ifs;
use affine_fourier::induced::{det_lambda, nu_hat_bruteforce, nu_hat_det_order, InducedSystem};
use affine_fourier::Kernel;
use common::random_contraction;
use proptest::prelude::*;

/// Monte Carlo rate: the chaos-game characteristic function approaches the
/// exact transform like `5/√n` across three decades of sample size.
#[test]
fn chaos_game_converges_to_transform() {
    let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0).unwrap();
    let exact = fourier::mu_hat(&cantor, &[1.0], 1e-12).unwrap().value;
    for n in [10_000usize, 100_000, 1_000_000] {
        let emp = ifs::chaos_game(&cantor, n, 31).unwrap();
        let gap = (emp.characteristic_function(&[1.0]) - exact).norm();
        assert!(
            gap <= 5.0 / (n as f64).sqrt(),
            "n={n}: gap {gap} above the Monte Carlo rate"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_bounded_and_conjugate_symmetric(
        xi1 in -8.0f64..8.0,
        xi2 in -8.0f64..8.0,
        lambda_step in 0u8..6,
    ) {
        let lambda = 0.35 + lambda_step as f64 * 0.1;
        let simplex = ifs::standard_simplex_ifs(2, lambda).unwrap();
        let plus = fourier::mu_hat(&simplex, &[xi1, xi2], 1e-12).unwrap().value;
        let minus = fourier::mu_hat(&simplex, &[-xi1, -xi2], 1e-12).unwrap().value;
        prop_assert!(plus.norm() <= 1.0 + 1e-9);
        prop_assert!((plus.conj() - minus).norm() <= 1e-12);
    }

    #[test]
    fn ray_agrees_with_full_transform(xi in -6.0f64..6.0) {
        let simplex = ifs::standard_simplex_ifs(3, 0.5).unwrap();
        let ray = fourier::RayRestriction::new(simplex.clone(), vec![1.0, 1.0, 1.0]).unwrap();
        let along = fourier::mu_hat_ray(&ray, xi, 1e-12).unwrap().value;
        let full = fourier::mu_hat(&simplex, &[xi, xi, xi], 1e-12).unwrap().value;
        prop_assert!((along - full).norm() <= 1e-10);
    }

    #[test]
    fn encode_intertwines_every_shift(word in proptest::collection::vec(0u8..2, 0..12), b in 0u8..2) {
        let lambda = 1.0 / 3.0;
        let system = ifs::binary_ifs(lambda).unwrap();
        let w = ifs::SymbolWord::new(word);
        let base = ifs::encode(&system, &w, true).unwrap().value;
        let shifted = ifs::encode(&system, &w.shifted(b), true).unwrap().value;
        let tau = lambda * (base + b as f64);
        prop_assert!((shifted - tau).abs() <= 1e-12);
    }

    #[test]
    fn additivity_on_random_kernels(
        seed in 0u64..500,
        k in 1usize..8,
        mask in 0u8..128,
    ) {
        let kernel = random_contraction(8, seed);
        let f: Vec<usize> = (1..8).filter(|i| (mask >> (i - 1)) & 1 == 1 && *i != k).collect();
        if f.len() > 5 {
            return Ok(());
        }
        let residual = consistency_check(&kernel, &f, k).unwrap();
        prop_assert!(residual <= 1e-12, "residual {residual}");
    }

    #[test]
    fn cylinder_probabilities_form_a_distribution(seed in 0u64..200, bits in 0u8..16) {
        let kernel = random_contraction(6, seed);
        let f = [1usize, 3, 4, 6];
        let xi: Vec<u8> = (0..4).map(|i| (bits >> i) & 1).collect();
        let p = cylinder_prob(&kernel, &CylinderSpec::new(f.to_vec(), xi).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn determinant_matches_bruteforce(seed in 0u64..100, t in -5.0f64..5.0, n in 1usize..8) {
        let sys = InducedSystem::new(0.45, random_contraction(8, seed)).unwrap();
        let det = nu_hat_det_order(&sys, t, n);
        let brute = nu_hat_bruteforce(&sys, t, n).unwrap();
        prop_assert!((det - brute).norm() <= 1e-9);
    }

    #[test]
    fn det_lambda_identity_everywhere(seed in 0u64..100, t in -4.0f64..4.0) {
        let kernel = random_contraction(6, seed);
        let dl = det_lambda(&kernel, 0.5, t, 1e-10).unwrap();
        prop_assert!(dl.identity_residual_max <= 1e-13);
    }

    #[test]
    fn split_and_direct_agree(k in 0usize..=40, sys_pick in 0u8..4, silver in proptest::bool::ANY) {
        let coeffs: &[i64] = if silver { &[1, -2, -1] } else { &[1, -1, -1] };
        let ctx = affine_fourier::algebraic::certify_pisot(
            &affine_fourier::IntPolynomial::from_coeffs(coeffs).unwrap(),
        )
        .unwrap();
        let system = match sys_pick {
            0 => ScanSystem::Bernoulli1d,
            1 => ScanSystem::Simplex { d: 2 },
            2 => ScanSystem::Simplex { d: 4 },
            _ => ScanSystem::IntegerDirection { n1: 1, n2: 2 },
        };
        let ev = fourier::mu_hat_at_alpha_k(system, &ctx, k, 1e-12).unwrap();
        prop_assert!(ev.residual <= 1e-9, "k={k} {system:?} residual {}", ev.residual);
    }

    #[test]
    fn shift_recursion_exact_on_dense_kernels(seed in 0u64..200, mask in 0u8..16) {
        let kernel = random_contraction(8, seed);
        let f: Vec<usize> = (1..=4).filter(|i| (mask >> (i - 1)) & 1 == 1).collect();
        let bits: Vec<u8> = f.iter().map(|&i| (seed >> i) as u8 & 1).collect();
        let cylinder = CylinderSpec::new(f, bits).unwrap();
        let res = affine_fourier::detmeasure::shift_recursion_check(&kernel, &cylinder).unwrap();
        prop_assert!(res.two_sided <= 1e-12, "residual {}", res.two_sided);
    }

    #[test]
    fn tv_bounds_stay_under_two(t in -3.0f64..3.0, xi in 0.1f64..6.0) {
        let cantor = ifs::bernoulli_pm_ifs(1.0 / 3.0).unwrap();
        let b = affine_fourier::chaos::tv_lower_bound(&cantor, t, &[xi, 2.0 * xi], 1e-12).unwrap();
        prop_assert!(b.bound >= 0.0 && b.bound <= 2.0 + 1e-9);
    }

    #[test]
    fn toeplitz_w_sign_rule(mask in 0u8..32, a_step in 1u8..9) {
        let a = a_step as f64 * 0.1;
        let kernel = Kernel::toeplitz(a).unwrap();
        let f = [1usize, 2, 4, 7, 8];
        let xi: Vec<u8> = (0..5).map(|i| (mask >> i) & 1).collect();
        let cylinder = CylinderSpec::new(f.to_vec(), xi.clone()).unwrap();
        let w = affine_fourier::detmeasure::w_matrix(&kernel, &cylinder).unwrap();
        let coeff = (1.0 - a) / (1.0 + a);
        for r in 0..5 {
            for c in 0..5 {
                if r == c { continue; }
                let want = (2.0 * xi[r] as f64 - 1.0) * coeff * a.powi(f[r].abs_diff(f[c]) as i32);
                prop_assert!((w[(r, c)] - want).abs() <= 1e-15);
            }
        }
    }
}
