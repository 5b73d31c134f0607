mod common;

use common::{rel_err, rng};
use nngp_core::design::{latin_hypercube, Seed};
use nngp_core::embed::hypersphere_embed;
use nngp_core::kernels::{matern, relu_dual, relu_dual_derivative, KernelSpec, Smoothness};
use nngp_core::linalg::{cholesky, DenseMatrix};
use proptest::prelude::*;
use rand::Rng;

fn points(max_n: usize, max_d: usize) -> impl Strategy<Value = DenseMatrix> {
    (2..=max_n, 1..=max_d, any::<u64>()).prop_map(|(n, d, s)| latin_hypercube(n, d, Seed(s)))
}

/// (depth, sigma_a, sigma_b)
fn nngp_params() -> impl Strategy<Value = (usize, f64, f64)> {
    (1usize..6, 0.1f64..2.0, 0.0f64..2.0)
}

proptest! {
    #[test]
    fn relu_dual_equal_arguments(k in 1e-6f64..1e6) {
        prop_assert!((relu_dual(k, k, k).unwrap() - k / 2.0).abs() <= 2.0 * f64::EPSILON * k);
    }

    #[test]
    fn relu_dual_bounds(kxx in 1e-3f64..10.0, kyy in 1e-3f64..10.0, rho in -1.0f64..=1.0) {
        let kxy = rho * (kxx * kyy).sqrt();
        let v = relu_dual(kxx, kxy, kyy).unwrap();
        let bound = (kxx * kyy).sqrt() / 2.0;
        prop_assert!(v >= 0.0 && v <= bound * (1.0 + 1e-15), "{v} vs {bound}");
        let dv = relu_dual_derivative(kxx, kxy, kyy).unwrap();
        prop_assert!((0.0..=0.5).contains(&dv));
    }

    #[test]
    fn nngp_permutation_equivariant(x in points(12, 3), params in nngp_params(), perm_seed in any::<u64>()) {
        let e = hypersphere_embed(&x);
        let (depth, a, b) = params;
        let spec = KernelSpec::nngp(depth, a, b, e.cols()).unwrap();
        let perm = nngp_core::design::permutation(e.rows(), Seed(perm_seed));
        let k = spec.gram(&e).unwrap().values;
        let kp = spec.gram(&e.select_rows(&perm)).unwrap().values;
        for i in 0..perm.len() {
            for j in 0..perm.len() {
                prop_assert_eq!(kp[(i, j)], k[(perm[i], perm[j])]);
            }
        }
    }

    #[test]
    fn nngp_diagonal_positive_and_equal_on_sphere(x in points(10, 4), (depth, a, b) in nngp_params()) {
        let e = hypersphere_embed(&x);
        let spec = KernelSpec::nngp(depth, a, b, e.cols()).unwrap();
        let k = spec.gram(&e).unwrap().values;
        let d = k.diagonal();
        // unit-norm rows give a common diagonal
        for v in &d {
            prop_assert!(*v > 0.0);
            prop_assert!(rel_err(*v, d[0]) < 1e-12);
        }
    }

    #[test]
    fn matern_gram_factors_with_tiny_nugget(x in points(25, 4), nu_i in 0usize..3, rho in 0.05f64..1.0) {
        // distinct points; the smooth limit is excluded because it is
        // numerically singular long before it is mathematically singular
        let nu = [Smoothness::Half, Smoothness::ThreeHalves, Smoothness::FiveHalves][nu_i];
        let spec = KernelSpec::Matern { nu, rho: rho / 10.0, sigma2: 1.0 };
        let k = spec.gram(&x).unwrap().values;
        prop_assert!(k.diagonal().iter().all(|&v| v == 1.0));
        prop_assert!(cholesky(&k.with_added_diagonal(1e-10)).is_ok());
    }
}

#[test]
fn matern_three_halves_matches_closed_form() {
    let mut r = rng(21);
    for _ in 0..100 {
        // embedded distances lie in [0, 2]
        let d: f64 = r.random_range(0.0..2.0);
        let rho: f64 = r.random_range(0.05..5.0);
        let s2: f64 = r.random_range(0.1..3.0);
        let scaled = d / rho;
        let t = scaled * 3f64.sqrt();
        let expected = s2 * (1.0 + t) * (-t).exp();
        let got = matern(&[0.0], &[d], 1.5, rho, s2).unwrap();
        assert!(rel_err(got, expected) < 1e-14, "{got} vs {expected}");
    }
}

#[test]
fn matern_diagonal_equal_across_identical_points() {
    let x = DenseMatrix::from_rows(&[[0.2, 0.4], [0.2, 0.4], [0.9, 0.1]]).unwrap();
    for nu in Smoothness::ALL {
        let k = KernelSpec::Matern { nu, rho: 0.3, sigma2: 1.7 }.gram(&x).unwrap().values;
        assert_eq!(k.diagonal(), vec![1.7; 3]);
        assert_eq!(k[(0, 1)], 1.7);
    }
}
