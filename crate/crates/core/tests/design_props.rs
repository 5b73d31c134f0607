use std::collections::BTreeSet;

use nngp_core::design::{
    gaussian_noise, latin_hypercube, permutation, sobol_1d, DesignKind, DesignSpec, Seed,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn lhs_one_point_per_stratum(n in 1usize..200, d in 1usize..8, seed in any::<u64>()) {
        let x = latin_hypercube(n, d, Seed(seed));
        for j in 0..d {
            let mut strata: Vec<usize> = x.column(j).iter().map(|v| (v * n as f64).floor() as usize).collect();
            strata.sort_unstable();
            prop_assert_eq!(strata, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn generators_are_reproducible(n in 1usize..50, d in 1usize..5, seed in any::<u64>()) {
        let spec = DesignSpec { kind: DesignKind::Lhs, count: n, dim: d, seed: Seed(seed) };
        prop_assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        prop_assert_eq!(gaussian_noise(n, 1.0, Seed(seed)), gaussian_noise(n, 1.0, Seed(seed)));
        prop_assert_eq!(permutation(n, Seed(seed)), permutation(n, Seed(seed)));
    }

    #[test]
    fn permutation_is_bijective(n in 0usize..300, seed in any::<u64>()) {
        let mut p = permutation(n, Seed(seed));
        p.sort_unstable();
        prop_assert_eq!(p, (0..n).collect::<Vec<_>>());
    }
}

/// Bit-reversed binary fraction computed digit by digit.
fn radical_inverse_reference(mut i: u64) -> f64 {
    let mut v = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            v += scale;
        }
        i >>= 1;
        scale /= 2.0;
    }
    v
}

#[test]
fn sobol_dyadic_sets() {
    for k in 0..=6u32 {
        let n = 1usize << k;
        let got: BTreeSet<u64> = sobol_1d(n).iter().map(|v| v.to_bits()).collect();
        let oracle: BTreeSet<u64> = (1..=n as u64).map(|i| radical_inverse_reference(i).to_bits()).collect();
        assert_eq!(got, oracle);
        // the first 2^k - 1 points are the multiples of 2^-k in (0, 1)
        let mut head: Vec<f64> = sobol_1d(n)[..n - 1].to_vec();
        head.sort_by(f64::total_cmp);
        let grid: Vec<f64> = (1..n).map(|j| j as f64 / n as f64).collect();
        assert_eq!(head, grid);
        assert_eq!(got.len(), n);
    }
}

#[test]
fn different_seeds_give_different_designs() {
    assert_ne!(latin_hypercube(10, 2, Seed(1)), latin_hypercube(10, 2, Seed(2)));
}
