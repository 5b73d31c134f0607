use nngp_core::design::{latin_hypercube, Seed};
use nngp_core::embed::{hypersphere_embed, minmax_scale};
use nngp_core::linalg::DenseMatrix;
use proptest::prelude::*;

fn unit_rows(max_n: usize, max_d: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        proptest::collection::vec(0.0f64..=1.0, n * d)
            .prop_map(move |v| DenseMatrix::from_row_major(n, d, v).unwrap())
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn rows_have_unit_norm(x in unit_rows(20, 8)) {
        let e = hypersphere_embed(&x);
        prop_assert_eq!(e.cols(), 2 * x.cols());
        for row in e.row_iter() {
            prop_assert!((dot(row, row).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_product_depends_on_differences(x in unit_rows(6, 6)) {
        let e = hypersphere_embed(&x);
        let d = x.cols() as f64;
        for i in 0..x.rows() {
            for j in 0..x.rows() {
                let expected: f64 = x.row(i).iter().zip(x.row(j))
                    .map(|(a, b)| (std::f64::consts::PI * (a - b)).cos())
                    .sum::<f64>() / d;
                prop_assert!((dot(e.row(i), e.row(j)) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_is_injective(x in unit_rows(2, 5)) {
        prop_assume!(x.rows() == 2);
        let e = hypersphere_embed(&x);
        let same = e.row(0).iter().zip(e.row(1)).all(|(a, b)| (a - b).abs() < 1e-12);
        if same {
            for (a, b) in x.row(0).iter().zip(x.row(1)) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn scaling_lands_in_unit_cube(n in 2usize..30, d in 1usize..6, seed in any::<u64>(), shift in -50.0f64..50.0, width in 0.1f64..100.0) {
        let raw = latin_hypercube(n, d, Seed(seed));
        let x = DenseMatrix::from_fn(n, d, |i, j| shift + width * raw[(i, j)]);
        let (s, scaler) = minmax_scale(&x, None).unwrap();
        prop_assert!(s.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        for j in 0..d {
            let col = s.column(j);
            prop_assert_eq!(col.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
            prop_assert!((col.iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(scaler.bounds.len(), d);
    }
}

#[test]
fn one_dimensional_inner_product_range() {
    let x = DenseMatrix::column_vector(&[0.0, 1.0, 0.25]);
    let e = hypersphere_embed(&x);
    assert!((dot(e.row(0), e.row(1)) + 1.0).abs() < 1e-15);
    for i in 0..3 {
        for j in 0..3 {
            let v = dot(e.row(i), e.row(j));
            assert!((-1.0 - 1e-15..=1.0 + 1e-15).contains(&v));
        }
    }
}
