#![allow(dead_code)]

use nngp_core::design::Seed;
use nngp_core::linalg::DenseMatrix;
use rand::Rng;

/// `MᵀM + I` with entries of `M` uniform in [-1, 1].
pub fn random_spd(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let m = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.transpose().matmul(&m).unwrap().with_added_diagonal(1.0)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn to_na(a: &DenseMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    Seed(seed).rng()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Friedman surface written out term by term.
pub fn friedman_reference(x: &[f64]) -> f64 {
    let (x1, x2, x3, x4, x5) = (x[0], x[1], x[2], x[3], x[4]);
    let wave = (std::f64::consts::PI * x1 * x2).sin();
    let bowl = (x3 - 0.5) * (x3 - 0.5);
    10.0 * wave + 20.0 * bowl + 10.0 * x4 + 5.0 * x5
}

/// Borehole flow rate, with inputs ordered r_w, r, T_u, H_u, T_l, H_l, L, K_w.
pub fn borehole_reference(x: &[f64]) -> f64 {
    let [rw, r, tu, hu, tl, hl, l, kw] = x[..8].try_into().unwrap();
    let log_ratio = (r / rw).ln();
    let numerator = 2.0 * std::f64::consts::PI * tu * (hu - hl);
    let leakage = 2.0 * l * tu / (log_ratio * rw.powi(2) * kw);
    numerator / (log_ratio * (1.0 + leakage + tu / tl))
}
