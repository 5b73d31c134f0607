//! Min-max scaling and the unit-hypersphere embedding used before applying
//! the NNGP kernel.
//!
//! Each coordinate `x` in `[0, 1]` becomes the pair `(cos πx, sin πx)`; the
//! resulting `2d` row is then divided by its norm (always `√d`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: DenseMatrix,
    pub responses: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: DenseMatrix, responses: Vec<f64>) -> Result<Self> {
        if inputs.rows() != responses.len() {
            return Err(Error::LengthMismatch {
                left: inputs.rows(),
                right: responses.len(),
            });
        }
        if let Some(i) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { inputs, responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            inputs: self.inputs.select_rows(indices),
            responses: indices.iter().map(|&i| self.responses[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    pub inputs: DenseMatrix,
    pub responses: Vec<f64>,
    pub source_dim: usize,
}

impl EmbeddedDataset {
    /// Scales with already-fitted bounds and embeds.
    pub fn from_dataset(data: &Dataset, scaler: &MinMaxScaler) -> Result<Self> {
        Ok(Self {
            inputs: hypersphere_embed(&scaler.transform(&data.inputs)?),
            responses: data.responses.clone(),
            source_dim: data.dim(),
        })
    }
}

/// Per-column affine map onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub bounds: Vec<(f64, f64)>,
}

impl MinMaxScaler {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            if !(hi > lo) {
                return Err(Error::DegenerateColumn(j));
            }
        }
        Ok(Self { bounds })
    }

    /// Fits bounds to the column ranges of `x`.
    pub fn fit(x: &DenseMatrix) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::Empty("training inputs"));
        }
        let bounds = (0..x.cols())
            .map(|j| {
                x.row_iter()
                    .map(|r| r[j])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    })
            })
            .collect();
        Self::new(bounds)
    }

    /// Maps each column into `[0, 1]`, clipping values outside the bounds.
    pub fn transform(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.rows() > 0 && x.cols() != self.bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.len(),
                found: x.cols(),
            });
        }
        Ok(DenseMatrix::from_fn(x.rows(), self.bounds.len(), |i, j| {
            let (lo, hi) = self.bounds[j];
            ((x[(i, j)] - lo) / (hi - lo)).clamp(0.0, 1.0)
        }))
    }
}

/// Scales `x` into `[0, 1]^d`. With `bounds = None` they are fitted from `x`.
pub fn minmax_scale(
    x: &DenseMatrix,
    bounds: Option<&[(f64, f64)]>,
) -> Result<(DenseMatrix, MinMaxScaler)> {
    let scaler = match bounds {
        Some(b) => MinMaxScaler::new(b.to_vec())?,
        None => MinMaxScaler::fit(x)?,
    };
    Ok((scaler.transform(x)?, scaler))
}

/// Embeds rows of `x ∈ [0,1]^d` onto the unit sphere in `R^{2d}`.
pub fn hypersphere_embed(x: &DenseMatrix) -> DenseMatrix {
    let d = x.cols();
    let norm = (d as f64).sqrt();
    let mut out = DenseMatrix::zeros(x.rows(), 2 * d);
    for i in 0..x.rows() {
        let src = x.row(i);
        let dst = out.row_mut(i);
        for (j, &v) in src.iter().enumerate() {
            let (s, c) = (PI * v).sin_cos();
            dst[2 * j] = c / norm;
            dst[2 * j + 1] = s / norm;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col(v: &[f64]) -> DenseMatrix {
        DenseMatrix::column_vector(v)
    }

    #[test]
    fn minmax_affine() {
        let (s, sc) = minmax_scale(&col(&[0.0, 5.0, 10.0]), None).unwrap();
        assert_eq!(s.as_slice(), &[0.0, 0.5, 1.0]);
        assert_eq!(sc.bounds, vec![(0.0, 10.0)]);
    }

    #[test]
    fn minmax_identity_bounds() {
        let x = col(&[0.0, 0.3, 1.0]);
        let (s, _) = minmax_scale(&x, Some(&[(0.0, 1.0)])).unwrap();
        assert_eq!(s, x);
    }

    #[test]
    fn minmax_constant_column() {
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 2.0]]).unwrap();
        assert_eq!(minmax_scale(&x, None), Err(Error::DegenerateColumn(1)));
    }

    #[test]
    fn minmax_clips_test_data() {
        let sc = MinMaxScaler::fit(&col(&[0.0, 10.0])).unwrap();
        let t = sc.transform(&col(&[-5.0, 15.0, 2.5])).unwrap();
        assert_eq!(t.as_slice(), &[0.0, 1.0, 0.25]);
    }

    #[test]
    fn embed_examples() {
        let e = hypersphere_embed(&col(&[0.5]));
        assert_abs_diff_eq!(e[(0, 0)], 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(e[(0, 1)], 1.0);
        let e = hypersphere_embed(&col(&[0.0]));
        assert_eq!(e.row(0), &[1.0, 0.0]);
        let e = hypersphere_embed(&DenseMatrix::from_rows(&[[0.0, 0.0]]).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e[(0, 0)], h, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(0, 1)], 0.0);
        assert_abs_diff_eq!(e[(0, 2)], h, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(0, 3)], 0.0);
    }

    #[test]
    fn dataset_rejects_mismatch() {
        assert!(matches!(
            Dataset::new(col(&[1.0, 2.0]), vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
