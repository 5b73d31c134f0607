//! Zero-mean Gaussian-process regression through kriging weights, with an
//! optional least-squares linear trend removed beforehand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelMatrix, KernelSpec};
use crate::linalg::{cholesky, DenseMatrix};

/// Nugget used whenever no other value is configured.
pub const DEFAULT_NUGGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    #[default]
    None,
    Linear,
}

impl std::str::FromStr for Trend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "linear" => Ok(Self::Linear),
            other => Err(format!("unknown trend {other:?} (expected none or linear)")),
        }
    }
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub kernel: KernelSpec,
    /// Noise variance relative to the kernel scale.
    pub nugget: f64,
    pub trend: Trend,
}

impl GpConfig {
    pub fn new(kernel: KernelSpec, nugget: f64, trend: Trend) -> Result<Self> {
        kernel.validate()?;
        if !(nugget >= 0.0 && nugget.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nugget",
                value: nugget,
            });
        }
        Ok(Self {
            kernel,
            nugget,
            trend,
        })
    }
}

/// The m×n matrix `H = K_*f (K_ff + τ²I)⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrigingWeights {
    pub weights: DenseMatrix,
}

impl KrigingWeights {
    pub fn train_count(&self) -> usize {
        self.weights.cols()
    }

    pub fn test_count(&self) -> usize {
        self.weights.rows()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.weights.shape()
    }

    /// Predictions `H y`.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.weights.matvec(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mean: Vec<f64>,
    pub covariance: DenseMatrix,
}

impl PosteriorSummary {
    /// Pointwise standard deviations, with roundoff negatives clamped to 0.
    pub fn std_dev(&self) -> Vec<f64> {
        self.covariance
            .diagonal()
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }
}

fn check_shapes(kff: &DenseMatrix, kstar_f: &DenseMatrix) -> Result<()> {
    if !kff.is_square() {
        return Err(Error::NotSquare {
            rows: kff.rows(),
            cols: kff.cols(),
        });
    }
    if kstar_f.cols() != kff.rows() {
        return Err(Error::ShapeMismatch {
            expected: (kstar_f.rows(), kff.rows()),
            found: kstar_f.shape(),
        });
    }
    Ok(())
}

/// Computes `H = K_*f (K_ff + τ²I)⁻¹` through a Cholesky solve.
pub fn kriging_weights(
    kff: &KernelMatrix,
    kstar_f: &DenseMatrix,
    nugget: f64,
) -> Result<KrigingWeights> {
    kriging_weights_dense(&kff.values, kstar_f, nugget)
}

pub fn kriging_weights_dense(
    kff: &DenseMatrix,
    kstar_f: &DenseMatrix,
    nugget: f64,
) -> Result<KrigingWeights> {
    check_shapes(kff, kstar_f)?;
    let factor = cholesky(&kff.with_added_diagonal(nugget))?;
    // (K + τ²I) Hᵀ = K_f*
    let ht = factor.solve(&kstar_f.transpose())?;
    Ok(KrigingWeights {
        weights: ht.transpose(),
    })
}

/// Posterior mean `H y` and covariance `K_** - H K_f*`.
pub fn posterior(
    kff: &KernelMatrix,
    kstar_f: &DenseMatrix,
    kss: &KernelMatrix,
    y: &[f64],
    nugget: f64,
) -> Result<PosteriorSummary> {
    let m = kstar_f.rows();
    if kss.values.shape() != (m, m) {
        return Err(Error::ShapeMismatch {
            expected: (m, m),
            found: kss.values.shape(),
        });
    }
    if y.len() != kff.dim() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: kff.dim(),
        });
    }
    let h = kriging_weights(kff, kstar_f, nugget)?;
    let mean = h.apply(y)?;
    let explained = h.weights.matmul(&kstar_f.transpose())?;
    let mut covariance = kss.values.sub(&explained)?;
    for i in 0..m {
        for j in 0..i {
            let avg = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
            covariance[(i, j)] = avg;
            covariance[(j, i)] = avg;
        }
    }
    Ok(PosteriorSummary { mean, covariance })
}

/// Ordinary least-squares fit of `y ≈ β₀ + X β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendModel {
    /// Intercept first, then one coefficient per input column.
    pub coefficients: Vec<f64>,
}

impl TrendModel {
    /// A trend that predicts zero everywhere.
    pub fn zero(dim: usize) -> Self {
        Self {
            coefficients: vec![0.0; dim + 1],
        }
    }

    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        if x.rows() > 0 && x.cols() + 1 != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len() - 1,
                found: x.cols(),
            });
        }
        Ok(x.row_iter()
            .map(|r| {
                self.coefficients[0]
                    + r.iter()
                        .zip(&self.coefficients[1..])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            })
            .collect())
    }
}

/// Fits a linear trend by Householder QR and returns it with the residuals.
///
/// Input columns that are identically zero carry no information and get a
/// zero coefficient; any other rank deficiency is an error.
pub fn fit_trend(x: &DenseMatrix, y: &[f64]) -> Result<(TrendModel, Vec<f64>)> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    let mut active = vec![0usize]; // design column 0 is the intercept
    let mut columns = vec![vec![1.0; n]];
    for j in 0..x.cols() {
        let c = x.column(j);
        if c.iter().any(|&v| v != 0.0) {
            active.push(j + 1);
            columns.push(c);
        }
    }
    let beta = householder_lstsq(columns, y.to_vec())?;
    let mut coefficients = vec![0.0; x.cols() + 1];
    for (&j, b) in active.iter().zip(beta) {
        coefficients[j] = b;
    }
    let model = TrendModel { coefficients };
    let fitted = model.predict(x)?;
    let residuals = y.iter().zip(fitted).map(|(a, b)| a - b).collect();
    Ok((model, residuals))
}

const RANK_TOL: f64 = 1e-10;

fn householder_lstsq(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let p = a.len();
    if n < p {
        return Err(Error::RankDeficientDesign);
    }
    let col_norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut diag = vec![0.0; p];
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_TOL * col_norms[k] {
            return Err(Error::RankDeficientDesign);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place of column k
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            let reflect = |target: &mut [f64]| {
                let dot: f64 = v.iter().zip(target.iter()).map(|(s, t)| s * t).sum();
                let f = 2.0 * dot / vnorm2;
                for (t, s) in target.iter_mut().zip(&v) {
                    *t -= f * s;
                }
            };
            for col in a.iter_mut().skip(k + 1) {
                reflect(&mut col[k..]);
            }
            reflect(&mut b[k..]);
        }
    }
    // R β = (Qᵀ b)[..p]
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let s: f64 = ((k + 1)..p).map(|j| a[j][k] * beta[j]).sum();
        beta[k] = (b[k] - s) / diag[k];
    }
    Ok(beta)
}
