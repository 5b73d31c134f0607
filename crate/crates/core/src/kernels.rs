//! Matérn and NNGP (infinite-width ReLU network) kernels.
//!
//! The Matérn family is restricted to the half-integer smoothness values
//! with closed forms plus the squared-exponential limit, evaluated on the
//! unsquared Euclidean distance. The NNGP kernel is computed by the layer
//! recursion through the ReLU dual activation and is only ever evaluated
//! as a full Gram matrix, since every level needs the diagonal terms of
//! the previous one.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, min_offdiag_correlation_gap, DenseMatrix};

/// Half-integer Matérn smoothness values with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothness {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "3/2")]
    ThreeHalves,
    #[serde(rename = "5/2")]
    FiveHalves,
    /// The squared-exponential limit.
    #[serde(rename = "inf")]
    Infinite,
}

impl Smoothness {
    pub const ALL: [Smoothness; 4] = [
        Smoothness::Half,
        Smoothness::ThreeHalves,
        Smoothness::FiveHalves,
        Smoothness::Infinite,
    ];

    pub fn from_nu(nu: f64) -> Result<Self> {
        match nu {
            x if x == 0.5 => Ok(Self::Half),
            x if x == 1.5 => Ok(Self::ThreeHalves),
            x if x == 2.5 => Ok(Self::FiveHalves),
            x if x == f64::INFINITY => Ok(Self::Infinite),
            other => Err(Error::UnsupportedSmoothness(other)),
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::ThreeHalves => 1.5,
            Self::FiveHalves => 2.5,
            Self::Infinite => f64::INFINITY,
        }
    }

    /// Unit-variance correlation at scaled distance `r = d / rho`.
    #[inline]
    pub fn correlation(self, r: f64) -> f64 {
        match self {
            Self::Half => (-r).exp(),
            Self::ThreeHalves => {
                let s = 3f64.sqrt() * r;
                (1.0 + s) * (-s).exp()
            }
            Self::FiveHalves => {
                let s = 5f64.sqrt() * r;
                (1.0 + s + s * s / 3.0) * (-s).exp()
            }
            Self::Infinite => (-0.5 * r * r).exp(),
        }
    }
}

/// Accepts `1/2`, `3/2`, `5/2`, `inf` or the decimal values.
impl std::str::FromStr for Smoothness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/2" => Ok(Self::Half),
            "3/2" => Ok(Self::ThreeHalves),
            "5/2" => Ok(Self::FiveHalves),
            "inf" | "infinity" | "rbf" => Ok(Self::Infinite),
            other => {
                let nu: f64 = other.parse().map_err(|_| Error::InvalidParameter {
                    name: "nu",
                    value: f64::NAN,
                })?;
                Self::from_nu(nu)
            }
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Half => "1/2",
            Self::ThreeHalves => "3/2",
            Self::FiveHalves => "5/2",
            Self::Infinite => "inf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    Matern {
        nu: Smoothness,
        rho: f64,
        sigma2: f64,
    },
    Nngp {
        depth: usize,
        sigma_a: f64,
        sigma_b: f64,
        input_dim: usize,
    },
}

impl KernelSpec {
    pub fn matern(nu: f64, rho: f64, sigma2: f64) -> Result<Self> {
        let spec = Self::Matern {
            nu: Smoothness::from_nu(nu)?,
            rho,
            sigma2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn nngp(depth: usize, sigma_a: f64, sigma_b: f64, input_dim: usize) -> Result<Self> {
        let spec = Self::Nngp {
            depth,
            sigma_a,
            sigma_b,
            input_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v })
            }
        };
        match *self {
            Self::Matern { rho, sigma2, .. } => {
                positive("rho", rho)?;
                positive("sigma2", sigma2)
            }
            Self::Nngp {
                depth,
                sigma_a,
                sigma_b,
                input_dim,
            } => {
                positive("depth", depth as f64)?;
                positive("input_dim", input_dim as f64)?;
                positive("sigma_a", sigma_a)?;
                if sigma_b >= 0.0 && sigma_b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "sigma_b",
                        value: sigma_b,
                    })
                }
            }
        }
    }

    pub fn is_nngp(&self) -> bool {
        matches!(self, Self::Nngp { .. })
    }

    /// Gram matrix over a single point set.
    pub fn gram(&self, x: &DenseMatrix) -> Result<KernelMatrix> {
        match self {
            Self::Matern { .. } => matern_gram(x, x, self).map(|values| KernelMatrix {
                values,
                spec: *self,
            }),
            Self::Nngp { .. } => nngp_gram(x, self),
        }
    }

    /// Training, cross and test blocks for prediction at `test`.
    ///
    /// For the NNGP kernel the recursion runs over the union of both point
    /// sets and the blocks are sliced out of the joint matrix.
    pub fn blocks(&self, train: &DenseMatrix, test: &DenseMatrix) -> Result<KernelBlocks> {
        let n = train.rows();
        let m = test.rows();
        match self {
            Self::Matern { .. } => Ok(KernelBlocks {
                train: self.gram(train)?,
                cross: matern_gram(test, train, self)?,
                test: self.gram(test)?,
            }),
            Self::Nngp { .. } => {
                let joint = nngp_gram(&train.vstack(test)?, self)?;
                let v = &joint.values;
                Ok(KernelBlocks {
                    train: KernelMatrix {
                        values: v.block(0, 0, n, n),
                        spec: *self,
                    },
                    cross: v.block(n, 0, m, n),
                    test: KernelMatrix {
                        values: v.block(n, n, m, m),
                        spec: *self,
                    },
                })
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Matern { nu, rho, sigma2 } => {
                write!(f, "Matern(nu={nu}, rho={rho}, sigma2={sigma2})")
            }
            Self::Nngp {
                depth,
                sigma_a,
                sigma_b,
                input_dim,
            } => write!(
                f,
                "NNGP(depth={depth}, sigma_a={sigma_a}, sigma_b={sigma_b}, input_dim={input_dim})"
            ),
        }
    }
}

/// A symmetric kernel matrix together with the spec that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: DenseMatrix,
    pub spec: KernelSpec,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.values.rows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBlocks {
    /// `K_ff`, n×n.
    pub train: KernelMatrix,
    /// `K_*f`, m×n.
    pub cross: DenseMatrix,
    /// `K_**`, m×m.
    pub test: KernelMatrix,
}

fn check_matern(nu: f64, rho: f64, sigma2: f64) -> Result<Smoothness> {
    let s = Smoothness::from_nu(nu)?;
    KernelSpec::Matern {
        nu: s,
        rho,
        sigma2,
    }
    .validate()?;
    Ok(s)
}

#[inline]
fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Matérn covariance between two points.
pub fn matern(x: &[f64], y: &[f64], nu: f64, rho: f64, sigma2: f64) -> Result<f64> {
    let s = check_matern(nu, rho, sigma2)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(sigma2 * s.correlation(euclidean(x, y) / rho))
}

/// Pairwise Euclidean distances between the rows of `x` and `y`.
pub fn pairwise_distances(x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows() > 0 && y.rows() > 0 && x.cols() != y.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: y.cols(),
        });
    }
    Ok(DenseMatrix::from_fn(x.rows(), y.rows(), |i, j| {
        euclidean(x.row(i), y.row(j))
    }))
}

/// Applies a Matérn spec to a precomputed distance matrix.
pub fn matern_from_distances(distances: &DenseMatrix, spec: &KernelSpec) -> Result<DenseMatrix> {
    match *spec {
        KernelSpec::Matern { nu, rho, sigma2 } => {
            spec.validate()?;
            Ok(DenseMatrix::from_fn(
                distances.rows(),
                distances.cols(),
                |i, j| sigma2 * nu.correlation(distances[(i, j)] / rho),
            ))
        }
        KernelSpec::Nngp { .. } => Err(Error::InvalidParameter {
            name: "family",
            value: f64::NAN,
        }),
    }
}

/// Matérn cross-covariance matrix, entry `(i, j) = k(x_i, y_j)`.
pub fn matern_gram(x: &DenseMatrix, y: &DenseMatrix, spec: &KernelSpec) -> Result<DenseMatrix> {
    matern_from_distances(&pairwise_distances(x, y)?, spec)
}

#[inline]
fn relu_angle(kxx: f64, kxy: f64, kyy: f64) -> Result<(f64, f64)> {
    if !(kxx > 0.0 && kyy > 0.0) {
        return Err(Error::NonPositiveVariance { kxx, kyy });
    }
    let norm = (kxx * kyy).sqrt();
    let cos = (kxy / norm).clamp(-1.0, 1.0);
    Ok((norm, cos.acos()))
}

/// ReLU dual activation: the covariance of `relu(u), relu(v)` for centred
/// Gaussians with covariance `[[kxx, kxy], [kxy, kyy]]`.
pub fn relu_dual(kxx: f64, kxy: f64, kyy: f64) -> Result<f64> {
    let (norm, c) = relu_angle(kxx, kxy, kyy)?;
    Ok(norm / (2.0 * PI) * (c.sin() + (PI - c) * c.cos()))
}

/// Dual of the ReLU derivative (the step function).
pub fn relu_dual_derivative(kxx: f64, kxy: f64, kyy: f64) -> Result<f64> {
    let (_, c) = relu_angle(kxx, kxy, kyy)?;
    Ok((PI - c) / (2.0 * PI))
}

/// NNGP Gram matrix `Σ^M` over the rows of `x`.
pub fn nngp_gram(x: &DenseMatrix, spec: &KernelSpec) -> Result<KernelMatrix> {
    let KernelSpec::Nngp {
        depth,
        sigma_a,
        sigma_b,
        input_dim,
    } = *spec
    else {
        return Err(Error::InvalidParameter {
            name: "family",
            value: f64::NAN,
        });
    };
    spec.validate()?;
    if x.cols() != input_dim {
        return Err(Error::DimensionMismatch {
            expected: input_dim,
            found: x.cols(),
        });
    }
    let p = x.rows();
    let wa = sigma_a * sigma_a;
    let wb = sigma_b * sigma_b;

    let mut k = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let dot: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| a * b).sum();
            let v = wa / input_dim as f64 * dot + wb;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }

    let mut next = DenseMatrix::zeros(p, p);
    for _ in 1..depth {
        let diag = k.diagonal();
        for i in 0..p {
            for j in 0..=i {
                let v = wa * relu_dual(diag[i], k[(i, j)], diag[j])? + wb;
                next[(i, j)] = v;
                next[(j, i)] = v;
            }
        }
        std::mem::swap(&mut k, &mut next);
    }
    Ok(KernelMatrix {
        values: k,
        spec: *spec,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub spec: KernelSpec,
    pub is_positive_definite: bool,
    pub is_flat: bool,
    pub min_correlation_gap: f64,
    /// 1-based Cholesky pivot at which factoring failed.
    pub failure_pivot: Option<usize>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.is_positive_definite && !self.is_flat
    }
}

/// Checks one kernel matrix: Cholesky of `K + nugget I` and the flatness gap.
pub fn check_validity(gram: &KernelMatrix, nugget: f64, eps_flat: f64) -> ValidityReport {
    let (is_positive_definite, failure_pivot) =
        match cholesky(&gram.values.with_added_diagonal(nugget)) {
            Ok(_) => (true, None),
            Err(Error::NotPositiveDefinite { pivot, .. }) => (false, Some(pivot)),
            Err(_) => (false, None),
        };
    let gap = min_offdiag_correlation_gap(&gram.values).unwrap_or(f64::NAN);
    ValidityReport {
        spec: gram.spec,
        is_positive_definite,
        is_flat: gap <= eps_flat,
        min_correlation_gap: gap,
        failure_pivot,
    }
}

/// Evaluates every spec of an NNGP grid on the same point set.
///
/// Failures are recorded per cell; results follow the grid order.
pub fn validity_scan(
    grid: &[KernelSpec],
    x: &DenseMatrix,
    nugget: f64,
    eps_flat: f64,
) -> Vec<ValidityReport> {
    grid.iter()
        .map(|spec| match spec.gram(x) {
            Ok(gram) => check_validity(&gram, nugget, eps_flat),
            Err(_) => ValidityReport {
                spec: *spec,
                is_positive_definite: false,
                is_flat: false,
                min_correlation_gap: f64::NAN,
                failure_pivot: None,
            },
        })
        .collect()
}

/// `count` evenly spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `count` log-spaced values on `[lo, hi]`, both positive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(lo.ln(), hi.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect();
    // keep the endpoints exact
    if let Some(first) = v.first_mut() {
        *first = lo;
    }
    if count > 1 {
        v[count - 1] = hi;
    }
    v
}

/// Row-major `(sigma_a, sigma_b)` grid of NNGP specs: sigma_a varies slowest.
pub fn nngp_grid(
    depth: usize,
    sigma_a: &[f64],
    sigma_b: &[f64],
    input_dim: usize,
) -> Result<Vec<KernelSpec>> {
    let mut out = Vec::with_capacity(sigma_a.len() * sigma_b.len());
    for &a in sigma_a {
        for &b in sigma_b {
            out.push(KernelSpec::nngp(depth, a, b, input_dim)?);
        }
    }
    Ok(out)
}

/// Matérn grid over smoothness values and length scales, unit variance.
pub fn matern_grid(nus: &[Smoothness], rhos: &[f64]) -> Result<Vec<KernelSpec>> {
    let mut out = Vec::with_capacity(nus.len() * rhos.len());
    for &nu in nus {
        for &rho in rhos {
            let spec = KernelSpec::Matern {
                nu,
                rho,
                sigma2: 1.0,
            };
            spec.validate()?;
            out.push(spec);
        }
    }
    Ok(out)
}
