//! Deterministic experimental designs and seeded randomness.
//!
//! Every random stream is a ChaCha8 generator seeded from a [`Seed`], so a
//! fixed seed reproduces the same samples on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for a numbered sub-stream (splitmix64 mix).
    pub fn derive(self, stream: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Grid,
    Sobol,
    Lhs,
}

impl std::str::FromStr for DesignKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" | "grid1d" => Ok(Self::Grid),
            "sobol" | "sobol1d" => Ok(Self::Sobol),
            "lhs" => Ok(Self::Lhs),
            other => Err(format!("unknown design {other:?} (expected grid, sobol or lhs)")),
        }
    }
}

impl std::fmt::Display for DesignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Grid => "grid",
            Self::Sobol => "sobol",
            Self::Lhs => "lhs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub kind: DesignKind,
    pub count: usize,
    pub dim: usize,
    pub seed: Seed,
}

impl DesignSpec {
    /// Generates the `count × dim` design.
    pub fn generate(&self) -> Result<DenseMatrix> {
        if self.count == 0 {
            return Err(Error::Empty("design count"));
        }
        match self.kind {
            DesignKind::Grid | DesignKind::Sobol if self.dim != 1 => {
                Err(Error::DimensionMismatch {
                    expected: 1,
                    found: self.dim,
                })
            }
            DesignKind::Grid => Ok(DenseMatrix::column_vector(&grid_1d(self.count))),
            DesignKind::Sobol => Ok(DenseMatrix::column_vector(&sobol_1d(self.count))),
            DesignKind::Lhs => Ok(latin_hypercube(self.count, self.dim, self.seed)),
        }
    }
}

/// `i / n` for `i = 1..=n`.
pub fn grid_1d(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// Base-2 radical inverse of `i`.
#[inline]
pub fn radical_inverse(i: u64) -> f64 {
    // exact: at most 53 significant bits for i < 2^53
    i.reverse_bits() as f64 * (-64f64).exp2()
}

/// First `n` points of the one-dimensional Sobol (van der Corput) sequence,
/// starting at index 1.
pub fn sobol_1d(n: usize) -> Vec<f64> {
    (1..=n as u64).map(radical_inverse).collect()
}

/// Latin hypercube sample of `n` points in `[0, 1]^d`.
///
/// Each column holds one uniformly jittered point per stratum
/// `[k/n, (k+1)/n)`, in a random stratum order.
pub fn latin_hypercube(n: usize, d: usize, seed: Seed) -> DenseMatrix {
    let mut rng = seed.rng();
    let mut out = DenseMatrix::zeros(n, d);
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        strata.shuffle(&mut rng);
        for (i, &k) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            let upper = ((k + 1) as f64 / n as f64).next_down();
            out[(i, j)] = ((k as f64 + u) / n as f64).min(upper);
        }
    }
    out
}

/// `n` i.i.d. `N(0, sd²)` draws.
pub fn gaussian_noise(n: usize, sd: f64, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect()
}

/// Uniform random permutation of `0..n`.
pub fn permutation(n: usize, seed: Seed) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.rng());
    idx
}
