//! Accuracy and kriging-weight comparison statistics over a grid of kernel
//! hyperparameters.
//!
//! Weight differences (`*diff`) are entrywise statistics of
//! `|H_θ̃ - H_ref|` where `θ̃` minimizes the largest entrywise difference.
//! Weight spread (`*kw`) summarizes, over the grid, the per-setting scalar
//! `max |H_θ - H̄|` where `H̄` is the entrywise mean over valid settings.
//! Standard deviations are sample standard deviations (`n - 1`), taken as
//! 0 for a single value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::KrigingWeights;
use crate::kernels::KernelSpec;
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaStatus {
    Ok,
    Invalid,
}

/// Ordered hyperparameter settings of a single kernel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub specs: Vec<KernelSpec>,
    pub status: Vec<ThetaStatus>,
}

impl ThetaGrid {
    pub fn new(specs: Vec<KernelSpec>) -> Result<Self> {
        let first = specs.first().ok_or(Error::Empty("theta grid"))?;
        if specs.iter().any(|s| s.is_nngp() != first.is_nngp()) {
            return Err(Error::InvalidParameter {
                name: "mixed kernel families",
                value: f64::NAN,
            });
        }
        let status = vec![ThetaStatus::Ok; specs.len()];
        Ok(Self { specs, status })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn mark_invalid(&mut self, index: usize) {
        self.status[index] = ThetaStatus::Invalid;
    }

    pub fn valid_count(&self) -> usize {
        self.status.iter().filter(|s| **s == ThetaStatus::Ok).count()
    }
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::Empty("rmse input"));
    }
    let ss: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((ss / pred.len() as f64).sqrt())
}

fn mean_and_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Mean and sample standard deviation of a slice.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    mean_and_sd(values.iter().copied())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmseExtrema {
    pub min_rmse: f64,
    pub max_rmse: f64,
    pub best_index: usize,
    pub best_theta: KernelSpec,
}

/// Best and worst test RMSE over the valid settings of a grid.
///
/// Predictions are `H_θ y_train + offset`, where `offset` re-adds any trend
/// removed before kriging (pass zeros otherwise).
pub fn rmse_extrema(
    grid: &ThetaGrid,
    weights: &[Option<KrigingWeights>],
    y_train: &[f64],
    offset: &[f64],
    truth: &[f64],
) -> Result<RmseExtrema> {
    if weights.len() != grid.len() {
        return Err(Error::LengthMismatch {
            left: grid.len(),
            right: weights.len(),
        });
    }
    let mut tracker = RmseTracker::default();
    for (i, (status, h)) in grid.status.iter().zip(weights).enumerate() {
        let (ThetaStatus::Ok, Some(h)) = (status, h) else {
            continue;
        };
        let pred = h.apply(y_train)?;
        if pred.len() != offset.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: offset.len(),
            });
        }
        let pred: Vec<f64> = pred.iter().zip(offset).map(|(p, o)| p + o).collect();
        tracker.push(i, rmse(&pred, truth)?);
    }
    tracker.finish(grid)
}

/// Running min/max of RMSE values indexed by grid position.
#[derive(Debug, Clone, Default)]
pub struct RmseTracker {
    best: Option<(usize, f64)>,
    worst: Option<f64>,
}

impl RmseTracker {
    pub fn push(&mut self, index: usize, value: f64) {
        // NaN never wins the minimum but does poison the maximum
        if self.best.is_none_or(|(_, b)| value < b) {
            self.best = Some((index, value));
        }
        self.worst = Some(match self.worst {
            Some(w) if !(value > w) && !value.is_nan() => w,
            _ => value,
        });
    }

    pub fn finish(&self, grid: &ThetaGrid) -> Result<RmseExtrema> {
        let ((best_index, min_rmse), max_rmse) = self.best.zip(self.worst).ok_or(Error::AllThetaInvalid)?;
        Ok(RmseExtrema {
            min_rmse,
            max_rmse,
            best_index,
            best_theta: grid.specs[best_index],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDiffStats {
    pub theta_index: usize,
    pub maxdiff: f64,
    pub mindiff: f64,
    pub meandiff: f64,
    pub sddiff: f64,
}

/// Streaming selection of the setting closest (in max-abs) to a reference.
#[derive(Debug, Clone)]
pub struct DiffTracker<'a> {
    reference: &'a DenseMatrix,
    best: Option<WeightDiffStats>,
}

impl<'a> DiffTracker<'a> {
    pub fn new(reference: &'a KrigingWeights) -> Self {
        Self {
            reference: &reference.weights,
            best: None,
        }
    }

    pub fn push(&mut self, index: usize, h: &KrigingWeights) -> Result<()> {
        if h.shape() != self.reference.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.reference.shape(),
                found: h.shape(),
            });
        }
        let diffs = || {
            h.weights
                .as_slice()
                .iter()
                .zip(self.reference.as_slice())
                .map(|(a, b)| (a - b).abs())
        };
        let maxdiff = diffs().fold(0.0, f64::max);
        if self.best.is_some_and(|b| !(maxdiff < b.maxdiff)) {
            return Ok(());
        }
        let mindiff = diffs().fold(f64::INFINITY, f64::min);
        let (meandiff, sddiff) = mean_and_sd(diffs());
        self.best = Some(WeightDiffStats {
            theta_index: index,
            maxdiff,
            mindiff,
            meandiff,
            sddiff,
        });
        Ok(())
    }

    pub fn finish(self) -> Result<WeightDiffStats> {
        self.best.ok_or(Error::AllThetaInvalid)
    }
}

/// Difference statistics between a reference weight matrix and the grid
/// setting that minimizes the largest entrywise difference. `None` entries
/// (invalid settings) are skipped.
pub fn weight_diff_stats(
    h_ref: &KrigingWeights,
    weights: &[Option<KrigingWeights>],
) -> Result<WeightDiffStats> {
    let mut tracker = DiffTracker::new(h_ref);
    for (i, h) in weights.iter().enumerate() {
        if let Some(h) = h {
            tracker.push(i, h)?;
        }
    }
    tracker.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KwSpreadStats {
    pub maxkw: f64,
    pub minkw: f64,
    pub meankw: f64,
    pub sdkw: f64,
}

impl KwSpreadStats {
    pub const ZERO: KwSpreadStats = KwSpreadStats {
        maxkw: 0.0,
        minkw: 0.0,
        meankw: 0.0,
        sdkw: 0.0,
    };
}

/// Two-pass accumulator for the weight spread: first the entrywise mean,
/// then each setting's largest deviation from it.
#[derive(Debug, Clone)]
pub struct SpreadAccumulator {
    sum: Option<DenseMatrix>,
    count: usize,
    mean: Option<DenseMatrix>,
    deviations: Vec<f64>,
}

impl Default for SpreadAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl SpreadAccumulator {
    pub fn new() -> Self {
        Self {
            sum: None,
            count: 0,
            mean: None,
            deviations: Vec::new(),
        }
    }

    /// First pass: accumulate one valid setting into the mean.
    pub fn add(&mut self, h: &KrigingWeights) -> Result<()> {
        match &mut self.sum {
            None => self.sum = Some(h.weights.clone()),
            Some(sum) => {
                if sum.shape() != h.shape() {
                    return Err(Error::ShapeMismatch {
                        expected: sum.shape(),
                        found: h.shape(),
                    });
                }
                *sum = DenseMatrix::from_fn(sum.rows(), sum.cols(), |i, j| {
                    sum[(i, j)] + h.weights[(i, j)]
                });
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Second pass: record `max |H_θ - H̄|` for one setting.
    pub fn push_deviation(&mut self, h: &KrigingWeights) -> Result<f64> {
        if self.mean.is_none() {
            let sum = self.sum.as_ref().ok_or(Error::InsufficientThetas(0))?;
            self.mean = Some(sum.scaled(1.0 / self.count as f64));
        }
        let mean = self.mean.as_ref().expect("mean set above");
        if mean.shape() != h.shape() {
            return Err(Error::ShapeMismatch {
                expected: mean.shape(),
                found: h.shape(),
            });
        }
        let dev = mean
            .as_slice()
            .iter()
            .zip(h.weights.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.deviations.push(dev);
        Ok(dev)
    }

    pub fn finish(&self) -> Result<KwSpreadStats> {
        if self.deviations.len() < 2 {
            return Err(Error::InsufficientThetas(self.deviations.len()));
        }
        let (meankw, sdkw) = summarize(&self.deviations);
        Ok(KwSpreadStats {
            maxkw: self.deviations.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            minkw: self.deviations.iter().copied().fold(f64::INFINITY, f64::min),
            meankw,
            sdkw,
        })
    }
}

/// Spread of kriging weights over the valid settings of a grid.
pub fn kw_spread_stats(weights: &[Option<KrigingWeights>]) -> Result<KwSpreadStats> {
    let valid: Vec<&KrigingWeights> = weights.iter().flatten().collect();
    if valid.len() < 2 {
        return Err(Error::InsufficientThetas(valid.len()));
    }
    let mut acc = SpreadAccumulator::new();
    for h in &valid {
        acc.add(h)?;
    }
    for h in &valid {
        acc.push_deviation(h)?;
    }
    acc.finish()
}

/// The full set of comparison statistics for one kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    #[serde(rename = "minRMSE")]
    pub min_rmse: f64,
    #[serde(rename = "maxRMSE")]
    pub max_rmse: f64,
    pub maxdiff: f64,
    pub mindiff: f64,
    pub meandiff: f64,
    pub sddiff: f64,
    pub maxkw: f64,
    pub minkw: f64,
    pub meankw: f64,
    pub sdkw: f64,
    pub best_theta: KernelSpec,
    pub theta_tilde: KernelSpec,
}

impl ComparisonStats {
    pub const NAMES: [&'static str; 10] = [
        "minRMSE", "maxRMSE", "maxdiff", "mindiff", "meandiff", "sddiff", "maxkw", "minkw",
        "meankw", "sdkw",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.min_rmse,
            self.max_rmse,
            self.maxdiff,
            self.mindiff,
            self.meandiff,
            self.sddiff,
            self.maxkw,
            self.minkw,
            self.meankw,
            self.sdkw,
        ]
    }
}
