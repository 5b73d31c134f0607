//! End-to-end studies: hyperparameter validity scans, the 1-D kriging-weight
//! comparison between NNGP and Matérn 3/2, and the benchmark pipeline that
//! compares three kernel arms on a benchmark case.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bench::{make_case, BenchmarkCase, CaseData};
use crate::design::{DesignKind, DesignSpec, Seed};
use crate::embed::{hypersphere_embed, MinMaxScaler};
use crate::error::{Error, Result};
use crate::gp::{fit_trend, kriging_weights_dense, KrigingWeights, Trend, TrendModel};
use crate::kernels::{
    linspace, logspace, matern_from_distances, matern_grid, nngp_grid, pairwise_distances,
    validity_scan, KernelSpec, Smoothness,
};
use crate::linalg::{DenseMatrix, DEFAULT_EPS_FLAT};
use crate::stats::{
    rmse, summarize, ComparisonStats, DiffTracker, KwSpreadStats, RmseTracker,
    SpreadAccumulator, ThetaGrid,
};

// ---------------------------------------------------------------------------
// validity scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityScanConfig {
    pub depths: Vec<usize>,
    pub grid_res: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Number of 1-D grid points the kernel is evaluated on.
    pub n: usize,
    pub nugget: f64,
    pub eps_flat: f64,
}

impl Default for ValidityScanConfig {
    fn default() -> Self {
        Self {
            depths: vec![2, 5, 10, 20],
            grid_res: 20,
            sigma_min: 0.1,
            sigma_max: 2.0,
            n: 50,
            nugget: crate::gp::DEFAULT_NUGGET,
            eps_flat: DEFAULT_EPS_FLAT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityCell {
    pub depth: usize,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub is_pd: bool,
    pub is_flat: bool,
    pub min_gap: f64,
}

impl ValidityCell {
    pub fn is_valid(&self) -> bool {
        self.is_pd && !self.is_flat
    }
}

/// Embedded 1-D grid on `(0, 1]`.
pub fn embedded_grid(n: usize) -> DenseMatrix {
    hypersphere_embed(&DenseMatrix::column_vector(&crate::design::grid_1d(n)))
}

pub fn scan_validity(cfg: &ValidityScanConfig) -> Result<Vec<ValidityCell>> {
    if cfg.grid_res < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_res",
            value: cfg.grid_res as f64,
        });
    }
    if cfg.depths.is_empty() {
        return Err(Error::Empty("depths"));
    }
    if cfg.n == 0 {
        return Err(Error::Empty("n"));
    }
    let x = embedded_grid(cfg.n);
    let sigmas = linspace(cfg.sigma_min, cfg.sigma_max, cfg.grid_res);
    let mut out = Vec::with_capacity(cfg.depths.len() * sigmas.len() * sigmas.len());
    for &depth in &cfg.depths {
        let grid = nngp_grid(depth, &sigmas, &sigmas, x.cols())?;
        for r in validity_scan(&grid, &x, cfg.nugget, cfg.eps_flat) {
            let KernelSpec::Nngp {
                sigma_a, sigma_b, ..
            } = r.spec
            else {
                unreachable!("nngp grid")
            };
            out.push(ValidityCell {
                depth,
                sigma_a,
                sigma_b,
                is_pd: r.is_positive_definite,
                is_flat: r.is_flat,
                min_gap: r.min_correlation_gap,
            });
        }
    }
    Ok(out)
}

/// Invalid-cell counts per depth, in the order depths first appear.
pub fn invalid_counts(cells: &[ValidityCell]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in cells {
        let pos = match out.iter().position(|(d, _)| *d == c.depth) {
            Some(p) => p,
            None => {
                out.push((c.depth, 0));
                out.len() - 1
            }
        };
        if !c.is_valid() {
            out[pos].1 += 1;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1-D weight comparison

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionLayout {
    /// Midpoints between adjacent (sorted) design points.
    Midpoints,
    /// Fixed locations in `[0, 1]`.
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compare1dConfig {
    pub n_list: Vec<usize>,
    pub design: DesignKind,
    pub depth: usize,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub rho_grid: Vec<f64>,
    pub nugget: f64,
    pub prediction: PredictionLayout,
}

impl Default for Compare1dConfig {
    fn default() -> Self {
        Self {
            n_list: vec![25, 50, 100, 150],
            design: DesignKind::Grid,
            depth: 2,
            sigma_a: 1.0,
            sigma_b: 0.5,
            rho_grid: logspace(0.05, 5.0, 20),
            nugget: crate::gp::DEFAULT_NUGGET,
            prediction: PredictionLayout::Midpoints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compare1dRow {
    pub n: usize,
    pub design: DesignKind,
    pub best_rho: f64,
    pub max_abs_diff: f64,
}

/// Design points and prediction locations for one 1-D comparison.
pub fn design_1d(
    design: DesignKind,
    n: usize,
    layout: &PredictionLayout,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = DesignSpec {
        kind: design,
        count: n,
        dim: 1,
        seed: Seed(0),
    }
    .generate()?
    .into_vec();
    let pred = match layout {
        PredictionLayout::Points(p) => p.clone(),
        PredictionLayout::Midpoints if n == 1 => vec![0.5 * x[0]],
        PredictionLayout::Midpoints => {
            let mut s = x.clone();
            s.sort_by(f64::total_cmp);
            s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
        }
    };
    Ok((x, pred))
}

/// NNGP and Matérn weights for one 1-D design, both on embedded inputs.
pub struct WeightPair {
    pub nngp: KrigingWeights,
    /// `(rho, weights)` for every length scale whose factorization succeeded.
    pub matern: Vec<(f64, KrigingWeights)>,
}

pub fn weights_1d(
    x: &[f64],
    pred: &[f64],
    nngp: &KernelSpec,
    rhos: &[f64],
    nugget: f64,
) -> Result<WeightPair> {
    let train = hypersphere_embed(&DenseMatrix::column_vector(x));
    let test = hypersphere_embed(&DenseMatrix::column_vector(pred));
    let b = nngp.blocks(&train, &test)?;
    let h_nngp = kriging_weights_dense(&b.train.values, &b.cross, nugget)?;

    let d_ff = pairwise_distances(&train, &train)?;
    let d_sf = pairwise_distances(&test, &train)?;
    let mut matern = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let spec = KernelSpec::Matern {
            nu: Smoothness::ThreeHalves,
            rho,
            sigma2: 1.0,
        };
        let kff = matern_from_distances(&d_ff, &spec)?;
        let ksf = matern_from_distances(&d_sf, &spec)?;
        match kriging_weights_dense(&kff, &ksf, nugget) {
            Ok(h) => matern.push((rho, h)),
            Err(Error::NotPositiveDefinite { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(WeightPair {
        nngp: h_nngp,
        matern,
    })
}

pub fn compare_1d(cfg: &Compare1dConfig) -> Result<Vec<Compare1dRow>> {
    if cfg.n_list.is_empty() {
        return Err(Error::Empty("n_list"));
    }
    if cfg.rho_grid.is_empty() {
        return Err(Error::Empty("rho grid"));
    }
    let spec = KernelSpec::nngp(cfg.depth, cfg.sigma_a, cfg.sigma_b, 2)?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let (x, pred) = design_1d(cfg.design, n, &cfg.prediction)?;
            let pair = weights_1d(&x, &pred, &spec, &cfg.rho_grid, cfg.nugget)?;
            let mut best = (f64::NAN, f64::INFINITY);
            for (rho, h) in &pair.matern {
                let diff = h.weights.sub(&pair.nngp.weights)?.max_abs();
                if diff < best.1 {
                    best = (*rho, diff);
                }
            }
            if best.0.is_nan() {
                return Err(Error::AllThetaInvalid);
            }
            Ok(Compare1dRow {
                n,
                design: cfg.design,
                best_rho: best.0,
                max_abs_diff: best.1,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// benchmark

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Nngp,
    MaternFixed,
    MaternVaried,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::Nngp, Arm::MaternFixed, Arm::MaternVaried];

    pub fn label(self) -> &'static str {
        match self {
            Arm::Nngp => "NNGP",
            Arm::MaternFixed => "Matern32",
            Arm::MaternVaried => "Matern",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub case: BenchmarkCase,
    pub iterations: usize,
    pub trend: Trend,
    pub nugget: f64,
    pub nngp_depth: usize,
    /// Shared values for `sigma_a` and `sigma_b` of the NNGP arm.
    pub nngp_sigmas: Vec<f64>,
    pub fixed_rho: f64,
    pub varied_nus: Vec<Smoothness>,
    pub varied_rhos: Vec<f64>,
    /// Weight matrices are kept between passes while they fit this budget;
    /// otherwise they are recomputed.
    pub cache_bytes: usize,
}

impl BenchmarkConfig {
    pub fn new(case: BenchmarkCase) -> Self {
        let trend = if case.kind == crate::bench::CaseKind::Csv {
            Trend::None
        } else {
            Trend::Linear
        };
        Self {
            case,
            iterations: 100,
            trend,
            nugget: crate::gp::DEFAULT_NUGGET,
            nngp_depth: 2,
            nngp_sigmas: linspace(0.1, 2.0, 20),
            fixed_rho: 1.0,
            varied_nus: Smoothness::ALL.to_vec(),
            varied_rhos: logspace(0.05, 5.0, 20),
            cache_bytes: 512 << 20,
        }
    }

    fn grid(&self, arm: Arm, input_dim: usize) -> Result<ThetaGrid> {
        let specs = match arm {
            Arm::Nngp => nngp_grid(
                self.nngp_depth,
                &self.nngp_sigmas,
                &self.nngp_sigmas,
                2 * input_dim,
            )?,
            Arm::MaternFixed => vec![KernelSpec::Matern {
                nu: Smoothness::ThreeHalves,
                rho: self.fixed_rho,
                sigma2: 1.0,
            }],
            Arm::MaternVaried => matern_grid(&self.varied_nus, &self.varied_rhos)?,
        };
        ThetaGrid::new(specs)
    }
}

/// One arm's statistics for a single draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmIteration {
    pub stats: ComparisonStats,
    /// RMSE divided by the standard deviation of the test truth.
    #[serde(rename = "minRMSE_std")]
    pub min_rmse_std: f64,
    #[serde(rename = "maxRMSE_std")]
    pub max_rmse_std: f64,
    pub valid_thetas: usize,
    pub invalid_thetas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub seed: Seed,
    pub arms: BTreeMap<Arm, ArmIteration>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub arm: Arm,
    pub completed_iterations: usize,
    pub invalid_thetas: usize,
    pub stats: BTreeMap<String, MeanSd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub summary: Vec<ArmSummary>,
    pub iterations: Vec<IterationReport>,
}

impl BenchmarkReport {
    pub fn arm(&self, arm: Arm) -> Option<&ArmSummary> {
        self.summary.iter().find(|s| s.arm == arm)
    }

    pub fn failed_iterations(&self) -> usize {
        self.iterations.iter().filter(|i| i.error.is_some()).count()
    }
}

/// Inputs shared by every fit of one draw.
struct Prepared {
    residuals: Vec<f64>,
    offset: Vec<f64>,
    truth: Vec<f64>,
    n: usize,
    m: usize,
    /// Embedded train rows followed by test rows.
    embedded: DenseMatrix,
    /// Distances train×train and test×train on the scaled inputs.
    d_ff: DenseMatrix,
    d_sf: DenseMatrix,
}

fn prepare(data: &CaseData, trend: Trend) -> Result<Prepared> {
    let (model, residuals) = match trend {
        Trend::Linear => fit_trend(&data.train.inputs, &data.train.responses)?,
        Trend::None => (
            TrendModel::zero(data.train.dim()),
            data.train.responses.clone(),
        ),
    };
    let offset = model.predict(&data.test.inputs)?;
    let scaler = MinMaxScaler::fit(&data.train.inputs)?;
    let train = scaler.transform(&data.train.inputs)?;
    let test = scaler.transform(&data.test.inputs)?;
    let embedded = hypersphere_embed(&train.vstack(&test)?);
    Ok(Prepared {
        residuals,
        offset,
        truth: data.test.responses.clone(),
        n: train.rows(),
        m: test.rows(),
        embedded,
        d_ff: pairwise_distances(&train, &train)?,
        d_sf: pairwise_distances(&test, &train)?,
    })
}

impl Prepared {
    /// `None` when the kernel matrix cannot be factored.
    fn weights(&self, spec: &KernelSpec, nugget: f64) -> Result<Option<KrigingWeights>> {
        let (kff, ksf) = match spec {
            KernelSpec::Nngp { .. } => {
                let joint = spec.gram(&self.embedded)?.values;
                (
                    joint.block(0, 0, self.n, self.n),
                    joint.block(self.n, 0, self.m, self.n),
                )
            }
            KernelSpec::Matern { .. } => (
                matern_from_distances(&self.d_ff, spec)?,
                matern_from_distances(&self.d_sf, spec)?,
            ),
        };
        match kriging_weights_dense(&kff, &ksf, nugget) {
            Ok(h) => Ok(Some(h)),
            Err(Error::NotPositiveDefinite { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn rmse_of(&self, h: &KrigingWeights) -> Result<f64> {
        let pred: Vec<f64> = h
            .apply(&self.residuals)?
            .iter()
            .zip(&self.offset)
            .map(|(p, o)| p + o)
            .collect();
        rmse(&pred, &self.truth)
    }
}

struct ArmPass {
    grid: ThetaGrid,
    rmse: RmseTracker,
    spread: SpreadAccumulator,
    cache: Option<Vec<Option<KrigingWeights>>>,
}

fn first_pass(prep: &Prepared, grid: ThetaGrid, nugget: f64, cache: bool) -> Result<ArmPass> {
    let mut pass = ArmPass {
        rmse: RmseTracker::default(),
        spread: SpreadAccumulator::new(),
        cache: cache.then(Vec::new),
        grid,
    };
    for i in 0..pass.grid.len() {
        let h = prep.weights(&pass.grid.specs[i], nugget)?;
        match &h {
            Some(h) => {
                pass.rmse.push(i, prep.rmse_of(h)?);
                pass.spread.add(h)?;
            }
            None => pass.grid.mark_invalid(i),
        }
        if let Some(c) = &mut pass.cache {
            c.push(h);
        }
    }
    Ok(pass)
}

impl ArmPass {
    fn weights_at(
        &self,
        prep: &Prepared,
        index: usize,
        nugget: f64,
    ) -> Result<Option<KrigingWeights>> {
        match &self.cache {
            Some(c) => Ok(c[index].clone()),
            None => prep.weights(&self.grid.specs[index], nugget),
        }
    }

    fn finish(
        mut self,
        prep: &Prepared,
        reference: &KrigingWeights,
        nugget: f64,
        truth_sd: f64,
    ) -> Result<ArmIteration> {
        let extrema = self.rmse.finish(&self.grid)?;
        let mut diffs = DiffTracker::new(reference);
        let single = self.spread.count() == 1;
        for i in 0..self.grid.len() {
            if self.grid.status[i] != crate::stats::ThetaStatus::Ok {
                continue;
            }
            let Some(h) = self.weights_at(prep, i, nugget)? else {
                continue;
            };
            diffs.push(i, &h)?;
            if !single {
                self.spread.push_deviation(&h)?;
            }
        }
        let d = diffs.finish()?;
        // a single valid setting coincides with its own mean
        let kw = if single {
            KwSpreadStats::ZERO
        } else {
            self.spread.finish()?
        };
        let valid = self.grid.valid_count();
        Ok(ArmIteration {
            stats: ComparisonStats {
                min_rmse: extrema.min_rmse,
                max_rmse: extrema.max_rmse,
                maxdiff: d.maxdiff,
                mindiff: d.mindiff,
                meandiff: d.meandiff,
                sddiff: d.sddiff,
                maxkw: kw.maxkw,
                minkw: kw.minkw,
                meankw: kw.meankw,
                sdkw: kw.sdkw,
                best_theta: extrema.best_theta,
                theta_tilde: self.grid.specs[d.theta_index],
            },
            min_rmse_std: extrema.min_rmse / truth_sd,
            max_rmse_std: extrema.max_rmse / truth_sd,
            valid_thetas: valid,
            invalid_thetas: self.grid.len() - valid,
        })
    }
}

/// Runs all three arms on one draw.
pub fn run_iteration(cfg: &BenchmarkConfig, data: &CaseData) -> Result<BTreeMap<Arm, ArmIteration>> {
    let prep = prepare(data, cfg.trend)?;
    let (_, truth_sd) = summarize(&prep.truth);
    let bytes_per = prep.n * prep.m * std::mem::size_of::<f64>();

    let mut passes = Vec::with_capacity(3);
    let mut budget = cfg.cache_bytes;
    for arm in Arm::ALL {
        let grid = cfg.grid(arm, data.train.dim())?;
        let need = grid.len() * bytes_per;
        let cache = need <= budget;
        if cache {
            budget -= need;
        }
        passes.push((arm, first_pass(&prep, grid, cfg.nugget, cache)?));
    }

    let nngp = &passes[0].1;
    let best = nngp.rmse.finish(&nngp.grid)?.best_index;
    let reference = nngp
        .weights_at(&prep, best, cfg.nugget)?
        .ok_or(Error::AllThetaInvalid)?;

    let mut out = BTreeMap::new();
    for (arm, pass) in passes {
        out.insert(arm, pass.finish(&prep, &reference, cfg.nugget, truth_sd)?);
    }
    Ok(out)
}

/// Statistic names reported per arm, in table order.
pub const REPORT_STATS: [&str; 12] = [
    "minRMSE",
    "maxRMSE",
    "minRMSE_std",
    "maxRMSE_std",
    "maxdiff",
    "mindiff",
    "meandiff",
    "sddiff",
    "maxkw",
    "minkw",
    "meankw",
    "sdkw",
];

fn stat_values(a: &ArmIteration) -> BTreeMap<&'static str, f64> {
    let mut m: BTreeMap<&'static str, f64> = ComparisonStats::NAMES
        .iter()
        .copied()
        .zip(a.stats.values())
        .collect();
    m.insert("minRMSE_std", a.min_rmse_std);
    m.insert("maxRMSE_std", a.max_rmse_std);
    m
}

/// Runs the benchmark for `cfg.iterations` independent draws.
///
/// Per-draw failures are recorded in the report and do not stop the run;
/// errors that make every draw impossible (e.g. a missing CSV file) are
/// returned before any fitting.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    run_benchmark_with(cfg, |_| {})
}

/// As [`run_benchmark`], calling `progress` after every draw.
pub fn run_benchmark_with(
    cfg: &BenchmarkConfig,
    mut progress: impl FnMut(&IterationReport),
) -> Result<BenchmarkReport> {
    if cfg.iterations == 0 {
        return Err(Error::Empty("iterations"));
    }
    if let Some(p) = &cfg.case.csv_path {
        if cfg.case.kind == crate::bench::CaseKind::Csv && !p.exists() {
            return Err(Error::FileNotFound(p.clone()));
        }
    }
    let mut iterations = Vec::with_capacity(cfg.iterations);
    for i in 0..cfg.iterations {
        let seed = cfg.case.seed.derive(i as u64);
        let case = BenchmarkCase {
            seed,
            ..cfg.case.clone()
        };
        let result = make_case(&case).and_then(|data| run_iteration(cfg, &data));
        let report = match result {
            Ok(arms) => IterationReport {
                iteration: i,
                seed,
                arms,
                error: None,
            },
            Err(e @ (Error::FileNotFound(_) | Error::InsufficientRows { .. })) => return Err(e),
            Err(e) => IterationReport {
                iteration: i,
                seed,
                arms: BTreeMap::new(),
                error: Some(e.to_string()),
            },
        };
        progress(&report);
        iterations.push(report);
    }

    let summary = Arm::ALL
        .iter()
        .map(|&arm| {
            let runs: Vec<&ArmIteration> =
                iterations.iter().filter_map(|it| it.arms.get(&arm)).collect();
            let values: Vec<BTreeMap<&str, f64>> = runs.iter().map(|a| stat_values(a)).collect();
            let stats = REPORT_STATS
                .iter()
                .map(|&name| {
                    let v: Vec<f64> = values.iter().map(|m| m[name]).collect();
                    let (mean, sd) = summarize(&v);
                    (name.to_string(), MeanSd { mean, sd })
                })
                .collect();
            ArmSummary {
                arm,
                completed_iterations: runs.len(),
                invalid_thetas: runs.iter().map(|a| a.invalid_thetas).sum(),
                stats,
            }
        })
        .collect();

    Ok(BenchmarkReport {
        config: cfg.clone(),
        summary,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::CaseKind;

    #[test]
    fn midpoint_layout() {
        let (x, p) = design_1d(DesignKind::Grid, 4, &PredictionLayout::Midpoints).unwrap();
        assert_eq!(x, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p, vec![0.375, 0.625, 0.875]);
        let (x, p) = design_1d(DesignKind::Sobol, 4, &PredictionLayout::Midpoints).unwrap();
        assert_eq!(x, vec![0.5, 0.25, 0.75, 0.125]);
        assert_eq!(p, vec![0.1875, 0.375, 0.625]);
        let (_, p) = design_1d(DesignKind::Grid, 1, &PredictionLayout::Midpoints).unwrap();
        assert_eq!(p, vec![0.5]);
    }

    #[test]
    fn single_point_comparison_is_scalar_weight_difference() {
        let cfg = Compare1dConfig {
            n_list: vec![1],
            rho_grid: vec![0.5],
            ..Default::default()
        };
        let row = compare_1d(&cfg).unwrap()[0];
        // direct scalar weights k(x*, x) / (k(x, x) + τ²) on embedded points
        let x = hypersphere_embed(&DenseMatrix::column_vector(&[1.0, 0.5]));
        let nngp = KernelSpec::nngp(2, 1.0, 0.5, 2).unwrap().gram(&x).unwrap().values;
        let w_n = nngp[(1, 0)] / (nngp[(0, 0)] + cfg.nugget);
        let d = pairwise_distances(&x, &x).unwrap()[(0, 1)];
        let w_m = Smoothness::ThreeHalves.correlation(d / 0.5) / (1.0 + cfg.nugget);
        assert!((row.max_abs_diff - (w_n - w_m).abs()).abs() < 1e-14);
    }

    #[test]
    fn scan_rejects_tiny_grid() {
        let cfg = ValidityScanConfig {
            grid_res: 1,
            ..Default::default()
        };
        assert!(matches!(
            scan_validity(&cfg),
            Err(Error::InvalidParameter { name: "grid_res", .. })
        ));
    }

    #[test]
    fn small_benchmark_runs() {
        let case = BenchmarkCase {
            kind: CaseKind::Friedman,
            train_count: 30,
            test_count: 20,
            noise_sd: 1.0,
            seed: Seed(5),
            csv_path: None,
        };
        let mut cfg = BenchmarkConfig::new(case);
        cfg.iterations = 2;
        cfg.nngp_sigmas = linspace(0.5, 1.5, 3);
        cfg.varied_rhos = logspace(0.1, 2.0, 4);
        let report = run_benchmark(&cfg).unwrap();
        assert_eq!(report.failed_iterations(), 0);
        let nngp = report.arm(Arm::Nngp).unwrap();
        for name in ["maxdiff", "mindiff", "meandiff", "sddiff"] {
            assert_eq!(nngp.stats[name].mean, 0.0);
        }
        let fixed = report.arm(Arm::MaternFixed).unwrap();
        for name in ["maxkw", "minkw", "meankw", "sdkw"] {
            assert_eq!(fixed.stats[name].mean, 0.0);
        }
        assert_eq!(run_benchmark(&cfg).unwrap(), report);

        cfg.cache_bytes = 0;
        assert_eq!(run_benchmark(&cfg).unwrap().summary, report.summary);
    }
}
