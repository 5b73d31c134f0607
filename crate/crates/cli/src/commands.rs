use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};

use nngp_core::bench::{read_csv_table, BenchmarkCase, CaseKind};
use nngp_core::design::{DesignKind, Seed};
use nngp_core::embed::{hypersphere_embed, MinMaxScaler};
use nngp_core::gp::{fit_trend, posterior, Trend, TrendModel, DEFAULT_NUGGET};
use nngp_core::kernels::{check_validity, linspace, logspace, KernelSpec, Smoothness};
use nngp_core::linalg::{DenseMatrix, DEFAULT_EPS_FLAT};
use nngp_core::study::{
    compare_1d, run_benchmark_with, scan_validity, Arm, BenchmarkConfig,
    Compare1dConfig, PredictionLayout, ValidityScanConfig,
};

use crate::config::{pick, pick_list, pick_opt, ConfigFile};
use crate::output::{num, Output, Table};

/// Invalid arguments; reported with the usage exit status.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

/// Keys every command accepts in a config file.
pub const COMMON_KEYS: [&str; 2] = ["out", "format"];

fn allowed(keys: &[&'static str]) -> Vec<&'static str> {
    COMMON_KEYS.iter().chain(keys).copied().collect()
}

fn config_map(entries: Vec<(&str, Value)>) -> Map<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, clap::Args)]
pub struct ScanArgs {
    /// Network depths to scan, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// Points per axis of the (sigma_a, sigma_b) grid.
    #[arg(long)]
    pub grid_res: Option<usize>,
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    /// Number of 1-D grid points the kernel is evaluated on.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nugget: Option<f64>,
    /// Correlation gap at or below which a kernel counts as flat.
    #[arg(long)]
    pub eps_flat: Option<f64>,
}

pub const SCAN_KEYS: [&str; 7] = [
    "depths", "grid-res", "sigma-min", "sigma-max", "n", "nugget", "eps-flat",
];

pub fn scan(args: ScanArgs, file: &ConfigFile) -> Result<Output> {
    file.check_keys("scan-validity", &allowed(&SCAN_KEYS))?;
    let d = ValidityScanConfig::default();
    let cfg = ValidityScanConfig {
        depths: pick_list(args.depths, file, "depths", d.depths)?,
        grid_res: pick(args.grid_res, file, "grid-res", d.grid_res)?,
        sigma_min: pick(args.sigma_min, file, "sigma-min", d.sigma_min)?,
        sigma_max: pick(args.sigma_max, file, "sigma-max", d.sigma_max)?,
        n: pick(args.n, file, "n", d.n)?,
        nugget: pick(args.nugget, file, "nugget", d.nugget)?,
        eps_flat: pick(args.eps_flat, file, "eps-flat", d.eps_flat)?,
    };
    if cfg.grid_res < 2 {
        return usage(format!("--grid-res must be at least 2 (got {})", cfg.grid_res));
    }
    if cfg.depths.is_empty() {
        return usage("--depths must not be empty");
    }
    if !(cfg.sigma_min > 0.0 && cfg.sigma_max >= cfg.sigma_min) {
        return usage("need 0 < --sigma-min <= --sigma-max");
    }
    let cells = scan_validity(&cfg)?;

    let mut table = Table::new(vec!["depth", "sigma_a", "sigma_b", "is_pd", "is_flat", "min_gap"]);
    for c in &cells {
        table.push(vec![
            c.depth.to_string(),
            num(c.sigma_a),
            num(c.sigma_b),
            c.is_pd.to_string(),
            c.is_flat.to_string(),
            num(c.min_gap),
        ]);
    }
    Ok(Output {
        command: "scan-validity",
        config: config_map(vec![
            ("depths", json!(cfg.depths)),
            ("grid-res", json!(cfg.grid_res)),
            ("sigma-min", json!(cfg.sigma_min)),
            ("sigma-max", json!(cfg.sigma_max)),
            ("n", json!(cfg.n)),
            ("nugget", json!(cfg.nugget)),
            ("eps-flat", json!(cfg.eps_flat)),
            ("seed", Value::Null),
        ]),
        table,
        results: serde_json::to_value(&cells)?,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, clap::Args)]
pub struct CompareArgs {
    /// Training-set sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// grid or sobol.
    #[arg(long)]
    pub design: Option<DesignKind>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub sigma_a: Option<f64>,
    #[arg(long)]
    pub sigma_b: Option<f64>,
    /// Matérn 3/2 length-scale grid: log-spaced from rho-min to rho-max.
    #[arg(long)]
    pub rho_min: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub rho_count: Option<usize>,
    #[arg(long)]
    pub nugget: Option<f64>,
    /// Prediction locations in [0, 1]; midpoints of the design when omitted.
    #[arg(long, value_delimiter = ',')]
    pub predict_at: Option<Vec<f64>>,
}

pub const COMPARE_KEYS: [&str; 10] = [
    "n", "design", "depth", "sigma-a", "sigma-b", "rho-min", "rho-max", "rho-count", "nugget",
    "predict-at",
];

pub fn compare(args: CompareArgs, file: &ConfigFile) -> Result<Output> {
    file.check_keys("compare-1d", &allowed(&COMPARE_KEYS))?;
    let d = Compare1dConfig::default();
    let design = pick(args.design, file, "design", d.design)?;
    if design == DesignKind::Lhs {
        return usage("--design must be grid or sobol");
    }
    let rho_min = pick(args.rho_min, file, "rho-min", 0.05)?;
    let rho_max = pick(args.rho_max, file, "rho-max", 5.0)?;
    let rho_count = pick(args.rho_count, file, "rho-count", 20)?;
    if !(rho_min > 0.0 && rho_max >= rho_min) || rho_count == 0 {
        return usage("need 0 < --rho-min <= --rho-max and --rho-count >= 1");
    }
    let points = match args.predict_at {
        Some(p) => Some(p),
        None => file.get_list("predict-at")?,
    };
    let cfg = Compare1dConfig {
        n_list: pick_list(args.n, file, "n", d.n_list)?,
        design,
        depth: pick(args.depth, file, "depth", d.depth)?,
        sigma_a: pick(args.sigma_a, file, "sigma-a", d.sigma_a)?,
        sigma_b: pick(args.sigma_b, file, "sigma-b", d.sigma_b)?,
        rho_grid: logspace(rho_min, rho_max, rho_count),
        nugget: pick(args.nugget, file, "nugget", d.nugget)?,
        prediction: match &points {
            Some(p) => PredictionLayout::Points(p.clone()),
            None => PredictionLayout::Midpoints,
        },
    };
    if cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
        return usage("--n must list positive sizes");
    }
    if let Some(p) = &points {
        if p.is_empty() || p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return usage("--predict-at values must lie in [0, 1]");
        }
    }
    let rows = compare_1d(&cfg)?;

    let mut table = Table::new(vec!["n", "design", "best_rho", "max_abs_diff"]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            r.design.to_string(),
            num(r.best_rho),
            num(r.max_abs_diff),
        ]);
    }
    Ok(Output {
        command: "compare-1d",
        config: config_map(vec![
            ("n", json!(cfg.n_list)),
            ("design", json!(design.to_string())),
            ("depth", json!(cfg.depth)),
            ("sigma-a", json!(cfg.sigma_a)),
            ("sigma-b", json!(cfg.sigma_b)),
            ("rho-min", json!(rho_min)),
            ("rho-max", json!(rho_max)),
            ("rho-count", json!(rho_count)),
            ("nugget", json!(cfg.nugget)),
            ("predict-at", points.map_or(json!("midpoints"), |p| json!(p))),
            ("seed", Value::Null),
        ]),
        table,
        results: serde_json::to_value(&rows)?,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, clap::Args)]
pub struct BenchArgs {
    /// friedman, borehole or csv.
    #[arg(long)]
    pub case: Option<CaseKind>,
    /// Data file for the csv case (header x1,...,xd,y).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training rows per draw.
    #[arg(long)]
    pub n: Option<usize>,
    /// Test rows per draw.
    #[arg(long)]
    pub m: Option<usize>,
    /// Standard deviation of the noise added to training responses.
    #[arg(long)]
    pub noise: Option<f64>,
    /// none or linear.
    #[arg(long)]
    pub trend: Option<Trend>,
    #[arg(long)]
    pub nugget: Option<f64>,
    /// NNGP arm: depth and the shared sigma_a / sigma_b grid.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    pub grid_res: Option<usize>,
    /// Length scale of the fixed Matérn 3/2 arm.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Varied Matérn arm: smoothness values and log-spaced length scales.
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<Smoothness>>,
    #[arg(long)]
    pub rho_min: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub rho_count: Option<usize>,
}

pub const BENCH_KEYS: [&str; 18] = [
    "case", "data", "iterations", "seed", "n", "m", "noise", "trend", "nugget", "depth",
    "sigma-min", "sigma-max", "grid-res", "rho", "nu", "rho-min", "rho-max", "rho-count",
];

pub fn benchmark(args: BenchArgs, file: &ConfigFile, quiet: bool) -> Result<Output> {
    file.check_keys("benchmark", &allowed(&BENCH_KEYS))?;
    let kind = pick(args.case, file, "case", CaseKind::Friedman)?;
    let defaults = BenchmarkCase::new(kind);
    let data = pick_opt(args.data, file, "data")?;
    if kind == CaseKind::Csv && data.is_none() {
        return usage("the csv case needs --data <file>");
    }
    let case = BenchmarkCase {
        kind,
        train_count: pick(args.n, file, "n", defaults.train_count)?,
        test_count: pick(args.m, file, "m", defaults.test_count)?,
        noise_sd: pick(args.noise, file, "noise", defaults.noise_sd)?,
        seed: Seed(pick(args.seed, file, "seed", 0)?),
        csv_path: data,
    };
    let mut cfg = BenchmarkConfig::new(case);
    cfg.iterations = pick(args.iterations, file, "iterations", cfg.iterations)?;
    cfg.trend = pick(args.trend, file, "trend", cfg.trend)?;
    cfg.nugget = pick(args.nugget, file, "nugget", cfg.nugget)?;
    cfg.nngp_depth = pick(args.depth, file, "depth", cfg.nngp_depth)?;
    let sigma_min = pick(args.sigma_min, file, "sigma-min", 0.1)?;
    let sigma_max = pick(args.sigma_max, file, "sigma-max", 2.0)?;
    let grid_res = pick(args.grid_res, file, "grid-res", 20)?;
    cfg.nngp_sigmas = linspace(sigma_min, sigma_max, grid_res);
    cfg.fixed_rho = pick(args.rho, file, "rho", cfg.fixed_rho)?;
    cfg.varied_nus = pick_list(args.nu, file, "nu", cfg.varied_nus)?;
    let rho_min = pick(args.rho_min, file, "rho-min", 0.05)?;
    let rho_max = pick(args.rho_max, file, "rho-max", 5.0)?;
    let rho_count = pick(args.rho_count, file, "rho-count", 20)?;
    cfg.varied_rhos = logspace(rho_min, rho_max, rho_count);

    if cfg.iterations == 0 {
        return usage("--iterations must be at least 1");
    }
    if grid_res == 0 || rho_count == 0 || cfg.varied_nus.is_empty() {
        return usage("parameter grids must not be empty");
    }
    if cfg.case.train_count == 0 || cfg.case.test_count == 0 {
        return usage("--n and --m must be positive");
    }

    let total = cfg.iterations;
    let report = run_benchmark_with(&cfg, |it| {
        if !quiet {
            match &it.error {
                None => eprintln!("iteration {}/{total} done", it.iteration + 1),
                Some(e) => eprintln!("iteration {}/{total} failed: {e}", it.iteration + 1),
            }
        }
    })?;

    let mut table = Table::new(vec![
        "statistic",
        "data",
        "nngp_mean",
        "nngp_sd",
        "matern32_mean",
        "matern32_sd",
        "matern_mean",
        "matern_sd",
    ]);
    for stat in nngp_core::study::REPORT_STATS {
        let mut row = vec![stat.to_string(), kind.name().to_string()];
        for arm in Arm::ALL {
            let s = report.arm(arm).and_then(|a| a.stats.get(stat));
            row.push(s.map_or("NaN".into(), |m| num(m.mean)));
            row.push(s.map_or("NaN".into(), |m| num(m.sd)));
        }
        table.push(row);
    }
    // counts go in the mean columns
    for label in ["completed_iterations", "invalid_thetas"] {
        let mut row = vec![label.to_string(), kind.name().to_string()];
        for arm in Arm::ALL {
            let count = report.arm(arm).map_or(0, |a| match label {
                "completed_iterations" => a.completed_iterations,
                _ => a.invalid_thetas,
            });
            row.push(count.to_string());
            row.push(String::new());
        }
        table.push(row);
    }

    Ok(Output {
        command: "benchmark",
        config: config_map(vec![
            ("case", json!(kind.name())),
            (
                "data",
                cfg.case
                    .csv_path
                    .as_ref()
                    .map_or(Value::Null, |p| json!(p.display().to_string())),
            ),
            ("iterations", json!(cfg.iterations)),
            ("seed", json!(cfg.case.seed.0)),
            ("n", json!(cfg.case.train_count)),
            ("m", json!(cfg.case.test_count)),
            ("noise", json!(cfg.case.noise_sd)),
            ("trend", json!(cfg.trend.to_string())),
            ("nugget", json!(cfg.nugget)),
            ("depth", json!(cfg.nngp_depth)),
            ("sigma-min", json!(sigma_min)),
            ("sigma-max", json!(sigma_max)),
            ("grid-res", json!(grid_res)),
            ("rho", json!(cfg.fixed_rho)),
            (
                "nu",
                json!(cfg.varied_nus.iter().map(|n| n.to_string()).collect::<Vec<_>>()),
            ),
            ("rho-min", json!(rho_min)),
            ("rho-max", json!(rho_max)),
            ("rho-count", json!(rho_count)),
        ]),
        table,
        results: serde_json::to_value(&report)?,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    Matern,
    Nngp,
}

impl std::str::FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matern" => Ok(Self::Matern),
            "nngp" => Ok(Self::Nngp),
            other => Err(format!("unknown kernel {other:?} (expected matern or nngp)")),
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct PredictArgs {
    /// Training CSV with header x1,...,xd,y.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Test CSV with header x1,...,xd (a y column is ignored).
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    /// Matérn smoothness: 1/2, 3/2, 5/2 or inf.
    #[arg(long)]
    pub nu: Option<Smoothness>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Kernel variance for Matérn.
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub sigma_a: Option<f64>,
    #[arg(long)]
    pub sigma_b: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub nugget: Option<f64>,
    /// none or linear.
    #[arg(long)]
    pub trend: Option<Trend>,
}

pub const PREDICT_KEYS: [&str; 11] = [
    "train", "test", "kernel", "nu", "rho", "sigma2", "sigma-a", "sigma-b", "depth", "nugget",
    "trend",
];

/// Test inputs; an empty file counts as zero rows.
fn read_test(path: &Path) -> Result<DenseMatrix> {
    let meta = std::fs::metadata(path)
        .map_err(|_| nngp_core::Error::FileNotFound(path.to_path_buf()))?;
    if meta.len() == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    Ok(read_csv_table(path, false)
        .with_context(|| format!("reading {}", path.display()))?
        .inputs)
}

pub fn predict(args: PredictArgs, file: &ConfigFile) -> Result<Output> {
    file.check_keys("predict", &allowed(&PREDICT_KEYS))?;
    let Some(train_path) = pick_opt(args.train, file, "train")? else {
        return usage("--train <file> is required");
    };
    let Some(test_path) = pick_opt(args.test, file, "test")? else {
        return usage("--test <file> is required");
    };
    let kind = pick(args.kernel, file, "kernel", KernelKind::Matern)?;
    let nugget = pick(args.nugget, file, "nugget", DEFAULT_NUGGET)?;
    let trend = pick(args.trend, file, "trend", Trend::None)?;
    let nu = pick(args.nu, file, "nu", Smoothness::ThreeHalves)?;
    let rho = pick(args.rho, file, "rho", 1.0)?;
    let sigma2 = pick(args.sigma2, file, "sigma2", 1.0)?;
    let depth = pick(args.depth, file, "depth", 2)?;
    let sigma_a = pick(args.sigma_a, file, "sigma-a", 1.0)?;
    let sigma_b = pick(args.sigma_b, file, "sigma-b", 0.5)?;
    if !(nugget >= 0.0) {
        return usage("--nugget must be nonnegative");
    }

    let mut config = vec![
        ("train", json!(train_path.display().to_string())),
        ("test", json!(test_path.display().to_string())),
        ("nugget", json!(nugget)),
        ("trend", json!(trend.to_string())),
        ("seed", Value::Null),
    ];
    match kind {
        KernelKind::Matern => config.extend([
            ("kernel", json!("matern")),
            ("nu", json!(nu.to_string())),
            ("rho", json!(rho)),
            ("sigma2", json!(sigma2)),
        ]),
        KernelKind::Nngp => config.extend([
            ("kernel", json!("nngp")),
            ("depth", json!(depth)),
            ("sigma-a", json!(sigma_a)),
            ("sigma-b", json!(sigma_b)),
        ]),
    }

    let train = nngp_core::bench::load_csv(&train_path)
        .with_context(|| format!("reading {}", train_path.display()))?;
    let test = read_test(&test_path)?;
    let mut table = Table::new(vec!["prediction", "posterior_sd"]);
    let mut results = Vec::new();
    if test.rows() > 0 {
        if test.cols() != train.dim() {
            bail!(
                "test file has {} input columns but training file has {}",
                test.cols(),
                train.dim()
            );
        }
        let (model, resid) = match trend {
            Trend::Linear => fit_trend(&train.inputs, &train.responses)?,
            Trend::None => (TrendModel::zero(train.dim()), train.responses.clone()),
        };
        let offset = model.predict(&test)?;
        let scaler = MinMaxScaler::fit(&train.inputs)?;
        let (xf, xs) = (scaler.transform(&train.inputs)?, scaler.transform(&test)?);
        let (spec, xf, xs) = match kind {
            KernelKind::Matern => (KernelSpec::Matern { nu, rho, sigma2 }, xf, xs),
            KernelKind::Nngp => {
                let (ef, es) = (hypersphere_embed(&xf), hypersphere_embed(&xs));
                (KernelSpec::nngp(depth, sigma_a, sigma_b, ef.cols())?, ef, es)
            }
        };
        spec.validate()?;
        let blocks = spec.blocks(&xf, &xs)?;
        if kind == KernelKind::Nngp {
            let v = check_validity(&blocks.train, nugget, DEFAULT_EPS_FLAT);
            if !v.is_valid() {
                let reason = if !v.is_positive_definite {
                    format!(
                        "not positive definite (Cholesky pivot {})",
                        v.failure_pivot.map_or("?".into(), |p| p.to_string())
                    )
                } else {
                    format!(
                        "not positive definite in practice: correlations are numerically 1 (min gap {:e})",
                        v.min_correlation_gap
                    )
                };
                bail!(
                    "NNGP kernel with sigma_a={sigma_a}, sigma_b={sigma_b}, depth={depth} is not a valid covariance on the training inputs: {reason}"
                );
            }
        }
        let post = posterior(&blocks.train, &blocks.cross, &blocks.test, &resid, nugget)?;
        for ((mean, sd), off) in post.mean.iter().zip(post.std_dev()).zip(&offset) {
            table.push(vec![num(mean + off), num(sd)]);
            results.push(json!({"prediction": mean + off, "posterior_sd": sd}));
        }
    }
    Ok(Output {
        command: "predict",
        config: config_map(config),
        table,
        results: Value::Array(results),
    })
}
