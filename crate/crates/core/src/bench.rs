//! Benchmark response surfaces and dataset assembly.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{gaussian_noise, latin_hypercube, permutation, Seed};
use crate::embed::Dataset;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Friedman test function on `[0, 1]^5`, without noise.
pub fn friedman(x: &[f64]) -> Result<f64> {
    let [x1, x2, x3, x4, x5] = *x else {
        return Err(Error::DimensionMismatch {
            expected: 5,
            found: x.len(),
        });
    };
    Ok(10.0 * (PI * x1 * x2).sin() + 20.0 * (x3 - 0.5).powi(2) + 10.0 * x4 + 5.0 * x5)
}

/// Parameter names of the borehole function, in input order.
pub const BOREHOLE_NAMES: [&str; 8] = ["r_w", "r", "T_u", "H_u", "T_l", "H_l", "L", "K_w"];

/// Parameter ranges of the borehole function, in input order.
pub const BOREHOLE_RANGES: [(f64, f64); 8] = [
    (0.05, 0.15),
    (100.0, 5000.0),
    (63070.0, 115600.0),
    (990.0, 1100.0),
    (63.1, 116.0),
    (700.0, 820.0),
    (1120.0, 1680.0),
    (9855.0, 12045.0),
];

/// Water flow through a borehole. Defined for any positive inputs; use
/// [`check_borehole_ranges`] to validate against the usual domain.
pub fn borehole(x: &[f64]) -> Result<f64> {
    let [rw, r, tu, hu, tl, hl, l, kw] = *x else {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: x.len(),
        });
    };
    let log_ratio = (r / rw).ln();
    let denom = log_ratio * (1.0 + 2.0 * l * tu / (log_ratio * rw * rw * kw) + tu / tl);
    Ok(2.0 * PI * tu * (hu - hl) / denom)
}

pub fn check_borehole_ranges(x: &[f64]) -> Result<()> {
    if x.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: x.len(),
        });
    }
    for ((&v, &(lo, hi)), name) in x.iter().zip(&BOREHOLE_RANGES).zip(BOREHOLE_NAMES) {
        if !(lo..=hi).contains(&v) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                lo,
                hi,
            });
        }
    }
    Ok(())
}

/// Affine map from the unit cube onto the borehole parameter ranges.
pub fn unit_to_borehole(u: &[f64]) -> Result<[f64; 8]> {
    if u.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: u.len(),
        });
    }
    let mut out = [0.0; 8];
    for ((o, &t), &(lo, hi)) in out.iter_mut().zip(u).zip(&BOREHOLE_RANGES) {
        *o = lo + t * (hi - lo);
    }
    Ok(out)
}

/// A CSV file split into inputs `x1..xd` and, when present, responses `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub inputs: DenseMatrix,
    pub responses: Option<Vec<f64>>,
}

fn parse_field(s: &str, line: usize, column: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::ParseError {
        line,
        message: format!("column {column}: cannot parse {s:?} as a number"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ParseError {
            line,
            message: format!("column {column}: non-finite value {s:?}"),
        })
    }
}

/// Reads a headed CSV with columns `x1..xd` and an optional `y`.
///
/// Extra columns are ignored. `require_y` turns a missing `y` column into
/// [`Error::MissingColumn`].
pub fn read_csv_table(path: &Path, require_y: bool) -> Result<CsvTable> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::ParseError {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);

    let max_x = headers
        .iter()
        .filter_map(|h| h.strip_prefix('x')?.parse::<usize>().ok())
        .max()
        .unwrap_or(0);
    if max_x == 0 {
        return Err(Error::MissingColumn("x1".into()));
    }
    let x_cols = (1..=max_x)
        .map(|k| {
            let name = format!("x{k}");
            find(&name).ok_or(Error::MissingColumn(name))
        })
        .collect::<Result<Vec<_>>>()?;
    let y_col = find("y");
    if require_y && y_col.is_none() {
        return Err(Error::MissingColumn("y".into()));
    }

    let mut data = Vec::new();
    let mut ys = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(rows + 2, |p| p.line() as usize);
        for (k, &c) in x_cols.iter().enumerate() {
            let s = record.get(c).ok_or_else(|| Error::ParseError {
                line,
                message: format!("missing field x{}", k + 1),
            })?;
            data.push(parse_field(s, line, &format!("x{}", k + 1))?);
        }
        if let Some(c) = y_col {
            let s = record.get(c).ok_or_else(|| Error::ParseError {
                line,
                message: "missing field y".into(),
            })?;
            ys.push(parse_field(s, line, "y")?);
        }
        rows += 1;
    }
    Ok(CsvTable {
        inputs: DenseMatrix::from_row_major(rows, max_x, data)?,
        responses: y_col.map(|_| ys),
    })
}

/// Loads a dataset from a CSV with header `x1,...,xd,y`.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let table = read_csv_table(path, true)?;
    Dataset::new(table.inputs, table.responses.unwrap_or_default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Friedman,
    Borehole,
    Csv,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Friedman => "friedman",
            Self::Borehole => "borehole",
            Self::Csv => "csv",
        }
    }
}

impl std::str::FromStr for CaseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "friedman" => Ok(Self::Friedman),
            "borehole" => Ok(Self::Borehole),
            "csv" => Ok(Self::Csv),
            other => Err(format!(
                "unknown case {other:?} (expected friedman, borehole or csv)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCase {
    pub kind: CaseKind,
    pub train_count: usize,
    pub test_count: usize,
    pub noise_sd: f64,
    pub seed: Seed,
    pub csv_path: Option<PathBuf>,
}

impl BenchmarkCase {
    /// 500 training and 500 test rows; unit noise on Friedman, none on borehole.
    pub fn new(kind: CaseKind) -> Self {
        Self {
            kind,
            train_count: 500,
            test_count: 500,
            noise_sd: if kind == CaseKind::Friedman { 1.0 } else { 0.0 },
            seed: Seed(0),
            csv_path: None,
        }
    }
}

/// Training data (noisy for synthetic surfaces) and test data with the
/// noiseless truth as responses.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseData {
    pub train: Dataset,
    pub test: Dataset,
}

/// Builds one train/test draw for a benchmark case.
pub fn make_case(case: &BenchmarkCase) -> Result<CaseData> {
    let (n, m) = (case.train_count, case.test_count);
    if n == 0 || m == 0 {
        return Err(Error::Empty("train/test count"));
    }
    if !(case.noise_sd >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "noise_sd",
            value: case.noise_sd,
        });
    }
    match case.kind {
        CaseKind::Csv => {
            let path = case
                .csv_path
                .as_deref()
                .ok_or_else(|| Error::MissingColumn("csv path".into()))?;
            let data = load_csv(path)?;
            if data.len() < n + m {
                return Err(Error::InsufficientRows {
                    needed: n + m,
                    found: data.len(),
                });
            }
            let perm = permutation(data.len(), case.seed.derive(2));
            Ok(CaseData {
                train: data.subset(&perm[..n]),
                test: data.subset(&perm[n..n + m]),
            })
        }
        kind => {
            let dim = if kind == CaseKind::Friedman { 5 } else { 8 };
            let unit = latin_hypercube(n + m, dim, case.seed.derive(0));
            let (inputs, truth) = match kind {
                CaseKind::Friedman => {
                    let truth = unit.row_iter().map(friedman).collect::<Result<Vec<_>>>()?;
                    (unit, truth)
                }
                _ => {
                    let rows = unit
                        .row_iter()
                        .map(unit_to_borehole)
                        .collect::<Result<Vec<_>>>()?;
                    let truth = rows.iter().map(|r| borehole(r)).collect::<Result<Vec<_>>>()?;
                    (DenseMatrix::from_rows(&rows)?, truth)
                }
            };
            let noise = gaussian_noise(n, case.noise_sd, case.seed.derive(1));
            let train_idx: Vec<usize> = (0..n).collect();
            let test_idx: Vec<usize> = (n..n + m).collect();
            let y_train = train_idx.iter().zip(&noise).map(|(&i, e)| truth[i] + e).collect();
            Ok(CaseData {
                train: Dataset::new(inputs.select_rows(&train_idx), y_train)?,
                test: Dataset::new(
                    inputs.select_rows(&test_idx),
                    test_idx.iter().map(|&i| truth[i]).collect(),
                )?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    #[test]
    fn friedman_examples() {
        assert_eq!(friedman(&[0.0, 0.0, 0.5, 0.0, 0.0]).unwrap(), 0.0);
        let v = friedman(&[0.5; 5]).unwrap();
        assert_relative_eq!(v, 10.0 * (PI / 4.0).sin() + 7.5, max_relative = 1e-15);
        assert_relative_eq!(v, 14.571_067_811_865_476, max_relative = 1e-15);
        assert_relative_eq!(friedman(&[1.0; 5]).unwrap(), 20.0, epsilon = 1e-14);
        assert!(friedman(&[0.0; 4]).is_err());
    }

    #[test]
    fn borehole_degenerate_heads() {
        let mut x = unit_to_borehole(&[0.5; 8]).unwrap();
        x[5] = x[3];
        assert_eq!(borehole(&x).unwrap(), 0.0);
    }

    #[test]
    fn borehole_midpoint() {
        let x = unit_to_borehole(&[0.5; 8]).unwrap();
        assert_eq!(
            x,
            [0.1, 2550.0, 89335.0, 1045.0, 89.55, 760.0, 1400.0, 10950.0]
        );
        // frozen from an independent 50-digit evaluation
        assert_relative_eq!(borehole(&x).unwrap(), 69.720_224_705_407_2, max_relative = 1e-13);
    }

    #[test]
    fn borehole_increases_with_upper_head() {
        let x = unit_to_borehole(&[0.3, 0.6, 0.2, 0.5, 0.9, 0.1, 0.4, 0.7]).unwrap();
        let h = 1e-3;
        let mut up = x;
        up[3] += h;
        let mut down = x;
        down[3] -= h;
        let fd = (borehole(&up).unwrap() - borehole(&down).unwrap()) / (2.0 * h);
        assert!(fd > 0.0);
    }

    #[test]
    fn borehole_range_mapping() {
        let lo = unit_to_borehole(&[0.0; 8]).unwrap();
        let hi = unit_to_borehole(&[1.0; 8]).unwrap();
        for k in 0..8 {
            assert_eq!(lo[k], BOREHOLE_RANGES[k].0);
            assert_eq!(hi[k], BOREHOLE_RANGES[k].1);
        }
        assert!(check_borehole_ranges(&lo).is_ok());
        let mut bad = lo;
        bad[0] = 0.2;
        assert!(matches!(
            check_borehole_ranges(&bad),
            Err(Error::OutOfRange { name: "r_w", .. })
        ));
    }

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn csv_well_formed() {
        let f = write("x1,x2,y\n0.1,0.2,1.0\n0.3,0.4,2.0\n0.5,0.6,3.0\n");
        let d = load_csv(f.path()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.dim(), 2);
        assert_eq!(d.inputs.row(2), &[0.5, 0.6]);
        assert_eq!(d.responses, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn csv_nan_response() {
        let f = write("x1,y\n0.1,1.0\n0.2,NaN\n");
        assert!(matches!(load_csv(f.path()), Err(Error::ParseError { line: 3, .. })));
    }

    #[test]
    fn csv_missing_columns() {
        let f = write("x1,x2\n0.1,0.2\n");
        assert_eq!(load_csv(f.path()), Err(Error::MissingColumn("y".into())));
        let f = write("x1,x3,y\n0.1,0.2,0.3\n");
        assert_eq!(load_csv(f.path()), Err(Error::MissingColumn("x2".into())));
        assert!(matches!(
            load_csv(Path::new("/definitely/not/here.csv")),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn csv_without_y_is_allowed_for_inputs() {
        let f = write("x1\n0.1\n0.2\n");
        let t = read_csv_table(f.path(), false).unwrap();
        assert_eq!(t.inputs.rows(), 2);
        assert!(t.responses.is_none());
    }

    fn synthetic(kind: CaseKind, seed: u64) -> BenchmarkCase {
        BenchmarkCase {
            kind,
            train_count: 50,
            test_count: 40,
            noise_sd: 1.0,
            seed: Seed(seed),
            csv_path: None,
        }
    }

    #[test]
    fn synthetic_cases_are_deterministic_and_disjoint() {
        for kind in [CaseKind::Friedman, CaseKind::Borehole] {
            let a = make_case(&synthetic(kind, 11)).unwrap();
            let b = make_case(&synthetic(kind, 11)).unwrap();
            assert_eq!(a, b);
            let c = make_case(&synthetic(kind, 12)).unwrap();
            assert_ne!(a.train, c.train);
            assert_eq!(a.train.len(), 50);
            assert_eq!(a.test.len(), 40);
            for t in a.test.inputs.row_iter() {
                assert!(a.train.inputs.row_iter().all(|r| r != t));
            }
        }
    }

    #[test]
    fn csv_split_sizes() {
        let mut body = String::from("x1,y\n");
        for i in 0..10 {
            body.push_str(&format!("{},{}\n", i, i * i));
        }
        let f = write(&body);
        let case = BenchmarkCase {
            kind: CaseKind::Csv,
            train_count: 6,
            test_count: 4,
            noise_sd: 0.0,
            seed: Seed(1),
            csv_path: Some(f.path().to_path_buf()),
        };
        let d = make_case(&case).unwrap();
        let mut all: Vec<f64> = d
            .train
            .inputs
            .as_slice()
            .iter()
            .chain(d.test.inputs.as_slice())
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(f64::from).collect::<Vec<_>>());

        let short = BenchmarkCase {
            train_count: 7,
            ..case
        };
        assert_eq!(
            make_case(&short),
            Err(Error::InsufficientRows {
                needed: 11,
                found: 10
            })
        );
    }
}
