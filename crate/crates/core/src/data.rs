//! Return panels: CSV ingestion, centring with training statistics, the
//! positional train/test split, and a seeded synthetic generator.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{Matrix, NumericsError};

/// Default number of leading rows used for training.
pub const DEFAULT_TRAIN_LEN: usize = 400;
/// Name of the optional metadata column.
pub const DATE_COLUMN: &str = "date";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("index column '{name}' not found; available columns: {available:?}")]
    MissingIndexColumn {
        name: String,
        available: Vec<String>,
    },
    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unparseable cells in rows {rows:?} (first: row {first_row}, column '{first_column}', value '{first_value}')")]
    NonNumeric {
        rows: Vec<usize>,
        first_row: usize,
        first_column: String,
        first_value: String,
    },
    #[error("{0} contains no data rows")]
    Empty(PathBuf),
    #[error("invalid split: train_len = {train_len} with {rows} rows (need 0 < train_len < rows)")]
    InvalidSplit { train_len: usize, rows: usize },
    #[error("invalid synthetic instance: {0}")]
    InvalidSynth(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, DataError>;

/// Dated panel of asset returns plus the returns of the index being tracked.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingDataset {
    pub asset_names: Vec<String>,
    pub index_name: String,
    /// `T × d`
    pub returns: Matrix,
    /// Length `T`.
    pub index_returns: Vec<f64>,
    /// Contents of the `date` column, when present.
    pub dates: Option<Vec<String>>,
    pub source_path: String,
}

impl TrackingDataset {
    pub fn periods(&self) -> usize {
        self.index_returns.len()
    }

    pub fn assets(&self) -> usize {
        self.asset_names.len()
    }

    /// File stem of the source, used to name result files.
    pub fn name(&self) -> String {
        Path::new(&self.source_path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| "dataset".to_string())
    }
}

/// Reads a header-first CSV. `index_column` names the response; a column
/// called `date` is kept as metadata; every other column is an asset.
pub fn load_csv(path: impl AsRef<Path>, index_column: &str) -> Result<TrackingDataset> {
    let path = path.as_ref();
    let csv_err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();

    let index_pos = headers
        .iter()
        .position(|h| h == index_column)
        .ok_or_else(|| DataError::MissingIndexColumn {
            name: index_column.to_string(),
            available: headers.clone(),
        })?;
    let date_pos = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(DATE_COLUMN));
    let asset_pos: Vec<usize> = (0..headers.len())
        .filter(|&i| i != index_pos && Some(i) != date_pos)
        .collect();

    let mut values = Vec::new();
    let mut index_returns = Vec::new();
    let mut dates = date_pos.map(|_| Vec::new());
    let mut bad_rows = Vec::new();
    let mut first_bad: Option<(usize, String, String)> = None;

    for (i, record) in reader.records().enumerate() {
        // 1-based data-row numbering with the header as row 1
        let row = i + 2;
        let record = record.map_err(csv_err)?;
        if record.len() != headers.len() {
            return Err(DataError::Ragged {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let mut parsed = Vec::with_capacity(asset_pos.len());
        let mut row_ok = true;
        for &c in asset_pos.iter().chain(std::iter::once(&index_pos)) {
            match record[c].parse::<f64>() {
                Ok(v) if v.is_finite() => parsed.push(v),
                _ => {
                    row_ok = false;
                    if first_bad.is_none() {
                        first_bad = Some((row, headers[c].clone(), record[c].to_string()));
                    }
                }
            }
        }
        if !row_ok {
            bad_rows.push(row);
            continue;
        }
        index_returns.push(parsed.pop().expect("index value parsed"));
        values.extend(parsed);
        if let (Some(dates), Some(p)) = (dates.as_mut(), date_pos) {
            dates.push(record[p].to_string());
        }
    }
    if let Some((first_row, first_column, first_value)) = first_bad {
        return Err(DataError::NonNumeric {
            rows: bad_rows,
            first_row,
            first_column,
            first_value,
        });
    }
    if index_returns.is_empty() {
        return Err(DataError::Empty(path.to_path_buf()));
    }

    Ok(TrackingDataset {
        asset_names: asset_pos.iter().map(|&i| headers[i].clone()).collect(),
        index_name: index_column.to_string(),
        returns: Matrix::new(index_returns.len(), asset_pos.len(), values)?,
        index_returns,
        dates,
        source_path: path.display().to_string(),
    })
}

/// Writes `date` (if any), the assets, then the index column.
pub fn write_csv(ds: &TrackingDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    write_records(ds, &mut writer).map_err(csv_err)?;
    writer.flush().map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_records<W: std::io::Write>(
    ds: &TrackingDataset,
    writer: &mut csv::Writer<W>,
) -> csv::Result<()> {
    let mut header: Vec<String> = Vec::new();
    if ds.dates.is_some() {
        header.push(DATE_COLUMN.to_string());
    }
    header.extend(ds.asset_names.iter().cloned());
    header.push(ds.index_name.clone());
    writer.write_record(&header)?;
    for t in 0..ds.periods() {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        if let Some(dates) = &ds.dates {
            row.push(dates[t].clone());
        }
        // `{}` on f64 is the shortest round-tripping representation
        row.extend(ds.returns.row(t).iter().map(|v| format!("{v}")));
        row.push(format!("{}", ds.index_returns[t]));
        writer.write_record(&row)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Subtract training-block means from both blocks.
    TrainStats,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_len: usize,
    pub centering: Centering,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_len: DEFAULT_TRAIN_LEN,
            centering: Centering::TrainStats,
        }
    }
}

/// Train and test blocks, both centred with training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub x_train: Matrix,
    pub y_train: Vec<f64>,
    pub x_test: Matrix,
    pub y_test: Vec<f64>,
    pub column_means: Vec<f64>,
    pub y_mean: f64,
}

/// Positional split: the first `train_len` rows train, the rest test. Test
/// rows are centred with the training means, never their own.
pub fn center_split(ds: &TrackingDataset, spec: &SplitSpec) -> Result<Split> {
    let rows = ds.periods();
    if spec.train_len == 0 || spec.train_len >= rows {
        return Err(DataError::InvalidSplit {
            train_len: spec.train_len,
            rows,
        });
    }
    let mut x_train = ds.returns.row_block(0, spec.train_len);
    let mut x_test = ds.returns.row_block(spec.train_len, rows);
    let mut y_train = ds.index_returns[..spec.train_len].to_vec();
    let mut y_test = ds.index_returns[spec.train_len..].to_vec();

    let d = ds.assets();
    let (column_means, y_mean) = match spec.centering {
        Centering::None => (vec![0.0; d], 0.0),
        Centering::TrainStats => {
            let means = column_means(&x_train);
            let y_mean = mean(&y_train);
            subtract_means(&mut x_train, &means);
            subtract_means(&mut x_test, &means);
            y_train.iter_mut().for_each(|v| *v -= y_mean);
            y_test.iter_mut().for_each(|v| *v -= y_mean);
            (means, y_mean)
        }
    };
    Ok(Split {
        x_train,
        y_train,
        x_test,
        y_test,
        column_means,
        y_mean,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn column_means(x: &Matrix) -> Vec<f64> {
    let mut sums = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        for (s, v) in sums.iter_mut().zip(x.row(i)) {
            *s += v;
        }
    }
    sums.iter().map(|s| s / x.rows() as f64).collect()
}

fn subtract_means(x: &mut Matrix, means: &[f64]) {
    for i in 0..x.rows() {
        for (j, m) in means.iter().enumerate() {
            x.set(i, j, x.get(i, j) - m);
        }
    }
}

/// Seeded regression instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthInstance {
    /// Centred design.
    pub x: Matrix,
    /// Centred response.
    pub y: Vec<f64>,
    pub true_w: Vec<f64>,
}

/// Raw (uncentred) draw shared by [`synth_instance`] and [`synth_dataset`].
fn synth_raw(
    seed: u64,
    n: usize,
    d: usize,
    sparsity: usize,
    noise_sd: f64,
) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
    if n == 0 || d == 0 {
        return Err(DataError::InvalidSynth(format!(
            "need n, d >= 1 (got n={n}, d={d})"
        )));
    }
    if sparsity > d {
        return Err(DataError::InvalidSynth(format!(
            "sparsity {sparsity} exceeds d = {d}"
        )));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(DataError::InvalidSynth(format!(
            "noise_sd must be >= 0, got {noise_sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    let x = Matrix::new(n, d, data)?;

    // partial Fisher-Yates for the support
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..sparsity {
        let j = rng.random_range(i..d);
        idx.swap(i, j);
    }
    let mut true_w = vec![0.0; d];
    for &j in &idx[..sparsity] {
        let magnitude = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        true_w[j] = sign * magnitude;
    }
    let mut y = x.matvec(&true_w);
    for v in y.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *v += noise_sd * e;
    }
    Ok((x, y, true_w))
}

/// Standard-normal design, `sparsity` nonzero weights drawn from
/// `{±1, ±2}`, Gaussian noise; `X` and `y` are then centred.
pub fn synth_instance(
    seed: u64,
    n: usize,
    d: usize,
    sparsity: usize,
    noise_sd: f64,
) -> Result<SynthInstance> {
    let (mut x, mut y, true_w) = synth_raw(seed, n, d, sparsity, noise_sd)?;
    let means = column_means(&x);
    subtract_means(&mut x, &means);
    let y_mean = mean(&y);
    y.iter_mut().for_each(|v| *v -= y_mean);
    Ok(SynthInstance { x, y, true_w })
}

/// The same draw as [`synth_instance`], uncentred and packaged as a panel
/// with a `date` column (`t0001`, …), assets `a001`, … and index `index`.
pub fn synth_dataset(
    seed: u64,
    n: usize,
    d: usize,
    sparsity: usize,
    noise_sd: f64,
) -> Result<(TrackingDataset, Vec<f64>)> {
    let (x, y, true_w) = synth_raw(seed, n, d, sparsity, noise_sd)?;
    let ds = TrackingDataset {
        asset_names: (1..=d).map(|j| format!("a{j:03}")).collect(),
        index_name: "index".to_string(),
        returns: x,
        index_returns: y,
        dates: Some((1..=n).map(|t| format!("t{t:04}")).collect()),
        source_path: format!("synthetic-seed{seed}"),
    };
    Ok((ds, true_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn fixture(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_small_fixture() {
        let f = fixture("date,AAA,BBB,IDX\n2020-01-03,0.01,-0.02,0.005\n2020-01-10,0.00,0.01,0.002\n2020-01-17,-0.03,0.02,-0.01\n");
        let ds = load_csv(f.path(), "IDX").unwrap();
        assert_eq!(ds.periods(), 3);
        assert_eq!(ds.assets(), 2);
        assert_eq!(ds.asset_names, vec!["AAA", "BBB"]);
        assert_eq!(ds.index_returns, vec![0.005, 0.002, -0.01]);
        assert_eq!(ds.dates.as_ref().unwrap()[2], "2020-01-17");
        assert_eq!(ds.returns.get(2, 1), 0.02);
    }

    #[test]
    fn missing_index_column_lists_available() {
        let f = fixture("AAA,BBB\n1,2\n");
        match load_csv(f.path(), "IDX") {
            Err(DataError::MissingIndexColumn { available, .. }) => {
                assert_eq!(available, vec!["AAA", "BBB"])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_ragged_and_non_numeric_rows() {
        let f = fixture("A,IDX\n1,2\n3\n");
        assert!(matches!(
            load_csv(f.path(), "IDX"),
            Err(DataError::Ragged { row: 3, .. })
        ));
        let f = fixture("A,IDX\n1,2\nx,3\n4,5\n6,NaN\n");
        match load_csv(f.path(), "IDX") {
            Err(DataError::NonNumeric {
                rows,
                first_row,
                first_column,
                ..
            }) => {
                assert_eq!(rows, vec![3, 5]);
                assert_eq!(first_row, 3);
                assert_eq!(first_column, "A");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_column_centres_to_zero() {
        let (mut ds, _) = synth_dataset(3, 10, 2, 1, 0.1).unwrap();
        for t in 0..10 {
            ds.returns.set(t, 0, 0.7);
        }
        let s = center_split(
            &ds,
            &SplitSpec {
                train_len: 6,
                centering: Centering::TrainStats,
            },
        )
        .unwrap();
        assert!(s.x_train.column(0).iter().all(|&v| v.abs() <= 1e-15));
        assert!(s.x_test.column(0).iter().all(|&v| v.abs() <= 1e-15));
    }

    #[test]
    fn split_sizes_and_uncentred_passthrough() {
        let (ds, _) = synth_dataset(1, 596, 3, 2, 0.1).unwrap();
        let s = center_split(&ds, &SplitSpec::default()).unwrap();
        assert_eq!(s.x_test.rows(), 196);
        assert_eq!(s.y_test.len(), 196);
        let raw = center_split(
            &ds,
            &SplitSpec {
                train_len: 400,
                centering: Centering::None,
            },
        )
        .unwrap();
        assert_eq!(raw.x_train, ds.returns.row_block(0, 400));
        assert_eq!(raw.y_test, ds.index_returns[400..].to_vec());
        assert!(center_split(
            &ds,
            &SplitSpec {
                train_len: 596,
                centering: Centering::None
            }
        )
        .is_err());
        assert!(center_split(
            &ds,
            &SplitSpec {
                train_len: 0,
                centering: Centering::None
            }
        )
        .is_err());
    }

    #[test]
    fn test_block_uses_training_means() {
        let (ds, _) = synth_dataset(9, 30, 4, 2, 0.5).unwrap();
        let s = center_split(
            &ds,
            &SplitSpec {
                train_len: 20,
                centering: Centering::TrainStats,
            },
        )
        .unwrap();
        for j in 0..4 {
            assert!(
                (s.x_test.get(0, j) - (ds.returns.get(20, j) - s.column_means[j])).abs() < 1e-15
            );
        }
        assert!((s.y_test[3] - (ds.index_returns[23] - s.y_mean)).abs() < 1e-15);
    }

    #[test]
    fn synth_is_deterministic_and_sparse() {
        let a = synth_instance(1, 50, 20, 5, 0.1).unwrap();
        let b = synth_instance(1, 50, 20, 5, 0.1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.true_w.iter().filter(|w| **w != 0.0).count(), 5);
        assert!(a
            .true_w
            .iter()
            .all(|w| [0.0, 1.0, -1.0, 2.0, -2.0].contains(w)));
        assert_ne!(a, synth_instance(2, 50, 20, 5, 0.1).unwrap());
        assert!(synth_instance(1, 5, 3, 4, 0.1).is_err());
    }

    #[test]
    fn synth_without_signal_is_noise() {
        let s = synth_instance(4, 40, 6, 0, 1.0).unwrap();
        assert!(s.true_w.iter().all(|&w| w == 0.0));
        assert!(s.y.iter().any(|&v| v != 0.0));
    }
}
