//! λ sweeps over a tracking dataset: fit every (method, λ) cell on the
//! training block, score RMSE on both blocks, and write plot-ready tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{self, Centering, DataError, SplitSpec, TrackingDataset};
use crate::diagnostics::{self, DEFAULT_CARDINALITY_TOL};
use crate::numerics::{self, Matrix};
use crate::solvers::{self, FitResult, Method, SolverError, SolverOptions};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_GRID_COUNT: usize = 30;
pub const DEFAULT_GRID_DECADES: f64 = 4.0;
/// Default v1 weight as a fraction of the convexity bound `1/‖y‖²`.
pub const DEFAULT_MU_FRACTION: f64 = 0.5;
pub const CSV_COLUMNS: [&str; 8] = [
    "method",
    "lambda",
    "mu",
    "cardinality",
    "train_rmse",
    "test_rmse",
    "iterations",
    "converged",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("nothing to write: no records")]
    NoRecords,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed results file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// How v1's `μ` is chosen for each sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum MuPolicy {
    Fixed(f64),
    /// Fraction of `1/‖y_train‖²`.
    Fraction(f64),
}

impl Default for MuPolicy {
    fn default() -> Self {
        MuPolicy::Fraction(DEFAULT_MU_FRACTION)
    }
}

impl MuPolicy {
    pub fn resolve(self, y_norm_sq: f64) -> f64 {
        match self {
            MuPolicy::Fixed(mu) => mu,
            MuPolicy::Fraction(f) => f / y_norm_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaGrid {
    /// Strictly decreasing positive values.
    Explicit(Vec<f64>),
    /// [`default_lambda_grid`] on the training block.
    Auto { count: usize, decades: f64 },
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid::Auto {
            count: DEFAULT_GRID_COUNT,
            decades: DEFAULT_GRID_DECADES,
        }
    }
}

/// v2's objective divides the residual by `yᵀXw ≈ ‖y‖²`, so the same λ
/// penalises roughly `‖y‖⁴` times harder than in the Lasso.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum V2LambdaScale {
    /// v2 uses the grid as given.
    Shared,
    /// v2 uses `λ / ‖y_train‖⁴`.
    ResponseNormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub methods: Vec<Method>,
    pub lambda_grid: LambdaGrid,
    pub mu_policy: MuPolicy,
    pub v2_lambda_scale: V2LambdaScale,
    pub split: SplitSpec,
    pub solver_opts: SolverOptions,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            methods: vec![Method::LassoIsta, Method::V1Ista, Method::V2],
            lambda_grid: LambdaGrid::default(),
            mu_policy: MuPolicy::default(),
            v2_lambda_scale: V2LambdaScale::ResponseNormalized,
            split: SplitSpec::default(),
            solver_opts: SolverOptions::default(),
        }
    }
}

pub const SWEEP_METHODS: [Method; 4] =
    [Method::LassoIsta, Method::V1Ista, Method::V1Dr, Method::V2];

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidSpec("no methods selected".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| !SWEEP_METHODS.contains(m)) {
            return Err(HarnessError::InvalidSpec(format!(
                "method {m} cannot be swept (choose from lasso_ista, v1_ista, v1_dr, v2)"
            )));
        }
        match &self.lambda_grid {
            LambdaGrid::Explicit(grid) => validate_grid(grid)?,
            LambdaGrid::Auto { count, decades } => {
                if *count < 2 {
                    return Err(HarnessError::InvalidSpec(format!(
                        "grid count must be >= 2, got {count}"
                    )));
                }
                if !(*decades > 0.0) {
                    return Err(HarnessError::InvalidSpec(format!(
                        "grid decades must be > 0, got {decades}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(HarnessError::InvalidSpec("lambda grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(HarnessError::InvalidSpec(format!(
            "lambda values must be positive, got {bad}"
        )));
    }
    if grid.windows(2).any(|p| p[1] >= p[0]) {
        return Err(HarnessError::InvalidSpec(
            "lambda grid must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub method: Method,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub cardinality: usize,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Solver error for cells that produced no fit. JSON only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Self-description written ahead of the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub dataset: String,
    pub source_path: String,
    pub assets: usize,
    pub train_len: usize,
    pub test_len: usize,
    pub centering: Centering,
    pub methods: Vec<Method>,
    /// The grid before any per-method scaling.
    pub lambda_grid: Vec<f64>,
    pub v2_lambda_scale: V2LambdaScale,
    pub mu_policy: MuPolicy,
    pub solver_options: SolverOptions,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: SweepMetadata,
    pub records: Vec<SweepRecord>,
}

/// Root mean squared difference.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    if pred.len() != actual.len() || pred.is_empty() {
        return Err(HarnessError::LengthMismatch(pred.len(), actual.len()));
    }
    let sq: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sq / pred.len() as f64).sqrt())
}

/// `count` log-spaced values from `λ_max = ‖Xᵀy‖_∞` down `decades` orders of
/// magnitude.
pub fn default_lambda_grid(x: &Matrix, y: &[f64], count: usize, decades: f64) -> Vec<f64> {
    let lambda_max = numerics::norm_inf(&x.tr_matvec(y));
    let count = count.max(2);
    (0..count)
        .map(|i| {
            if i == 0 {
                lambda_max
            } else {
                lambda_max * 10f64.powf(-decades * i as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

/// Fits one of the sweepable methods.
pub fn fit_cell(
    method: Method,
    x: &Matrix,
    y: &[f64],
    opts: &SolverOptions,
) -> std::result::Result<FitResult, SolverError> {
    match method {
        Method::LassoIsta => solvers::lasso_ista(x, y, opts),
        Method::V1Ista => solvers::v1_ista(x, y, opts),
        Method::V1Dr => solvers::v1_dr(x, y, opts),
        Method::V2 => solvers::v2_solve(x, y, opts),
        Method::Ost | Method::PlsDirection => Err(SolverError::InvalidOption(format!(
            "{method} has no λ and is not part of sweeps"
        ))),
    }
}

/// Runs every (method, λ) cell. Cells run in parallel; records come back
/// method-major in the order of `spec.methods`, λ descending.
pub fn run_sweep(ds: &TrackingDataset, spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let split = data::center_split(ds, &spec.split)?;
    let y_norm_sq = numerics::dot(&split.y_train, &split.y_train);
    if !(y_norm_sq > 0.0) {
        return Err(HarnessError::InvalidSpec(
            "training response is identically zero".into(),
        ));
    }
    let grid = match &spec.lambda_grid {
        LambdaGrid::Explicit(g) => g.clone(),
        LambdaGrid::Auto { count, decades } => {
            default_lambda_grid(&split.x_train, &split.y_train, *count, *decades)
        }
    };
    validate_grid(&grid)?;
    let mu = spec.mu_policy.resolve(y_norm_sq);

    let cells: Vec<(Method, f64)> = spec
        .methods
        .iter()
        .flat_map(|&m| {
            let factor = match (m, spec.v2_lambda_scale) {
                (Method::V2, V2LambdaScale::ResponseNormalized) => 1.0 / (y_norm_sq * y_norm_sq),
                _ => 1.0,
            };
            grid.iter().map(move |&l| (m, l * factor))
        })
        .collect();

    let records: Vec<SweepRecord> = cells
        .par_iter()
        .map(|&(method, lambda)| {
            let opts = SolverOptions {
                lambda,
                mu: if method.uses_mu() { mu } else { 0.0 },
                ..spec.solver_opts
            };
            let mu_field = method.uses_mu().then_some(mu);
            match fit_cell(method, &split.x_train, &split.y_train, &opts) {
                Ok(fit) => score(method, lambda, mu_field, &fit, &split),
                Err(e) => SweepRecord {
                    method,
                    lambda,
                    mu: mu_field,
                    cardinality: 0,
                    train_rmse: f64::NAN,
                    test_rmse: f64::NAN,
                    iterations: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    Ok(SweepReport {
        metadata: SweepMetadata {
            dataset: ds.name(),
            source_path: ds.source_path.clone(),
            assets: ds.assets(),
            train_len: spec.split.train_len,
            test_len: ds.periods() - spec.split.train_len,
            centering: spec.split.centering,
            methods: spec.methods.clone(),
            lambda_grid: grid,
            v2_lambda_scale: spec.v2_lambda_scale,
            mu_policy: spec.mu_policy,
            solver_options: spec.solver_opts,
            tool_version: TOOL_VERSION.to_string(),
        },
        records,
    })
}

fn score(
    method: Method,
    lambda: f64,
    mu: Option<f64>,
    fit: &FitResult,
    split: &data::Split,
) -> SweepRecord {
    let train_pred = split.x_train.matvec(&fit.weights);
    let test_pred = split.x_test.matvec(&fit.weights);
    SweepRecord {
        method,
        lambda,
        mu,
        cardinality: diagnostics::cardinality(&fit.weights, DEFAULT_CARDINALITY_TOL),
        train_rmse: rmse(&train_pred, &split.y_train).expect("train block is non-empty"),
        test_rmse: rmse(&test_pred, &split.y_test).expect("test block is non-empty"),
        iterations: fit.iterations,
        converged: fit.converged,
        error: None,
    }
}

/// Whether a converged Lasso point is weakly dominated (test RMSE and
/// cardinality both no worse) by some converged v2 point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFlag {
    pub lambda: f64,
    pub cardinality: usize,
    pub test_rmse: f64,
    pub dominated_by_v2: bool,
}

pub fn pareto_flags(records: &[SweepRecord]) -> Vec<ParetoFlag> {
    let v2: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.method == Method::V2 && r.converged && r.test_rmse.is_finite())
        .collect();
    records
        .iter()
        .filter(|r| r.method == Method::LassoIsta && r.converged && r.test_rmse.is_finite())
        .map(|r| ParetoFlag {
            lambda: r.lambda,
            cardinality: r.cardinality,
            test_rmse: r.test_rmse,
            dominated_by_v2: v2
                .iter()
                .any(|v| v.test_rmse <= r.test_rmse && v.cardinality <= r.cardinality),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// `<dataset>_<method>_sweep.<ext>`
pub fn sweep_file_name(dataset: &str, method: Method, format: OutputFormat) -> String {
    format!("{dataset}_{method}_sweep.{}", format.extension())
}

/// Writes records with a metadata header. CSV metadata goes in leading
/// `# key: value` lines; JSON nests it under `metadata`.
pub fn emit_results(
    records: &[SweepRecord],
    metadata: &SweepMetadata,
    format: OutputFormat,
    path: &Path,
) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let bytes = match format {
        OutputFormat::Csv => render_csv(records, metadata)?,
        OutputFormat::Json => render_json(records, metadata)?,
    };
    write_atomically(path, &bytes)
}

fn render_csv(records: &[SweepRecord], metadata: &SweepMetadata) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let meta = serde_json::to_value(metadata)?;
    if let serde_json::Value::Object(map) = meta {
        for (key, value) in map {
            let text = match value {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            writeln!(out, "# {key}: {text}").expect("write to Vec");
        }
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    for r in records {
        writer.write_record([
            r.method.as_str().to_string(),
            format!("{}", r.lambda),
            r.mu.map(|m| format!("{m}")).unwrap_or_default(),
            r.cardinality.to_string(),
            format!("{}", r.train_rmse),
            format!("{}", r.test_rmse),
            r.iterations.to_string(),
            r.converged.to_string(),
        ])?;
    }
    writer
        .into_inner()
        .map_err(|e| HarnessError::Malformed(format!("flushing CSV buffer: {e}")))
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    metadata: &'a SweepMetadata,
    records: &'a [SweepRecord],
    pareto: Vec<ParetoFlag>,
}

fn render_json(records: &[SweepRecord], metadata: &SweepMetadata) -> Result<Vec<u8>> {
    let doc = JsonDocument {
        metadata,
        records,
        pareto: pareto_flags(records),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a temporary file in the target directory so a failed run
/// never leaves a partial file behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// `# key: value` pairs from a results CSV header, in file order.
pub type CsvMetadata = Vec<(String, String)>;

/// Reads a CSV written by [`emit_results`]: metadata lines, then records.
pub fn parse_results_csv(text: &str) -> Result<(CsvMetadata, Vec<SweepRecord>)> {
    let mut metadata = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| HarnessError::Malformed(format!("metadata line '{line}'")))?;
            metadata.push((k.to_string(), v.to_string()));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(HarnessError::Malformed(format!(
            "unexpected columns {header:?}"
        )));
    }
    let bad = |what: &str, v: &str| HarnessError::Malformed(format!("{what} '{v}'"));
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let float = |i: usize| {
            row[i]
                .parse::<f64>()
                .map_err(|_| bad(CSV_COLUMNS[i], &row[i]))
        };
        records.push(SweepRecord {
            method: row[0].parse().map_err(|_| bad("method", &row[0]))?,
            lambda: float(1)?,
            mu: if row[2].is_empty() {
                None
            } else {
                Some(float(2)?)
            },
            cardinality: row[3].parse().map_err(|_| bad("cardinality", &row[3]))?,
            train_rmse: float(4)?,
            test_rmse: float(5)?,
            iterations: row[6].parse().map_err(|_| bad("iterations", &row[6]))?,
            converged: row[7].parse().map_err(|_| bad("converged", &row[7]))?,
            error: None,
        });
    }
    Ok((metadata, records))
}
