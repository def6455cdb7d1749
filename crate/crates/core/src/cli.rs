//! Command-line front end: `fit`, `sweep`, `gen-synth` and `inspect`.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 non-convergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::data::{self, Centering, SplitSpec, TrackingDataset, DEFAULT_TRAIN_LEN};
use crate::diagnostics::{self, OptimalityReport, DEFAULT_CARDINALITY_TOL};
use crate::harness::{
    self, LambdaGrid, MuPolicy, OutputFormat, SweepSpec, V2LambdaScale, DEFAULT_GRID_COUNT,
    DEFAULT_GRID_DECADES, DEFAULT_MU_FRACTION, TOOL_VERSION,
};
use crate::numerics;
use crate::solvers::{
    self, FitResult, Method, SolverError, SolverOptions, DEFAULT_MAX_ITER, DEFAULT_RHO, DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

const DEFAULT_INDEX_COL: &str = "index";
const DEFAULT_NOISE_SD: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(
    name = "plslasso",
    version,
    about = "Sparse regression with PLS-integrated Lasso penalties"
)]
pub struct Cli {
    /// Extra progress output on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one method on the training block and write the result as JSON.
    Fit(FitArgs),
    /// Fit methods over a λ grid and write the RMSE/cardinality table.
    Sweep(SweepArgs),
    /// Write a seeded synthetic tracking dataset.
    GenSynth(SynthArgs),
    /// Summarise a dataset.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Returns CSV: one column per asset, the index column, optional `date`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = DEFAULT_INDEX_COL)]
    pub index_col: String,
    /// Training rows [default: 400, or 2/3 of the rows for short files].
    #[arg(long)]
    pub train_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Fixed v1 weight μ.
    #[arg(long, conflicts_with = "mu_frac")]
    pub mu: Option<f64>,
    /// v1 weight as a fraction of 1/||y_train||^2 [default: 0.5].
    #[arg(long)]
    pub mu_frac: Option<f64>,
    /// ADMM / Douglas-Rachford penalty (v1_dr, v2).
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub method: Method,
    #[command(flatten)]
    pub data: DataArgs,
    /// ℓ₁ weight, or `max` for ||X^T y||_inf on the training block.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Number of assets kept by OST.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output JSON [default: <dataset>_<method>_fit.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "lasso_ista,v1_ista,v2")]
    pub method: Vec<Method>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated, strictly decreasing λ values used by every method.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// A `.csv`/`.json` file for one combined table, otherwise a directory
    /// for one file per method.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Number of periods.
    #[arg(long)]
    pub n: usize,
    /// Number of assets.
    #[arg(long)]
    pub d: usize,
    /// Nonzero weights in the generating model.
    #[arg(long)]
    pub sparsity: usize,
    #[arg(long, default_value_t = DEFAULT_NOISE_SD)]
    pub noise_sd: f64,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    NoConvergence(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::NoConvergence(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(&a, verbose, out, err),
        Command::Sweep(a) => cmd_sweep(&a, verbose, out, err),
        Command::GenSynth(a) => cmd_gen_synth(&a, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn default_train_len(periods: usize) -> usize {
    if periods > DEFAULT_TRAIN_LEN {
        DEFAULT_TRAIN_LEN
    } else {
        2 * periods / 3
    }
}

fn load(args: &DataArgs) -> Result<(TrackingDataset, SplitSpec), CliError> {
    let ds = data::load_csv(&args.data, &args.index_col).map_err(input)?;
    let split = SplitSpec {
        train_len: args
            .train_len
            .unwrap_or_else(|| default_train_len(ds.periods())),
        centering: Centering::TrainStats,
    };
    Ok((ds, split))
}

fn check_solver_flags(args: &SolverArgs, methods: &[Method]) -> Result<(), CliError> {
    let any_v1 = methods.iter().any(|m| m.uses_mu());
    if (args.mu.is_some() || args.mu_frac.is_some()) && !any_v1 {
        return Err(CliError::Input(
            "--mu/--mu-frac only apply to v1 methods (v1_ista, v1_dr)".into(),
        ));
    }
    if args.rho.is_some()
        && !methods
            .iter()
            .any(|m| matches!(m, Method::V1Dr | Method::V2))
    {
        return Err(CliError::Input("--rho only applies to v1_dr and v2".into()));
    }
    if let Some(mu) = args.mu {
        if !(mu >= 0.0) {
            return Err(CliError::Input(format!("--mu must be >= 0, got {mu}")));
        }
    }
    if let Some(f) = args.mu_frac {
        if !(0.0..=1.0).contains(&f) {
            return Err(CliError::Input(format!(
                "--mu-frac must be in [0, 1], got {f}"
            )));
        }
    }
    if !(args.tol > 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be > 0, got {}",
            args.tol
        )));
    }
    if args.max_iter == 0 {
        return Err(CliError::Input("--max-iter must be >= 1".into()));
    }
    Ok(())
}

fn mu_policy(args: &SolverArgs) -> MuPolicy {
    match (args.mu, args.mu_frac) {
        (Some(mu), _) => MuPolicy::Fixed(mu),
        (None, Some(f)) => MuPolicy::Fraction(f),
        (None, None) => MuPolicy::Fraction(DEFAULT_MU_FRACTION),
    }
}

fn solver_options(args: &SolverArgs) -> SolverOptions {
    SolverOptions {
        rho: args.rho.unwrap_or(DEFAULT_RHO),
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolverOptions::default()
    }
}

/// Refuses to clobber a directory and checks the parent exists, before any
/// computation starts.
fn check_output_file(path: &Path) -> Result<(), CliError> {
    if path.is_dir() {
        return Err(CliError::Input(format!(
            "{} is a directory",
            path.display()
        )));
    }
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => Err(CliError::Input(format!(
            "directory {} does not exist",
            p.display()
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct FitDocument<'a> {
    dataset: String,
    source_path: &'a str,
    method: Method,
    lambda: Option<f64>,
    mu: Option<f64>,
    k: Option<usize>,
    train_len: usize,
    test_len: usize,
    centering: Centering,
    solver_options: SolverOptions,
    asset_names: &'a [String],
    weights: &'a [f64],
    cardinality: usize,
    train_rmse: f64,
    test_rmse: f64,
    converged: bool,
    iterations: usize,
    diagnostics: Option<OptimalityReport>,
    objective_trace: &'a [f64],
    extras: &'a solvers::FitExtras,
    tool_version: &'static str,
}

fn cmd_fit(
    args: &FitArgs,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let method = args.method;
    check_solver_flags(&args.solver, &[method])?;
    let penalised = !matches!(method, Method::Ost | Method::PlsDirection);
    match (penalised, &args.lambda) {
        (true, None) => {
            return Err(CliError::Input(format!(
                "--lambda is required for {method}"
            )))
        }
        (false, Some(_)) => {
            return Err(CliError::Input(format!(
                "--lambda does not apply to {method}"
            )))
        }
        _ => {}
    }
    match (method, args.k) {
        (Method::Ost, None) => return Err(CliError::Input("--k is required for ost".into())),
        (m, Some(_)) if m != Method::Ost => {
            return Err(CliError::Input("--k only applies to ost".into()))
        }
        _ => {}
    }
    let lambda_arg = match &args.lambda {
        None => None,
        Some(s) if s.eq_ignore_ascii_case("max") => Some(LambdaArg::Max),
        Some(s) => match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Some(LambdaArg::Value(v)),
            _ => {
                return Err(CliError::Input(format!(
                    "--lambda must be a number >= 0 or 'max', got '{s}'"
                )))
            }
        },
    };
    if let Some(p) = &args.out {
        check_output_file(p)?;
    }

    let (ds, split_spec) = load(&args.data)?;
    let split = data::center_split(&ds, &split_spec).map_err(input)?;
    let (x, y) = (&split.x_train, &split.y_train);
    let y_norm_sq = numerics::dot(y, y);
    let lambda = lambda_arg.map(|l| match l {
        LambdaArg::Max => numerics::norm_inf(&x.tr_matvec(y)),
        LambdaArg::Value(v) => v,
    });
    let mu = method
        .uses_mu()
        .then(|| mu_policy(&args.solver).resolve(y_norm_sq));
    let opts = SolverOptions {
        lambda: lambda.unwrap_or(0.0),
        mu: mu.unwrap_or(0.0),
        ..solver_options(&args.solver)
    };

    let started = Instant::now();
    let fit = match method {
        Method::Ost => solvers::ost(x, y, args.k.expect("checked above")),
        Method::PlsDirection => solvers::pls_first_direction(x, y).map(|w| FitResult {
            method,
            weights: w,
            converged: true,
            iterations: 0,
            objective_trace: Vec::new(),
            extras: Default::default(),
        }),
        m => harness::fit_cell(m, x, y, &opts),
    };
    let fit = fit.map_err(|e| match e {
        SolverError::InnerNoConvergence { .. } => CliError::NoConvergence(e.to_string()),
        e => CliError::Input(e.to_string()),
    })?;
    if verbose {
        let _ = writeln!(err, "fit took {:.3}s", started.elapsed().as_secs_f64());
    }

    let report = match method {
        Method::LassoIsta => Some(diagnostics::kkt_report(
            x,
            y,
            &fit.weights,
            opts.lambda,
            None,
        )),
        Method::V1Ista | Method::V1Dr => {
            Some(diagnostics::kkt_report(x, y, &fit.weights, opts.lambda, mu))
        }
        Method::V2 => match (&fit.extras.gamma, fit.extras.t) {
            (Some(gamma), Some(t)) => Some(diagnostics::kkt_report_constrained(
                x,
                y,
                gamma,
                opts.lambda / t,
            )),
            _ => None,
        },
        Method::Ost | Method::PlsDirection => None,
    };
    let cardinality = diagnostics::cardinality(&fit.weights, DEFAULT_CARDINALITY_TOL);
    let train_rmse = harness::rmse(&x.matvec(&fit.weights), y).map_err(input)?;
    let test_rmse =
        harness::rmse(&split.x_test.matvec(&fit.weights), &split.y_test).map_err(input)?;

    let doc = FitDocument {
        dataset: ds.name(),
        source_path: &ds.source_path,
        method,
        lambda,
        mu,
        k: args.k,
        train_len: split_spec.train_len,
        test_len: ds.periods() - split_spec.train_len,
        centering: split_spec.centering,
        solver_options: opts,
        asset_names: &ds.asset_names,
        weights: &fit.weights,
        cardinality,
        train_rmse,
        test_rmse,
        converged: fit.converged,
        iterations: fit.iterations,
        diagnostics: report,
        objective_trace: &fit.objective_trace,
        extras: &fit.extras,
        tool_version: TOOL_VERSION,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(input)?;
    bytes.push(b'\n');
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_{}_fit.json", ds.name(), method)));
    harness::write_atomically(&path, &bytes).map_err(input)?;

    let lambda_text = lambda
        .map(|l| format!("{l:.6e}"))
        .unwrap_or_else(|| "-".into());
    let _ = writeln!(
        out,
        "method={method} lambda={lambda_text} cardinality={cardinality} train_rmse={train_rmse:.6e} \
         test_rmse={test_rmse:.6e} iterations={} converged={}",
        fit.iterations, fit.converged
    );
    if fit.converged {
        Ok(())
    } else {
        Err(CliError::NoConvergence(format!(
            "{method} stopped after {} iterations without converging; result written to {}",
            fit.iterations,
            path.display()
        )))
    }
}

enum LambdaArg {
    Max,
    Value(f64),
}

fn cmd_sweep(
    args: &SweepArgs,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    check_solver_flags(&args.solver, &args.method)?;
    let mut methods = Vec::new();
    for m in &args.method {
        if !methods.contains(m) {
            methods.push(*m);
        }
    }
    let (lambda_grid, v2_lambda_scale) = match &args.lambdas {
        Some(l) => (LambdaGrid::Explicit(l.clone()), V2LambdaScale::Shared),
        None => (
            LambdaGrid::Auto {
                count: DEFAULT_GRID_COUNT,
                decades: DEFAULT_GRID_DECADES,
            },
            V2LambdaScale::ResponseNormalized,
        ),
    };

    let ext = args
        .out
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let single_file = match ext.as_deref() {
        Some("csv") => Some(OutputFormat::Csv),
        Some("json") => Some(OutputFormat::Json),
        _ => None,
    };
    let format = match (single_file, args.format) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Input(format!(
                "--format {} conflicts with output file {}",
                b.extension(),
                args.out.display()
            )))
        }
        (Some(a), _) => a,
        (None, b) => b.unwrap_or(OutputFormat::Csv),
    };
    if single_file.is_some() {
        check_output_file(&args.out)?;
    } else if args.out.exists() && !args.out.is_dir() {
        return Err(CliError::Input(format!(
            "{} exists and is not a directory",
            args.out.display()
        )));
    }

    let (ds, split) = load(&args.data)?;
    let spec = SweepSpec {
        methods,
        lambda_grid,
        mu_policy: mu_policy(&args.solver),
        v2_lambda_scale,
        split,
        solver_opts: solver_options(&args.solver),
    };
    spec.validate().map_err(input)?;
    // surface split errors as input errors before starting the sweep
    data::center_split(&ds, &spec.split).map_err(input)?;

    let started = Instant::now();
    let report = harness::run_sweep(&ds, &spec).map_err(input)?;
    if verbose {
        let _ = writeln!(
            err,
            "{} cells in {:.2}s",
            report.records.len(),
            started.elapsed().as_secs_f64()
        );
        for r in &report.records {
            let _ = writeln!(
                err,
                "  {:<10} lambda={:.4e} card={:<4} test_rmse={:.4e} iter={} converged={}",
                r.method.as_str(),
                r.lambda,
                r.cardinality,
                r.test_rmse,
                r.iterations,
                r.converged
            );
        }
    }

    let mut written = Vec::new();
    if single_file.is_some() {
        harness::emit_results(&report.records, &report.metadata, format, &args.out)
            .map_err(input)?;
        written.push(args.out.clone());
    } else {
        std::fs::create_dir_all(&args.out)
            .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
        for m in &spec.methods {
            let records: Vec<_> = report
                .records
                .iter()
                .filter(|r| r.method == *m)
                .cloned()
                .collect();
            let path = args.out.join(harness::sweep_file_name(
                &report.metadata.dataset,
                *m,
                format,
            ));
            harness::emit_results(&records, &report.metadata, format, &path).map_err(input)?;
            written.push(path);
        }
    }

    let failed = report.records.iter().filter(|r| r.error.is_some()).count();
    let unconverged = report.records.iter().filter(|r| !r.converged).count();
    let _ = writeln!(
        out,
        "{} records ({} methods x {} lambdas), train/test {}/{}, {} not converged ({} errors)",
        report.records.len(),
        spec.methods.len(),
        report.metadata.lambda_grid.len(),
        report.metadata.train_len,
        report.metadata.test_len,
        unconverged,
        failed
    );
    let flags = harness::pareto_flags(&report.records);
    if !flags.is_empty() && spec.methods.contains(&Method::V2) {
        let dominated = flags.iter().filter(|f| f.dominated_by_v2).count();
        let _ = writeln!(
            out,
            "lasso points weakly dominated by a v2 point: {dominated}/{}",
            flags.len()
        );
    }
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

fn cmd_gen_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_output_file(&args.out)?;
    let (mut ds, _) = data::synth_dataset(args.seed, args.n, args.d, args.sparsity, args.noise_sd)
        .map_err(input)?;
    ds.source_path = args.out.display().to_string();
    // write beside the target, then move into place
    let dir = match args.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::Builder::new()
        .suffix(".csv")
        .tempfile_in(&dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    data::write_csv(&ds, tmp.path()).map_err(input)?;
    tmp.persist(&args.out)
        .map_err(|e| CliError::Input(format!("{}: {}", args.out.display(), e.error)))?;
    let _ = writeln!(
        out,
        "wrote {} ({} periods, {} assets, {} active, seed {})",
        args.out.display(),
        args.n,
        args.d,
        args.sparsity,
        args.seed
    );
    Ok(())
}

fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (ds, split_spec) = load(&args.data)?;
    let t = ds.periods();
    let y = &ds.index_returns;
    let mean = y.iter().sum::<f64>() / t as f64;
    let sd = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t as f64).sqrt();
    let means = data::column_means(&ds.returns);
    let constant = (0..ds.assets())
        .filter(|&j| (0..t).all(|i| ds.returns.get(i, j) == means[j]))
        .count();

    let mut lines = vec![
        format!("dataset      {}", ds.name()),
        format!("path         {}", ds.source_path),
        format!("periods      {t}"),
        format!("assets       {}", ds.assets()),
        format!(
            "index        {} (mean {mean:.6e}, sd {sd:.6e})",
            ds.index_name
        ),
    ];
    if let Some(dates) = &ds.dates {
        if let (Some(a), Some(b)) = (dates.first(), dates.last()) {
            lines.push(format!("dates        {a} .. {b}"));
        }
    }
    if constant > 0 {
        lines.push(format!("constant     {constant} asset columns"));
    }
    match data::center_split(&ds, &split_spec) {
        Ok(split) => {
            let lambda_max = numerics::norm_inf(&split.x_train.tr_matvec(&split.y_train));
            let y_norm_sq = numerics::dot(&split.y_train, &split.y_train);
            lines.push(format!(
                "split        {}/{}",
                split_spec.train_len,
                t - split_spec.train_len
            ));
            lines.push(format!("lambda_max   {lambda_max:.6e}"));
            if y_norm_sq > 0.0 {
                lines.push(format!("mu bound     {:.6e}", 1.0 / y_norm_sq));
            }
        }
        Err(e) => lines.push(format!("split        unavailable: {e}")),
    }
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    Ok(())
}
