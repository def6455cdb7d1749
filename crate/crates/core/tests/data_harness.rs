mod common;

use common::fixture;
use plslasso::data::{self, Centering, DataError, SplitSpec};
use plslasso::harness::{self, HarnessError, LambdaGrid, MuPolicy, OutputFormat, SweepSpec};
use plslasso::numerics;
use plslasso::solvers::Method;

fn panel() -> data::TrackingDataset {
    data::load_csv(fixture("small_panel.csv"), "index").unwrap()
}

fn spec(methods: Vec<Method>, grid: LambdaGrid) -> SweepSpec {
    SweepSpec {
        methods,
        lambda_grid: grid,
        split: SplitSpec {
            train_len: 40,
            centering: Centering::TrainStats,
        },
        ..SweepSpec::default()
    }
}

#[test]
fn fixture_loads() {
    let ds = panel();
    assert_eq!((ds.periods(), ds.assets()), (60, 8));
    assert_eq!(ds.index_name, "index");
    assert_eq!(ds.name(), "small_panel");
    assert_eq!(ds.dates.as_ref().unwrap()[0], "t0001");
}

#[test]
fn fixture_is_reproducible_from_its_seed() {
    let (ds, _) = data::synth_dataset(11, 60, 8, 3, 0.1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("again.csv");
    data::write_csv(&ds, &out).unwrap();
    assert_eq!(
        std::fs::read(out).unwrap(),
        std::fs::read(fixture("small_panel.csv")).unwrap()
    );
}

#[test]
fn csv_round_trip_is_exact() {
    let ds = panel();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("copy.csv");
    data::write_csv(&ds, &out).unwrap();
    let back = data::load_csv(&out, "index").unwrap();
    assert_eq!(back.returns, ds.returns);
    assert_eq!(back.index_returns, ds.index_returns);
    assert_eq!(back.asset_names, ds.asset_names);
}

#[test]
fn missing_index_column_is_reported() {
    match data::load_csv(fixture("small_panel.csv"), "NDX") {
        Err(DataError::MissingIndexColumn { name, available }) => {
            assert_eq!(name, "NDX");
            assert!(available.contains(&"index".to_string()));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn test_block_is_centred_with_training_means() {
    let ds = panel();
    let split = data::center_split(
        &ds,
        &SplitSpec {
            train_len: 40,
            centering: Centering::TrainStats,
        },
    )
    .unwrap();
    for m in data::column_means(&split.x_train) {
        assert!(m.abs() < 1e-14);
    }
    let raw_test_mean: f64 = ds.index_returns[40..].iter().sum::<f64>() / 20.0;
    let test_mean: f64 = split.y_test.iter().sum::<f64>() / 20.0;
    assert!((test_mean - (raw_test_mean - split.y_mean)).abs() < 1e-12);
    assert!(data::center_split(
        &ds,
        &SplitSpec {
            train_len: 60,
            centering: Centering::None
        }
    )
    .is_err());
}

#[test]
fn sweep_shape_and_order() {
    let ds = panel();
    let report = harness::run_sweep(
        &ds,
        &spec(
            vec![Method::LassoIsta],
            LambdaGrid::Explicit(vec![10.0, 1.0, 0.1]),
        ),
    )
    .unwrap();
    assert_eq!(report.records.len(), 3);
    let lambdas: Vec<f64> = report.records.iter().map(|r| r.lambda).collect();
    assert_eq!(lambdas, vec![10.0, 1.0, 0.1]);

    let report = harness::run_sweep(
        &ds,
        &spec(
            vec![Method::V2, Method::LassoIsta],
            LambdaGrid::Auto {
                count: 4,
                decades: 2.0,
            },
        ),
    )
    .unwrap();
    let methods: Vec<Method> = report.records.iter().map(|r| r.method).collect();
    assert_eq!(methods, [[Method::V2; 4], [Method::LassoIsta; 4]].concat());
    assert_eq!(report.metadata.train_len, 40);
    assert_eq!(report.metadata.test_len, 20);
}

#[test]
fn lambda_max_record_is_the_zero_predictor() {
    let ds = panel();
    let report = harness::run_sweep(
        &ds,
        &spec(
            vec![Method::LassoIsta, Method::V1Ista],
            LambdaGrid::default(),
        ),
    )
    .unwrap();
    let split = data::center_split(
        &ds,
        &SplitSpec {
            train_len: 40,
            centering: Centering::TrainStats,
        },
    )
    .unwrap();
    let zero = harness::rmse(&vec![0.0; 40], &split.y_train).unwrap();
    for r in report
        .records
        .iter()
        .filter(|r| r.lambda == report.metadata.lambda_grid[0])
    {
        assert_eq!(r.cardinality, 0);
        assert_eq!(r.train_rmse, zero);
    }
}

#[test]
fn v1_without_reward_reproduces_lasso_records() {
    let ds = panel();
    let mut s = spec(
        vec![Method::LassoIsta, Method::V1Ista],
        LambdaGrid::default(),
    );
    s.mu_policy = MuPolicy::Fixed(0.0);
    let report = harness::run_sweep(&ds, &s).unwrap();
    let (lasso, v1) = report.records.split_at(30);
    for (a, b) in lasso.iter().zip(v1) {
        assert!((a.train_rmse - b.train_rmse).abs() <= 1e-6);
        assert!((a.test_rmse - b.test_rmse).abs() <= 1e-6);
    }
}

#[test]
fn lasso_cardinality_is_monotone_along_the_grid() {
    let (ds, _) = data::synth_dataset(5, 120, 25, 6, 0.5).unwrap();
    let mut s = spec(vec![Method::LassoIsta], LambdaGrid::default());
    s.split.train_len = 80;
    let report = harness::run_sweep(&ds, &s).unwrap();
    let mut violations = Vec::new();
    // records run from large λ to small, so cardinality should not drop
    for pair in report.records.windows(2) {
        if pair[1].cardinality < pair[0].cardinality {
            violations.push((pair[1].lambda, pair[0].cardinality - pair[1].cardinality));
        }
    }
    assert!(
        violations.iter().all(|(_, drop)| *drop <= 1),
        "{violations:?}"
    );
}

#[test]
fn csv_output_round_trips() {
    let ds = panel();
    let report = harness::run_sweep(
        &ds,
        &spec(
            vec![Method::V1Ista],
            LambdaGrid::Explicit(vec![5.0, 0.5, 0.05]),
        ),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    harness::emit_results(&report.records, &report.metadata, OutputFormat::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 4);
    assert_eq!(
        body[0],
        "method,lambda,mu,cardinality,train_rmse,test_rmse,iterations,converged"
    );
    let (meta, records) = harness::parse_results_csv(&text).unwrap();
    assert_eq!(records, report.records);
    let keys: Vec<&str> = meta.iter().map(|(k, _)| k.as_str()).collect();
    for key in ["dataset", "train_len", "solver_options", "tool_version"] {
        assert!(keys.contains(&key), "missing {key}");
    }
}

#[test]
fn json_output_matches_schema() {
    let ds = panel();
    let report = harness::run_sweep(
        &ds,
        &spec(
            vec![Method::LassoIsta, Method::V2],
            LambdaGrid::Auto {
                count: 5,
                decades: 3.0,
            },
        ),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    harness::emit_results(&report.records, &report.metadata, OutputFormat::Json, &path).unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("sweep_schema.json")).unwrap())
            .unwrap();
    common::validate(&doc, &schema, "$").unwrap();
    assert_eq!(doc["pareto"].as_array().unwrap().len(), 5);
}

#[test]
fn emit_errors() {
    let ds = panel();
    let report = harness::run_sweep(
        &ds,
        &spec(vec![Method::LassoIsta], LambdaGrid::Explicit(vec![1.0])),
    )
    .unwrap();
    let missing = std::path::Path::new("/nonexistent-dir/out.csv");
    assert!(matches!(
        harness::emit_results(
            &report.records,
            &report.metadata,
            OutputFormat::Csv,
            missing
        ),
        Err(HarnessError::Io { .. })
    ));
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        harness::emit_results(
            &[],
            &report.metadata,
            OutputFormat::Csv,
            &dir.path().join("x.csv")
        ),
        Err(HarnessError::NoRecords)
    ));
}

#[test]
fn solver_failures_become_records() {
    let ds = panel();
    let mut s = spec(vec![Method::V1Ista], LambdaGrid::Explicit(vec![1.0]));
    s.mu_policy = MuPolicy::Fraction(1.5);
    let report = harness::run_sweep(&ds, &s).unwrap();
    let r = &report.records[0];
    assert!(!r.converged);
    assert!(r.error.as_ref().unwrap().contains("convex"));
    assert!(r.train_rmse.is_nan());
}

#[test]
fn default_grid_runs_down_four_decades() {
    let ds = panel();
    let split = data::center_split(
        &ds,
        &SplitSpec {
            train_len: 40,
            centering: Centering::TrainStats,
        },
    )
    .unwrap();
    let grid = harness::default_lambda_grid(&split.x_train, &split.y_train, 30, 4.0);
    let lmax = numerics::norm_inf(&split.x_train.tr_matvec(&split.y_train));
    assert_eq!(grid[0], lmax);
    assert!((grid[29] / lmax - 1e-4).abs() < 1e-12);
}
