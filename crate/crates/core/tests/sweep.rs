use std::fs;

use cavity_bec::sweep::{
    read_checkpoint, resume_grid, run_grid, write_grid_csv, AxisRange, GridOptions, GridSpec,
    GridTask, PointStatus,
};
use cavity_bec::Error;

fn spec() -> GridSpec {
    GridSpec {
        delta_c_range: AxisRange::new(-2600.0, -1400.0, 4),
        pump_range: AxisRange::new(10.0, 40.0, 5),
        tasks: vec![GridTask::Ground, GridTask::StabilityM1, GridTask::StabilityM2],
        ..GridSpec::default()
    }
}

fn csv_bytes(dir: &std::path::Path, name: &str, outcome: &cavity_bec::sweep::GridOutcome) -> Vec<u8> {
    let p = dir.join(name);
    write_grid_csv(&p, &outcome.complete_records().expect("complete")).unwrap();
    fs::read(p).unwrap()
}

#[test]
fn interrupted_and_resumed_run_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let spec = spec();
    let partial = run_grid(
        &spec,
        &GridOptions {
            parallelism: 1,
            checkpoint: Some(ck.clone()),
            stop_after_rows: Some(1),
        },
    )
    .unwrap();
    assert!(!partial.is_complete());
    assert_eq!(read_checkpoint(&ck).unwrap().completed_points(), spec.cols());

    let resumed = resume_grid(&ck, Some(&spec), &GridOptions::default()).unwrap();
    assert_eq!(resumed.evaluated_points, spec.len() - spec.cols());
    let fresh = run_grid(&spec, &GridOptions::default()).unwrap();
    assert_eq!(
        csv_bytes(dir.path(), "a.csv", &resumed),
        csv_bytes(dir.path(), "b.csv", &fresh)
    );
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec();
    let one = run_grid(&spec, &GridOptions { parallelism: 1, ..Default::default() }).unwrap();
    let four = run_grid(&spec, &GridOptions { parallelism: 4, ..Default::default() }).unwrap();
    assert_eq!(
        csv_bytes(dir.path(), "1.csv", &one),
        csv_bytes(dir.path(), "4.csv", &four)
    );
}

#[test]
fn resuming_a_finished_grid_evaluates_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let spec = spec();
    let opts = GridOptions {
        checkpoint: Some(ck.clone()),
        ..Default::default()
    };
    run_grid(&spec, &opts).unwrap();
    let again = resume_grid(&ck, Some(&spec), &opts).unwrap();
    assert_eq!(again.evaluated_points, 0);
    assert!(again.is_complete());
}

#[test]
fn error_points_are_recomputed_on_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let spec = spec();
    let opts = GridOptions {
        checkpoint: Some(ck.clone()),
        ..Default::default()
    };
    let first = run_grid(&spec, &opts).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&ck).unwrap()).unwrap();
    doc["records"][3]["status"] = "error".into();
    doc["records"][3]["message"] = "injected".into();
    fs::write(&ck, serde_json::to_string(&doc).unwrap()).unwrap();

    let again = resume_grid(&ck, Some(&spec), &opts).unwrap();
    assert_eq!(again.evaluated_points, 1);
    let rec = again.records[3].as_ref().unwrap();
    assert_eq!(rec.status, PointStatus::Ok);
    assert_eq!(rec, first.records[3].as_ref().unwrap());
}

#[test]
fn damaged_or_foreign_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let spec = spec();
    run_grid(
        &spec,
        &GridOptions {
            checkpoint: Some(ck.clone()),
            stop_after_rows: Some(1),
            ..Default::default()
        },
    )
    .unwrap();
    let good = fs::read_to_string(&ck).unwrap();

    let mut other = spec.clone();
    other.pump_range.max = 41.0;
    let err = resume_grid(&ck, Some(&other), &GridOptions::default()).unwrap_err();
    assert!(matches!(err, Error::SpecMismatch { .. }), "{err}");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, &good[..good.len() / 2]).unwrap();
    assert!(matches!(
        resume_grid(&bad, None, &GridOptions::default()).unwrap_err(),
        Error::SpecMismatch { .. }
    ));

    let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
    doc["completed"] = "1".repeat(spec.len()).into();
    fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(matches!(
        resume_grid(&bad, None, &GridOptions::default()).unwrap_err(),
        Error::SpecMismatch { .. }
    ));

    let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
    doc["spec"]["fixed"]["kappa"] = 100.0.into();
    fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(matches!(
        resume_grid(&bad, None, &GridOptions::default()).unwrap_err(),
        Error::SpecMismatch { .. }
    ));
}
