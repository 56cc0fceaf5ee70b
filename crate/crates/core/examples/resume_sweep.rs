//! Checkpointed grid sweep: stop part way, resume, and compare with an
//! uninterrupted run.
//!
//! cargo run --release --example resume_sweep

use cavity_bec::sweep::{
    resume_grid, run_grid, write_grid_csv, AxisRange, GridOptions, GridSpec, GridTask,
};

fn main() -> cavity_bec::Result<()> {
    let spec = GridSpec {
        delta_c_range: AxisRange::new(-2600.0, -1400.0, 6),
        pump_range: AxisRange::new(10.0, 40.0, 6),
        tasks: vec![GridTask::Ground, GridTask::StabilityM1],
        ..GridSpec::default()
    };
    let dir = tempfile::tempdir().map_err(|e| cavity_bec::Error::Config(e.to_string()))?;
    let ck = dir.path().join("checkpoint.json");

    let partial = run_grid(
        &spec,
        &GridOptions {
            parallelism: 1,
            checkpoint: Some(ck.clone()),
            stop_after_rows: Some(2),
        },
    )?;
    let done = partial.records.iter().filter(|r| r.is_some()).count();
    println!("interrupted after {done} of {} points", spec.len());

    let resumed = resume_grid(&ck, Some(&spec), &GridOptions { parallelism: 2, ..Default::default() })?;
    println!("resume evaluated {} more points", resumed.evaluated_points);

    let fresh = run_grid(&spec, &GridOptions::default())?;
    let a = dir.path().join("resumed.csv");
    let b = dir.path().join("fresh.csv");
    write_grid_csv(&a, &resumed.complete_records().expect("complete"))?;
    write_grid_csv(&b, &fresh.complete_records().expect("complete"))?;
    let same = std::fs::read(&a).ok() == std::fs::read(&b).ok();
    println!("resumed CSV identical to uninterrupted run: {same}");
    Ok(())
}
