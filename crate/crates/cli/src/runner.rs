//! Experiment orchestration: single runs and sweep grids.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use pairwalk_core::integrator::{evolve, SeriesRecorder};
use pairwalk_core::lattice::build_initial_state;
use pairwalk_core::observables::{self, ObservableRecord, VelocityEstimate};

use crate::config::{ConfigError, ExperimentSpec, GridPoint};
use crate::output;

#[derive(Debug)]
pub enum RunError {
    /// Spec rejected before execution (exit code 2).
    Config(ConfigError),
    /// Failure during execution (exit code 1).
    Engine(String),
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Engine(e) => write!(f, "engine error: {e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Scalar outcomes of one run, used for sweep aggregation.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub velocity: Option<VelocityEstimate>,
    pub final_record: ObservableRecord,
    pub max_norm_drift: f64,
    pub max_edge_probability: f64,
    pub wall_time_seconds: f64,
    pub out_dir: PathBuf,
}

/// Runs one fully resolved spec and writes `series.csv`, `marginals.ndjson`
/// and `report.json` into `out_dir`.
pub fn run_single(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunSummary, RunError> {
    spec.validate()?;
    let run = spec.resolve()?;
    let state = build_initial_state(&run.lattice, &run.init)
        .map_err(|e| RunError::Config(ConfigError {
            field: "initial_state".to_string(),
            message: e.to_string(),
        }))?;

    let started = Instant::now();
    let mut recorder = SeriesRecorder::default();
    let (_, report) = evolve(state, &run.lattice, &run.pulse, &run.integrator, &mut recorder)
        .map_err(|e| RunError::Engine(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();

    output::ensure_dir(out_dir)?;
    output::write_series(&out_dir.join(output::SERIES_FILE), &recorder.records)?;
    output::write_marginals(&out_dir.join(output::MARGINALS_FILE), &recorder.marginals)?;
    output::write_report(&out_dir.join(output::REPORT_FILE), spec, &report, wall)?;

    // centroid drift velocity over the post-pulse window
    let window = (run.pulse.center + 5.0 * run.pulse.width, run.integrator.t_final);
    let series: Vec<(f64, f64)> =
        recorder.records.iter().map(|r| (r.time, r.centroid_1)).collect();
    let velocity = observables::mean_velocity(run.pulse.impulse(), &series, window).ok();

    let final_record = recorder
        .records
        .last()
        .cloned()
        .ok_or_else(|| RunError::Engine("run produced no samples".to_string()))?;
    Ok(RunSummary {
        velocity,
        final_record,
        max_norm_drift: report.max_norm_drift,
        max_edge_probability: report.max_edge_probability,
        wall_time_seconds: wall,
        out_dir: out_dir.to_path_buf(),
    })
}

/// One row of the sweep aggregate.
#[derive(Debug)]
pub struct SweepRow {
    pub point: GridPoint,
    pub outcome: Result<RunSummary, RunError>,
}

impl SweepRow {
    fn to_csv(&self) -> String {
        let p = &self.point;
        match &self.outcome {
            Ok(s) => {
                let (v, res) = match &s.velocity {
                    Some(v) => (v.mean_velocity, v.fit_residual),
                    None => (f64::NAN, f64::NAN),
                };
                let f = &s.final_record;
                format!(
                    "{},{},{},{},{},{},{},{},{},ok",
                    p.impulse,
                    p.interaction,
                    p.width,
                    v,
                    res,
                    f.purity,
                    f.bound_fraction,
                    f.left_fraction,
                    f.right_fraction
                )
            }
            Err(e) => {
                // keep the row parseable: strip delimiter characters from the
                // error text
                let msg: String = e
                    .to_string()
                    .chars()
                    .map(|c| if c == ',' || c == '\n' { ';' } else { c })
                    .collect();
                format!(
                    "{},{},{},nan,nan,nan,nan,nan,nan,error: {msg}",
                    p.impulse, p.interaction, p.width
                )
            }
        }
    }
}

/// Runs every grid point (in parallel when `threads > 1`), writing per-point
/// artifacts under `out_dir/point_NNNN/` and the aggregate `sweep.csv`.
/// Per-point failures become rows; only IO/setup failures abort the sweep.
pub fn run_sweep(
    spec: &ExperimentSpec,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, RunError> {
    spec.validate()?;
    let grid = spec.grid();
    output::ensure_dir(out_dir)?;

    let work = |(index, point): (usize, &GridPoint)| -> SweepRow {
        let sub = spec.at_point(point);
        let dir = out_dir.join(format!("point_{index:04}"));
        SweepRow { point: *point, outcome: run_single(&sub, &dir) }
    };

    let rows: Vec<SweepRow> = if threads == Some(1) {
        grid.iter().enumerate().map(work).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0)) // 0 = rayon picks core count
            .build()
            .map_err(|e| RunError::Engine(e.to_string()))?;
        pool.install(|| grid.par_iter().enumerate().map(work).collect())
    };

    let mut w = BufWriter::new(File::create(out_dir.join(output::SWEEP_FILE))?);
    writeln!(w, "{}", output::SWEEP_HEADER)?;
    for row in &rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    w.flush()?;
    Ok(rows)
}
