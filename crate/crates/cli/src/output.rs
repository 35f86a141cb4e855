//! Artifact writers: time-series CSV, marginal-density NDJSON and the
//! run-report JSON carrying the resolved configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use pairwalk_core::integrator::RunReport;
use pairwalk_core::observables::ObservableRecord;

use crate::config::ExperimentSpec;

pub const SERIES_FILE: &str = "series.csv";
pub const MARGINALS_FILE: &str = "marginals.ndjson";
pub const REPORT_FILE: &str = "report.json";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const SERIES_HEADER: &str =
    "t,centroid_1,centroid_2,norm,purity,double_occ,bound_fraction,left_frac,right_frac";

pub const SWEEP_HEADER: &str = "impulse,interaction,width,mean_velocity,fit_residual,\
purity_final,bound_fraction_final,left_frac,right_frac,status";

pub fn write_series(path: &Path, records: &[ObservableRecord]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SERIES_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.time,
            r.centroid_1,
            r.centroid_2,
            r.norm,
            r.purity,
            r.double_occupancy,
            r.bound_fraction,
            r.left_fraction,
            r.right_fraction
        )?;
    }
    w.flush()
}

#[derive(Serialize)]
struct MarginalRow<'a> {
    t: f64,
    density: &'a [f64],
}

pub fn write_marginals(path: &Path, marginals: &[(f64, Vec<f64>)]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (t, density) in marginals {
        serde_json::to_writer(&mut w, &MarginalRow { t: *t, density })?;
        writeln!(w)?;
    }
    w.flush()
}

/// Run report: conservation diagnostics plus the fully resolved spec so every
/// artifact is reproducible from its own metadata.
#[derive(Serialize)]
pub struct ReportDocument<'a> {
    pub engine_version: &'static str,
    /// Wall-clock seconds for the evolution itself.
    pub wall_time_seconds: f64,
    /// Unix timestamp of completion (only field that varies between
    /// identical runs).
    pub unix_time: u64,
    pub steps: u64,
    pub final_time: f64,
    pub max_norm_drift: f64,
    pub max_edge_probability: f64,
    pub max_exchange_asymmetry: Option<f64>,
    /// Spec with all defaults and overrides folded in.
    pub config: &'a ExperimentSpec,
}

pub fn write_report(
    path: &Path,
    spec: &ExperimentSpec,
    report: &RunReport,
    wall_time_seconds: f64,
) -> std::io::Result<()> {
    let doc = ReportDocument {
        engine_version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds,
        unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        steps: report.steps,
        final_time: report.final_time,
        max_norm_drift: report.max_norm_drift,
        max_edge_probability: report.max_edge_probability,
        max_exchange_asymmetry: report.max_exchange_asymmetry,
        config: spec,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

pub fn ensure_dir(path: &Path) -> std::io::Result<()> {
    fs::create_dir_all(path)
}

/// Machine-readable error document printed on failure exits.
#[derive(Serialize)]
pub struct ErrorDocument {
    pub error: String,
    /// Offending config field, when the failure is a validation error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// 1 = engine error, 2 = config error.
    pub exit_code: i32,
}

impl ErrorDocument {
    pub fn config(field: &str, message: &str) -> Self {
        ErrorDocument {
            error: message.to_string(),
            field: Some(field.to_string()),
            exit_code: 2,
        }
    }

    pub fn engine(message: &str) -> Self {
        ErrorDocument { error: message.to_string(), field: None, exit_code: 1 }
    }

    pub fn print(&self) {
        // errors go to stdout as a single JSON document for machine consumers
        println!("{}", serde_json::to_string(self).expect("error document serializes"));
    }
}
