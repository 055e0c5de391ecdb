//! CSV time series, per-protocol summary statistics and the run manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::metrics::MetricsRow;
use crate::protocols::ProtocolKind;
use crate::scalar::Scalar;

pub const CSV_HEADER: [&str; 8] = [
    "run_id",
    "protocol",
    "iteration",
    "total_energy",
    "variation_distance",
    "meetings",
    "balanced_count",
    "cumulative_loss",
];

/// One CSV record for `row`, numbers in shortest round-trip decimal form.
pub fn csv_record<S: Scalar>(run_id: usize, protocol: ProtocolKind, row: &MetricsRow<S>) -> [String; 8] {
    [
        run_id.to_string(),
        protocol.name().to_owned(),
        row.iteration.to_string(),
        row.total_energy.to_string(),
        row.variation_distance.to_string(),
        row.meetings.to_string(),
        row.balanced_count.to_string(),
        row.cumulative_loss.to_string(),
    ]
}

pub fn write_runs_csv<S: Scalar, W: Write>(out: W, runs: &[RunResult<S>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for run in runs {
        for row in &run.rows {
            w.write_record(csv_record(run.run_id, run.protocol, row))?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_runs_csv_file<S: Scalar>(path: &Path, runs: &[RunResult<S>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_runs_csv(BufWriter::new(file), runs)
}

/// Per-iteration mean and sample standard deviation across repetitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub repetitions: usize,
    pub mean_total_energy: Vec<f64>,
    pub std_total_energy: Vec<f64>,
    pub mean_variation_distance: Vec<f64>,
    pub std_variation_distance: Vec<f64>,
    pub mean_meetings: Vec<f64>,
    pub std_meetings: Vec<f64>,
    pub mean_balanced_count: Vec<f64>,
    pub std_balanced_count: Vec<f64>,
    pub mean_cumulative_loss: Vec<f64>,
    pub std_cumulative_loss: Vec<f64>,
    pub final_balanced_mean: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

impl ProtocolSummary {
    /// Summarizes runs that all share the same iteration count.
    pub fn from_runs<S: Scalar>(runs: &[RunResult<S>]) -> Self {
        let len = runs.iter().map(|r| r.rows.len()).min().unwrap_or(0);
        let series = |f: fn(&MetricsRow<S>) -> f64| -> (Vec<f64>, Vec<f64>) {
            (0..len)
                .map(|t| {
                    let column: Vec<f64> = runs.iter().map(|r| f(&r.rows[t])).collect();
                    mean_std(&column)
                })
                .unzip()
        };
        let (mean_total_energy, std_total_energy) = series(|r| r.total_energy.as_f64());
        let (mean_variation_distance, std_variation_distance) =
            series(|r| r.variation_distance.as_f64());
        let (mean_meetings, std_meetings) = series(|r| r.meetings as f64);
        let (mean_balanced_count, std_balanced_count) = series(|r| r.balanced_count as f64);
        let (mean_cumulative_loss, std_cumulative_loss) = series(|r| r.cumulative_loss.as_f64());
        let final_balanced_mean = mean_balanced_count.last().copied().unwrap_or(f64::NAN);
        Self {
            repetitions: runs.len(),
            mean_total_energy,
            std_total_energy,
            mean_variation_distance,
            std_variation_distance,
            mean_meetings,
            std_meetings,
            mean_balanced_count,
            std_balanced_count,
            mean_cumulative_loss,
            std_cumulative_loss,
            final_balanced_mean,
        }
    }
}

pub type Summary = BTreeMap<String, ProtocolSummary>;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
