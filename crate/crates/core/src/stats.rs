//! Per-batch telemetry and CSV output.

use std::io::Write;

use crate::error::Result;

/// One row of the run CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchStats {
    pub batch_index: u64,
    /// Mining + update + shaking, excluding stream reading.
    pub runtime_ms: f64,
    /// Pattern-tree size after the update, before any shake of this batch.
    pub tree_bytes: u64,
    pub node_count: u64,
    pub new_nodes: u64,
    pub dropped_nodes: u64,
    pub offline_ms: f64,
}

/// A run row tagged with the min-support it was produced under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub stats: BatchStats,
}

impl BatchStats {
    /// CSV fields in [`RUN_HEADER`] order; milliseconds to 3 decimals.
    pub fn record(&self) -> [String; 7] {
        [
            self.batch_index.to_string(),
            format!("{:.3}", self.runtime_ms),
            self.tree_bytes.to_string(),
            self.node_count.to_string(),
            self.new_nodes.to_string(),
            self.dropped_nodes.to_string(),
            format!("{:.3}", self.offline_ms),
        ]
    }
}

/// Aggregate figures printed after a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunSummary {
    pub batches: u64,
    pub total_dropped: u64,
    pub peak_bytes: u64,
    pub total_offline_ms: f64,
    pub lost_transactions: u64,
}

impl RunSummary {
    pub fn from_rows(rows: &[BatchStats], lost_transactions: u64) -> Self {
        RunSummary {
            batches: rows.len() as u64,
            total_dropped: rows.iter().map(|r| r.dropped_nodes).sum(),
            peak_bytes: rows.iter().map(|r| r.tree_bytes).max().unwrap_or(0),
            total_offline_ms: rows.iter().map(|r| r.offline_ms).sum(),
            lost_transactions,
        }
    }
}

pub const RUN_HEADER: [&str; 7] = [
    "batch",
    "runtime_ms",
    "tree_bytes",
    "node_count",
    "new_nodes",
    "dropped_nodes",
    "offline_ms",
];

/// Writes run rows with a header line (also when there are no rows).
pub fn write_run_csv<W: Write>(out: W, rows: &[BatchStats]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RUN_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut header = vec!["sigma"];
    header.extend(RUN_HEADER);
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.sigma.to_string()];
        rec.extend(row.stats.record());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Median of `values`; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}
