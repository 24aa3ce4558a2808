//! Delimited-text output files: archive, centroids, metrics and run
//! metadata. Floats are written in shortest round-trip form, so files are
//! bit-stable and re-readable without loss.

use std::fs;
use std::path::Path;

use crate::archive::Archive;
use crate::cvt::Centroids;
use crate::error::{Error, Result};
use crate::runner::{MetricsRecord, RunConfig, RunOutput};

pub const METRICS_FILE: &str = "metrics.csv";
pub const ARCHIVE_FILE: &str = "archive.csv";
pub const CENTROIDS_FILE: &str = "centroids.csv";
pub const RUN_META_FILE: &str = "run_meta";

pub const METRICS_COLUMNS: [&str; 8] = [
    "generation",
    "phase",
    "alpha",
    "coverage",
    "max_fitness",
    "evaluations",
    "reevaluations",
    "discards",
];

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// One row per occupied cell: `cell, fitness, desc_*, gene_*`.
pub fn write_archive(path: &Path, archive: &Archive) -> Result<()> {
    let d = archive.centroids().dim();
    let n = archive.iter().next().map_or(0, |(_, s)| s.genome.len());
    let mut w = writer(path)?;
    let mut header = vec!["cell".to_string(), "fitness".to_string()];
    header.extend((0..d).map(|i| format!("desc_{i}")));
    header.extend((0..n).map(|i| format!("gene_{i}")));
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for (cell, s) in archive.iter() {
        let mut row = vec![cell.to_string(), s.fitness.to_string()];
        row.extend(s.descriptor.iter().map(f64::to_string));
        row.extend(s.genome.iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRow {
    pub cell: usize,
    pub fitness: f64,
    pub descriptor: Vec<f64>,
    pub genome: Vec<f64>,
}

pub fn read_archive(path: &Path) -> Result<Vec<ArchiveRow>> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let d = header.iter().filter(|h| h.starts_with("desc_")).count();
    if header.get(0) != Some("cell") || header.get(1) != Some("fitness") {
        return Err(malformed(path, "archive header must start with cell,fitness"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| malformed(path, format!("`{f}`: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(ArchiveRow {
            cell: nums[0] as usize,
            fitness: nums[1],
            descriptor: nums[2..2 + d].to_vec(),
            genome: nums[2 + d..].to_vec(),
        });
    }
    Ok(rows)
}

/// `cell, c_0 .. c_{d-1}`.
pub fn write_centroids(path: &Path, centroids: &Centroids) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["cell".to_string()];
    header.extend((0..centroids.dim()).map(|i| format!("c_{i}")));
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for (i, p) in centroids.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_centroids(path: &Path) -> Result<Centroids> {
    let mut r = reader(path)?;
    let dim = r.headers().map_err(|e| Error::csv(path, e))?.len().saturating_sub(1);
    let mut points = Vec::new();
    for (expected, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.get(0) != Some(expected.to_string().as_str()) {
            return Err(malformed(path, format!("row {expected} has a non-sequential cell index")));
        }
        for f in rec.iter().skip(1) {
            points.push(f.parse::<f64>().map_err(|e| malformed(path, format!("`{f}`: {e}")))?);
        }
    }
    Centroids::from_points(dim, points)
}

pub fn write_metrics(path: &Path, records: &[MetricsRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(METRICS_COLUMNS).map_err(|e| Error::csv(path, e))?;
    for r in records {
        w.write_record([
            r.generation.to_string(),
            r.phase.to_string(),
            r.alpha.to_string(),
            r.coverage.to_string(),
            r.max_fitness.map(|f| f.to_string()).unwrap_or_default(),
            r.evaluations.to_string(),
            r.reevaluations.to_string(),
            r.discards.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRecord>> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    if header.iter().ne(METRICS_COLUMNS) {
        return Err(malformed(path, format!("expected columns {}", METRICS_COLUMNS.join(","))));
    }
    let num = |f: &str| -> Result<f64> { f.parse().map_err(|e| malformed(path, format!("`{f}`: {e}"))) };
    let int = |f: &str| -> Result<u64> { f.parse().map_err(|e| malformed(path, format!("`{f}`: {e}"))) };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        out.push(MetricsRecord {
            generation: int(&rec[0])? as usize,
            phase: int(&rec[1])? as usize,
            alpha: num(&rec[2])?,
            coverage: num(&rec[3])?,
            max_fitness: if rec[4].is_empty() { None } else { Some(num(&rec[4])?) },
            evaluations: int(&rec[5])?,
            reevaluations: int(&rec[6])?,
            discards: int(&rec[7])?,
        });
    }
    Ok(out)
}

/// Resolved config as `key = value` lines, preceded by comment lines for
/// any command-line overrides. Readable back as a config file.
pub fn run_meta_text(config: &RunConfig, overrides: &[(String, String)]) -> String {
    let mut s = String::from("# resolved run configuration\n");
    for (k, v) in overrides {
        s.push_str(&format!("# override: {k}={v}\n"));
    }
    for (k, v) in config.to_pairs() {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

/// Writes metrics.csv, archive.csv, centroids.csv and run_meta into `dir`.
pub fn write_run_outputs(dir: &Path, config: &RunConfig, output: &RunOutput, overrides: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_metrics(&dir.join(METRICS_FILE), &output.metrics)?;
    write_archive(&dir.join(ARCHIVE_FILE), &output.archive)?;
    write_centroids(&dir.join(CENTROIDS_FILE), &output.centroids)?;
    let meta = dir.join(RUN_META_FILE);
    fs::write(&meta, run_meta_text(config, overrides)).map_err(|e| Error::io(&meta, e))
}
