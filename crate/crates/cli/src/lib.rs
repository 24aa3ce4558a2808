//! Subcommand implementations for the `smol` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use smol_core::config::parse_pairs;
use smol_core::io::{self, ARCHIVE_FILE, METRICS_FILE};
use smol_core::stats::Metric;
use smol_core::{compare_final, run_experiment, Comparison, Crawler, Direction, RunConfig, TaskConfig};

/// Environment variable naming the directory relative output paths
/// resolve against.
pub const OUTPUT_ROOT_ENV: &str = "SMOL_OUTPUT_ROOT";

/// Resolves `path` against `root` unless it is absolute.
pub fn resolve(root: Option<&Path>, path: &Path) -> PathBuf {
    match root {
        Some(r) if path.is_relative() => r.join(path),
        _ => path.to_path_buf(),
    }
}

/// Config file contents (if any) followed by overrides, later keys winning.
pub fn load_config(config: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut pairs = match config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
            parse_pairs(&text).with_context(|| format!("in config {}", p.display()))?
        }
        None => Vec::new(),
    };
    pairs.extend(overrides.iter().cloned());
    Ok(RunConfig::from_pairs(&pairs)?)
}

#[derive(Debug, Clone, Default)]
pub struct RunRequest {
    pub config: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub output_root: Option<PathBuf>,
    pub force: bool,
}

impl RunRequest {
    fn all_overrides(&self) -> Vec<(String, String)> {
        let mut o = self.overrides.clone();
        if let Some(seed) = self.seed {
            o.push(("seed".into(), seed.to_string()));
        }
        if let Some(out) = &self.out {
            o.push(("output_dir".into(), out.display().to_string()));
        }
        o
    }
}

/// Runs one experiment and writes its four output files. Returns the
/// output directory.
pub fn cmd_run(req: &RunRequest) -> Result<PathBuf> {
    let overrides = req.all_overrides();
    let config = load_config(req.config.as_deref(), &overrides)?;
    let dir = resolve(req.output_root.as_deref(), &config.output_dir);
    if dir.join(METRICS_FILE).exists() && !req.force {
        bail!("{} already holds a run; pass --force to overwrite", dir.display());
    }
    let output = run_experiment(&config)?;
    io::write_run_outputs(&dir, &config, &output, &overrides)?;
    Ok(dir)
}

/// Label for a run directory: its name with any `_seed<N>` suffix removed.
pub fn default_label(dir: &Path) -> String {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    match name.rsplit_once("_seed") {
        Some((stem, n)) if !stem.is_empty() && !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => stem.to_string(),
        _ => name,
    }
}

/// Final-generation value of `metric` in each run directory, grouped by
/// label in first-seen order.
pub fn collect_final(metric: &str, run_dirs: &[PathBuf], labels: &[String]) -> Result<Vec<(String, Vec<f64>)>> {
    let m: Metric = metric.parse()?;
    ensure!(!run_dirs.is_empty(), "no run directories given");
    ensure!(
        labels.is_empty() || labels.len() == run_dirs.len(),
        "got {} labels for {} run directories",
        labels.len(),
        run_dirs.len()
    );
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, dir) in run_dirs.iter().enumerate() {
        let label = labels.get(i).cloned().unwrap_or_else(|| default_label(dir));
        let path = dir.join(METRICS_FILE);
        ensure!(path.is_file(), "missing {}", path.display());
        let records = io::read_metrics(&path)?;
        let last = records.last().with_context(|| format!("{} has no records", path.display()))?;
        let value = m
            .of(last)
            .with_context(|| format!("{} has no final {metric} value", path.display()))?;
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, v)) => v.push(value),
            None => groups.push((label, vec![value])),
        }
    }
    Ok(groups)
}

/// Median and pairwise p-value table over final-generation values.
/// Higher is better for every metric.
pub fn cmd_compare(metric: &str, run_dirs: &[PathBuf], labels: &[String], out: &Path) -> Result<Comparison> {
    let groups = collect_final(metric, run_dirs, labels)?;
    let table = compare_final(&groups, Direction::HigherIsBetter)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(out, table.to_csv()).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(table)
}

/// Parses `1,2,5` and inclusive ranges like `1..7` (mixable).
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                ensure!(a <= b, "empty seed range {part}");
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().with_context(|| format!("bad seed `{part}`"))?),
        }
    }
    ensure!(!seeds.is_empty(), "seed list is empty");
    Ok(seeds)
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub config: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
    pub schedules: Vec<String>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub metric: String,
    pub force: bool,
}

pub struct SweepOutput {
    pub run_dirs: Vec<PathBuf>,
    /// `None` when there are fewer than two seeds to compare.
    pub comparison: Option<Comparison>,
    pub comparison_path: PathBuf,
}

pub fn sweep_dir_name(schedule: &str, seed: u64) -> String {
    format!("{schedule}_seed{seed}")
}

/// Runs every (schedule, seed) pair into `<out>/<schedule>_seed<seed>`,
/// then compares the schedules.
pub fn cmd_sweep(req: &SweepRequest) -> Result<SweepOutput> {
    ensure!(!req.seeds.is_empty(), "seed list is empty");
    ensure!(!req.schedules.is_empty(), "schedule list is empty");
    req.metric.parse::<Metric>()?;
    let mut jobs = Vec::new();
    for schedule in &req.schedules {
        for &seed in &req.seeds {
            let dir = req.out.join(sweep_dir_name(schedule, seed));
            let mut overrides = req.overrides.clone();
            overrides.push(("schedule".into(), schedule.clone()));
            overrides.push(("seed".into(), seed.to_string()));
            overrides.push(("output_dir".into(), dir.display().to_string()));
            // Validate everything before the first run starts.
            load_config(req.config.as_deref(), &overrides).with_context(|| format!("schedule {schedule}"))?;
            jobs.push((schedule.clone(), dir, overrides));
        }
    }
    if !req.force {
        if let Some((_, dir, _)) = jobs.iter().find(|(_, d, _)| d.exists()) {
            bail!("{} already exists; pass --force to overwrite", dir.display());
        }
    }
    for (_, dir, overrides) in &jobs {
        cmd_run(&RunRequest {
            config: req.config.clone(),
            overrides: overrides.clone(),
            force: true,
            ..RunRequest::default()
        })
        .with_context(|| format!("run {}", dir.display()))?;
    }
    let run_dirs: Vec<PathBuf> = jobs.iter().map(|(_, d, _)| d.clone()).collect();
    let labels: Vec<String> = jobs.iter().map(|(s, _, _)| s.clone()).collect();
    let comparison_path = req.out.join(format!("comparison_{}.csv", req.metric));
    let comparison = if req.seeds.len() >= 2 && req.schedules.len() >= 2 {
        Some(cmd_compare(&req.metric, &run_dirs, &labels, &comparison_path)?)
    } else {
        None
    };
    Ok(SweepOutput { run_dirs, comparison, comparison_path })
}

/// Writes the centroids a run with this config would use.
pub fn cmd_export_centroids(config: &RunConfig, out: &Path) -> Result<()> {
    config.validate()?;
    let task = config.task.build()?;
    let c = smol_core::cvt::cached_cvt_centroids(config.k, task.descriptor_dim(), config.cvt_samples, config.cvt_seed)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    io::write_centroids(out, &c)?;
    Ok(())
}

/// Replays the crawler elite stored in `cell` of a run directory and writes
/// its per-step trajectory. The alpha defaults to the run's final alpha.
pub fn cmd_trace(run_dir: &Path, cell: usize, alpha: Option<f64>, out: &Path) -> Result<(f64, [f64; 2])> {
    let config = load_config(Some(&run_dir.join(io::RUN_META_FILE)), &[])?;
    let TaskConfig::Crawler(params) = &config.task else {
        bail!("trace needs a crawler run, found task `{}`", config.task.name());
    };
    let rows = io::read_archive(&run_dir.join(ARCHIVE_FILE))?;
    let row = rows
        .iter()
        .find(|r| r.cell == cell)
        .with_context(|| format!("cell {cell} is empty in {}", run_dir.display()))?;
    let alpha = match alpha {
        Some(a) => a,
        None => {
            let metrics = io::read_metrics(&run_dir.join(METRICS_FILE))?;
            metrics.last().map_or(1.0, |r| r.alpha)
        }
    };
    let crawler = Crawler::new(params.clone())?;
    let outcome = crawler.write_trajectory(out, &row.genome, alpha)?;
    Ok((outcome.fitness, outcome.duty_factors))
}
