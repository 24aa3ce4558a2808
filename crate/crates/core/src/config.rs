//! Flat `key = value` configuration.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored. Every
//! key is optional and unknown keys are rejected. [`RunConfig::to_pairs`]
//! writes the fully resolved form, which parses back to the same config.

use std::path::PathBuf;
use std::str::FromStr;

use crate::arm::ScaledArmParams;
use crate::crawler::CrawlerParams;
use crate::cvt::default_cvt_samples;
use crate::error::{Error, Result};
use crate::runner::RunConfig;
use crate::schedule::ScheduleKind;
use crate::task::TaskConfig;

pub const KEYS: &[&str] = &[
    "task",
    "seed",
    "k",
    "batch_size",
    "generations_per_phase",
    "init_sigma",
    "sigma_iso",
    "sigma_line",
    "schedule",
    "constant_alpha",
    "random_lo",
    "random_hi",
    "total_phases",
    "final_fixed_phases",
    "extinction_sigma",
    "human_peak_phase",
    "cvt_samples",
    "cvt_seed",
    "workers",
    "output_dir",
    "arm.n_joints",
    "arm.joint_limit",
    "crawler.n_masses",
    "crawler.mass",
    "crawler.rest_length",
    "crawler.spring_k",
    "crawler.spring_c",
    "crawler.gear",
    "crawler.gravity",
    "crawler.ground_k",
    "crawler.ground_c",
    "crawler.friction",
    "crawler.dt",
    "crawler.episode_steps",
    "crawler.hidden",
    "crawler.arch_height",
    "crawler.braces",
];

/// Splits a config document into ordered `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        pairs.push(parse_assignment(line).map_err(|reason| Error::ConfigSyntax { line: n + 1, reason })?);
    }
    Ok(pairs)
}

/// Parses a single `key=value` (or `key = value`) assignment.
pub fn parse_assignment(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `key = value`, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("missing key in `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::InvalidConfigValue {
        key: key.to_string(),
        reason: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_widths(key: &str, value: &str) -> Result<Vec<usize>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|w| parse(key, w.trim())).collect()
}

impl RunConfig {
    /// Builds a validated config; later pairs override earlier ones.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut arm = ScaledArmParams::default();
        let mut crawler = CrawlerParams::default();
        let mut task_name = "scaled_arm".to_string();
        let mut schedule_name = "constant".to_string();
        let (mut constant_alpha, mut lo, mut hi) = (1.0, 0.5, 1.5);
        let mut cvt_samples = None;

        for (key, value) in pairs {
            let (key, v) = (key.as_str(), value.as_str());
            match key {
                "task" => task_name = v.to_string(),
                "seed" => c.seed = parse(key, v)?,
                "k" => c.k = parse(key, v)?,
                "batch_size" => c.batch_size = parse(key, v)?,
                "generations_per_phase" => c.generations_per_phase = parse(key, v)?,
                "init_sigma" => c.init_sigma = parse(key, v)?,
                "sigma_iso" => c.variation.sigma_iso = parse(key, v)?,
                "sigma_line" => c.variation.sigma_line = parse(key, v)?,
                "schedule" => schedule_name = v.to_string(),
                "constant_alpha" => constant_alpha = parse(key, v)?,
                "random_lo" => lo = parse(key, v)?,
                "random_hi" => hi = parse(key, v)?,
                "total_phases" => c.schedule.total_phases = parse(key, v)?,
                "final_fixed_phases" => c.schedule.final_fixed_phases = parse(key, v)?,
                "extinction_sigma" => c.schedule.extinction_sigma = parse(key, v)?,
                "human_peak_phase" => c.schedule.human_peak_phase = parse(key, v)?,
                "cvt_samples" => cvt_samples = Some(parse(key, v)?),
                "cvt_seed" => c.cvt_seed = parse(key, v)?,
                "workers" => c.workers = parse(key, v)?,
                "output_dir" => c.output_dir = PathBuf::from(v),
                "arm.n_joints" => arm.n_joints = parse(key, v)?,
                "arm.joint_limit" => arm.joint_limit = parse(key, v)?,
                "crawler.n_masses" => crawler.n_masses = parse(key, v)?,
                "crawler.mass" => crawler.mass = parse(key, v)?,
                "crawler.rest_length" => crawler.rest_length = parse(key, v)?,
                "crawler.spring_k" => crawler.spring_k = parse(key, v)?,
                "crawler.spring_c" => crawler.spring_c = parse(key, v)?,
                "crawler.gear" => crawler.gear = parse(key, v)?,
                "crawler.gravity" => crawler.gravity = parse(key, v)?,
                "crawler.ground_k" => crawler.ground_k = parse(key, v)?,
                "crawler.ground_c" => crawler.ground_c = parse(key, v)?,
                "crawler.friction" => crawler.friction = parse(key, v)?,
                "crawler.dt" => crawler.dt = parse(key, v)?,
                "crawler.episode_steps" => crawler.episode_steps = parse(key, v)?,
                "crawler.hidden" => crawler.hidden = parse_widths(key, v)?,
                "crawler.arch_height" => crawler.arch_height = parse(key, v)?,
                "crawler.braces" => crawler.braces = parse(key, v)?,
                other => return Err(Error::UnknownConfigKey(other.to_string())),
            }
        }

        let bad = |key: &str, e: Error| Error::InvalidConfigValue {
            key: key.to_string(),
            reason: match e {
                Error::InvalidArgument(m) => m,
                other => other.to_string(),
            },
        };
        c.task = match task_name.as_str() {
            "scaled_arm" => TaskConfig::ScaledArm(arm),
            "crawler" => TaskConfig::Crawler(crawler),
            other => {
                return Err(Error::InvalidConfigValue {
                    key: "task".into(),
                    reason: format!("unknown task '{other}' (expected scaled_arm or crawler)"),
                })
            }
        };
        c.schedule.kind = match schedule_name.parse::<ScheduleKind>().map_err(|e| bad("schedule", e))? {
            ScheduleKind::Constant { .. } => ScheduleKind::Constant { alpha: constant_alpha },
            ScheduleKind::RandomUniform { .. } => ScheduleKind::RandomUniform { lo, hi },
            k => k,
        };
        c.cvt_samples = cvt_samples.unwrap_or_else(|| default_cvt_samples(c.k));

        match &c.task {
            TaskConfig::ScaledArm(p) => p.validate().map_err(|e| bad("arm", e))?,
            TaskConfig::Crawler(p) => p.validate().map_err(|e| bad("crawler", e))?,
        }
        c.schedule.validate().map_err(|e| bad("schedule", e))?;
        c.validate()?;
        Ok(c)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    /// Every key with its resolved value. Keys belonging to the task not
    /// selected are omitted.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("task", self.task.name().to_string());
        put("seed", self.seed.to_string());
        put("k", self.k.to_string());
        put("batch_size", self.batch_size.to_string());
        put("generations_per_phase", self.generations_per_phase.to_string());
        put("init_sigma", self.init_sigma.to_string());
        put("sigma_iso", self.variation.sigma_iso.to_string());
        put("sigma_line", self.variation.sigma_line.to_string());
        put("schedule", self.schedule.kind.name().to_string());
        match self.schedule.kind {
            ScheduleKind::Constant { alpha } => put("constant_alpha", alpha.to_string()),
            ScheduleKind::RandomUniform { lo, hi } => {
                put("random_lo", lo.to_string());
                put("random_hi", hi.to_string());
            }
            _ => {}
        }
        put("total_phases", self.schedule.total_phases.to_string());
        put("final_fixed_phases", self.schedule.final_fixed_phases.to_string());
        put("extinction_sigma", self.schedule.extinction_sigma.to_string());
        put("human_peak_phase", self.schedule.human_peak_phase.to_string());
        put("cvt_samples", self.cvt_samples.to_string());
        put("cvt_seed", self.cvt_seed.to_string());
        put("workers", self.workers.to_string());
        put("output_dir", self.output_dir.display().to_string());
        match &self.task {
            TaskConfig::ScaledArm(p) => {
                put("arm.n_joints", p.n_joints.to_string());
                put("arm.joint_limit", p.joint_limit.to_string());
            }
            TaskConfig::Crawler(p) => {
                put("crawler.n_masses", p.n_masses.to_string());
                put("crawler.mass", p.mass.to_string());
                put("crawler.rest_length", p.rest_length.to_string());
                put("crawler.spring_k", p.spring_k.to_string());
                put("crawler.spring_c", p.spring_c.to_string());
                put("crawler.gear", p.gear.to_string());
                put("crawler.gravity", p.gravity.to_string());
                put("crawler.ground_k", p.ground_k.to_string());
                put("crawler.ground_c", p.ground_c.to_string());
                put("crawler.friction", p.friction.to_string());
                put("crawler.dt", p.dt.to_string());
                put("crawler.episode_steps", p.episode_steps.to_string());
                let hidden: Vec<String> = p.hidden.iter().map(ToString::to_string).collect();
                put("crawler.hidden", hidden.join(","));
                put("crawler.arch_height", p.arch_height.to_string());
                put("crawler.braces", p.braces.to_string());
            }
        }
        out
    }
}
