//! Phase-indexed actuator-strength schedules and the extinction modifier.
//!
//! All non-constant schedules ramp over `[0, total − final_fixed)` and hold
//! `alpha = 1` exactly for the final window. Each phase uses the value at
//! its start.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::archive::Archive;
use crate::error::{Error, Result};

pub const SMOL_START: f64 = 1.5;
pub const SMOL_REVERSE_START: f64 = 0.5;
pub const HUMAN_START: f64 = 0.7;
pub const HUMAN_PEAK: f64 = 1.4;
pub const FINAL_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Constant { alpha: f64 },
    Smol,
    SmolReverse,
    SmolHuman,
    RandomUniform { lo: f64, hi: f64 },
}

impl ScheduleKind {
    pub const NAMES: [&'static str; 5] = ["constant", "smol", "smol_reverse", "smol_human", "random"];

    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Constant { .. } => "constant",
            ScheduleKind::Smol => "smol",
            ScheduleKind::SmolReverse => "smol_reverse",
            ScheduleKind::SmolHuman => "smol_human",
            ScheduleKind::RandomUniform { .. } => "random",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a schedule name with default parameters (`constant` → alpha 1,
/// `random` → [0.5, 1.5]).
impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "constant" => ScheduleKind::Constant { alpha: 1.0 },
            "smol" => ScheduleKind::Smol,
            "smol_reverse" => ScheduleKind::SmolReverse,
            "smol_human" => ScheduleKind::SmolHuman,
            "random" => ScheduleKind::RandomUniform { lo: 0.5, hi: 1.5 },
            other => {
                return Err(Error::invalid(format!(
                    "unknown schedule '{other}' (expected one of: {})",
                    ScheduleKind::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    pub total_phases: usize,
    pub final_fixed_phases: usize,
    pub extinction_sigma: f64,
    /// Phase at which the human-lifespan schedule peaks.
    pub human_peak_phase: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            kind: ScheduleKind::Constant { alpha: 1.0 },
            total_phases: 100,
            final_fixed_phases: 10,
            extinction_sigma: 0.0,
            human_peak_phase: 30,
        }
    }
}

fn lerp(from: f64, to: f64, t: f64) -> f64 {
    from + (to - from) * t
}

impl ScheduleConfig {
    pub fn with_kind(kind: ScheduleKind) -> Self {
        ScheduleConfig {
            kind,
            ..Default::default()
        }
    }

    /// Length of the ramp before the fixed final window.
    pub fn ramp_phases(&self) -> usize {
        self.total_phases - self.final_fixed_phases
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_phases == 0 {
            return Err(Error::invalid("total_phases must be at least 1"));
        }
        if self.final_fixed_phases >= self.total_phases {
            return Err(Error::invalid(format!(
                "final_fixed_phases ({}) must be below total_phases ({})",
                self.final_fixed_phases, self.total_phases
            )));
        }
        if !(0.0..=1.0).contains(&self.extinction_sigma) {
            return Err(Error::invalid(format!(
                "extinction_sigma must lie in [0, 1], got {}",
                self.extinction_sigma
            )));
        }
        match self.kind {
            ScheduleKind::Constant { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::invalid(format!("constant alpha must be positive, got {alpha}")))
            }
            ScheduleKind::RandomUniform { lo, hi } if !(lo > 0.0 && lo <= hi && hi.is_finite()) => {
                Err(Error::invalid(format!("random range needs 0 < lo <= hi, got [{lo}, {hi}]")))
            }
            ScheduleKind::SmolHuman if self.human_peak_phase == 0 || self.human_peak_phase >= self.ramp_phases() => {
                Err(Error::invalid(format!(
                    "human_peak_phase ({}) must lie strictly inside the ramp (0, {})",
                    self.human_peak_phase,
                    self.ramp_phases()
                )))
            }
            _ => Ok(()),
        }
    }

    /// Actuator scaling for `phase`. Only the random schedule consumes
    /// `rng` (one draw per call inside the ramp).
    pub fn alpha_at<R: Rng + ?Sized>(&self, phase: usize, rng: &mut R) -> Result<f64> {
        if phase >= self.total_phases {
            return Err(Error::PhaseOutOfRange {
                phase,
                total: self.total_phases,
            });
        }
        if let ScheduleKind::Constant { alpha } = self.kind {
            return Ok(alpha);
        }
        let ramp = self.ramp_phases();
        if phase >= ramp {
            return Ok(FINAL_ALPHA);
        }
        let t = phase as f64 / ramp as f64;
        Ok(match self.kind {
            ScheduleKind::Constant { .. } => unreachable!(),
            ScheduleKind::Smol => lerp(SMOL_START, FINAL_ALPHA, t),
            ScheduleKind::SmolReverse => lerp(SMOL_REVERSE_START, FINAL_ALPHA, t),
            ScheduleKind::SmolHuman => {
                let peak = self.human_peak_phase;
                match phase.cmp(&peak) {
                    std::cmp::Ordering::Less => lerp(HUMAN_START, HUMAN_PEAK, phase as f64 / peak as f64),
                    std::cmp::Ordering::Equal => HUMAN_PEAK,
                    std::cmp::Ordering::Greater => {
                        lerp(HUMAN_PEAK, FINAL_ALPHA, (phase - peak) as f64 / (ramp - peak) as f64)
                    }
                }
            }
            ScheduleKind::RandomUniform { lo, hi } => rng.random_range(lo..=hi),
        })
    }

    /// The whole trajectory, one value per phase.
    pub fn trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        (0..self.total_phases).map(|p| self.alpha_at(p, rng)).collect()
    }
}

/// Empties each occupied cell independently with probability `sigma`.
/// Returns the number of removed elites.
pub fn apply_extinction<R: Rng + ?Sized>(archive: &mut Archive, sigma: f64, rng: &mut R) -> Result<usize> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid(format!("extinction sigma must lie in [0, 1], got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(0);
    }
    let cells: Vec<usize> = archive.iter().map(|(i, _)| i).collect();
    let mut removed = 0;
    for cell in cells {
        if rng.random_bool(sigma) {
            archive.remove(cell);
            removed += 1;
        }
    }
    Ok(removed)
}
