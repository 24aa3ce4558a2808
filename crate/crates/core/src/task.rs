//! Task abstraction: evaluate a genome under an actuator-strength factor.

use rayon::prelude::*;

use crate::arm::{ScaledArm, ScaledArmParams};
use crate::crawler::{Crawler, CrawlerParams};
use crate::error::Result;
use crate::types::{Genome, Solution};

/// Anything that scores a genome and reports where it lands in
/// behaviour space, given the current actuator scaling `alpha`.
pub trait Task: Send + Sync {
    fn genome_len(&self) -> usize;
    fn descriptor_dim(&self) -> usize;
    /// Identical inputs give bit-identical outputs.
    fn deterministic(&self) -> bool;
    /// Raw `(fitness, descriptor)`. A non-finite fitness marks a failed
    /// evaluation.
    fn evaluate(&self, genome: &[f64], alpha: f64) -> (f64, Vec<f64>);
}

/// Evaluates every genome at `alpha`, in parallel, preserving input order.
/// Failed evaluations come back as `None`.
pub fn evaluate_all<T: Task + ?Sized>(task: &T, genomes: Vec<Genome>, alpha: f64) -> Vec<Option<Solution>> {
    genomes
        .into_par_iter()
        .map(|g| {
            let (fitness, descriptor) = task.evaluate(&g, alpha);
            Solution::from_evaluation(g, fitness, descriptor)
        })
        .collect()
}

/// Task selection as it appears in run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskConfig {
    ScaledArm(ScaledArmParams),
    Crawler(CrawlerParams),
}

impl TaskConfig {
    pub fn name(&self) -> &'static str {
        match self {
            TaskConfig::ScaledArm(_) => "scaled_arm",
            TaskConfig::Crawler(_) => "crawler",
        }
    }

    pub fn build(&self) -> Result<Box<dyn Task>> {
        Ok(match self {
            TaskConfig::ScaledArm(p) => Box::new(ScaledArm::new(p.clone())?),
            TaskConfig::Crawler(p) => Box::new(Crawler::new(p.clone())?),
        })
    }
}
