//! Core value types shared by every module: genomes, behavioural
//! descriptors and archived solutions.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Flat real-valued parameter vector, the unit of evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome(Vec<f64>);

impl Genome {
    pub fn new(params: Vec<f64>) -> Result<Self> {
        if let Some(i) = params.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("genome component {i} is not finite")));
        }
        Ok(Genome(params))
    }

    pub fn zeros(len: usize) -> Self {
        Genome(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Genome {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Normalised behavioural coordinates, always inside the unit hypercube.
///
/// Components outside `[0, 1]` are clamped on construction; non-finite
/// components are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor(Vec<f64>);

impl Descriptor {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "descriptor component {i} is not finite"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Descriptor(values))
    }
}

impl Deref for Descriptor {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An archive occupant.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub genome: Genome,
    pub fitness: f64,
    pub descriptor: Descriptor,
}

impl Solution {
    /// Builds a solution from raw task output. Returns `None` when the
    /// fitness or descriptor is not finite (a discarded evaluation).
    pub fn from_evaluation(genome: Genome, fitness: f64, descriptor: Vec<f64>) -> Option<Self> {
        if !fitness.is_finite() {
            return None;
        }
        let descriptor = Descriptor::new(descriptor).ok()?;
        Some(Solution {
            genome,
            fitness,
            descriptor,
        })
    }
}
