//! CVT MAP-Elites archive: one elite per centroid cell.

use std::sync::Arc;

use rand::Rng;

use crate::cvt::Centroids;
use crate::error::{Error, Result};
use crate::task::{evaluate_all, Task};
use crate::types::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    AddedToEmptyCell,
    ReplacedIncumbent,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchiveMetrics {
    pub coverage: f64,
    pub max_fitness: Option<f64>,
}

/// Result of re-scoring an archive under a new `alpha`.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub archive: Archive,
    /// Solutions re-evaluated (the source archive's occupancy).
    pub reevaluated: usize,
    /// Solutions dropped because re-evaluation produced a non-finite score.
    pub discarded: usize,
}

#[derive(Debug, Clone)]
pub struct Archive {
    centroids: Arc<Centroids>,
    cells: Vec<Option<Solution>>,
    occupied: usize,
}

impl Archive {
    pub fn new(centroids: Arc<Centroids>) -> Self {
        let k = centroids.len();
        Archive {
            centroids,
            cells: vec![None; k],
            occupied: 0,
        }
    }

    pub fn centroids(&self) -> &Arc<Centroids> {
        &self.centroids
    }

    pub fn k(&self) -> usize {
        self.cells.len()
    }

    pub fn occupied(&self) -> usize {
        self.occupied
    }

    pub fn is_empty(&self) -> bool {
        self.occupied == 0
    }

    pub fn get(&self, cell: usize) -> Option<&Solution> {
        self.cells.get(cell).and_then(Option::as_ref)
    }

    /// Occupied cells in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Solution)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|s| (i, s)))
    }

    /// Elitist insertion. The candidate takes its cell if the cell is empty
    /// or its fitness is strictly greater than the incumbent's.
    pub fn try_insert(&mut self, candidate: Solution) -> Result<InsertOutcome> {
        let cell = self.centroids.assign_cell(&candidate.descriptor)?;
        Ok(match &mut self.cells[cell] {
            slot @ None => {
                *slot = Some(candidate);
                self.occupied += 1;
                InsertOutcome::AddedToEmptyCell
            }
            Some(incumbent) if candidate.fitness > incumbent.fitness => {
                *incumbent = candidate;
                InsertOutcome::ReplacedIncumbent
            }
            Some(_) => InsertOutcome::Rejected,
        })
    }

    /// Empties `cell`, returning its occupant.
    pub fn remove(&mut self, cell: usize) -> Option<Solution> {
        let taken = self.cells.get_mut(cell)?.take();
        if taken.is_some() {
            self.occupied -= 1;
        }
        taken
    }

    pub fn metrics(&self) -> ArchiveMetrics {
        let max_fitness = self
            .iter()
            .map(|(_, s)| s.fitness)
            .fold(None, |acc: Option<f64>, f| Some(acc.map_or(f, |m| m.max(f))));
        ArchiveMetrics {
            coverage: self.occupied as f64 / self.k() as f64,
            max_fitness,
        }
    }

    /// Re-scores every elite under `alpha` and offers the results, in
    /// ascending source-cell order, to a fresh archive with the same
    /// centroids.
    pub fn reevaluate_and_transfer<T: Task + ?Sized>(&self, task: &T, alpha: f64) -> Result<Transfer> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        let genomes: Vec<_> = self.iter().map(|(_, s)| s.genome.clone()).collect();
        let reevaluated = genomes.len();
        let mut archive = Archive::new(Arc::clone(&self.centroids));
        let mut discarded = 0;
        for solution in evaluate_all(task, genomes, alpha) {
            match solution {
                Some(s) => {
                    archive.try_insert(s)?;
                }
                None => discarded += 1,
            }
        }
        Ok(Transfer {
            archive,
            reevaluated,
            discarded,
        })
    }

    /// Draws `n_pairs` parent pairs, each parent uniform over occupied cells.
    pub fn select_parents<R: Rng + ?Sized>(&self, n_pairs: usize, rng: &mut R) -> Result<Vec<(&Solution, &Solution)>> {
        if self.is_empty() {
            return Err(Error::EmptyArchive);
        }
        let elites: Vec<&Solution> = self.iter().map(|(_, s)| s).collect();
        Ok((0..n_pairs)
            .map(|_| {
                let a = elites[rng.random_range(0..elites.len())];
                let b = elites[rng.random_range(0..elites.len())];
                (a, b)
            })
            .collect())
    }
}
