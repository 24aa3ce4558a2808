//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smol_core::{Archive, Centroids, Genome, ScaledArm, ScaledArmParams, Solution, Task};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_genomes(n: usize, len: usize, seed: u64) -> Vec<Genome> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| Genome::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap())
        .collect()
}

/// An arm archive filled by `n` random genomes at `alpha = 1`.
pub fn filled_arm_archive(centroids: Arc<Centroids>, n: usize, seed: u64) -> Archive {
    let arm = ScaledArm::new(ScaledArmParams::default()).unwrap();
    let mut archive = Archive::new(centroids);
    for g in random_genomes(n, arm.genome_len(), seed) {
        let (f, d) = arm.evaluate(&g, 1.0);
        archive.try_insert(Solution::from_evaluation(g, f, d).unwrap()).unwrap();
    }
    archive
}
