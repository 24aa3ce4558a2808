//! The phased MAP-Elites loop.
//!
//! For each phase: set `alpha` from the schedule; at every boundary after
//! the first, optionally apply extinction and then re-score the archive
//! into a fresh one; then run a fixed number of generations of
//! select → iso+line → evaluate → insert. Evaluations fan out over a rayon
//! pool, while selection, variation and insertion stay on one thread in
//! batch order, so results do not depend on the worker count.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::archive::Archive;
use crate::cvt::{cached_cvt_centroids, default_cvt_samples, Centroids};
use crate::error::{Error, Result};
use crate::schedule::{apply_extinction, ScheduleConfig};
use crate::task::{evaluate_all, Task, TaskConfig};
use crate::types::{Genome, Solution};
use crate::variation::{iso_line, VariationParams};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: TaskConfig,
    pub schedule: ScheduleConfig,
    pub k: usize,
    pub batch_size: usize,
    pub generations_per_phase: usize,
    /// Std of the zero-mean normal used for initial genomes.
    pub init_sigma: f64,
    pub variation: VariationParams,
    pub seed: u64,
    pub cvt_samples: usize,
    /// Seed for the tessellation; independent of `seed` so that runs
    /// compared against each other share cells.
    pub cvt_seed: u64,
    /// Evaluation threads; 0 uses the rayon default.
    pub workers: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: TaskConfig::ScaledArm(Default::default()),
            schedule: ScheduleConfig::default(),
            k: 1024,
            batch_size: 256,
            generations_per_phase: 20,
            init_sigma: 0.1,
            variation: VariationParams::default(),
            seed: 0,
            cvt_samples: default_cvt_samples(1024),
            cvt_seed: 2024,
            workers: 0,
            output_dir: PathBuf::from("run"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.task {
            TaskConfig::ScaledArm(p) => p.validate()?,
            TaskConfig::Crawler(p) => p.validate()?,
        }
        self.schedule.validate()?;
        self.variation.validate()?;
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        if self.generations_per_phase == 0 {
            return Err(Error::invalid("generations_per_phase must be at least 1"));
        }
        if !(self.init_sigma >= 0.0 && self.init_sigma.is_finite()) {
            return Err(Error::invalid("init_sigma must be finite and non-negative"));
        }
        if self.cvt_samples < 10 * self.k {
            return Err(Error::invalid(format!(
                "cvt_samples ({}) must be at least 10·k ({})",
                self.cvt_samples,
                10 * self.k
            )));
        }
        Ok(())
    }

    /// Total generated candidates over the run (reevaluations excluded).
    pub fn evaluation_budget(&self) -> u64 {
        self.batch_size as u64 * (1 + (self.schedule.total_phases * self.generations_per_phase) as u64)
    }
}

/// One row of the per-generation log. Generation 0 is the random initial
/// batch.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub generation: usize,
    pub phase: usize,
    pub alpha: f64,
    pub coverage: f64,
    pub max_fitness: Option<f64>,
    pub evaluations: u64,
    pub reevaluations: u64,
    pub discards: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub archive: Archive,
    pub metrics: Vec<MetricsRecord>,
    pub centroids: Arc<Centroids>,
    pub alphas: Vec<f64>,
}

/// Evaluates `genomes` at `alpha`; output position `i` belongs to input
/// `i`, with failed evaluations as `None`.
pub fn evaluate_batch(genomes: Vec<Genome>, task: &dyn Task, alpha: f64) -> Vec<Option<Solution>> {
    evaluate_all(task, genomes, alpha)
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_genomes(n: usize, len: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<Genome> {
    (0..n)
        .map(|_| {
            let params = (0..len).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            Genome::new(params).expect("finite normal draws")
        })
        .collect()
}

pub fn run_experiment(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    if config.workers == 0 {
        return run_inner(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_inner(config))
}

struct Counters {
    evaluations: u64,
    reevaluations: u64,
    discards: u64,
}

fn run_inner(config: &RunConfig) -> Result<RunOutput> {
    let task = config.task.build()?;
    let task: &dyn Task = task.as_ref();
    let centroids = cached_cvt_centroids(config.k, task.descriptor_dim(), config.cvt_samples, config.cvt_seed)?;

    let mut rng = rng_stream(config.seed, 0);
    let mut schedule_rng = rng_stream(config.seed, 1);
    let mut extinction_rng = rng_stream(config.seed, 2);
    let alphas = config.schedule.trajectory(&mut schedule_rng)?;

    let mut archive = Archive::new(Arc::clone(&centroids));
    let mut counters = Counters {
        evaluations: 0,
        reevaluations: 0,
        discards: 0,
    };
    let mut metrics = Vec::with_capacity(1 + config.schedule.total_phases * config.generations_per_phase);

    let insert = |archive: &mut Archive, counters: &mut Counters, genomes: Vec<Genome>, alpha: f64| -> Result<()> {
        counters.evaluations += genomes.len() as u64;
        for s in evaluate_batch(genomes, task, alpha) {
            match s {
                Some(s) => {
                    archive.try_insert(s)?;
                }
                None => counters.discards += 1,
            }
        }
        Ok(())
    };
    let record = |archive: &Archive, counters: &Counters, generation, phase, alpha| {
        let m = archive.metrics();
        MetricsRecord {
            generation,
            phase,
            alpha,
            coverage: m.coverage,
            max_fitness: m.max_fitness,
            evaluations: counters.evaluations,
            reevaluations: counters.reevaluations,
            discards: counters.discards,
        }
    };

    let genome_len = task.genome_len();
    let initial = random_genomes(config.batch_size, genome_len, config.init_sigma, &mut rng);
    insert(&mut archive, &mut counters, initial, alphas[0])?;
    metrics.push(record(&archive, &counters, 0, 0, alphas[0]));

    let mut generation = 0;
    for (phase, &alpha) in alphas.iter().enumerate() {
        if phase > 0 {
            if config.schedule.extinction_sigma > 0.0 {
                apply_extinction(&mut archive, config.schedule.extinction_sigma, &mut extinction_rng)?;
            }
            let transfer = archive.reevaluate_and_transfer(task, alpha)?;
            counters.reevaluations += transfer.reevaluated as u64;
            counters.discards += transfer.discarded as u64;
            archive = transfer.archive;
        }
        for _ in 0..config.generations_per_phase {
            generation += 1;
            // An archive emptied by extinction or discards is reseeded.
            let children = if archive.is_empty() {
                random_genomes(config.batch_size, genome_len, config.init_sigma, &mut rng)
            } else {
                let pairs = archive.select_parents(config.batch_size, &mut rng)?;
                pairs
                    .into_iter()
                    .map(|(a, b)| iso_line(&a.genome, &b.genome, &config.variation, &mut rng))
                    .collect::<Result<Vec<_>>>()?
            };
            insert(&mut archive, &mut counters, children, alpha)?;
            metrics.push(record(&archive, &counters, generation, phase, alpha));
        }
    }

    Ok(RunOutput {
        archive,
        metrics,
        centroids,
        alphas,
    })
}
