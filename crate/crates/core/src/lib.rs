//! Quality-diversity search with developmentally scheduled actuator
//! strength.
//!
//! A CVT MAP-Elites archive is evolved in phases. Between phases the
//! actuator scaling factor `alpha` follows a schedule (constant, SMOL
//! decay, reverse growth, a human-lifespan curve, or random), and the whole
//! archive is re-evaluated under the new value and re-inserted into a
//! fresh archive. Two tasks are provided: a kinematic arm whose joint range
//! scales with `alpha`, and a planar mass-chain crawler whose link
//! actuators scale with `alpha`.

pub mod archive;
pub mod arm;
pub mod config;
pub mod crawler;
pub mod cvt;
pub mod error;
pub mod io;
pub mod runner;
pub mod schedule;
pub mod stats;
pub mod task;
pub mod types;
pub mod variation;

pub use archive::{Archive, ArchiveMetrics, InsertOutcome, Transfer};
pub use arm::{ScaledArm, ScaledArmParams};
pub use crawler::{Crawler, CrawlerParams, MlpShape, RolloutOutcome, SimState};
pub use cvt::{compute_cvt_centroids, Centroids};
pub use error::{Error, Result};
pub use runner::{evaluate_batch, run_experiment, MetricsRecord, RunConfig, RunOutput};
pub use schedule::{apply_extinction, ScheduleConfig, ScheduleKind};
pub use stats::{compare_final, mann_whitney_one_sided, median_iqr, Alternative, Comparison, Direction, MannWhitney};
pub use task::{Task, TaskConfig};
pub use types::{Descriptor, Genome, Solution};
pub use variation::{iso_line, VariationParams};
