//! Pedestrian trajectory statistics, stochastic trajectory synthesis and
//! probabilistic prediction metrics.
//!
//! The pipeline has four stages:
//!
//! 1. [`io`] reads and writes world-coordinate annotation files
//!    (`frame_id ped_id x y`) and prediction files
//!    (`frame_id ped_id sample_id x y`).
//! 2. [`stats`] extracts crowd-size and walking-speed statistics from a real
//!    scene.
//! 3. [`sampler`] synthesizes scenes by resampling real paths, perturbing them
//!    and walking them at sampled constant speeds.
//! 4. [`metrics`] scores probabilistic predictions (ADE, MDE, FDE and the
//!    per-rank distance curve); [`predictor`] provides a constant-velocity
//!    baseline to feed it.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod manifest;
pub mod metrics;
pub mod predictor;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::Point;
pub use io::{
    parse_dataset, parse_predictions, write_dataset, write_predictions, AnnotationRecord,
    Predictions, SceneDataset, Trajectory,
};
pub use metrics::{ade, fde, mde, quantile_curve, MetricsReport, PredictionSet};
pub use predictor::{predict, PredictorConfig};
pub use sampler::{
    generate_dataset, sample_scene, ExhaustionPolicy, SamplerConfig, SyntheticScene,
};
pub use stats::{compute_statistics, SceneStatistics};

/// Default timestep between consecutive annotated positions, in seconds.
pub const DEFAULT_DT: f64 = 0.4;
