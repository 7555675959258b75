//! Constant-velocity baseline with Gaussian noise growing linearly in the
//! horizon.
//!
//! Each eligible pedestrian is observed over its first `observe_len`
//! positions. With `v = (x_last - x_first) / ((observe_len - 1) * dt)`, sample
//! `j` at future step `t` is `x_last + v * t * dt + e`, `e ~ N(0, (gamma * t)^2 I)`.
//! Noise for pedestrian `k` comes from its own child stream, drawn `x` then `y`
//! for `t = 1..=T`, `j = 0..J`.

use std::collections::BTreeMap;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::io::{Predictions, SceneDataset};
use crate::rng::{child_stream, PREDICTOR_DOMAIN};

#[derive(Clone, Debug, PartialEq)]
pub struct PredictorConfig {
    pub observe_len: usize,
    /// Predicted steps `T`.
    pub horizon: usize,
    /// Samples per step `J`.
    pub num_samples: usize,
    /// Noise standard deviation per step of horizon, meters.
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            observe_len: 8,
            horizon: 8,
            num_samples: 100,
            noise_scale: 0.1,
            seed: 0,
        }
    }
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.observe_len < 2 {
            return Err(Error::domain("observe_len must be at least 2"));
        }
        if self.horizon < 1 || self.num_samples < 1 {
            return Err(Error::domain("horizon and sample count must be at least 1"));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::domain(format!(
                "noise scale must be non-negative, got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineOutput {
    pub predictions: Predictions,
    /// Pedestrians too short for one observe + predict window.
    pub skipped: usize,
}

/// Predicts the steps right after each pedestrian's first observation window.
pub fn predict(dataset: &SceneDataset, cfg: &PredictorConfig) -> Result<BaselineOutput> {
    cfg.validate()?;
    let window = cfg.observe_len + cfg.horizon;
    let dt = dataset.dt;
    let stride = dataset.frame_stride;

    let mut tracks = BTreeMap::new();
    let mut skipped = 0;
    for traj in &dataset.trajectories {
        if traj.positions.len() < window {
            skipped += 1;
            continue;
        }
        let first = traj.positions[0];
        let last = traj.positions[cfg.observe_len - 1];
        let velocity = (last - first) * (1.0 / ((cfg.observe_len - 1) as f64 * dt));
        let mut rng = child_stream(PREDICTOR_DOMAIN, cfg.seed, traj.ped_id);

        let mut frames = BTreeMap::new();
        for t in 1..=cfg.horizon {
            let mean = last + velocity * (t as f64 * dt);
            let sd = cfg.noise_scale * t as f64;
            let samples: Vec<Point> = (0..cfg.num_samples)
                .map(|_| {
                    let ex: f64 = StandardNormal.sample(&mut rng);
                    let ey: f64 = StandardNormal.sample(&mut rng);
                    mean + Point::new(ex, ey) * sd
                })
                .collect();
            let frame = traj.start_frame + (cfg.observe_len - 1 + t) as u64 * stride;
            frames.insert(frame, samples);
        }
        tracks.insert(traj.ped_id, frames);
    }
    if tracks.is_empty() {
        return Err(Error::domain(format!(
            "no pedestrian has the {window} timesteps needed to observe {} and predict {}",
            cfg.observe_len, cfg.horizon
        )));
    }
    Ok(BaselineOutput {
        predictions: Predictions {
            num_samples: cfg.num_samples,
            tracks,
        },
        skipped,
    })
}
