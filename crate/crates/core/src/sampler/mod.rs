//! Stochastic synthesis of pedestrian scenes from real statistics and paths.
//!
//! One scene is built as follows:
//!
//! 1. draw the crowd size `n_p` from the count distribution (a normal
//!    left-truncated at zero, rounded half-up, at least 1);
//! 2. for each pedestrian draw a mean speed uniformly from the real
//!    per-pedestrian means, then a walking speed from a normal around it,
//!    again truncated at zero;
//! 3. draw a real path uniformly, translate it, maybe reverse it, cut a few
//!    waypoints off its end, and fit a piecewise-linear arc-length spline `g`;
//! 4. emit `x_l = g(s * dt * l)` for `l = 1..=N+1`.
//!
//! A dataset is `M` such scenes laid end to end in frame time. Scene `j`
//! draws only from its own child stream (see [`crate::rng`]), so scenes can be
//! generated in any order or in parallel with identical output.

mod perturb;
mod spline;
mod truncnorm;

pub use perturb::{max_truncation, perturb, translate, truncate_end, PerturbParams, PerturbedPath};
pub use spline::PathSpline;
pub use truncnorm::{sample_truncated_normal, MAX_REJECTIONS};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::io::{SceneDataset, Trajectory};
use crate::rng::{child_stream, SCENE_DOMAIN};
use crate::stats::SceneStatistics;

/// Path draws per pedestrian before a degenerate pool is reported.
pub const MAX_PATH_DRAWS: usize = 100;

/// What a pedestrian does once its required travel exceeds the path length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExhaustionPolicy {
    /// Stay at the path's end; every trajectory keeps `N + 1` positions.
    #[default]
    Clamp,
    /// End the trajectory at the last position inside the path (at least one
    /// position is always kept).
    DropRemaining,
}

impl fmt::Display for ExhaustionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExhaustionPolicy::Clamp => "clamp",
            ExhaustionPolicy::DropRemaining => "drop",
        })
    }
}

impl FromStr for ExhaustionPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(ExhaustionPolicy::Clamp),
            "drop" | "drop_remaining" => Ok(ExhaustionPolicy::DropRemaining),
            other => Err(Error::domain(format!(
                "unknown exhaustion policy `{other}` (expected clamp or drop)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    /// `N`: each trajectory has up to `N + 1` positions.
    pub timesteps: usize,
    /// `M`: number of scenes.
    pub reps: usize,
    /// Seconds per timestep.
    pub dt: f64,
    /// Translation half-width, meters.
    pub radius: f64,
    pub p_reverse: f64,
    pub trunc_max_fraction: f64,
    pub seed: u64,
    /// Walk exactly at the drawn mean speed.
    pub zero_sigma_s: bool,
    /// Use `round(mu_p)` pedestrians in every scene.
    pub zero_sigma_p: bool,
    pub exhaustion: ExhaustionPolicy,
    /// Generate scenes until at least this many frames exist, ignoring `reps`.
    pub target_frames: Option<usize>,
    /// Annotation frames per timestep in the written dataset.
    pub frame_stride: u64,
    /// Worker threads; 0 uses every core, 1 runs inline. Output does not depend on it.
    pub threads: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            timesteps: 20,
            reps: 500,
            dt: crate::DEFAULT_DT,
            radius: 2.0,
            p_reverse: 0.5,
            trunc_max_fraction: 0.5,
            seed: 0,
            zero_sigma_s: false,
            zero_sigma_p: false,
            exhaustion: ExhaustionPolicy::Clamp,
            target_frames: None,
            frame_stride: 10,
            threads: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::domain(msg));
        if self.timesteps < 1 {
            return fail("timesteps must be at least 1".into());
        }
        if self.target_frames.is_none() && self.reps < 1 {
            return fail("reps must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return fail(format!("radius must be non-negative, got {}", self.radius));
        }
        if !(0.0..=1.0).contains(&self.p_reverse) {
            return fail(format!(
                "p_reverse must lie in [0, 1], got {}",
                self.p_reverse
            ));
        }
        if !(0.0..1.0).contains(&self.trunc_max_fraction) {
            return fail(format!(
                "trunc_max_fraction must lie in [0, 1), got {}",
                self.trunc_max_fraction
            ));
        }
        if self.frame_stride < 1 {
            return fail("frame_stride must be at least 1".into());
        }
        Ok(())
    }

    pub fn perturb_params(&self) -> PerturbParams {
        PerturbParams {
            radius: self.radius,
            p_reverse: self.p_reverse,
            trunc_max_fraction: self.trunc_max_fraction,
        }
    }
}

/// How one synthetic pedestrian was made.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub source_ped_id: u64,
    pub translation: Point,
    pub reversed: bool,
    pub truncated: usize,
    /// Drawn mean speed.
    pub mean_speed: f64,
    /// Walking speed.
    pub speed: f64,
    /// Arc length of the perturbed path.
    pub path_length: f64,
    /// Index (0-based) of the first position whose required travel exceeds
    /// the path length, if any.
    pub exhausted_at: Option<usize>,
}

/// One sampled set of trajectories sharing timesteps `1..=N+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub trajectories: Vec<Vec<Point>>,
    pub provenance: Vec<Provenance>,
}

impl SyntheticScene {
    pub fn num_pedestrians(&self) -> usize {
        self.trajectories.len()
    }

    /// Timesteps in which at least one pedestrian is present.
    pub fn num_frames(&self) -> usize {
        self.trajectories.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Draws the crowd size: a normal truncated at zero, rounded half-up, at least 1.
pub fn sample_crowd_size<R: Rng + ?Sized>(
    stats: &SceneStatistics,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<usize> {
    if stats.mu_p.is_nan() || stats.mu_p <= 0.0 {
        return Err(Error::domain(format!(
            "mean crowd size must be positive, got {}",
            stats.mu_p
        )));
    }
    let var = if cfg.zero_sigma_p { 0.0 } else { stats.var_p };
    let n = sample_truncated_normal(stats.mu_p, var, rng)?;
    Ok(((n + 0.5).floor() as usize).max(1))
}

/// Draws `(mean_speed, speed)`: the mean uniformly from the real
/// per-pedestrian means, the speed from a normal around it truncated at zero.
pub fn sample_speed<R: Rng + ?Sized>(
    stats: &SceneStatistics,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if stats.mean_speeds.is_empty() {
        return Err(Error::domain("the mean-speed pool is empty"));
    }
    let idx = rng.random_range(0..stats.mean_speeds.len());
    let mean_speed = *stats.mean_speeds.values().nth(idx).unwrap();
    let var = if cfg.zero_sigma_s { 0.0 } else { stats.var_s };
    let speed = sample_truncated_normal(mean_speed, var, rng)?;
    Ok((mean_speed, speed))
}

/// Samples one scene.
///
/// Per pedestrian the stream is consumed as: mean speed index, speed, then
/// path index and perturbation for each path draw. Paths whose waypoints all
/// coincide after perturbation are redrawn up to [`MAX_PATH_DRAWS`] times.
pub fn sample_scene<R: Rng + ?Sized>(
    stats: &SceneStatistics,
    paths: &[Trajectory],
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<SyntheticScene> {
    let paths: Vec<&Trajectory> = paths.iter().filter(|p| p.positions.len() >= 2).collect();
    if paths.is_empty() {
        return Err(Error::domain(
            "the path pool has no path with 2 or more waypoints",
        ));
    }
    let params = cfg.perturb_params();
    let steps = cfg.timesteps + 1;

    let n_p = sample_crowd_size(stats, cfg, rng)?;
    let mut scene = SyntheticScene {
        trajectories: Vec::with_capacity(n_p),
        provenance: Vec::with_capacity(n_p),
    };
    for _ in 0..n_p {
        let (mean_speed, speed) = sample_speed(stats, cfg, rng)?;

        let mut fitted = None;
        for _ in 0..MAX_PATH_DRAWS {
            let source = paths[rng.random_range(0..paths.len())];
            let perturbed = perturb(&source.positions, &params, rng)?;
            match PathSpline::fit(&perturbed.waypoints) {
                Ok(g) => {
                    fitted = Some((source.ped_id, perturbed, g));
                    break;
                }
                Err(Error::DegeneratePath) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some((source_ped_id, perturbed, g)) = fitted else {
            return Err(Error::Numerical(format!(
                "{MAX_PATH_DRAWS} consecutive path draws were degenerate"
            )));
        };

        let length = g.length();
        let mut positions = Vec::with_capacity(steps);
        let mut exhausted_at = None;
        for l in 1..=steps {
            let distance = speed * cfg.dt * l as f64;
            if distance > length {
                exhausted_at.get_or_insert(l - 1);
                if cfg.exhaustion == ExhaustionPolicy::DropRemaining && !positions.is_empty() {
                    break;
                }
            }
            positions.push(g.at(distance));
        }

        scene.trajectories.push(positions);
        scene.provenance.push(Provenance {
            source_ped_id,
            translation: perturbed.translation,
            reversed: perturbed.reversed,
            truncated: perturbed.truncated,
            mean_speed,
            speed,
            path_length: length,
            exhausted_at,
        });
    }
    Ok(scene)
}

/// Provenance of one pedestrian in a generated dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct ProvenanceRecord {
    pub scene: usize,
    pub ped_id: u64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedDataset {
    pub dataset: SceneDataset,
    pub provenance: Vec<ProvenanceRecord>,
    pub num_scenes: usize,
}

fn scene_at(
    index: usize,
    stats: &SceneStatistics,
    paths: &[Trajectory],
    cfg: &SamplerConfig,
) -> Result<SyntheticScene> {
    let mut rng = child_stream(SCENE_DOMAIN, cfg.seed, index as u64);
    sample_scene(stats, paths, cfg, &mut rng).map_err(|e| Error::Scene {
        index,
        source: Box::new(e),
    })
}

fn scenes_in(
    range: std::ops::Range<usize>,
    stats: &SceneStatistics,
    paths: &[Trajectory],
    cfg: &SamplerConfig,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<SyntheticScene>> {
    match pool {
        None => range.map(|j| scene_at(j, stats, paths, cfg)).collect(),
        Some(pool) => pool.install(|| {
            range
                .into_par_iter()
                .map(|j| scene_at(j, stats, paths, cfg))
                .collect()
        }),
    }
}

/// Generates a dataset of `cfg.reps` scenes, or of enough scenes to reach
/// `cfg.target_frames` frames.
///
/// Scene `j` occupies timesteps `j*(N+1) .. (j+1)*(N+1)`, i.e. frames
/// `[j*(N+1)*stride, (j+1)*(N+1)*stride)`. Pedestrian ids are assigned
/// consecutively from 0 in scene order.
pub fn generate_dataset(
    stats: &SceneStatistics,
    paths: &[Trajectory],
    cfg: &SamplerConfig,
) -> Result<GeneratedDataset> {
    cfg.validate()?;
    let pool = if cfg.threads == 1 {
        None
    } else {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker threads: {e}")))?,
        )
    };

    let scenes = match cfg.target_frames {
        None => scenes_in(0..cfg.reps, stats, paths, cfg, pool.as_ref())?,
        Some(target) => {
            let batch = pool.as_ref().map_or(1, |p| 4 * p.current_num_threads());
            let mut scenes = Vec::new();
            let mut frames = 0;
            'fill: while frames < target {
                let start = scenes.len();
                for scene in scenes_in(start..start + batch, stats, paths, cfg, pool.as_ref())? {
                    frames += scene.num_frames();
                    scenes.push(scene);
                    if frames >= target {
                        break 'fill;
                    }
                }
            }
            scenes
        }
    };

    let steps = (cfg.timesteps + 1) as u64;
    let mut trajectories = Vec::new();
    let mut provenance = Vec::new();
    let mut next_id = 0u64;
    for (j, scene) in scenes.iter().enumerate() {
        let start_frame = j as u64 * steps * cfg.frame_stride;
        for (positions, prov) in scene.trajectories.iter().zip(&scene.provenance) {
            trajectories.push(Trajectory {
                ped_id: next_id,
                start_frame,
                positions: positions.clone(),
            });
            provenance.push(ProvenanceRecord {
                scene: j,
                ped_id: next_id,
                provenance: prov.clone(),
            });
            next_id += 1;
        }
    }

    Ok(GeneratedDataset {
        dataset: SceneDataset::new(cfg.frame_stride, cfg.dt, trajectories),
        provenance,
        num_scenes: scenes.len(),
    })
}

/// Provenance as CSV with a header row.
pub fn provenance_csv(records: &[ProvenanceRecord]) -> String {
    let mut out = String::from(
        "scene,ped_id,source_ped_id,dx,dy,reversed,truncated,mean_speed,speed,path_length,exhausted_at\n",
    );
    for r in records {
        let p = &r.provenance;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scene,
            r.ped_id,
            p.source_ped_id,
            p.translation.x,
            p.translation.y,
            p.reversed as u8,
            p.truncated,
            p.mean_speed,
            p.speed,
            p.path_length,
            p.exhausted_at.map_or(String::new(), |i| i.to_string()),
        ));
    }
    out
}
