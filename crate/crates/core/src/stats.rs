//! Crowd-size and walking-speed statistics of a real scene.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::io::{SceneDataset, Trajectory};

/// How the common speed variance is pooled over pedestrians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpeedVariance {
    /// Squared deviations from each pedestrian's own mean speed, divided by
    /// `sum(n_k - 1)`.
    #[default]
    Pooled,
    /// Sample variance of all step speeds flattened into one list.
    Global,
}

/// Summary statistics that drive the sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneStatistics {
    /// Unique pedestrians with at least two observations.
    pub num_pedestrians: usize,
    /// Mean number of pedestrians per annotated frame.
    pub mu_p: f64,
    /// Population variance of the per-frame pedestrian count.
    pub var_p: f64,
    /// Mean step speed per pedestrian, m/s.
    pub mean_speeds: BTreeMap<u64, f64>,
    /// Common step-speed variance, (m/s)^2.
    pub var_s: f64,
    pub per_step_speeds: BTreeMap<u64, Vec<f64>>,
}

impl SceneStatistics {
    pub fn sigma_p(&self) -> f64 {
        self.var_p.sqrt()
    }

    pub fn sigma_s(&self) -> f64 {
        self.var_s.sqrt()
    }
}

/// Speeds between consecutive positions: `|x[t+1] - x[t]| / dt`.
pub fn step_speeds(traj: &Trajectory, dt: f64) -> Result<Vec<f64>> {
    if traj.positions.len() < 2 {
        return Err(Error::domain(format!(
            "pedestrian {} has {} position(s); step speeds need at least 2",
            traj.ped_id,
            traj.positions.len()
        )));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::domain(format!(
            "timestep must be positive, got {dt}"
        )));
    }
    Ok(traj
        .positions
        .windows(2)
        .map(|w| w[1].distance(w[0]) / dt)
        .collect())
}

/// Mean and population variance of the per-frame pedestrian count, taken
/// over every frame in which at least one pedestrian is annotated.
pub fn frame_count_stats(data: &SceneDataset) -> Result<(f64, f64)> {
    let counts = data.frame_counts();
    if counts.is_empty() {
        return Err(Error::domain("frame counts of an empty dataset"));
    }
    let n = counts.len() as f64;
    let mean = counts.values().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .values()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok((mean, var))
}

/// Mean shifted by the first value, so a constant sequence has its exact value as mean.
fn mean(values: &[f64]) -> f64 {
    let origin = values[0];
    origin + values.iter().map(|v| v - origin).sum::<f64>() / values.len() as f64
}

/// Within-pedestrian pooled variance of step speeds.
///
/// Pedestrians with fewer than two speed samples contribute nothing.
pub fn pooled_speed_variance(per_step_speeds: &BTreeMap<u64, Vec<f64>>) -> Result<f64> {
    let mut sum_sq = 0.0;
    let mut dof = 0usize;
    for speeds in per_step_speeds.values().filter(|s| s.len() >= 2) {
        let m = mean(speeds);
        sum_sq += speeds.iter().map(|s| (s - m).powi(2)).sum::<f64>();
        dof += speeds.len() - 1;
    }
    if dof == 0 {
        return Err(Error::domain(
            "pooled speed variance needs a pedestrian with at least 2 speed samples",
        ));
    }
    Ok(sum_sq / dof as f64)
}

/// Sample variance of every step speed, ignoring which pedestrian it belongs to.
pub fn global_speed_variance(per_step_speeds: &BTreeMap<u64, Vec<f64>>) -> Result<f64> {
    let all: Vec<f64> = per_step_speeds.values().flatten().copied().collect();
    if all.len() < 2 {
        return Err(Error::domain(
            "speed variance needs at least 2 speed samples",
        ));
    }
    let m = mean(&all);
    Ok(all.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (all.len() - 1) as f64)
}

pub fn compute_statistics(data: &SceneDataset) -> Result<SceneStatistics> {
    compute_statistics_with(data, SpeedVariance::Pooled)
}

pub fn compute_statistics_with(
    data: &SceneDataset,
    mode: SpeedVariance,
) -> Result<SceneStatistics> {
    let (mu_p, var_p) = frame_count_stats(data)?;

    let mut per_step_speeds = BTreeMap::new();
    for traj in &data.trajectories {
        per_step_speeds.insert(traj.ped_id, step_speeds(traj, data.dt)?);
    }
    let mean_speeds: BTreeMap<u64, f64> = per_step_speeds
        .iter()
        .map(|(&id, speeds)| (id, mean(speeds)))
        .collect();
    let var_s = match mode {
        SpeedVariance::Pooled => pooled_speed_variance(&per_step_speeds)?,
        SpeedVariance::Global => global_speed_variance(&per_step_speeds)?,
    };

    Ok(SceneStatistics {
        num_pedestrians: mean_speeds.len(),
        mu_p,
        var_p,
        mean_speeds,
        var_s,
        per_step_speeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(ped_id: u64, start_frame: u64, pts: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            ped_id,
            start_frame,
            positions: pts.iter().map(|&p| p.into()).collect(),
        }
    }

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} != {b}");
    }

    #[test]
    fn step_speed_examples() {
        let s = step_speeds(&traj(1, 0, &[(0.0, 0.0), (0.4, 0.0), (0.8, 0.0)]), 0.4).unwrap();
        assert_eq!(s.len(), 2);
        assert_close(s[0], 1.0);
        assert_close(s[1], 1.0);
        assert_eq!(
            step_speeds(&traj(1, 0, &[(0.0, 0.0), (0.0, 0.0)]), 0.4).unwrap(),
            vec![0.0]
        );
        assert_eq!(
            step_speeds(&traj(1, 0, &[(0.0, 0.0), (3.0, 4.0)]), 0.4).unwrap(),
            vec![12.5]
        );
        assert!(matches!(
            step_speeds(&traj(1, 0, &[(0.0, 0.0)]), 0.4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn frame_count_examples() {
        let one = SceneDataset::new(10, 0.4, vec![traj(1, 0, &[(0.0, 0.0); 3])]);
        assert_eq!(frame_count_stats(&one).unwrap(), (1.0, 0.0));

        let two = SceneDataset::new(
            10,
            0.4,
            vec![traj(1, 0, &[(0.0, 0.0); 4]), traj(2, 0, &[(1.0, 0.0); 4])],
        );
        assert_eq!(frame_count_stats(&two).unwrap(), (2.0, 0.0));

        // A over frames 0..=20, B over 10..=30: counts 1, 2, 2, 1.
        let staggered = SceneDataset::new(
            10,
            0.4,
            vec![traj(1, 0, &[(0.0, 0.0); 3]), traj(2, 10, &[(1.0, 0.0); 3])],
        );
        assert_eq!(frame_count_stats(&staggered).unwrap(), (1.5, 0.25));

        assert!(frame_count_stats(&SceneDataset::new(10, 0.4, vec![])).is_err());
    }

    #[test]
    fn pooled_variance_examples() {
        let mut speeds = BTreeMap::new();
        speeds.insert(1, vec![1.3, 1.3, 1.3]);
        speeds.insert(2, vec![0.7, 0.7]);
        assert_eq!(pooled_speed_variance(&speeds).unwrap(), 0.0);

        let mut speeds = BTreeMap::new();
        speeds.insert(1, vec![1.0, 3.0]);
        assert_close(pooled_speed_variance(&speeds).unwrap(), 2.0);

        // Squared deviations 2 and 6, degrees of freedom 1 + 2.
        speeds.insert(2, vec![2.0, 2.0, 5.0]);
        assert_close(pooled_speed_variance(&speeds).unwrap(), 8.0 / 3.0);

        let mut single = BTreeMap::new();
        single.insert(1, vec![1.0]);
        assert!(pooled_speed_variance(&single).is_err());
    }

    #[test]
    fn global_variance_differs_from_pooled() {
        let mut speeds = BTreeMap::new();
        speeds.insert(1, vec![1.0, 1.0]);
        speeds.insert(2, vec![3.0, 3.0]);
        assert_eq!(pooled_speed_variance(&speeds).unwrap(), 0.0);
        assert_close(global_speed_variance(&speeds).unwrap(), 4.0 / 3.0);
    }

    #[test]
    fn two_pedestrian_toy_scene() {
        // Ped 1 over three timesteps, ped 2 over four, as in a two-walker
        // illustration. Speeds at dt = 0.4: ped 1 [1, 2], ped 2 [1, 1.25, 0].
        let data = SceneDataset::new(
            10,
            0.4,
            vec![
                traj(1, 0, &[(0.0, 0.0), (0.4, 0.0), (1.2, 0.0)]),
                traj(2, 0, &[(0.0, 1.0), (0.0, 1.4), (0.3, 1.8), (0.3, 1.8)]),
            ],
        );
        let s = compute_statistics(&data).unwrap();
        assert_eq!(s.num_pedestrians, 2);
        assert_close(s.mean_speeds[&1], 1.5);
        assert_close(s.mean_speeds[&2], 0.75);
        // Deviations: ped 1 0.25 + 0.25, ped 2 0.0625 + 0.25 + 0.5625; dof 3.
        assert_close(s.var_s, 1.375 / 3.0);
        // Frame counts 2, 2, 2, 1.
        assert_close(s.mu_p, 1.75);
        assert_close(s.var_p, 0.1875);
        for (id, speeds) in &s.per_step_speeds {
            assert_close(mean(speeds), s.mean_speeds[id]);
        }
    }

    #[test]
    fn single_pedestrian() {
        let data = SceneDataset::new(
            10,
            0.4,
            vec![traj(3, 40, &[(0.0, 0.0), (0.5, 0.0), (1.1, 0.0)])],
        );
        let s = compute_statistics(&data).unwrap();
        assert_eq!(s.num_pedestrians, 1);
        assert_eq!(s.var_p, 0.0);
        assert_eq!(s.mu_p, 1.0);
    }

    #[test]
    fn scaling_positions_scales_speeds() {
        let base = SceneDataset::new(
            10,
            0.4,
            vec![
                traj(1, 0, &[(0.0, 0.0), (0.4, 0.1), (1.2, 0.3)]),
                traj(2, 10, &[(5.0, 1.0), (5.0, 1.4), (5.3, 1.8), (5.9, 1.9)]),
            ],
        );
        let c = 2.5;
        let mut scaled = base.clone();
        for t in &mut scaled.trajectories {
            for p in &mut t.positions {
                *p = *p * c;
            }
        }
        let a = compute_statistics(&base).unwrap();
        let b = compute_statistics(&scaled).unwrap();
        assert_eq!(a.mu_p, b.mu_p);
        assert_eq!(a.var_p, b.var_p);
        assert_close(b.var_s, a.var_s * c * c);
        for (id, s) in &a.mean_speeds {
            assert_close(b.mean_speeds[id], s * c);
        }
    }
}
