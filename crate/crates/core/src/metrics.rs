//! Displacement errors of probabilistic predictions.
//!
//! For pedestrian `i`, step `t` and sample `j`, let
//! `d[i][t][j] = |y[i][t][j] - x[i][t]|`. Then
//!
//! * ADE = mean over `(i, t)` of the mean over `j`,
//! * MDE = mean over `(i, t)` of the minimum over `j`,
//! * FDE = mean over `i` of the mean over `j` at the last step,
//! * the quantile curve holds, for each rank `q`, the mean over `(i, t)` of
//!   the `q`-th smallest distance. Its first entry is the MDE and its mean is
//!   the ADE.
//!
//! Sums run in a fixed index order, so results are bitwise reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::io::{Predictions, SceneDataset};

/// A rectangular block of predictions with matching ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionSet {
    num_peds: usize,
    horizon: usize,
    num_samples: usize,
    /// Indexed `[(i * horizon + t) * num_samples + j]`.
    samples: Vec<Point>,
    /// Indexed `[i * horizon + t]`.
    truth: Vec<Point>,
}

impl PredictionSet {
    pub fn new(
        num_peds: usize,
        horizon: usize,
        num_samples: usize,
        samples: Vec<Point>,
        truth: Vec<Point>,
    ) -> Result<Self> {
        if num_peds == 0 || horizon == 0 || num_samples == 0 {
            return Err(Error::domain(format!(
                "empty prediction set ({num_peds} pedestrians, horizon {horizon}, {num_samples} samples)"
            )));
        }
        if truth.len() != num_peds * horizon || samples.len() != truth.len() * num_samples {
            return Err(Error::structure(format!(
                "prediction set of shape ({num_peds}, {horizon}, {num_samples}) needs {} samples and {} truth points, got {} and {}",
                num_peds * horizon * num_samples,
                num_peds * horizon,
                samples.len(),
                truth.len()
            )));
        }
        Ok(PredictionSet {
            num_peds,
            horizon,
            num_samples,
            samples,
            truth,
        })
    }

    pub fn num_peds(&self) -> usize {
        self.num_peds
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn truth(&self, i: usize, t: usize) -> Point {
        self.truth[i * self.horizon + t]
    }

    pub fn samples(&self, i: usize, t: usize) -> &[Point] {
        let start = (i * self.horizon + t) * self.num_samples;
        &self.samples[start..start + self.num_samples]
    }

    /// Distances of the `J` samples at `(i, t)` to the truth.
    fn distances(&self, i: usize, t: usize) -> impl Iterator<Item = f64> + '_ {
        let x = self.truth(i, t);
        self.samples(i, t).iter().map(move |y| y.distance(x))
    }

    /// Mean over samples, shifted by the first distance so that identical
    /// samples give exactly their common distance.
    fn mean_distance(&self, i: usize, t: usize) -> f64 {
        let mut d = self.distances(i, t);
        let first = d.next().unwrap();
        first + d.map(|v| v - first).sum::<f64>() / self.num_samples as f64
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> {
        let horizon = self.horizon;
        (0..self.num_peds).flat_map(move |i| (0..horizon).map(move |t| (i, t)))
    }
}

/// A prediction set built from files, plus what could not be scored.
#[derive(Clone, Debug)]
pub struct Alignment {
    pub set: PredictionSet,
    pub ped_ids: Vec<u64>,
    /// Pedestrians left out for a short horizon or missing ground truth.
    pub excluded: usize,
}

/// Pairs predictions with ground truth.
///
/// The horizon is the longest predicted track. Pedestrians predicted for
/// fewer frames, or whose ground truth lacks one of the predicted frames, are
/// excluded and counted.
pub fn align(preds: &Predictions, truth: &SceneDataset) -> Result<Alignment> {
    let horizon = preds.tracks.values().map(BTreeMap::len).max().unwrap_or(0);
    let mut samples = Vec::new();
    let mut gt = Vec::new();
    let mut ped_ids = Vec::new();
    let mut excluded = 0;
    for (&ped, frames) in &preds.tracks {
        let Some(track) = truth.trajectory(ped) else {
            excluded += 1;
            continue;
        };
        let truth_points: Option<Vec<Point>> = frames
            .keys()
            .map(|&f| track.position_at_frame(f, truth.frame_stride))
            .collect();
        match truth_points {
            Some(points) if frames.len() == horizon => {
                gt.extend(points);
                samples.extend(frames.values().flatten().copied());
                ped_ids.push(ped);
            }
            _ => excluded += 1,
        }
    }
    if excluded > 0 {
        log::warn!("excluded {excluded} pedestrian(s) from scoring");
    }
    let set = PredictionSet::new(ped_ids.len(), horizon, preds.num_samples, samples, gt)?;
    Ok(Alignment {
        set,
        ped_ids,
        excluded,
    })
}

pub fn ade(preds: &PredictionSet) -> f64 {
    let total: f64 = preds.cells().map(|(i, t)| preds.mean_distance(i, t)).sum();
    total / (preds.num_peds * preds.horizon) as f64
}

pub fn mde(preds: &PredictionSet) -> f64 {
    let total: f64 = preds
        .cells()
        .map(|(i, t)| preds.distances(i, t).fold(f64::INFINITY, f64::min))
        .sum();
    total / (preds.num_peds * preds.horizon) as f64
}

pub fn fde(preds: &PredictionSet) -> f64 {
    let last = preds.horizon - 1;
    let total: f64 = (0..preds.num_peds)
        .map(|i| preds.mean_distance(i, last))
        .sum();
    total / preds.num_peds as f64
}

/// Mean distance per rank after sorting each cell's distances ascending.
pub fn quantile_curve(preds: &PredictionSet) -> Vec<f64> {
    let mut curve = vec![0.0; preds.num_samples];
    let mut sorted = Vec::with_capacity(preds.num_samples);
    for (i, t) in preds.cells() {
        sorted.clear();
        sorted.extend(preds.distances(i, t));
        sorted.sort_by(f64::total_cmp);
        for (acc, d) in curve.iter_mut().zip(&sorted) {
            *acc += d;
        }
    }
    let cells = (preds.num_peds * preds.horizon) as f64;
    for v in &mut curve {
        *v /= cells;
    }
    curve
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub ade: f64,
    pub mde: f64,
    pub fde: f64,
    pub quantile_curve: Vec<f64>,
}

pub fn evaluate(preds: &PredictionSet) -> MetricsReport {
    MetricsReport {
        ade: ade(preds),
        mde: mde(preds),
        fde: fde(preds),
        quantile_curve: quantile_curve(preds),
    }
}

/// Curve as CSV with columns `rank,mean_distance`; ranks start at 0.
pub fn curve_csv(curve: &[f64]) -> String {
    let mut out = String::from("rank,mean_distance\n");
    for (q, d) in curve.iter().enumerate() {
        out.push_str(&format!("{q},{d}\n"));
    }
    out
}
