use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Parameters of the three path perturbations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbParams {
    /// Half-width of the uniform translation box, meters.
    pub radius: f64,
    /// Probability of reversing the waypoint order.
    pub p_reverse: f64,
    /// Largest fraction of the removable waypoints (all but two) cut from the end.
    pub trunc_max_fraction: f64,
}

impl PerturbParams {
    pub const IDENTITY: PerturbParams = PerturbParams {
        radius: 0.0,
        p_reverse: 0.0,
        trunc_max_fraction: 0.0,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedPath {
    pub waypoints: Vec<Point>,
    pub translation: Point,
    pub reversed: bool,
    /// Waypoints removed from the end.
    pub truncated: usize,
}

/// Adds `offset` to every waypoint.
pub fn translate(path: &mut [Point], offset: Point) {
    for p in path {
        *p = *p + offset;
    }
}

/// Keeps the first `path.len() - count` waypoints, never fewer than two.
pub fn truncate_end(path: &mut Vec<Point>, count: usize) {
    let keep = path.len().saturating_sub(count).max(2).min(path.len());
    path.truncate(keep);
}

/// Largest truncation allowed for a path of `len` waypoints.
pub fn max_truncation(len: usize, trunc_max_fraction: f64) -> usize {
    (trunc_max_fraction * len.saturating_sub(2) as f64).floor() as usize
}

/// Applies translation, then reversal, then end truncation.
///
/// Random stream use, in order: two uniforms for the translation, one uniform
/// compared against `p_reverse`, one integer in `0..=max_truncation`.
pub fn perturb<R: Rng + ?Sized>(
    path: &[Point],
    params: &PerturbParams,
    rng: &mut R,
) -> Result<PerturbedPath> {
    if path.len() < 2 {
        return Err(Error::domain(format!(
            "perturbation needs at least 2 waypoints, got {}",
            path.len()
        )));
    }
    let mut waypoints = path.to_vec();

    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let translation = Point::new(
        params.radius * (2.0 * u - 1.0),
        params.radius * (2.0 * v - 1.0),
    );
    translate(&mut waypoints, translation);

    let reversed = rng.random::<f64>() < params.p_reverse;
    if reversed {
        waypoints.reverse();
    }

    let truncated =
        rng.random_range(0..=max_truncation(waypoints.len(), params.trunc_max_fraction));
    truncate_end(&mut waypoints, truncated);

    Ok(PerturbedPath {
        waypoints,
        translation,
        reversed,
        truncated,
    })
}
