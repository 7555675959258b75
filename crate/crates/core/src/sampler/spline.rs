use crate::error::{Error, Result};
use crate::geometry::Point;

/// Piecewise-linear path parameterized by arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpline {
    /// Waypoints with zero-length segments removed.
    knots: Vec<Point>,
    /// `cumulative[i]` is the distance from `knots[0]` to `knots[i]`.
    cumulative: Vec<f64>,
}

impl PathSpline {
    /// Fits the polyline through `waypoints`.
    pub fn fit(waypoints: &[Point]) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::domain(format!(
                "a path needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        let mut knots = vec![waypoints[0]];
        let mut cumulative = vec![0.0];
        for &p in &waypoints[1..] {
            let last = *knots.last().unwrap();
            let seg = p.distance(last);
            if seg > 0.0 {
                cumulative.push(cumulative.last().unwrap() + seg);
                knots.push(p);
            }
        }
        if knots.len() < 2 {
            return Err(Error::DegeneratePath);
        }
        Ok(PathSpline { knots, cumulative })
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.knots[0]
    }

    pub fn end(&self) -> Point {
        *self.knots.last().unwrap()
    }

    /// Point at arc length `distance`, clamped to the path's ends.
    pub fn at(&self, distance: f64) -> Point {
        if distance <= 0.0 {
            return self.start();
        }
        if distance >= self.length() {
            return self.end();
        }
        // First knot strictly beyond `distance`; always in 1..len.
        let hi = self.cumulative.partition_point(|&c| c <= distance);
        let lo = hi - 1;
        let span = self.cumulative[hi] - self.cumulative[lo];
        let frac = (distance - self.cumulative[lo]) / span;
        self.knots[lo] + (self.knots[hi] - self.knots[lo]) * frac
    }
}
