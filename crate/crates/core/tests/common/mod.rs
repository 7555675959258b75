#![allow(dead_code)]

use pedsynth::{Point, SceneDataset, Trajectory};
use proptest::prelude::*;

/// Finite coordinates, including values whose decimal forms are long.
pub fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        -100.0..100.0f64,
        (-10_000i32..10_000).prop_map(|v| v as f64 / 100.0),
        Just(0.0),
        Just(-0.0),
        Just(1e-300),
        Just(123_456_789.123_456_78),
    ]
}

pub fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

/// A valid dataset: up to `max_peds` pedestrians, each with 2..=`max_len`
/// positions at the given stride.
pub fn dataset(max_peds: usize, max_len: usize) -> impl Strategy<Value = SceneDataset> {
    (1u64..=12, 0u64..1000).prop_flat_map(move |(stride, base)| {
        proptest::collection::btree_map(
            0u64..10_000,
            (0u64..50, proptest::collection::vec(point(), 2..=max_len)),
            1..=max_peds,
        )
        .prop_map(move |tracks| {
            let trajectories = tracks
                .into_iter()
                .map(|(ped_id, (offset, positions))| Trajectory {
                    ped_id,
                    start_frame: base + offset * stride,
                    positions,
                })
                .collect();
            SceneDataset::new(stride, 0.4, trajectories)
        })
    })
}

pub fn assert_rel(actual: f64, expected: f64, rel: f64, what: &str) {
    let tol = rel * expected.abs().max(f64::MIN_POSITIVE);
    assert!(
        (actual - expected).abs() <= tol || actual == expected,
        "{what}: {actual} vs {expected} (rel tol {rel})"
    );
}
