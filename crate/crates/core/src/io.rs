//! Annotation and prediction file formats.
//!
//! Both formats are UTF-8 text with one record per line. Fields are separated
//! by a single tab on output; on input any run of ASCII whitespace is accepted.
//!
//! * dataset: `frame_id ped_id x y`
//! * predictions: `frame_id ped_id sample_id x y`
//!
//! Identifiers may be written as integral reals (`780.0`), which is how the
//! public ETH/UCY world-coordinate files store them. Positions are meters.
//!
//! On output, identifiers are printed as plain integers and coordinates with
//! Rust's `Display` for `f64`: the shortest decimal string that parses back to
//! the identical value, never in exponent notation (`0`, `0.4`, `-12.75`).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Largest identifier accepted; integral reals above 2^53 are not exact.
const MAX_ID: f64 = 9_007_199_254_740_992.0;

/// One annotated position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnotationRecord {
    pub frame_id: u64,
    pub ped_id: u64,
    pub position: Point,
}

/// One pedestrian's track at a uniform frame stride.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub ped_id: u64,
    /// Annotation frame of `positions[0]`.
    pub start_frame: u64,
    pub positions: Vec<Point>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Annotation frame of the last position.
    pub fn end_frame(&self, frame_stride: u64) -> u64 {
        self.start_frame + (self.positions.len().saturating_sub(1) as u64) * frame_stride
    }

    /// Position at annotation frame `frame`, if this track covers it.
    pub fn position_at_frame(&self, frame: u64, frame_stride: u64) -> Option<Point> {
        let offset = frame.checked_sub(self.start_frame)?;
        if offset % frame_stride != 0 {
            return None;
        }
        self.positions
            .get((offset / frame_stride) as usize)
            .copied()
    }
}

/// A scene: per-pedestrian tracks sharing one frame stride and timestep.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneDataset {
    /// Annotation frames between consecutive timesteps.
    pub frame_stride: u64,
    /// Seconds per timestep.
    pub dt: f64,
    /// Sorted by `ped_id`, ids unique.
    pub trajectories: Vec<Trajectory>,
}

impl SceneDataset {
    pub fn new(frame_stride: u64, dt: f64, mut trajectories: Vec<Trajectory>) -> Self {
        trajectories.sort_by_key(|t| t.ped_id);
        SceneDataset {
            frame_stride,
            dt,
            trajectories,
        }
    }

    pub fn num_pedestrians(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn trajectory(&self, ped_id: u64) -> Option<&Trajectory> {
        self.trajectories
            .binary_search_by_key(&ped_id, |t| t.ped_id)
            .ok()
            .map(|i| &self.trajectories[i])
    }

    /// All records, sorted by `(frame_id, ped_id)`.
    pub fn records(&self) -> Vec<AnnotationRecord> {
        let mut records: Vec<AnnotationRecord> = self
            .trajectories
            .iter()
            .flat_map(|t| {
                t.positions
                    .iter()
                    .enumerate()
                    .map(move |(i, &position)| AnnotationRecord {
                        frame_id: t.start_frame + i as u64 * self.frame_stride,
                        ped_id: t.ped_id,
                        position,
                    })
            })
            .collect();
        records.sort_by_key(|r| (r.frame_id, r.ped_id));
        records
    }

    /// Number of pedestrians annotated in each frame, keyed by frame id.
    pub fn frame_counts(&self) -> BTreeMap<u64, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.trajectories {
            for i in 0..t.positions.len() as u64 {
                *counts
                    .entry(t.start_frame + i * self.frame_stride)
                    .or_insert(0) += 1;
            }
        }
        counts
    }

    /// Number of distinct annotated frames.
    pub fn num_frames(&self) -> usize {
        self.frame_counts().len()
    }
}

/// Side information gathered while parsing a dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Pedestrians with a single record, which were left out.
    pub short_tracks_dropped: usize,
}

fn parse_id(field: &str, what: &str, line: usize) -> Result<u64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} `{field}` is not numeric")))?;
    if !value.is_finite() || value.fract() != 0.0 || !(0.0..=MAX_ID).contains(&value) {
        return Err(Error::parse(
            line,
            format!("{what} `{field}` is not a non-negative integer"),
        ));
    }
    Ok(value as u64)
}

fn parse_coord(field: &str, line: usize) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("coordinate `{field}` is not numeric")))?;
    if !value.is_finite() {
        return Err(Error::parse(
            line,
            format!("coordinate `{field}` is not finite"),
        ));
    }
    Ok(value)
}

fn read_text(mut source: impl Read) -> Result<String> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    Ok(text)
}

/// Iterates over `(line_number, fields)` for non-empty lines.
fn records_of(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, fields)| !fields.is_empty())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parses an annotation file. See [`parse_dataset_with_report`].
pub fn parse_dataset(source: impl Read, dt: f64) -> Result<SceneDataset> {
    parse_dataset_with_report(source, dt).map(|(d, _)| d)
}

/// Parses an annotation file into per-pedestrian tracks.
///
/// The frame stride is the greatest common divisor of all frame gaps inside
/// tracks; every gap must equal it. Pedestrians with a single record are
/// dropped and counted in the report. An empty input yields an empty dataset
/// with stride 1.
pub fn parse_dataset_with_report(
    source: impl Read,
    dt: f64,
) -> Result<(SceneDataset, ParseReport)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!(
            "timestep must be positive, got {dt}"
        )));
    }
    let text = read_text(source)?;

    let mut by_ped: BTreeMap<u64, Vec<(u64, Point, usize)>> = BTreeMap::new();
    for (line, fields) in records_of(&text) {
        if fields.len() != 4 {
            return Err(Error::parse(
                line,
                format!(
                    "expected 4 fields (frame_id ped_id x y), found {}",
                    fields.len()
                ),
            ));
        }
        let frame = parse_id(fields[0], "frame_id", line)?;
        let ped = parse_id(fields[1], "ped_id", line)?;
        let position = Point::new(parse_coord(fields[2], line)?, parse_coord(fields[3], line)?);
        by_ped.entry(ped).or_default().push((frame, position, line));
    }

    let mut report = ParseReport::default();
    let mut stride = 0;
    for (&ped, records) in by_ped.iter_mut() {
        records.sort_by_key(|r| r.0);
        for pair in records.windows(2) {
            let gap = pair[1].0 - pair[0].0;
            if gap == 0 {
                return Err(Error::structure(format!(
                    "pedestrian {ped} has two records in frame {} (lines {} and {})",
                    pair[0].0, pair[0].2, pair[1].2
                )));
            }
            stride = gcd(stride, gap);
        }
    }
    if stride == 0 {
        stride = 1;
    }

    let mut trajectories = Vec::with_capacity(by_ped.len());
    for (ped, records) in by_ped {
        if records.len() < 2 {
            report.short_tracks_dropped += 1;
            continue;
        }
        if let Some(pair) = records.windows(2).find(|p| p[1].0 - p[0].0 != stride) {
            return Err(Error::structure(format!(
                "pedestrian {ped}: frame gap {} between frames {} and {} does not match the frame stride {stride}",
                pair[1].0 - pair[0].0,
                pair[0].0,
                pair[1].0
            )));
        }
        trajectories.push(Trajectory {
            ped_id: ped,
            start_frame: records[0].0,
            positions: records.iter().map(|r| r.1).collect(),
        });
    }
    if report.short_tracks_dropped > 0 {
        log::warn!(
            "dropped {} pedestrian(s) with a single record",
            report.short_tracks_dropped
        );
    }

    Ok((SceneDataset::new(stride, dt, trajectories), report))
}

/// Writes `data` as tab-separated lines sorted by `(frame_id, ped_id)`.
pub fn write_dataset(data: &SceneDataset, mut sink: impl Write) -> Result<()> {
    let mut out = String::new();
    for r in data.records() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.frame_id, r.ped_id, r.position.x, r.position.y
        ));
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

/// Sampled predicted positions keyed by pedestrian and frame.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Predictions {
    /// Samples per pedestrian-frame (`J`).
    pub num_samples: usize,
    /// `ped_id -> frame_id -> samples`, each with exactly `num_samples` points.
    pub tracks: BTreeMap<u64, BTreeMap<u64, Vec<Point>>>,
}

impl Predictions {
    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    /// `(pedestrians, longest horizon, samples)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        let horizon = self.tracks.values().map(BTreeMap::len).max().unwrap_or(0);
        (self.tracks.len(), horizon, self.num_samples)
    }
}

/// Parses a prediction file.
///
/// Every `(frame_id, ped_id)` key must carry sample ids `0..J` exactly once,
/// with one `J` shared by the whole file.
pub fn parse_predictions(source: impl Read) -> Result<Predictions> {
    let text = read_text(source)?;

    let mut keyed: BTreeMap<(u64, u64), BTreeMap<u64, Point>> = BTreeMap::new();
    let mut num_samples = 0u64;
    for (line, fields) in records_of(&text) {
        if fields.len() != 5 {
            return Err(Error::parse(
                line,
                format!(
                    "expected 5 fields (frame_id ped_id sample_id x y), found {}",
                    fields.len()
                ),
            ));
        }
        let frame = parse_id(fields[0], "frame_id", line)?;
        let ped = parse_id(fields[1], "ped_id", line)?;
        let sample = parse_id(fields[2], "sample_id", line)?;
        let position = Point::new(parse_coord(fields[3], line)?, parse_coord(fields[4], line)?);
        if keyed
            .entry((ped, frame))
            .or_default()
            .insert(sample, position)
            .is_some()
        {
            return Err(Error::structure(format!(
                "duplicate sample {sample} for frame {frame}, pedestrian {ped} (line {line})"
            )));
        }
        num_samples = num_samples.max(sample + 1);
    }

    let mut preds = Predictions {
        num_samples: num_samples as usize,
        tracks: BTreeMap::new(),
    };
    for ((ped, frame), samples) in keyed {
        if samples.len() as u64 != num_samples {
            let missing = (0..num_samples)
                .find(|s| !samples.contains_key(s))
                .unwrap_or(0);
            return Err(Error::structure(format!(
                "frame {frame}, pedestrian {ped}: has {} of {num_samples} samples (sample {missing} missing)",
                samples.len()
            )));
        }
        preds
            .tracks
            .entry(ped)
            .or_default()
            .insert(frame, samples.into_values().collect());
    }
    Ok(preds)
}

/// Writes predictions sorted by `(frame_id, ped_id, sample_id)`.
pub fn write_predictions(preds: &Predictions, mut sink: impl Write) -> Result<()> {
    let mut rows: Vec<(u64, u64, &Vec<Point>)> = preds
        .tracks
        .iter()
        .flat_map(|(&ped, frames)| frames.iter().map(move |(&frame, s)| (frame, ped, s)))
        .collect();
    rows.sort_by_key(|r| (r.0, r.1));
    let mut out = String::new();
    for (frame, ped, samples) in rows {
        for (j, p) in samples.iter().enumerate() {
            out.push_str(&format!("{frame}\t{ped}\t{j}\t{}\t{}\n", p.x, p.y));
        }
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}
