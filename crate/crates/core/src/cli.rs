//! The `pedsynth` command line.
//!
//! Exit codes: 0 on success, 1 on parse, domain or I/O errors, 2 on usage
//! errors. Every command that writes a file also writes `<file>.manifest`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::error::{Error, Result};
use crate::io::{self, SceneDataset};
use crate::manifest::{sha256_hex, RunManifest};
use crate::metrics::{self, Alignment};
use crate::predictor::{self, PredictorConfig};
use crate::sampler::{self, ExhaustionPolicy, SamplerConfig};
use crate::stats::{self, SpeedVariance};

pub const STATS_FORMAT: &str = "pedsynth-stats/1";

#[derive(Debug, Parser)]
#[command(
    name = "pedsynth",
    version,
    about = "Pedestrian trajectory statistics, synthesis and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print crowd-size and walking-speed statistics of a real scene.
    Stats(StatsArgs),
    /// Synthesize a dataset from a real scene.
    Sample(SampleArgs),
    /// Write constant-velocity probabilistic predictions for a dataset.
    PredictBaseline(PredictArgs),
    /// Score predictions against ground truth (ADE, MDE, FDE).
    Evaluate(EvaluateArgs),
    /// Per-rank mean distance of predictions to ground truth, as CSV.
    QuantileCurve(CurveArgs),
}

#[derive(Debug, Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long, default_value_t = crate::DEFAULT_DT)]
    dt: f64,
    /// Also write per-pedestrian mean speeds as CSV.
    #[arg(long)]
    speeds_csv: Option<PathBuf>,
    /// Use the variance of all step speeds instead of the within-pedestrian pooled variance.
    #[arg(long)]
    global_speed_variance: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of sampled scenes (M).
    #[arg(long, default_value_t = 500)]
    reps: usize,
    /// Each trajectory has timesteps + 1 positions (N).
    #[arg(long, default_value_t = 20)]
    timesteps: usize,
    #[arg(long, default_value_t = crate::DEFAULT_DT)]
    dt: f64,
    /// Translation half-width in meters.
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.5)]
    p_reverse: f64,
    /// Largest fraction of removable waypoints cut from a path's end.
    #[arg(long, default_value_t = 0.5)]
    trunc_max: f64,
    /// Random seed; a fresh one is drawn and reported when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    zero_sigma_s: bool,
    #[arg(long)]
    zero_sigma_p: bool,
    /// Generate scenes until the frame count reaches the input's.
    #[arg(long)]
    equal_frames: bool,
    #[arg(long, default_value = "clamp", value_parser = ["clamp", "drop"])]
    exhaustion: String,
    /// Annotation frames per timestep in the output.
    #[arg(long, default_value_t = 10)]
    frame_stride: u64,
    /// Worker threads (0 = all cores, 1 = none). Does not affect output.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write per-pedestrian provenance as CSV.
    #[arg(long)]
    provenance: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = crate::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 8)]
    observe: usize,
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Noise standard deviation per predicted step, meters.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = crate::DEFAULT_DT)]
    dt: f64,
    /// Also write the quantile curve as CSV.
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = crate::DEFAULT_DT)]
    dt: f64,
    /// Output CSV; printed when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Stats(a) => stats_cmd(a, out),
        Command::Sample(a) => sample_cmd(a, out, err),
        Command::PredictBaseline(a) => predict_cmd(a, out, err),
        Command::Evaluate(a) => evaluate_cmd(a, out),
        Command::QuantileCurve(a) => curve_cmd(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_dataset(bytes: &[u8], dt: f64, err: Option<&mut dyn Write>) -> Result<SceneDataset> {
    let (data, report) = io::parse_dataset_with_report(bytes, dt)?;
    if let (Some(err), n) = (err, report.short_tracks_dropped) {
        if n > 0 {
            let _ = writeln!(
                err,
                "warning: dropped {n} pedestrian(s) with a single record"
            );
        }
    }
    Ok(data)
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random();
        let _ = writeln!(err, "seed={s}");
        s
    })
}

fn write_output(path: &Path, bytes: &[u8], manifest: &mut RunManifest) -> Result<()> {
    fs::write(path, bytes)?;
    manifest.digest("output", bytes);
    manifest.write_next_to(path)?;
    Ok(())
}

fn stats_cmd(a: StatsArgs, out: &mut dyn Write) -> Result<()> {
    let bytes = read(&a.input)?;
    let data = load_dataset(&bytes, a.dt, None)?;
    let mode = if a.global_speed_variance {
        SpeedVariance::Global
    } else {
        SpeedVariance::Pooled
    };
    let s = stats::compute_statistics_with(&data, mode)?;
    writeln!(out, "format={STATS_FORMAT}")?;
    writeln!(out, "K={}", s.num_pedestrians)?;
    writeln!(out, "mu_p={}", s.mu_p)?;
    writeln!(out, "sigma_p={}", s.sigma_p())?;
    writeln!(out, "sigma_s={}", s.sigma_s())?;
    writeln!(out, "frames={}", data.num_frames())?;

    if let Some(path) = a.speeds_csv {
        let mut csv = String::from("ped_id,mean_speed\n");
        for (id, v) in &s.mean_speeds {
            csv.push_str(&format!("{id},{v}\n"));
        }
        let mut m = RunManifest::new("stats");
        m.set("config.dt", a.dt);
        m.set("config.speed_variance", format!("{mode:?}").to_lowercase());
        m.digest("input", &bytes);
        write_output(&path, csv.as_bytes(), &mut m)?;
    }
    Ok(())
}

fn sample_cmd(a: SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let bytes = read(&a.input)?;
    let real = load_dataset(&bytes, a.dt, Some(err))?;
    let s = stats::compute_statistics(&real)?;
    let seed = resolve_seed(a.seed, err);
    let exhaustion: ExhaustionPolicy = a.exhaustion.parse()?;
    let cfg = SamplerConfig {
        timesteps: a.timesteps,
        reps: a.reps,
        dt: a.dt,
        radius: a.radius,
        p_reverse: a.p_reverse,
        trunc_max_fraction: a.trunc_max,
        seed,
        zero_sigma_s: a.zero_sigma_s,
        zero_sigma_p: a.zero_sigma_p,
        exhaustion,
        target_frames: a.equal_frames.then(|| real.num_frames()),
        frame_stride: a.frame_stride,
        threads: a.threads,
    };
    let generated = sampler::generate_dataset(&s, &real.trajectories, &cfg)?;

    let mut text = Vec::new();
    io::write_dataset(&generated.dataset, &mut text)?;

    let mut m = RunManifest::new("sample");
    m.set("config.reps", cfg.reps);
    m.set("config.timesteps", cfg.timesteps);
    m.set("config.dt", cfg.dt);
    m.set("config.radius", cfg.radius);
    m.set("config.p_reverse", cfg.p_reverse);
    m.set("config.trunc_max", cfg.trunc_max_fraction);
    m.set("config.zero_sigma_s", cfg.zero_sigma_s);
    m.set("config.zero_sigma_p", cfg.zero_sigma_p);
    m.set("config.equal_frames", a.equal_frames);
    m.set(
        "config.target_frames",
        cfg.target_frames.map_or(String::new(), |t| t.to_string()),
    );
    m.set("config.exhaustion", cfg.exhaustion);
    m.set("config.frame_stride", cfg.frame_stride);
    m.set("seed", seed);
    m.digest("input", &bytes);
    if let Some(path) = &a.provenance {
        let csv = sampler::provenance_csv(&generated.provenance);
        fs::write(path, &csv)?;
        m.digest("provenance", csv.as_bytes());
    }
    write_output(&a.out, &text, &mut m)?;

    writeln!(out, "scenes={}", generated.num_scenes)?;
    writeln!(out, "pedestrians={}", generated.dataset.num_pedestrians())?;
    writeln!(out, "frames={}", generated.dataset.num_frames())?;
    Ok(())
}

fn predict_cmd(a: PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let bytes = read(&a.input)?;
    let data = load_dataset(&bytes, a.dt, Some(err))?;
    let seed = resolve_seed(a.seed, err);
    let cfg = PredictorConfig {
        observe_len: a.observe,
        horizon: a.horizon,
        num_samples: a.samples,
        noise_scale: a.noise,
        seed,
    };
    let result = predictor::predict(&data, &cfg)?;
    let mut text = Vec::new();
    io::write_predictions(&result.predictions, &mut text)?;

    let mut m = RunManifest::new("predict-baseline");
    m.set("config.dt", a.dt);
    m.set("config.observe", cfg.observe_len);
    m.set("config.horizon", cfg.horizon);
    m.set("config.samples", cfg.num_samples);
    m.set("config.noise", cfg.noise_scale);
    m.set("seed", seed);
    m.digest("input", &bytes);
    write_output(&a.out, &text, &mut m)?;

    writeln!(out, "pedestrians={}", result.predictions.tracks.len())?;
    writeln!(out, "skipped={}", result.skipped)?;
    Ok(())
}

fn load_alignment(gt: &Path, pred: &Path, dt: f64) -> Result<(Alignment, Vec<u8>, Vec<u8>)> {
    let gt_bytes = read(gt)?;
    let pred_bytes = read(pred)?;
    let truth = io::parse_dataset(gt_bytes.as_slice(), dt)?;
    let preds = io::parse_predictions(pred_bytes.as_slice())?;
    Ok((metrics::align(&preds, &truth)?, gt_bytes, pred_bytes))
}

fn evaluate_cmd(a: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let (aligned, gt_bytes, pred_bytes) = load_alignment(&a.gt, &a.pred, a.dt)?;
    let report = metrics::evaluate(&aligned.set);
    writeln!(out, "ADE={}", report.ade)?;
    writeln!(out, "MDE={}", report.mde)?;
    writeln!(out, "FDE={}", report.fde)?;
    writeln!(out, "pedestrians={}", aligned.set.num_peds())?;
    writeln!(out, "horizon={}", aligned.set.horizon())?;
    writeln!(out, "samples={}", aligned.set.num_samples())?;
    writeln!(out, "excluded={}", aligned.excluded)?;
    if let Some(path) = a.curve_out {
        let mut m = RunManifest::new("evaluate");
        m.set("config.dt", a.dt);
        m.digest("gt", &gt_bytes);
        m.digest("pred", &pred_bytes);
        write_output(
            &path,
            metrics::curve_csv(&report.quantile_curve).as_bytes(),
            &mut m,
        )?;
    }
    Ok(())
}

fn curve_cmd(a: CurveArgs, out: &mut dyn Write) -> Result<()> {
    let (aligned, gt_bytes, pred_bytes) = load_alignment(&a.gt, &a.pred, a.dt)?;
    let csv = metrics::curve_csv(&metrics::quantile_curve(&aligned.set));
    match a.out {
        Some(path) => {
            let mut m = RunManifest::new("quantile-curve");
            m.set("config.dt", a.dt);
            m.digest("gt", &gt_bytes);
            m.digest("pred", &pred_bytes);
            write_output(&path, csv.as_bytes(), &mut m)?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

/// SHA-256 of a file, hex encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&read(path)?))
}
