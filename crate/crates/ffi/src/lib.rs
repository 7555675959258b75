//! C ABI for pedsynth.
//!
//! Datasets are opaque handles created by `ps_dataset_parse` or `ps_generate`
//! and released with `ps_dataset_free`. Every function returns a
//! [`PsStatus`]; on failure `ps_last_error_message` describes the error for
//! the calling thread. Strings returned by the library must be released with
//! [`ps_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pedsynth::metrics::{align, evaluate};
use pedsynth::stats::{compute_statistics_with, SpeedVariance};
use pedsynth::{
    parse_dataset, parse_predictions, predict, write_dataset, write_predictions, Error,
    ExhaustionPolicy, PredictorConfig, SamplerConfig, SceneDataset,
};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Structure = 4,
    Domain = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for PsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => PsStatus::Parse,
            Error::Structure(_) => PsStatus::Structure,
            Error::Domain(_) | Error::DegeneratePath => PsStatus::Domain,
            Error::Numerical(_) => PsStatus::Numerical,
            Error::Io(_) => PsStatus::Io,
            Error::Scene { source, .. } => PsStatus::from(source.as_ref()),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(PsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(PsStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(body: impl FnOnce() -> FfiResult<()>) -> PsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(PsStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure(PsStatus::NullPointer, format!("{name} is null")))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(PsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(PsStatus::InvalidUtf8, format!("{name}: {e}")))
}

fn to_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(PsStatus::Structure, "output contains a NUL byte".into()))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parsed annotation data.
pub struct PsDataset(SceneDataset);

/// Parses annotation text (`frame ped x y` per line).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_parse(
    text: *const c_char,
    dt: f64,
    out: *mut *mut PsDataset,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let source = c_str(text, "text")?;
        *out = boxed(PsDataset(parse_dataset(source.as_bytes(), dt)?));
        Ok(())
    })
}

/// # Safety
/// `dataset` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_free(dataset: *mut PsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_num_pedestrians(
    dataset: *const PsDataset,
    out: *mut usize,
) -> PsStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(dataset, "dataset")?.0.num_pedestrians();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_num_frames(
    dataset: *const PsDataset,
    out: *mut usize,
) -> PsStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(dataset, "dataset")?.0.num_frames();
        Ok(())
    })
}

/// Writes the dataset in canonical text form. Free the result with
/// `ps_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_to_string(
    dataset: *const PsDataset,
    out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let mut buf = Vec::new();
        write_dataset(&non_null(dataset, "dataset")?.0, &mut buf)?;
        *out = to_c_string(String::from_utf8(buf).expect("writer emits ASCII"))?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PsStatistics {
    pub num_pedestrians: usize,
    pub mu_p: f64,
    pub sigma_p: f64,
    pub sigma_s: f64,
}

/// Scene statistics. With `global_speed_variance` non-zero, the speed
/// spread is taken over all step speeds instead of within pedestrians.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_compute_statistics(
    dataset: *const PsDataset,
    global_speed_variance: i32,
    out: *mut PsStatistics,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let mode = if global_speed_variance != 0 {
            SpeedVariance::Global
        } else {
            SpeedVariance::Pooled
        };
        let s = compute_statistics_with(&non_null(dataset, "dataset")?.0, mode)?;
        *out = PsStatistics {
            num_pedestrians: s.num_pedestrians,
            mu_p: s.mu_p,
            sigma_p: s.sigma_p(),
            sigma_s: s.sigma_s(),
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsExhaustion {
    Clamp = 0,
    Drop = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsSamplerConfig {
    pub timesteps: usize,
    pub reps: usize,
    pub dt: f64,
    pub radius: f64,
    pub p_reverse: f64,
    pub trunc_max_fraction: f64,
    pub seed: u64,
    pub zero_sigma_s: i32,
    pub zero_sigma_p: i32,
    pub exhaustion: PsExhaustion,
    /// Generate until this many frames exist; 0 uses `reps`.
    pub target_frames: usize,
    pub frame_stride: u64,
    /// 0 uses every core.
    pub threads: usize,
}

impl From<&PsSamplerConfig> for SamplerConfig {
    fn from(c: &PsSamplerConfig) -> Self {
        SamplerConfig {
            timesteps: c.timesteps,
            reps: c.reps,
            dt: c.dt,
            radius: c.radius,
            p_reverse: c.p_reverse,
            trunc_max_fraction: c.trunc_max_fraction,
            seed: c.seed,
            zero_sigma_s: c.zero_sigma_s != 0,
            zero_sigma_p: c.zero_sigma_p != 0,
            exhaustion: match c.exhaustion {
                PsExhaustion::Clamp => ExhaustionPolicy::Clamp,
                PsExhaustion::Drop => ExhaustionPolicy::DropRemaining,
            },
            target_frames: (c.target_frames > 0).then_some(c.target_frames),
            frame_stride: c.frame_stride,
            threads: c.threads,
        }
    }
}

#[no_mangle]
pub extern "C" fn ps_sampler_config_default() -> PsSamplerConfig {
    let d = SamplerConfig::default();
    PsSamplerConfig {
        timesteps: d.timesteps,
        reps: d.reps,
        dt: d.dt,
        radius: d.radius,
        p_reverse: d.p_reverse,
        trunc_max_fraction: d.trunc_max_fraction,
        seed: d.seed,
        zero_sigma_s: 0,
        zero_sigma_p: 0,
        exhaustion: PsExhaustion::Clamp,
        target_frames: 0,
        frame_stride: d.frame_stride,
        threads: d.threads,
    }
}

/// Generates a synthetic dataset from the statistics and paths of `real`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_generate(
    real: *const PsDataset,
    config: *const PsSamplerConfig,
    out: *mut *mut PsDataset,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let real = &non_null(real, "real")?.0;
        let cfg = SamplerConfig::from(non_null(config, "config")?);
        let stats = compute_statistics_with(real, SpeedVariance::Pooled)?;
        let generated = pedsynth::generate_dataset(&stats, &real.trajectories, &cfg)?;
        *out = boxed(PsDataset(generated.dataset));
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsPredictorConfig {
    pub observe_len: usize,
    pub horizon: usize,
    pub num_samples: usize,
    pub noise_scale: f64,
    pub seed: u64,
}

#[no_mangle]
pub extern "C" fn ps_predictor_config_default() -> PsPredictorConfig {
    let d = PredictorConfig::default();
    PsPredictorConfig {
        observe_len: d.observe_len,
        horizon: d.horizon,
        num_samples: d.num_samples,
        noise_scale: d.noise_scale,
        seed: d.seed,
    }
}

/// Runs the constant-velocity baseline and returns predictions as text
/// (`frame ped sample x y` per line). Free with `ps_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_predict_baseline(
    dataset: *const PsDataset,
    config: *const PsPredictorConfig,
    out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let c = non_null(config, "config")?;
        let cfg = PredictorConfig {
            observe_len: c.observe_len,
            horizon: c.horizon,
            num_samples: c.num_samples,
            noise_scale: c.noise_scale,
            seed: c.seed,
        };
        let result = predict(&non_null(dataset, "dataset")?.0, &cfg)?;
        let mut buf = Vec::new();
        write_predictions(&result.predictions, &mut buf)?;
        *out = to_c_string(String::from_utf8(buf).expect("writer emits ASCII"))?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PsMetrics {
    pub ade: f64,
    pub mde: f64,
    pub fde: f64,
    pub num_pedestrians: usize,
    pub horizon: usize,
    pub num_samples: usize,
    pub excluded: usize,
}

/// Scores prediction text against ground truth. If `curve` is non-null, the
/// first `min(curve_len, num_samples)` entries of the quantile curve are
/// written to it.
///
/// # Safety
/// Pointers must be valid; `curve` must hold `curve_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_evaluate(
    truth: *const PsDataset,
    predictions: *const c_char,
    out: *mut PsMetrics,
    curve: *mut f64,
    curve_len: usize,
) -> PsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let preds = parse_predictions(c_str(predictions, "predictions")?.as_bytes())?;
        let aligned = align(&preds, &non_null(truth, "truth")?.0)?;
        let report = evaluate(&aligned.set);
        if !curve.is_null() {
            let n = curve_len.min(report.quantile_curve.len());
            std::slice::from_raw_parts_mut(curve, n).copy_from_slice(&report.quantile_curve[..n]);
        }
        *out = PsMetrics {
            ade: report.ade,
            mde: report.mde,
            fde: report.fde,
            num_pedestrians: aligned.set.num_peds(),
            horizon: aligned.set.horizon(),
            num_samples: aligned.set.num_samples(),
            excluded: aligned.excluded,
        };
        Ok(())
    })
}
