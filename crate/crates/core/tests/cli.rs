use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pedsynth::manifest::RunManifest;

const TOY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/toy_real.tsv");

fn pedsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pedsynth"))
        .args(args)
        .output()
        .expect("failed to launch pedsynth")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn stats_prints_report() {
    let o = pedsynth(&["stats", TOY]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert_eq!(value(&out, "format"), "pedsynth-stats/1");
    assert_eq!(value(&out, "K"), "4");
    for key in ["mu_p", "sigma_p", "sigma_s"] {
        let v: f64 = value(&out, key).parse().unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
}

#[test]
fn stats_writes_speed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "speeds.csv");
    assert!(pedsynth(&["stats", TOY, "--speeds-csv", &csv])
        .status
        .success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("ped_id,mean_speed"));
    assert_eq!(text.lines().count(), 5);
    assert!(Path::new(&format!("{csv}.manifest")).exists());
}

#[test]
fn sample_full_scale_frame_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "s.tsv");
    let o = pedsynth(&[
        "sample",
        "--input",
        TOY,
        "--reps",
        "500",
        "--timesteps",
        "20",
        "--seed",
        "7",
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(value(&stdout(&o), "frames"), "10500");
    let synth = pedsynth::parse_dataset(fs::read(&out).unwrap().as_slice(), 0.4).unwrap();
    assert_eq!(synth.num_frames(), 10_500);
}

#[test]
fn equal_frames_tracks_real_frame_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "s.tsv");
    let real = pedsynth::parse_dataset(fs::read(TOY).unwrap().as_slice(), 0.4).unwrap();
    for timesteps in ["2", "4", "20"] {
        let o = pedsynth(&[
            "sample",
            "--input",
            TOY,
            "--timesteps",
            timesteps,
            "--equal-frames",
            "--seed",
            "1",
            "--out",
            &out,
        ]);
        assert!(o.status.success(), "{o:?}");
        let frames: usize = value(&stdout(&o), "frames").parse().unwrap();
        let n: usize = timesteps.parse().unwrap();
        assert!(
            frames >= real.num_frames() && frames < real.num_frames() + n + 1,
            "{frames}"
        );
    }
}

#[test]
fn manifest_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = p(dir.path(), "a.tsv");
    let o = pedsynth(&["sample", "--input", TOY, "--reps", "20", "--out", &first]);
    assert!(o.status.success());
    // No seed given: one was drawn and reported.
    let stderr = String::from_utf8_lossy(&o.stderr).into_owned();
    let seed = value(&stderr, "seed").to_string();

    let m = RunManifest::parse(&fs::read_to_string(format!("{first}.manifest")).unwrap());
    assert_eq!(m.get("seed"), Some(seed.as_str()));

    let second = p(dir.path(), "b.tsv");
    let o = pedsynth(&[
        "sample",
        "--input",
        TOY,
        "--out",
        &second,
        "--reps",
        m.get("config.reps").unwrap(),
        "--timesteps",
        m.get("config.timesteps").unwrap(),
        "--dt",
        m.get("config.dt").unwrap(),
        "--radius",
        m.get("config.radius").unwrap(),
        "--p-reverse",
        m.get("config.p_reverse").unwrap(),
        "--trunc-max",
        m.get("config.trunc_max").unwrap(),
        "--exhaustion",
        m.get("config.exhaustion").unwrap(),
        "--frame-stride",
        m.get("config.frame_stride").unwrap(),
        "--seed",
        &seed,
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    assert_eq!(
        fs::read(format!("{first}.manifest")).unwrap(),
        fs::read(format!("{second}.manifest")).unwrap()
    );
}

#[test]
fn evaluate_hand_built_pair() {
    let dir = tempfile::tempdir().unwrap();
    let gt = p(dir.path(), "g.tsv");
    let pred = p(dir.path(), "p.tsv");
    fs::write(&gt, "0\t1\t0\t0\n10\t1\t1\t0\n").unwrap();
    // Frame 0 distances {1, 3}; frame 10 distances {0, 2}.
    fs::write(&pred, "0 1 0 0 1\n0 1 1 0 3\n10 1 0 1 0\n10 1 1 1 2\n").unwrap();
    let curve = p(dir.path(), "curve.csv");
    let o = pedsynth(&[
        "evaluate",
        "--gt",
        &gt,
        "--pred",
        &pred,
        "--curve-out",
        &curve,
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert_eq!(value(&out, "ADE"), "1.5");
    assert_eq!(value(&out, "MDE"), "0.5");
    assert_eq!(value(&out, "FDE"), "1");
    assert_eq!(
        fs::read_to_string(&curve).unwrap(),
        "rank,mean_distance\n0,0.5\n1,2.5\n"
    );

    let o = pedsynth(&["quantile-curve", "--gt", &gt, "--pred", &pred]);
    assert_eq!(stdout(&o), "rank,mean_distance\n0,0.5\n1,2.5\n");
}

#[test]
fn predict_baseline_writes_prediction_file() {
    let dir = tempfile::tempdir().unwrap();
    let synth = p(dir.path(), "s.tsv");
    let preds = p(dir.path(), "p.tsv");
    assert!(
        pedsynth(&["sample", "--input", TOY, "--reps", "5", "--seed", "3", "--out", &synth])
            .status
            .success()
    );
    let o = pedsynth(&[
        "predict-baseline",
        "--input",
        &synth,
        "--out",
        &preds,
        "--samples",
        "20",
        "--seed",
        "4",
    ]);
    assert!(o.status.success(), "{o:?}");
    let parsed = pedsynth::parse_predictions(fs::read(&preds).unwrap().as_slice()).unwrap();
    let (n, t, j) = parsed.shape();
    assert!(n > 0);
    assert_eq!((t, j), (8, 20));
    assert!(Path::new(&format!("{preds}.manifest")).exists());
}

#[test]
fn error_exit_codes() {
    assert_eq!(pedsynth(&["bogus"]).status.code(), Some(2));
    assert_eq!(pedsynth(&["sample", "--input", TOY]).status.code(), Some(2));
    assert_eq!(
        pedsynth(&[
            "sample",
            "--input",
            TOY,
            "--out",
            "/tmp/x.tsv",
            "--exhaustion",
            "stop"
        ])
        .status
        .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = p(dir.path(), "bad.tsv");
    fs::write(&bad, "0 1 0\n").unwrap();
    let o = pedsynth(&["stats", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let o = pedsynth(&[
        "sample",
        "--input",
        TOY,
        "--out",
        &p(dir.path(), "o.tsv"),
        "--p-reverse",
        "2",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
