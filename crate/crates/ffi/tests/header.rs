use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const SYMBOLS: [&str; 13] = [
    "ps_last_error_message",
    "ps_string_free",
    "ps_dataset_parse",
    "ps_dataset_free",
    "ps_dataset_num_pedestrians",
    "ps_dataset_num_frames",
    "ps_dataset_to_string",
    "ps_compute_statistics",
    "ps_sampler_config_default",
    "ps_generate",
    "ps_predictor_config_default",
    "ps_predict_baseline",
    "ps_evaluate",
];

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pedsynth.h")
}

#[test]
fn header_declares_every_entry_point() {
    let text = fs::read_to_string(header()).unwrap();
    for sym in SYMBOLS {
        assert!(
            text.contains(&format!("{sym}(")),
            "{sym} missing from header"
        );
    }
    assert!(
        text.contains("typedef struct PsDataset PsDataset;"),
        "dataset must be opaque"
    );
    assert!(text.contains("PS_STATUS_OK = 0"));
}

const SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "pedsynth.h"

int main(void) {
    const char *text = "0 1 0 0\n10 1 0.4 0\n20 1 1.2 0\n0 2 0 1\n10 2 0 1.4\n20 2 0.3 1.8\n30 2 0.3 1.8\n";
    PsDataset *d = NULL;
    if (ps_dataset_parse(text, 0.4, &d) != PS_STATUS_OK) return 1;
    PsStatistics s;
    if (ps_compute_statistics(d, 0, &s) != PS_STATUS_OK) return 2;
    printf("%zu %.4f\n", s.num_pedestrians, s.mu_p);
    PsDataset *bad = NULL;
    if (ps_dataset_parse("x\n", 0.4, &bad) != PS_STATUS_PARSE) return 3;
    if (ps_last_error_message() == NULL) return 4;
    ps_dataset_free(d);
    return 0;
}
"#;

/// Compiles a C program against the header and shared library, when a C
/// compiler is present.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler found, skipping");
        return;
    }
    // tests live in target/<profile>/deps; the library sits one level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    if !lib_dir.join("libpedsynth_ffi.so").exists() {
        eprintln!(
            "shared library not found in {}, skipping",
            lib_dir.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    fs::write(&src, SMOKE).unwrap();
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg("-L")
        .arg(lib_dir)
        .arg("-lpedsynth_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin)
        .env("LD_LIBRARY_PATH", lib_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2 1.7500\n");
}
