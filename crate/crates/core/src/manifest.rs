//! Run manifests: a small `key=value` file written next to each output.
//!
//! ```text
//! manifest=pedsynth/1
//! tool=pedsynth 0.1.0
//! command=sample
//! rng=pedsynth-rng/v1
//! config.reps=500
//! ...
//! seed=7
//! input.sha256=<hex>
//! output.sha256=<hex>
//! ```
//!
//! Keys keep insertion order. Paths are not recorded, so two runs that differ
//! only in file names produce identical manifests.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const MANIFEST_FORMAT: &str = "pedsynth/1";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = RunManifest::default();
        m.set("manifest", MANIFEST_FORMAT);
        m.set("tool", format!("pedsynth {}", env!("CARGO_PKG_VERSION")));
        m.set("command", command);
        m.set("rng", crate::rng::RNG_VERSION);
        m
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Records the SHA-256 of `bytes` under `<role>.sha256`.
    pub fn digest(&mut self, role: &str, bytes: &[u8]) {
        self.set(format!("{role}.sha256"), sha256_hex(bytes));
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        RunManifest { entries }
    }

    /// Writes the manifest to `<output>.manifest` and returns that path.
    pub fn write_next_to(&self, output: &Path) -> Result<PathBuf> {
        let path = manifest_path(output);
        fs::write(&path, self.render())?;
        Ok(path)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
