#![allow(dead_code)]

pub mod mock_server;
pub mod synthetic;

use std::path::{Path, PathBuf};

/// Root of the repository's `data/` directory.
pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Brute-force stance score as an unreduced integer fraction, built by
/// adding one unit per counted entailment. `None` when nothing fired.
pub fn brute_force_ratio(up: &[u32], down: &[u32]) -> Option<(i64, i64)> {
    let mut numerator = 0i64;
    let mut denominator = 0i64;
    for &c in up {
        for _ in 0..c {
            numerator += 1;
            denominator += 1;
        }
    }
    for &c in down {
        for _ in 0..c {
            numerator -= 1;
            denominator += 1;
        }
    }
    (denominator != 0).then_some((numerator, denominator))
}

/// Writes a config file into `dir` whose paths point at the given corpus
/// and the bundled rate history, and returns its path.
pub fn write_config(dir: &Path, corpus_dir: &Path, manifest: &Path, extra: &str) -> PathBuf {
    let rates = data_dir().join("rates/fed_funds_1971_2022.csv");
    let text = format!(
        "corpus_dir = {:?}\nmanifest = {:?}\nrate_history = {:?}\noutput_dir = {:?}\n{extra}\n",
        corpus_dir,
        manifest,
        rates,
        dir.join("out"),
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}
