//! Replays the checked-in fuzz corpus through the fuzzed entry points on
//! the plain test profile, so the no-panic contract is exercised even
//! where a libFuzzer toolchain is unavailable.

use std::fs;
use std::path::{Path, PathBuf};

use rcri::distributions::DistributionSpec;
use rcri::inputs::{parse_grid, parse_sample_text, parse_scenario};
use rcri::photometry::{parse_epoch_reader, parse_pairs};

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("corpus dir {}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files
}

#[test]
fn spec_string_corpus_never_panics() {
    for (_, bytes) in corpus("spec_string") {
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = s.parse::<DistributionSpec>();
        }
    }
}

#[test]
fn scenario_file_corpus_never_panics() {
    for (_, bytes) in corpus("scenario_file") {
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = parse_scenario(s);
        }
    }
}

#[test]
fn sample_file_corpus_never_panics() {
    for (_, bytes) in corpus("sample_file") {
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = parse_sample_text(s);
        }
    }
}

#[test]
fn epoch_csv_corpus_never_panics() {
    for (_, bytes) in corpus("epoch_csv") {
        let _ = parse_epoch_reader(bytes.as_slice(), None);
        let _ = parse_epoch_reader(bytes.as_slice(), Some("syn-001"));
    }
}

#[test]
fn grid_and_pairs_corpus_never_panics() {
    for (_, bytes) in corpus("grid_and_pairs") {
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = parse_grid(s);
            let _ = parse_pairs(s);
        }
    }
}
