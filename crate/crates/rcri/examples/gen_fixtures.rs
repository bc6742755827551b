//! Regenerates the bundled synthetic epoch-photometry fixtures.

use std::fs;
use std::path::Path;

use rcri::photometry::{synthetic_epoch_csv, FIXTURE_SEED_LARGE, FIXTURE_SEED_SMALL};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&dir).unwrap();
    fs::write(
        dir.join("synthetic_epoch.csv"),
        synthetic_epoch_csv(50, FIXTURE_SEED_SMALL).unwrap(),
    )
    .unwrap();
    fs::write(
        dir.join("synthetic_epoch_5000.csv"),
        synthetic_epoch_csv(5000, FIXTURE_SEED_LARGE).unwrap(),
    )
    .unwrap();
    println!(
        "wrote fixtures with seeds {FIXTURE_SEED_SMALL} (50 per band) and {FIXTURE_SEED_LARGE} (5000 per band)"
    );
}
