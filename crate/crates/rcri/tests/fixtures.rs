//! The bundled synthetic fixtures must stay bit-identical to what their
//! documented seeds generate.

use std::fs;
use std::path::{Path, PathBuf};

use rcri::photometry::{
    parse_epoch_csv, synthetic_epoch_csv, Band, FIXTURE_SEED_LARGE, FIXTURE_SEED_SMALL,
};

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn bundled_fixtures_match_their_seeds() {
    let small = fs::read_to_string(fixture_path("synthetic_epoch.csv")).unwrap();
    let regen = synthetic_epoch_csv(50, FIXTURE_SEED_SMALL).unwrap();
    assert!(
        small == regen,
        "synthetic_epoch.csv drifted from seed output"
    );

    let large = fs::read_to_string(fixture_path("synthetic_epoch_5000.csv")).unwrap();
    let regen = synthetic_epoch_csv(5000, FIXTURE_SEED_LARGE).unwrap();
    assert!(
        large == regen,
        "synthetic_epoch_5000.csv drifted from seed output"
    );
}

#[test]
fn bundled_small_fixture_has_fifty_rows_per_band() {
    let parsed = parse_epoch_csv(&fixture_path("synthetic_epoch.csv"), None).unwrap();
    assert_eq!(parsed.records.len(), 150);
    assert_eq!(parsed.skipped, 0);
    for band in Band::ALL {
        assert_eq!(parsed.band_count(band), 50);
    }
}
