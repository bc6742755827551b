#![no_main]

use libfuzzer_sys::fuzz_target;
use rcri::inputs::parse_grid;
use rcri::photometry::parse_pairs;

fuzz_target!(|data: &[u8]| {
    // both mini-grammars should never panic
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_grid(s);
        let _ = parse_pairs(s);
    }
});
