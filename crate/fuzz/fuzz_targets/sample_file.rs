#![no_main]

use libfuzzer_sys::fuzz_target;
use rcri::inputs::parse_sample_text;

fuzz_target!(|data: &[u8]| {
    // one-value-per-line sample parsing should never panic
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_sample_text(s);
    }
});
