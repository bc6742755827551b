#![no_main]

use libfuzzer_sys::fuzz_target;
use rcri::inputs::parse_scenario;

fuzz_target!(|data: &[u8]| {
    // key=value scenario parsing should never panic
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_scenario(s);
    }
});
