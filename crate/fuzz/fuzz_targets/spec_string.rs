#![no_main]

use libfuzzer_sys::fuzz_target;
use rcri::distributions::DistributionSpec;

fuzz_target!(|data: &[u8]| {
    // family:params parsing should never panic
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = s.parse::<DistributionSpec>();
    }
});
