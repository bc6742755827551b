#![no_main]

use libfuzzer_sys::fuzz_target;
use rcri::photometry::parse_epoch_reader;

fuzz_target!(|data: &[u8]| {
    // csv decoding takes raw bytes; should never panic
    let _ = parse_epoch_reader(data, None);
    let _ = parse_epoch_reader(data, Some("syn-001"));
});
