#![no_main]

use libfuzzer_sys::fuzz_target;
use pmibound::report::parse_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = parse_csv(text) {
        let written = report.to_csv();
        let reparsed = parse_csv(&written).expect("written report parses");
        assert_eq!(reparsed.to_csv(), written);
    }
});
