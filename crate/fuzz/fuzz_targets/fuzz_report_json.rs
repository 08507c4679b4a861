#![no_main]

use libfuzzer_sys::fuzz_target;
use pmibound::report::parse_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = parse_json(text) {
        let written = report.to_json();
        let reparsed = parse_json(&written).expect("written report parses");
        assert_eq!(reparsed.to_json(), written);
    }
});
