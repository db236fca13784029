#![no_main]

use libfuzzer_sys::fuzz_target;

use weightred::report::Report;

// Report deserialization must never panic, and any report that parses
// must round-trip byte-identically through to_json.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = serde_json::from_str::<Report>(text) {
        let printed = report.to_json().expect("report serializes");
        let again: Report = serde_json::from_str(&printed).expect("own output parses");
        assert_eq!(printed, again.to_json().expect("stable"));
    }
});
