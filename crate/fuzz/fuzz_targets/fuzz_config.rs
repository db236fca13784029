#![no_main]

use libfuzzer_sys::fuzz_target;

// The key=value config parser must never panic and must either reject
// the input or produce pairs that survive a parse -> print -> parse
// round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pairs) = weightred::report::parse_config(text) {
        let printed: String = pairs
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let again = weightred::report::parse_config(&printed).expect("reprint parses");
        assert_eq!(pairs, again);
        let mut cfg = weightred::report::RunConfig::default();
        let _ = weightred::report::apply_config(&mut cfg, &pairs);
    }
});
