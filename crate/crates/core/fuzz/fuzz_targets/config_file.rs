#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidsum::notation::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = parse_config(s) {
        let text: String = entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(parse_config(&text).expect("normalized config parses"), entries);
    }
});
