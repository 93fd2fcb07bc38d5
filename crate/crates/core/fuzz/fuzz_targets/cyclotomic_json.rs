#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidsum::cyclotomic::Cyclotomic;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Cyclotomic::from_json(s) {
        let back = Cyclotomic::from_json(&c.to_json().to_string()).expect("emitted JSON parses");
        assert_eq!(back, c);
    }
});
