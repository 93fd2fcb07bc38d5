#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidsum::cyclotomic::Cyclotomic;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = s.parse::<Cyclotomic>() {
        let back: Cyclotomic = c.to_string().parse().expect("printed form parses");
        assert_eq!(back, c);
    }
});
