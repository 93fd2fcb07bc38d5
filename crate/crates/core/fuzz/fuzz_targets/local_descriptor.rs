#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidsum::datum::DatumKind;
use rigidsum::parahoric::{CartanType, ParahoricKind};
use rigidsum::rigidity::{conductor_report, parse_point_shorthand, LocalMonodromy};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = s.parse::<LocalMonodromy>() {
        let back: LocalMonodromy = d.to_string().parse().expect("printed descriptor parses");
        assert_eq!(back.to_string(), d.to_string());
        let _ = conductor_report(std::slice::from_ref(&d));
    }
    let _ = parse_point_shorthand(s);
    let _ = s.parse::<CartanType>();
    let _ = s.parse::<ParahoricKind>();
    let _ = s.parse::<DatumKind>();
});
