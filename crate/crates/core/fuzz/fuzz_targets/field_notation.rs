#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidsum::notation::{
    field_notation, format_elem, parse_elem, parse_field_with_cap, parse_index_list, parse_pair, CharacterLiteral,
};

// Small tables keep each run fast.
const CAP: u64 = 4096;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let (head, tail) = s.split_once('|').unwrap_or((s, "0"));
    if let Ok(field) = parse_field_with_cap(head, CAP) {
        let again = parse_field_with_cap(&field_notation(&field), CAP).expect("notation roundtrip");
        assert_eq!((again.p(), again.n()), (field.p(), field.n()));
        if let Ok(x) = parse_elem(&field, tail) {
            assert_eq!(parse_elem(&field, &format_elem(&field, x)).unwrap(), x);
        }
        if let Ok(lit) = tail.parse::<CharacterLiteral>() {
            let _ = lit.twist(&field);
        }
    }
    let _ = parse_index_list(s);
    let _ = parse_pair(s);
});
