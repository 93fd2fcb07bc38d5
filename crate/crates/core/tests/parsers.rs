//! Fuzz-target bodies run on stable: every checked-in seed, then random
//! strings built from each grammar's alphabet.

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use rigidsum::cyclotomic::Cyclotomic;
use rigidsum::datum::DatumKind;
use rigidsum::notation::{
    field_notation, format_elem, parse_config, parse_elem, parse_field_with_cap, parse_index_list, parse_pair,
    CharacterLiteral,
};
use rigidsum::parahoric::{CartanType, ParahoricKind};
use rigidsum::rigidity::{conductor_report, parse_point_shorthand, LocalMonodromy};

fn cyclotomic_text(s: &str) {
    if let Ok(c) = s.parse::<Cyclotomic>() {
        let back: Cyclotomic = c.to_string().parse().expect("printed form parses");
        assert_eq!(back, c);
    }
}

fn cyclotomic_json(s: &str) {
    if let Ok(c) = Cyclotomic::from_json(s) {
        let back = Cyclotomic::from_json(&c.to_json().to_string()).expect("emitted JSON parses");
        assert_eq!(back, c);
    }
}

fn field_notation_target(s: &str) {
    let (head, tail) = s.split_once('|').unwrap_or((s, "0"));
    if let Ok(field) = parse_field_with_cap(head, 4096) {
        let again = parse_field_with_cap(&field_notation(&field), 4096).expect("notation roundtrip");
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
}

fn local_descriptor(s: &str) {
    if let Ok(d) = s.parse::<LocalMonodromy>() {
        let back: LocalMonodromy = d.to_string().parse().expect("printed descriptor parses");
        assert_eq!(back.to_string(), d.to_string());
        let _ = conductor_report(std::slice::from_ref(&d));
    }
    let _ = parse_point_shorthand(s);
    let _ = s.parse::<CartanType>();
    let _ = s.parse::<ParahoricKind>();
    let _ = s.parse::<DatumKind>();
}

fn config_file(s: &str) {
    if let Ok(entries) = parse_config(s) {
        let text: String = entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(parse_config(&text).expect("normalized config parses"), entries);
    }
}

fn seeds(target: &str) -> Vec<String> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fuzz", "corpus", target].iter().collect();
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn seeds_parse_and_roundtrip() {
    for s in seeds("cyclotomic_text") {
        cyclotomic_text(&s);
        assert!(s.parse::<Cyclotomic>().is_ok(), "{s}");
    }
    for s in seeds("cyclotomic_json") {
        cyclotomic_json(&s);
        assert!(Cyclotomic::from_json(&s).is_ok(), "{s}");
    }
    for s in seeds("field_notation") {
        field_notation_target(&s);
    }
    for s in seeds("local_descriptor") {
        local_descriptor(&s);
    }
    for s in seeds("config_file") {
        config_file(&s);
        assert!(parse_config(&s).is_ok(), "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn cyclotomic_text_never_panics(s in r"cyc\([0-9]{0,3}\)\[([-0-9]{0,4}(/[-0-9]{0,3})? ?\* ?z\^[0-9]{0,3}( \+ )?){0,4}\]?") {
        cyclotomic_text(&s);
    }

    #[test]
    fn cyclotomic_json_never_panics(s in r#"\{"N":[-0-9]{0,4},"terms":\[(\{"den":("?[-0-9]{0,3}"?),"k":[0-9]{0,3},"num":("?[-0-9]{0,5}"?)\},?){0,3}\]\}"#) {
        cyclotomic_json(&s);
    }

    #[test]
    fn field_notation_never_panics(s in r"(q=)?[0-9]{0,4}(\^[0-9]{0,2})?\|(psi:|chi:)?\[?[-0-9,]{0,8}\]?") {
        field_notation_target(&s);
    }

    #[test]
    fn local_descriptor_never_panics(s in r"((0|1|inf)=)?(tame|wild|central|induced|split|tame-pr)?[(:]?([-0-9/^x;]|split|induced|tame=|,){0,10}\)?") {
        local_descriptor(&s);
    }

    #[test]
    fn config_never_panics(s in r"([ a-z_\-0-9=#,\[\]\r]{0,20}\n?){0,5}") {
        config_file(&s);
    }
}
