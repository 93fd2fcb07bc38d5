use rigidsum::cyclotomic::Cyclotomic;
use rigidsum::datum::{Datum, DatumKind};
use rigidsum::ff::{Elem, Field};
use rigidsum::moduli::*;
use rigidsum::trace::eigen_trace;

fn f(q: u64) -> Field {
    let p = rigidsum::ff::prime_factors(q)[0];
    let mut n = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        n += 1;
    }
    Field::new(p, n).unwrap()
}

fn generic_a(field: &Field) -> Option<Datum> {
    let m = field.q() as i64 - 1;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let e = (-(a + b + c + d)).rem_euclid(m);
                    let datum = Datum::a(field, [a, b], [c, 0], [d, e]);
                    if datum.is_generic() {
                        return Some(datum);
                    }
                }
            }
        }
    }
    None
}

fn generic_c(field: &Field) -> Datum {
    let m = field.q() as i64 - 1;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let d = (-(a + b + c)).rem_euclid(m);
                let datum = Datum::c(field, [a, b], [c, d], [Elem(1), Elem(0)]);
                if datum.is_generic() {
                    return datum;
                }
            }
        }
    }
    panic!("no generic datum C over {field}");
}

fn datum_of(kind: DatumKind, field: &Field) -> Datum {
    match kind {
        DatumKind::A => Datum::a(field, [0, 0], [0, 0], [0, 0]),
        DatumKind::B => Datum::b(field, [0, 0], [Elem(1), Elem(1)]),
        DatumKind::C => Datum::c(field, [0, 0], [0, 0], [Elem(1), Elem(0)]),
    }
}

/// Every level structure lies in exactly one listed orbit: the orbit sizes
/// `|Aut| / |Stab|` add up to the number of level structures.
#[test]
fn normal_forms_exhaust_level_structures() {
    for q in [3u64, 5] {
        let field = f(q);
        for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
            let datum = datum_of(kind, &field);
            for k in 0..=2u32 {
                let configs: Vec<_> = enumerate_configs(&datum, (k as i64)..=(k as i64), 2)
                    .unwrap()
                    .into_iter()
                    .filter(|c| c.gap() == k)
                    .collect();
                let total: u64 = configs
                    .iter()
                    .map(|c| {
                        let stab = aut_order(&datum, c).unwrap();
                        assert_eq!(bundle_aut_size(q, k) % stab, 0);
                        bundle_aut_size(q, k) / stab
                    })
                    .sum();
                assert_eq!(total, level_count(kind, q), "{kind} q={q} k={k}");
                assert_eq!(all_levels(kind, &field).len() as u64, level_count(kind, q));
            }
        }
    }
}

#[test]
fn orbit_counts_per_gap() {
    let field = f(5);
    let datum = generic_a(&field).unwrap();
    let count = |d: i64, k: u32| {
        enumerate_configs(&datum, d..=d, 4)
            .unwrap()
            .iter()
            .filter(|c| c.gap() == k)
            .count()
    };
    assert_eq!(count(0, 0), 5);
    assert_eq!(count(1, 1), 9);
    assert_eq!(count(0, 2), 8);
    assert_eq!(count(1, 3), 8);
    let (lo, hi) = (1, 0);
    assert!(enumerate_configs(&datum, lo..=hi, 4).unwrap().is_empty());
}

#[test]
fn rule_based_relevance_matches_bruteforce() {
    for q in [3u64, 5] {
        let field = f(q);
        let mut data = vec![
            Datum::b(&field, [1, 0], [Elem(1), Elem(2)]),
            Datum::b(&field, [0, 1], [Elem(0), Elem(1)]),
            Datum::b(&field, [0, 0], [Elem(1), Elem(0)]),
            generic_c(&field),
            Datum::c(&field, [1, 0], [0, 1], [Elem(1), Elem(1)]),
            Datum::a(&field, [0, 0], [0, 0], [0, 0]),
        ];
        if let Some(a) = generic_a(&field) {
            data.push(a);
        }
        let m = q as i64 - 1;
        data.push(Datum::a(&field, [1, 0], [m - 1, 0], [0, 0]));
        data.push(Datum::c(&field, [1, m - 1], [0, 0], [Elem(1), Elem(0)]));
        for datum in &data {
            for config in enumerate_configs(datum, 0..=3, 3).unwrap() {
                let rule = relevance_test(datum, &config).unwrap();
                let brute = relevance_bruteforce(datum, &config).unwrap();
                assert_eq!(rule.relevant, brute, "{datum:?} {config}");
                if let Some(w) = &rule.witness {
                    assert!(w.is_nontrivial(datum));
                }
            }
        }
    }
}

#[test]
fn generic_data_have_one_relevant_point_per_degree() {
    for q in [3u64, 5, 7, 9] {
        let field = f(q);
        let mut data = vec![
            Datum::b(&field, [1, 0], [Elem(1), Elem(1)]),
            generic_c(&field),
        ];
        data.extend(generic_a(&field));
        for datum in &data {
            assert!(datum.is_generic());
            for d in -2..=3 {
                let orbits = relevant_orbits(datum, d, 4).unwrap();
                assert_eq!(orbits.relevant.len(), 1, "{datum:?} d={d}");
                let point = &orbits.relevant[0];
                assert!(point.config.gap() <= 1);
                let expected = match datum.kind() {
                    DatumKind::B => 1,
                    _ => q - 1,
                };
                assert_eq!(point.aut_order, Some(expected));
            }
            assert!(split_cap_canary(datum, -2..=3, 4).unwrap().is_empty());
        }
    }
}

#[test]
fn relevant_points_are_twist_periodic() {
    let field = f(7);
    let datum = generic_c(&field);
    for d in -2..=1 {
        let lo = relevant_orbits(&datum, d, 4).unwrap();
        let hi = relevant_orbits(&datum, d + 2, 4).unwrap();
        let twisted: Vec<_> = lo.relevant.iter().map(|o| o.config.twisted(1)).collect();
        let direct: Vec<_> = hi.relevant.iter().map(|o| o.config.clone()).collect();
        assert_eq!(twisted, direct);
    }
}

#[test]
fn expected_relevant_representatives() {
    let field = f(5);
    let a = generic_a(&field).unwrap();
    let star0 = &relevant_orbits(&a, 0, 4).unwrap().relevant[0].config;
    assert_eq!(
        star0.level,
        Level::A {
            lines: [Line::E1, Line::DIAG, Line::E2]
        }
    );
    let star1 = &relevant_orbits(&a, 1, 4).unwrap().relevant[0].config;
    assert_eq!(star1.splitting, (1, 0));
    assert_eq!(
        star1.level,
        Level::A {
            lines: [Line::E2, Line::DIAG, Line::E2]
        }
    );
    let b = Datum::b(&field, [0, 0], [Elem(1), Elem(3)]);
    let star1 = &relevant_orbits(&b, 1, 4).unwrap().relevant[0].config;
    assert_eq!(
        star1.level,
        Level::B {
            l0: Line::E2,
            v1: [Elem(0), Elem(1)],
            v2: [Elem(1), Elem(0)]
        }
    );
}

#[test]
fn broken_genericity_gives_extra_relevant_points() {
    let field = f(5);
    let any_degree_not_one = |datum: &Datum| {
        (-2..=3).any(|d| relevant_orbits(datum, d, 4).unwrap().relevant.len() != 1)
    };
    // chi0^(1) chi1^(1) chiinf^(1) trivial.
    let a = Datum::a(&field, [1, 0], [3, 0], [0, 0]);
    assert!(!a.is_generic());
    assert!(any_degree_not_one(&a));
    let b = Datum::b(&field, [0, 0], [Elem(0), Elem(1)]);
    assert!(any_degree_not_one(&b));
    let c = Datum::c(&field, [1, 2], [3, 2], [Elem(2), Elem(2)]);
    assert!(any_degree_not_one(&c));
}

#[test]
fn decomposable_irrelevant_with_torus_witness() {
    let field = f(5);
    let a = generic_a(&field).unwrap();
    let cfg = enumerate_configs(&a, 0..=0, 2)
        .unwrap()
        .into_iter()
        .find(|c| c.gap() == 2)
        .unwrap();
    let v = relevance_test(&a, &cfg).unwrap();
    assert!(!v.relevant);
    assert!(matches!(v.witness, Some(Witness::Torus { .. })));
    let trivial = Datum::a(&field, [0, 0], [0, 0], [0, 0]);
    assert!(relevance_test(&trivial, &cfg).unwrap().relevant);
}

#[test]
fn datum_b_large_gap_uses_second_coordinate() {
    let field = f(3);
    let b = Datum::b(&field, [0, 0], [Elem(1), Elem(1)]);
    let cfg = BundleConfig {
        degree: 2,
        splitting: (2, 0),
        level: Level::B {
            l0: Line::E2,
            v1: [Elem(0), Elem(1)],
            v2: [Elem(1), Elem(0)],
        },
    };
    let v = relevance_test(&b, &cfg).unwrap();
    match v.witness {
        Some(Witness::Additive { coordinate, .. }) => assert!(coordinate.contains("lower-left")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn errors() {
    let f2 = Field::prime(2).unwrap();
    let b = Datum::b(&f2, [0, 0], [Elem(1), Elem(1)]);
    assert_eq!(
        enumerate_configs(&b, 0..=1, 2).unwrap_err(),
        ModuliError::CharacteristicTwo(DatumKind::B)
    );
    let field = f(3);
    let a = Datum::a(&field, [0, 0], [0, 0], [0, 0]);
    assert_eq!(
        enumerate_configs(&a, 0..=0, 1).unwrap_err(),
        ModuliError::SplitCapTooSmall
    );
    let odd = BundleConfig {
        degree: 1,
        splitting: (1, 0),
        level: Level::A {
            lines: [Line::DIAG, Line::DIAG, Line::E2],
        },
    };
    assert!(matches!(
        relevance_test(&a, &odd),
        Err(ModuliError::Unclassified(_))
    ));
    let big = f(17);
    let a17 = Datum::a(&big, [0, 0], [0, 0], [0, 0]);
    assert!(matches!(
        hecke_trace_bruteforce(&a17, &big),
        Err(ModuliError::CapExceeded { q: 17, cap: 13 })
    ));
}

/// Independent of the trace engine: a raw double loop over `(b, c)`.
#[test]
fn hecke_b_is_minus_kloosterman_over_f3() {
    let field = f(3);
    let b = Datum::b(&field, [0, 0], [Elem(1), Elem(1)]);
    let table = hecke_trace_bruteforce(&b, &field).unwrap();
    for (x, value) in table.iter() {
        let mut expect = Cyclotomic::zero(3);
        for bb in field.units() {
            for c in field.units() {
                if field.mul(bb, c) == x {
                    expect = &expect + &Cyclotomic::root(3, field.add(bb, c).0 as i64);
                }
            }
        }
        assert_eq!(value, &-expect);
    }
    assert_eq!(table.get(Elem(1)).unwrap(), &Cyclotomic::from_int(1, 1));
}

#[test]
fn hecke_matches_eigen_trace() {
    for q in [3u64, 5, 7] {
        let field = f(q);
        let m = q as i64 - 1;
        let mut data = vec![
            Datum::b(&field, [0, 0], [Elem(1), Elem(1)]),
            Datum::b(&field, [1, m - 1], [Elem(1), Elem(2 % q as u32)]),
            generic_c(&field),
            Datum::c(&field, [1, 0], [m - 1, 0], [Elem(2 % q as u32), Elem(0)]),
            Datum::a(&field, [1, 0], [0, 0], [0, m - 1]),
        ];
        data.extend(generic_a(&field));
        data.push(Datum::a(&field, [0, 1], [1, 1], [0, m - 3]));
        for datum in &data {
            let hecke = hecke_trace_bruteforce(datum, &field).unwrap();
            let eigen = eigen_trace(datum, &field).unwrap();
            assert_eq!(hecke.points(), eigen.points());
            assert_eq!(hecke.values(), eigen.values(), "{datum:?}");
        }
    }
}
