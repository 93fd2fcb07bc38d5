use rigidsum::datum::DatumKind;
use rigidsum::parahoric::*;

/// (type, #positive roots, Coxeter number) from the standard tables.
fn table() -> Vec<(&'static str, u32, u32)> {
    let mut t = vec![
        ("E6", 36, 12),
        ("E7", 63, 18),
        ("E8", 120, 30),
        ("F4", 24, 12),
        ("G2", 6, 6),
    ];
    let names: &'static [&'static str] = &[
        "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "C2", "C3",
        "C4", "C5", "C6", "C7", "C8", "D4", "D5", "D6", "D7", "D8",
    ];
    for &name in names {
        let n: u32 = name[1..].parse().unwrap();
        let (pos, h) = match &name[..1] {
            "A" => (n * (n + 1) / 2, n + 1),
            "B" | "C" => (n * n, 2 * n),
            _ => (n * (n - 1), 2 * n - 2),
        };
        t.push((name, pos, h));
    }
    t
}

#[test]
fn root_systems_match_tables() {
    let rows = table();
    assert_eq!(rows.len(), CartanType::catalogue().len());
    for (name, pos, h) in rows {
        let t: CartanType = name.parse().unwrap();
        let g = RootSystemData::new(t);
        assert_eq!(g.num_pos_roots, pos, "{name}");
        assert_eq!(g.coxeter_number, h, "{name}");
        assert_eq!(g.dim, g.rank + 2 * pos);
        assert_eq!(g.rank * h, 2 * pos);
        assert_eq!(g.positive_roots.len() as u32, pos);
    }
}

#[test]
fn codimensions_by_kind() {
    for t in CartanType::catalogue() {
        let g = RootSystemData::new(t);
        let (pos, r) = (g.num_pos_roots as u64, g.rank as u64);
        assert_eq!(d_adjoint(&g, ParahoricKind::SpecialMaximal), 0);
        assert_eq!(d_adjoint(&g, ParahoricKind::Iwahori), 2 * pos);
        assert_eq!(d_adjoint(&g, ParahoricKind::IwahoriPlus), 2 * (pos + r));
        assert_eq!(d_adjoint(&g, ParahoricKind::CongruenceTorus), 4 * pos);
    }
}

#[test]
fn dimension_condition() {
    let g = pgl2();
    for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
        assert!(weak_rigidity_condition(0, &g, &datum_parahorics(kind)));
        assert!(!weak_rigidity_condition(1, &g, &datum_parahorics(kind)));
    }
    assert!(!weak_rigidity_condition(0, &g, &[ParahoricKind::Iwahori; 2]));
    assert!(!weak_rigidity_condition(0, &g, &[ParahoricKind::Iwahori; 4]));
    assert!(weak_rigidity_condition(1, &g, &[]));
    for t in CartanType::catalogue() {
        let g = RootSystemData::new(t);
        assert!(weak_rigidity_condition(0, &g, &[ParahoricKind::Iwahori, ParahoricKind::IwahoriPlus]));
        assert_eq!(dim_bun_doubled(0, &g, &[]), -2 * g.dim as i64);
    }
}

#[test]
fn conductors_match_levels() {
    for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
        let r = conjecture_check(ConjectureCase::Datum(kind)).unwrap();
        assert!(r.matches, "{r:?}");
        assert_eq!(r.points.len(), datum_parahorics(kind).len());
    }
    for t in CartanType::catalogue() {
        let r = conjecture_check(ConjectureCase::Kloosterman(t)).unwrap();
        assert!(r.matches, "{r:?}");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["match"], true);
    }
}

#[test]
fn regular_nilpotent_centralizer() {
    for n in 1..=7 {
        assert_eq!(sl_regular_nilpotent_centralizer_dim(n), n - 1);
    }
}

#[test]
fn parsing() {
    assert_eq!("e_8".parse::<CartanType>().unwrap().to_string(), "E8");
    for bad in ["", "A0", "B1", "D3", "E9", "F3", "G3", "X2", "A"] {
        assert!(bad.parse::<CartanType>().is_err(), "{bad:?}");
    }
    for k in ["special-maximal", "iwahori", "iwahori-plus", "congruence-torus"] {
        assert_eq!(k.parse::<ParahoricKind>().unwrap().to_string(), k);
    }
    assert!("hyper".parse::<ParahoricKind>().is_err());
}

#[test]
fn cartan_matrices_are_symmetrizable() {
    for t in CartanType::catalogue() {
        let a = t.cartan_matrix();
        let n = a.len();
        for i in 0..n {
            assert_eq!(a[i][i], 2);
            for j in 0..n {
                assert_eq!(a[i][j] == 0, a[j][i] == 0, "{t}");
                assert!(a[i][j] <= 0 || i == j);
            }
        }
    }
}
