use num_rational::Ratio;
use proptest::prelude::*;
use rigidsum::datum::DatumKind;
use rigidsum::rigidity::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// `dim ker (X -> JX - XJ)` for the Jordan matrix with the given blocks,
/// by Gaussian elimination over the rationals. Eigenvalues are replaced by
/// distinct integers, which preserves the centralizer.
fn centralizer_by_elimination(blocks: &[JordanBlock]) -> usize {
    let mut eigens: Vec<Rational> = blocks.iter().map(|b| b.eigen).collect();
    eigens.sort();
    eigens.dedup();
    let n: usize = blocks.iter().map(|b| b.size as usize).sum();
    let mut j = vec![vec![Ratio::from(0i64); n]; n];
    let mut pos = 0;
    for b in blocks {
        let lambda = eigens.iter().position(|&e| e == b.eigen).unwrap() as i64;
        for k in 0..b.size as usize {
            j[pos + k][pos + k] = Ratio::from(lambda);
            if k + 1 < b.size as usize {
                j[pos + k][pos + k + 1] = Ratio::from(1);
            }
        }
        pos += b.size as usize;
    }
    let mut rows = Vec::new();
    for i in 0..n {
        for c in 0..n {
            let mut row = vec![Ratio::from(0i64); n * n];
            for k in 0..n {
                row[k * n + c] += j[i][k];
                row[i * n + k] -= j[k][c];
            }
            rows.push(row);
        }
    }
    let cols = n * n;
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != Ratio::from(0)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c];
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != Ratio::from(0) {
                let f = rows[i][c] / pivot;
                for k in 0..cols {
                    let v = rows[rank][k];
                    rows[i][k] -= f * v;
                }
            }
        }
        rank += 1;
    }
    cols - rank
}

fn blocks() -> impl Strategy<Value = Vec<JordanBlock>> {
    prop::collection::vec((0i64..4, 1u32..4), 1..4)
        .prop_map(|v| v.into_iter().map(|(e, s)| JordanBlock::new(r(e, 4), s)).collect())
}

#[test]
fn rank_two_conductors() {
    let expect = [
        (DatumKind::A, vec![2, 2, 2], vec![0, 0, 0]),
        (DatumKind::B, vec![2, 4], vec![0, 1]),
        (DatumKind::C, vec![2, 4], vec![0, 2]),
    ];
    for (kind, a, sw) in expect {
        let rep = datum_conductors(kind).unwrap();
        assert_eq!(rep.points.iter().map(|p| p.a_adj).collect::<Vec<_>>(), a);
        assert_eq!(rep.points.iter().map(|p| p.sw_adj).collect::<Vec<_>>(), sw);
        let input = RigidityInput::from_descriptors(0, &datum_descriptors(kind), 3, 0).unwrap();
        let report = rigidity_index(&input).unwrap();
        assert!(report.rigid);
        assert_eq!(rigidity_index_via_euler(&input).unwrap(), 0);
    }
    // Standard representation at the wild point of datum B: a = 2 + 1.
    let b = datum_conductors(DatumKind::B).unwrap();
    assert_eq!((b.points[1].sw_std, b.points[1].a_std), (1, 3));
}

#[test]
fn classification() {
    let t = |l: &str| LocalMonodromy::tame(l, vec![JordanBlock::new(r(1, 3), 1), JordanBlock::new(r(0, 1), 1)]);
    let induced = LocalMonodromy::wild("inf", vec![(r(1, 2), 2)], WildStructure::Induced, vec![]);
    let split = LocalMonodromy::wild("inf", vec![(r(1, 1), 2)], WildStructure::Split, vec![]);
    assert_eq!(classify_rank2(&[t("0"), t("1"), t("inf")], 5).unwrap(), Rank2Type::TypeI);
    assert_eq!(classify_rank2(&[t("0"), induced.clone()], 5).unwrap(), Rank2Type::TypeII);
    assert_eq!(classify_rank2(&[t("0"), split], 5).unwrap(), Rank2Type::TypeIII);
    assert_eq!(classify_rank2(&[t("0"), t("inf")], 5).unwrap(), Rank2Type::NotRigid);
    assert_eq!(classify_rank2(&[t("0"), t("1"), t("2"), t("inf")], 5).unwrap(), Rank2Type::NotRigid);
    let central = LocalMonodromy::tame("1", vec![JordanBlock::new(r(1, 2), 1); 2]);
    assert_eq!(classify_rank2(&[t("0"), central, induced.clone()], 5).unwrap(), Rank2Type::NotRigid);
    assert_eq!(classify_rank2(&[t("0"), induced], 2).unwrap_err(), RigidityError::CharacteristicTwo);
    let rank3 = LocalMonodromy::tame("0", vec![JordanBlock::new(r(0, 1), 3)]);
    assert_eq!(classify_rank2(&[rank3, t("inf")], 3).unwrap(), Rank2Type::NotRigid);
}

#[test]
fn index_rejects_impossible_inputs() {
    let odd = RigidityInput { genus: 0, points: vec![AdjointLocal { a: 3, sw: 0 }; 3], dim_ad: 3, h0: 0 };
    assert_eq!(rigidity_index(&odd).unwrap_err(), RigidityError::OddIndex(3));
    let neg = RigidityInput { genus: 0, points: vec![AdjointLocal { a: 2, sw: 0 }], dim_ad: 3, h0: 0 };
    assert_eq!(rigidity_index(&neg).unwrap_err(), RigidityError::NotRealizable(-4));
    let bad = RigidityInput { genus: 0, points: vec![AdjointLocal { a: 9, sw: 0 }], dim_ad: 3, h0: 0 };
    assert!(matches!(rigidity_index(&bad), Err(RigidityError::Invalid(_))));
    let half = LocalMonodromy::wild("x", vec![(r(1, 2), 1)], WildStructure::Split, vec![]);
    assert!(matches!(swan_from_breaks(&half), Err(RigidityError::NonIntegralSwan(_))));
    // Genus one with trivial local data: H^1 has dimension 2 h0 = 2 dim.
    let torus = RigidityInput { genus: 1, points: vec![], dim_ad: 3, h0: 3 };
    assert_eq!(rigidity_index(&torus).unwrap().index, 6);
}

#[test]
fn descriptor_text_round_trip() {
    for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
        for d in datum_descriptors(kind) {
            let back: LocalMonodromy = d.to_string().parse().unwrap();
            assert_eq!(back, d);
        }
    }
    let d: LocalMonodromy = "0=tame(0^2, 5/3)".parse().unwrap();
    assert_eq!(d.label, "0");
    assert_eq!(d.rank(), 3);
    assert_eq!(d.invariants(), 1);
    for bad in ["", "tame()", "wild(1/2;induced", "wild(1/2x0;split)", "tame(1/0)", "x=wild(1x1;odd)"] {
        assert!(bad.parse::<LocalMonodromy>().is_err(), "{bad:?}");
    }
}

#[test]
fn point_shorthand() {
    assert_eq!(parse_point_shorthand("tame").unwrap(), AdjointLocal { a: 2, sw: 0 });
    assert_eq!(parse_point_shorthand("induced").unwrap(), AdjointLocal { a: 4, sw: 1 });
    assert_eq!(parse_point_shorthand("split").unwrap(), AdjointLocal { a: 4, sw: 2 });
    assert_eq!(parse_point_shorthand("wild:7:3").unwrap(), AdjointLocal { a: 7, sw: 3 });
    assert_eq!(parse_point_shorthand("tame:8").unwrap(), AdjointLocal { a: 8, sw: 0 });
    for bad in ["wild", "bogus", "tame:x", "split:1:2:3"] {
        assert!(parse_point_shorthand(bad).is_err(), "{bad:?}");
    }
}

proptest! {
    #[test]
    fn centralizer_matches_elimination(b in blocks()) {
        prop_assert_eq!(centralizer_dim(&b) as usize, centralizer_by_elimination(&b));
        let n: i64 = b.iter().map(|x| x.size as i64).sum();
        prop_assert_eq!(adjoint_conductor_tame(&b), n * n - centralizer_by_elimination(&b) as i64);
    }

    #[test]
    fn both_h1_formulas_agree(
        genus in 0u32..3,
        pts in prop::collection::vec((0i64..4, 0i64..3), 0..6),
        h0 in 0u32..2,
    ) {
        let points: Vec<AdjointLocal> = pts.iter().map(|&(drop, sw)| AdjointLocal { a: drop + sw, sw }).collect();
        let input = RigidityInput { genus, points, dim_ad: 3, h0 };
        let a = rigidity_index(&input).map(|r| r.index);
        let b = rigidity_index_via_euler(&input);
        prop_assert_eq!(&a, &b);
        let mut rev = input.clone();
        rev.points.reverse();
        prop_assert_eq!(rigidity_index(&rev).map(|r| r.index), a);
    }

    #[test]
    fn tame_rank_two_adjoint(e1 in 0i64..6, e2 in 0i64..6) {
        let d = LocalMonodromy::tame("x", vec![JordanBlock::new(r(e1, 6), 1), JordanBlock::new(r(e2, 6), 1)]);
        let expect = if e1 == e2 { 0 } else { 2 };
        prop_assert_eq!(adjoint_conductor_rank2(&d).unwrap(), expect);
        prop_assert_eq!(adjoint_local(&d).unwrap().a, expect);
    }
}
