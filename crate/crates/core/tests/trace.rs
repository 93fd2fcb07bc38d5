use proptest::prelude::*;
use rigidsum::characters::{AdditiveCharacter, MultiplicativeCharacter};
use rigidsum::cyclotomic::Cyclotomic;
use rigidsum::datum::Datum;
use rigidsum::ff::{Elem, Field};
use rigidsum::trace::*;

fn f(p: u64, n: u32) -> Field {
    Field::new(p, n).unwrap()
}

/// All tuples of units of the given length.
fn tuples(field: &Field, len: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                field.units().map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn raw_kloosterman(field: &Field, psi: &AdditiveCharacter, n: usize, a: Elem) -> Cyclotomic {
    let mut acc = Cyclotomic::zero(1);
    for t in tuples(field, n) {
        if t.iter().fold(Elem::ONE, |p, &x| field.mul(p, x)) == a {
            let s = t.iter().fold(Elem::ZERO, |s, &x| field.add(s, x));
            acc = &acc + &psi.eval(s);
        }
    }
    acc
}

/// `sum_{prod x / prod y = a} psi(sum x - sum y) prod chi_i(x_i) prod rho_j(y_j)`.
fn raw_hypergeom(field: &Field, h: &HypergeomSpec, a: Elem) -> Cyclotomic {
    let (n, m) = (h.chis.len(), h.rhos.len());
    let mut acc = Cyclotomic::zero(1);
    for t in tuples(field, n + m) {
        let (xs, ys) = t.split_at(n);
        let px = xs.iter().fold(Elem::ONE, |p, &x| field.mul(p, x));
        let py = ys.iter().fold(Elem::ONE, |p, &y| field.mul(p, y));
        if field.div(px, py).unwrap() != a {
            continue;
        }
        let sx = xs.iter().fold(Elem::ZERO, |s, &x| field.add(s, x));
        let sy = ys.iter().fold(Elem::ZERO, |s, &y| field.add(s, y));
        let mut term = h.psi.eval(field.sub(sx, sy));
        for (c, &x) in h.chis.iter().zip(xs).chain(h.rhos.iter().zip(ys)) {
            term = &term * &c.eval(x).unwrap();
        }
        acc = &acc + &term;
    }
    acc
}

fn raw_convolution(a: &TraceTable, b: &TraceTable, x: Elem) -> Cyclotomic {
    let field = a.field();
    let mut acc = Cyclotomic::zero(1);
    for u in field.units() {
        for v in field.units() {
            if field.mul(u, v) == x {
                acc = &acc + &(a.get(u).unwrap() * b.get(v).unwrap());
            }
        }
    }
    acc
}

#[test]
fn kloosterman_against_raw_sums() {
    for field in [f(3, 1), f(5, 1), f(2, 2), f(3, 2), f(7, 1)] {
        for t in [Elem(1), Elem(2 % field.q())] {
            let psi = AdditiveCharacter::new(&field, t);
            if psi.is_trivial() {
                continue;
            }
            for n in 1..=3u32 {
                let table = kloosterman_table(&field, &psi, n).unwrap();
                for a in field.units() {
                    let raw = raw_kloosterman(&field, &psi, n as usize, a);
                    assert_eq!(kloosterman(&field, &psi, n, a).unwrap(), raw);
                    assert_eq!(table.get(a).unwrap(), &raw);
                }
                for mode in [ConvolutionMode::Naive, ConvolutionMode::Dft] {
                    let conv = kloosterman_via_convolution(&field, &psi, n, mode).unwrap();
                    assert_eq!(conv.values(), table.values());
                }
            }
        }
    }
}

#[test]
fn kloosterman_small_values() {
    let f3 = f(3, 1);
    let psi = AdditiveCharacter::standard(&f3);
    assert_eq!(kloosterman(&f3, &psi, 2, Elem(1)).unwrap(), Cyclotomic::from_int(1, -1));
    assert_eq!(kloosterman(&f3, &psi, 1, Elem(2)).unwrap(), psi.eval(Elem(2)));
    // Kl_2 is real for odd p.
    for field in [f(5, 1), f(7, 1), f(3, 2)] {
        let psi = AdditiveCharacter::standard(&field);
        for (_, v) in kloosterman_table(&field, &psi, 2).unwrap().iter() {
            assert_eq!(v.conj(), *v);
        }
    }
}

#[test]
fn kloosterman_errors() {
    let f5 = f(5, 1);
    let psi = AdditiveCharacter::standard(&f5);
    assert_eq!(kloosterman(&f5, &psi, 2, Elem(0)).unwrap_err(), TraceError::ZeroArgument);
    assert!(matches!(kloosterman(&f5, &psi, 0, Elem(1)), Err(TraceError::InvalidArity(_))));
    let trivial = AdditiveCharacter::new(&f5, Elem(0));
    assert_eq!(kloosterman(&f5, &trivial, 2, Elem(1)).unwrap_err(), TraceError::TrivialPsi);
    let other = AdditiveCharacter::standard(&f(7, 1));
    assert_eq!(kloosterman(&f5, &other, 2, Elem(1)).unwrap_err(), TraceError::SpecMismatch);
}

#[test]
fn hypergeometric_against_raw_sums() {
    let cases: Vec<(u64, u32, Vec<i64>, Vec<i64>)> = vec![
        (5, 1, vec![1, 2], vec![3]),
        (5, 1, vec![0, 1], vec![2, 3]),
        (7, 1, vec![1], vec![4]),
        (3, 2, vec![1, 5], vec![2]),
        (2, 2, vec![1, 2], vec![0]),
        (5, 1, vec![1, 2, 3], vec![]),
    ];
    for (p, n, chis, rhos) in cases {
        let field = f(p, n);
        let mk = |v: &[i64]| v.iter().map(|&a| MultiplicativeCharacter::new(&field, a)).collect();
        let h = HypergeomSpec::new(AdditiveCharacter::standard(&field), mk(&chis), mk(&rhos));
        let direct = hypergeom_trace_direct(&field, &h).unwrap();
        for a in field.units() {
            assert_eq!(direct.get(a).unwrap(), &raw_hypergeom(&field, &h, a), "{chis:?} {rhos:?}");
        }
        for mode in [ConvolutionMode::Naive, ConvolutionMode::Dft] {
            let conv = hypergeom_trace_convolution(&field, &h, mode).unwrap();
            assert_eq!(conv.values(), direct.values());
        }
        assert_eq!(hypergeom_trace(&field, &h).unwrap().values(), direct.values());
    }
}

#[test]
fn trivial_upper_parameters_give_kloosterman() {
    let field = f(7, 1);
    let psi = AdditiveCharacter::standard(&field);
    let triv = MultiplicativeCharacter::trivial(&field);
    let h = HypergeomSpec::new(psi.clone(), vec![triv.clone(), triv.clone(), triv], vec![]);
    let kl = kloosterman_table(&field, &psi, 3).unwrap();
    assert_eq!(hypergeom_trace(&field, &h).unwrap().values(), kl.values());
}

#[test]
fn convolution_against_raw_sum() {
    let field = f(7, 1);
    let psi = AdditiveCharacter::standard(&field);
    let chi = MultiplicativeCharacter::new(&field, 2);
    let a = TraceTable::from_fn(&field, "a", |x| psi.eval(x));
    let b = TraceTable::from_fn(&field, "b", |x| &chi.eval(x).unwrap() + &Cyclotomic::from_int(1, 3));
    for mode in [ConvolutionMode::Naive, ConvolutionMode::Dft] {
        let c = mult_convolution(&a, &b, mode).unwrap();
        for x in field.units() {
            assert_eq!(c.get(x).unwrap(), &raw_convolution(&a, &b, x));
        }
    }
    let partial = a.without(&[Elem(1)]);
    assert_eq!(
        mult_convolution(&partial, &b, ConvolutionMode::Naive).unwrap_err(),
        TraceError::DomainMismatch
    );
    let other = delta_one(&f(5, 1));
    assert_eq!(mult_convolution(&a, &other, ConvolutionMode::Dft).unwrap_err(), TraceError::SpecMismatch);
}

#[test]
fn identities_hold_for_generic_data() {
    let f5 = f(5, 1);
    let a = Datum::a(&f5, [1, 1], [3, 0], [2, 1]);
    assert!(a.is_generic());
    let b = Datum::b(&f5, [1, 2], [Elem(2), Elem(3)]);
    let c = Datum::c(&f5, [1, 2], [3, 2], [Elem(1), Elem(3)]);
    for d in [&a, &b, &c] {
        let r = verify_identity(d, &f5).unwrap();
        assert!(r.holds, "{d:?} {r:?}");
        assert_eq!(r.points_checked, eigen_trace(d, &f5).unwrap().len());
        let broken = verify_identity_with(d, &f5, IdentityOptions { perturb_constant: true }).unwrap();
        assert!(!broken.holds);
        assert!(broken.witness.is_some() && broken.lhs.is_some() && broken.rhs.is_some());
    }
    assert!(eigen_trace(&a, &f5).unwrap().get(Elem::ONE).is_none());
    assert_eq!(eigen_trace(&b, &f5).unwrap().len(), 4);
}

#[test]
fn identity_refuses_when_hypotheses_fail() {
    let f5 = f(5, 1);
    // chi0^(1) chi_inf^(1) trivial
    let a = Datum::a(&f5, [1, 0], [0, 0], [3, 0]);
    assert!(matches!(verify_identity(&a, &f5), Err(TraceError::GenericityViolated(_))));
    let a = Datum::a(&f5, [1, 1], [2, 1], [1, 2]);
    assert_eq!(verify_identity(&a, &f5).unwrap_err(), TraceError::NonTrivialChi21);
    let b = Datum::b(&f5, [1, 2], [Elem(0), Elem(3)]);
    assert!(matches!(verify_identity(&b, &f5), Err(TraceError::GenericityViolated(_))));
    let c = Datum::c(&f5, [1, 2], [3, 2], [Elem(2), Elem(2)]);
    assert!(matches!(verify_identity(&c, &f5), Err(TraceError::GenericityViolated(_))));
    let f7 = f(7, 1);
    assert_eq!(eigen_trace(&c, &f7).unwrap_err(), TraceError::SpecMismatch);
}

#[test]
fn weil_scan_reports_ratios() {
    let fields = [f(5, 1), f(7, 1), f(11, 1)];
    let r = weil_scan(&fields, 2, 1e-9).unwrap();
    assert!(r.all_ok);
    for row in &r.rows {
        assert!((row.bound - 2.0 * (row.q as f64).sqrt()).abs() < 1e-12);
        assert!(row.max_ratio <= 1.0 + 1e-9 && row.max_ratio > 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_commutative_and_unital(seed in prop::collection::vec((0i64..12, -3i64..=3), 12)) {
        let field = f(13, 1);
        let table = |offset: usize| TraceTable::from_fn(&field, "t", |x| {
            let (k, c) = seed[(x.0 as usize + offset) % seed.len()];
            Cyclotomic::root(12, k).scale_int(c)
        });
        let (a, b) = (table(0), table(5));
        let ab = mult_convolution(&a, &b, ConvolutionMode::Dft).unwrap();
        let ba = mult_convolution(&b, &a, ConvolutionMode::Naive).unwrap();
        prop_assert_eq!(ab.values(), ba.values());
        let a1 = mult_convolution(&a, &delta_one(&field), ConvolutionMode::Dft).unwrap();
        prop_assert_eq!(a1.values(), a.values());
    }
}

#[test]
fn kloosterman_values_live_in_prime_cyclotomic_field() {
    for (p, n) in [(3, 2), (2, 3), (5, 2)] {
        let field = f(p, n);
        let psi = AdditiveCharacter::new(&field, Elem::ONE);
        for rank in 2..=3 {
            let table = kloosterman_table(&field, &psi, rank).unwrap();
            for (x, v) in table.iter() {
                // Invariant under every Galois element fixing zeta_p.
                let order = v.order() as i64;
                for c in (1..order).filter(|c| num_integer::gcd(*c, order) == 1 && c % p as i64 == 1) {
                    assert_eq!(&v.galois_act(c).unwrap(), v, "q={} x={x:?}", field.q());
                }
            }
        }
    }
}

/// Rank two: the sums over F_q and F_{q^2} are the first two power sums of
/// Frobenius eigenvalues with product q, so S(q^2) = 2q - S(q)^2.
#[test]
fn kloosterman_rank_two_extension_consistency() {
    for (p, n) in [(3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
        let sub = f(p, n);
        let ext = f(p, 2 * n);
        let emb = rigidsum::ff::Embedding::new(&sub, &ext).unwrap();
        let small = kloosterman_table(&sub, &AdditiveCharacter::new(&sub, Elem::ONE), 2).unwrap();
        let big = kloosterman_table(&ext, &AdditiveCharacter::new(&ext, Elem::ONE), 2).unwrap();
        let q = sub.q() as i64;
        for (x, s) in small.iter() {
            let expected = &Cyclotomic::from_int(1, 2 * q) - &(s * s);
            assert_eq!(big.get(emb.embed(x)).unwrap(), &expected, "q={q} x={x:?}");
        }
    }
}
