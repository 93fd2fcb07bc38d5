//! The acceptance battery: ten numbered checks, each producing a one-line
//! verdict. Shared by the command-line `suite` command and the test target.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{gauss_sum, pullback_norm, AdditiveCharacter, MultiplicativeCharacter};
use crate::cyclotomic::Cyclotomic;
use crate::datum::{Datum, DatumKind};
use crate::ff::{is_prime, Elem, Embedding, Field};
use crate::moduli::{enumerate_configs, hecke_trace_bruteforce, relevance_test, relevant_orbits};
use crate::parahoric::{
    conjecture_check, d_adjoint, datum_parahorics, pgl2, weak_rigidity_condition, CartanType,
    ConjectureCase, ParahoricKind, RootSystemData,
};
use crate::rigidity::{
    adjoint_local, classify_rank2, datum_conductors, datum_descriptors, rigidity_index,
    rigidity_index_via_euler, AdjointLocal, JordanBlock, LocalMonodromy, Rank2Type, Rational,
    RigidityInput, WildStructure,
};
use crate::trace::{
    kloosterman, kloosterman_via_convolution, mult_convolution, verify_identity, weil_scan,
    ConvolutionMode, TraceTable,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2013;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOptions {
    /// Fields larger than this are skipped by the criteria that scan `q`.
    pub qmax: u32,
    pub seed: u64,
    /// Randomized cases for the property criterion.
    pub cases: usize,
    pub tolerance: f64,
    /// Largest prime in the Weil-bound scan.
    pub weil_pmax: u32,
    /// Degrees scanned for unique relevant points.
    pub degrees: (i64, i64),
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            qmax: 9,
            seed: DEFAULT_SEED,
            cases: 1000,
            tolerance: 1e-9,
            weil_pmax: 101,
            degrees: (-2, 3),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checks: u64,
    pub detail: String,
    /// First failing instance, when any.
    pub counterexample: Option<String>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<24} checks={:<8} {:.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.seconds,
            match &self.counterexample {
                Some(c) => format!("{}; counterexample: {}", self.detail, c),
                None => self.detail.clone(),
            }
        )
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "identity-A"),
    (2, "identity-C"),
    (3, "kloosterman-triple"),
    (4, "weil-bound"),
    (5, "rigidity-numbers"),
    (6, "dimension-condition"),
    (7, "conductor-matching"),
    (8, "unique-relevant-point"),
    (9, "kummer-trace-norm"),
    (10, "property-suites"),
];

struct Outcome {
    checks: u64,
    detail: String,
    counterexample: Option<String>,
}

impl Outcome {
    fn ok(checks: u64, detail: impl Into<String>) -> Outcome {
        Outcome {
            checks,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(checks: u64, detail: impl Into<String>, cx: impl Into<String>) -> Outcome {
        Outcome {
            checks,
            detail: detail.into(),
            counterexample: Some(cx.into()),
        }
    }
}

pub fn run_criterion(id: u32, opts: &SuiteOptions) -> CriterionReport {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown");
    let start = Instant::now();
    let outcome = match id {
        1 => identity_a(opts),
        2 => identity_c(opts),
        3 => kloosterman_triple(opts),
        4 => weil_bound(opts),
        5 => rigidity_numbers(),
        6 => dimension_condition(),
        7 => conductor_matching(),
        8 => unique_relevant_point(opts),
        9 => kummer_trace_norm(),
        10 => property_suites(opts),
        _ => Outcome::fail(0, "no such criterion", format!("id {id}")),
    };
    CriterionReport {
        id,
        name,
        passed: outcome.counterexample.is_none(),
        checks: outcome.checks,
        detail: outcome.detail,
        counterexample: outcome.counterexample,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, opts)).collect()
}

/// Fields of the given orders that fit under `qmax`.
fn fields(qs: &[u32], qmax: u32) -> Vec<Field> {
    qs.iter()
        .filter(|&&q| q <= qmax)
        .map(|&q| {
            let p = crate::ff::prime_factors(q as u64)[0];
            let n = (q as f64).log(p as f64).round() as u32;
            Field::new(p, n).expect("small field")
        })
        .collect()
}

fn first_error<T, E: std::fmt::Display>(
    results: Vec<Result<T, (String, E)>>,
) -> Result<Vec<T>, String> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err((ctx, e)) => return Err(format!("{ctx}: {e}")),
        }
    }
    Ok(out)
}

/// Run identity checks in parallel; returns (points checked, tuples, first failure).
fn identity_battery(data: Vec<(Field, Datum)>) -> Outcome {
    let tuples = data.len() as u64;
    let results: Vec<Result<(u64, Option<String>), (String, String)>> = data
        .par_iter()
        .map(|(field, datum)| {
            let ctx = format!("q={} {:?}", field.q(), datum);
            let report = verify_identity(datum, field).map_err(|e| (ctx.clone(), e.to_string()))?;
            let cx = (!report.holds).then(|| format!("{ctx} x={}", report.witness.unwrap_or(0)));
            Ok((report.points_checked as u64, cx))
        })
        .collect();
    let results = match first_error(results) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(0, "identity raised an error", e),
    };
    let points: u64 = results.iter().map(|r| r.0).sum();
    let detail = format!("{tuples} tuples, {points} points");
    match results.into_iter().find_map(|r| r.1) {
        Some(cx) => Outcome::fail(points, detail, cx),
        None if tuples == 0 => Outcome::fail(0, detail, "no admissible tuples"),
        None => Outcome::ok(points, detail),
    }
}

/// Every tuple with trivial second character at 1, the determinant
/// condition and the genericity predicate.
pub fn identity_a_tuples(field: &Field) -> Vec<Datum> {
    let m = field.q() as i64 - 1;
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let e = (-(a + b + c + d)).rem_euclid(m);
                    let datum = Datum::a(field, [a, b], [c, 0], [d, e]);
                    if datum.is_generic() {
                        out.push(datum);
                    }
                }
            }
        }
    }
    out
}

pub fn identity_c_tuples(field: &Field) -> Vec<Datum> {
    let m = field.q() as i64 - 1;
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let d = (-(a + b + c)).rem_euclid(m);
                for p1 in field.elements() {
                    for p2 in field.elements() {
                        let datum = Datum::c(field, [a, b], [c, d], [p1, p2]);
                        if datum.is_generic() {
                            out.push(datum);
                        }
                    }
                }
            }
        }
    }
    out
}

fn identity_a(opts: &SuiteOptions) -> Outcome {
    let data = fields(&[3, 5, 7, 9], opts.qmax)
        .into_iter()
        .flat_map(|f| identity_a_tuples(&f).into_iter().map(move |d| (f.clone(), d)))
        .collect();
    identity_battery(data)
}

fn identity_c(opts: &SuiteOptions) -> Outcome {
    let data = fields(&[3, 5, 7], opts.qmax)
        .into_iter()
        .flat_map(|f| identity_c_tuples(&f).into_iter().map(move |d| (f.clone(), d)))
        .collect();
    identity_battery(data)
}

fn kloosterman_triple(opts: &SuiteOptions) -> Outcome {
    let mut checks = 0u64;
    for field in fields(&[3, 5, 7, 9], opts.qmax) {
        let psi = AdditiveCharacter::standard(&field);
        for n in 1..=4u32 {
            let ctx = format!("q={} n={n}", field.q());
            let naive = match field
                .units()
                .map(|a| kloosterman(&field, &psi, n, a).map(|v| (a, v)))
                .collect::<Result<Vec<_>, _>>()
            {
                Ok(v) => TraceTable::new(&field, v, "Kl"),
                Err(e) => return Outcome::fail(checks, "kloosterman failed", format!("{ctx}: {e}")),
            };
            for mode in [ConvolutionMode::Naive, ConvolutionMode::Dft] {
                let conv = match kloosterman_via_convolution(&field, &psi, n, mode) {
                    Ok(t) => t,
                    Err(e) => return Outcome::fail(checks, "convolution failed", format!("{ctx}: {e}")),
                };
                for (a, v) in naive.iter() {
                    checks += 1;
                    if conv.get(a) != Some(v) {
                        return Outcome::fail(checks, "naive vs convolution", format!("{ctx} {mode:?} a={}", a.0));
                    }
                }
            }
            if n == 2 {
                let datum = Datum::b(&field, [0, 0], [Elem::ONE, Elem::ONE]);
                let hecke = match hecke_trace_bruteforce(&datum, &field) {
                    Ok(t) => t,
                    Err(e) => return Outcome::fail(checks, "hecke oracle failed", format!("{ctx}: {e}")),
                };
                for (a, v) in naive.iter() {
                    checks += 1;
                    if hecke.get(a) != Some(&-v.clone()) {
                        return Outcome::fail(checks, "naive vs hecke", format!("{ctx} a={}", a.0));
                    }
                }
            }
        }
    }
    Outcome::ok(checks, "naive = convolution (naive, dft) for n<=4; hecke = -Kl_2")
}

fn weil_bound(opts: &SuiteOptions) -> Outcome {
    let primes: Vec<Field> = (2..=opts.weil_pmax as u64)
        .filter(|&p| is_prime(p))
        .map(|p| Field::prime(p).expect("prime"))
        .collect();
    let mut checks = 0u64;
    let mut worst = 0.0f64;
    for n in [2u32, 3] {
        let report = match weil_scan(&primes, n, opts.tolerance) {
            Ok(r) => r,
            Err(e) => return Outcome::fail(checks, "scan failed", e.to_string()),
        };
        for row in &report.rows {
            checks += row.q as u64 - 1;
            worst = worst.max(row.max_ratio);
            if let Some(a) = row.violations.first() {
                return Outcome::fail(checks, "bound violated", format!("q={} n={} a={}", row.q, n, a));
            }
        }
    }
    Outcome::ok(checks, format!("{} primes, max |Kl|/bound = {:.6}", primes.len(), worst))
}

fn rigidity_numbers() -> Outcome {
    let mut checks = 0;
    let expected = [
        (DatumKind::A, vec![2, 2, 2], Rank2Type::TypeI),
        (DatumKind::B, vec![2, 4], Rank2Type::TypeII),
        (DatumKind::C, vec![2, 4], Rank2Type::TypeIII),
    ];
    for (kind, conductors, ty) in expected {
        checks += 3;
        let ctx = format!("datum {kind}");
        let report = match datum_conductors(kind) {
            Ok(r) => r,
            Err(e) => return Outcome::fail(checks, "conductors failed", format!("{ctx}: {e}")),
        };
        let got: Vec<i64> = report.points.iter().map(|p| p.a_adj).collect();
        if got != conductors {
            return Outcome::fail(checks, "adjoint conductors", format!("{ctx}: {got:?}"));
        }
        let descriptors = datum_descriptors(kind);
        let index = RigidityInput::from_descriptors(0, &descriptors, 3, 0)
            .and_then(|input| rigidity_index(&input));
        match index {
            Ok(r) if r.index == 0 => {}
            other => return Outcome::fail(checks, "rigidity index", format!("{ctx}: {other:?}")),
        }
        match classify_rank2(&descriptors, 3) {
            Ok(t) if t == ty => {}
            other => return Outcome::fail(checks, "classification", format!("{ctx}: {other:?}")),
        }
    }
    checks += 1;
    let half = |l: &str| {
        LocalMonodromy::tame(
            l,
            vec![
                JordanBlock::new(Rational::new(0, 1), 1),
                JordanBlock::new(Rational::new(1, 2), 1),
            ],
        )
    };
    match classify_rank2(&[half("0"), half("inf")], 3) {
        Ok(Rank2Type::NotRigid) => Outcome::ok(checks, "(2,2,2), (2,4), (2,4); index 0; types I, II, III"),
        other => Outcome::fail(checks, "two tame points", format!("{other:?}")),
    }
}

fn dimension_condition() -> Outcome {
    let mut checks = 0;
    for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
        checks += 1;
        if !weak_rigidity_condition(0, &pgl2(), &datum_parahorics(kind)) {
            return Outcome::fail(checks, "GL2 datum", format!("datum {kind}"));
        }
    }
    for t in CartanType::catalogue() {
        let g = RootSystemData::new(t);
        checks += 3;
        if !weak_rigidity_condition(0, &g, &[ParahoricKind::Iwahori, ParahoricKind::IwahoriPlus]) {
            return Outcome::fail(checks, "Kloosterman datum", t.to_string());
        }
        let d_i = d_adjoint(&g, ParahoricKind::Iwahori) as u32;
        let d_plus = d_adjoint(&g, ParahoricKind::IwahoriPlus) as u32;
        if d_i != 2 * g.num_pos_roots || d_plus != 2 * (g.num_pos_roots + g.rank) {
            return Outcome::fail(checks, "affine-root canary", format!("{t}: d(I)={d_i} d(I+)={d_plus}"));
        }
    }
    Outcome::ok(checks, "GL2 data and Kloosterman in all simple types")
}

fn conductor_matching() -> Outcome {
    let mut cases: Vec<ConjectureCase> = [DatumKind::A, DatumKind::B, DatumKind::C]
        .into_iter()
        .map(ConjectureCase::Datum)
        .collect();
    cases.extend(CartanType::catalogue().into_iter().map(ConjectureCase::Kloosterman));
    let mut checks = 0;
    for case in cases {
        match conjecture_check(case) {
            Ok(r) => {
                checks += r.points.len() as u64;
                if !r.matches {
                    let p = r.points.iter().find(|p| !p.matches).expect("mismatch");
                    return Outcome::fail(checks, "d != a", format!("{} at {}: d={} a={}", r.case, p.point, p.d, p.a));
                }
            }
            Err(e) => return Outcome::fail(checks, "check failed", format!("{case:?}: {e}")),
        }
    }
    Outcome::ok(checks, "d(K_x) = a_x at every point")
}

/// A generic datum of the given kind over `field`, if one exists.
pub fn generic_example(kind: DatumKind, field: &Field) -> Option<Datum> {
    let m = field.q() as i64 - 1;
    match kind {
        DatumKind::A => {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            for e in 0..m {
                                let g = (-(a + b + c + d + e)).rem_euclid(m);
                                let datum = Datum::a(field, [a, b], [c, d], [e, g]);
                                if datum.is_generic() {
                                    return Some(datum);
                                }
                            }
                        }
                    }
                }
            }
            None
        }
        DatumKind::B => Some(Datum::b(field, [0, 0], [Elem::ONE, Elem::ONE])),
        DatumKind::C => identity_c_tuples(field).into_iter().next(),
    }
}

/// Data with one genericity condition broken.
fn broken_examples(field: &Field) -> Vec<Datum> {
    let m = field.q() as i64 - 1;
    let mut out = vec![
        Datum::a(field, [1, 0], [m - 1, 0], [0, 0]),
        Datum::b(field, [0, 0], [Elem::ZERO, Elem::ONE]),
        Datum::b(field, [1, 0], [Elem::ONE, Elem::ZERO]),
    ];
    if let Some(Datum::C { chi0, chiinf, .. }) = generic_example(DatumKind::C, field) {
        let idx = |c: &MultiplicativeCharacter| c.index() as i64;
        out.push(Datum::c(
            field,
            [idx(&chi0[0]), idx(&chi0[1])],
            [idx(&chiinf[0]), idx(&chiinf[1])],
            [Elem::ONE, Elem::ONE],
        ));
    }
    out.push(Datum::c(field, [1, 0], [m - 1, 0], [Elem::ONE, Elem::ZERO]));
    out
}

/// Relevant configurations per degree, from the rule-based test only.
fn relevant_counts(datum: &Datum, lo: i64, hi: i64) -> Result<Vec<usize>, String> {
    (lo..=hi)
        .into_par_iter()
        .map(|d| {
            let configs = enumerate_configs(datum, d..=d, 4).map_err(|e| e.to_string())?;
            let mut n = 0;
            for c in &configs {
                if relevance_test(datum, c).map_err(|e| e.to_string())?.relevant {
                    n += 1;
                }
            }
            Ok(n)
        })
        .collect()
}

fn unique_relevant_point(opts: &SuiteOptions) -> Outcome {
    let (lo, hi) = opts.degrees;
    let mut checks = 0;
    let mut skipped = Vec::new();
    for field in fields(&[3, 5, 7, 9], opts.qmax) {
        for kind in [DatumKind::A, DatumKind::B, DatumKind::C] {
            let Some(datum) = generic_example(kind, &field) else {
                skipped.push(format!("{kind}@{}", field.q()));
                continue;
            };
            checks += (hi - lo + 1) as u64;
            match relevant_counts(&datum, lo, hi) {
                Ok(counts) => {
                    if let Some(i) = counts.iter().position(|&c| c != 1) {
                        return Outcome::fail(
                            checks,
                            "generic datum",
                            format!("q={} {datum:?} d={}: {} relevant", field.q(), lo + i as i64, counts[i]),
                        );
                    }
                }
                Err(e) => return Outcome::fail(checks, "enumeration failed", e),
            }
            // Stabilizer of the relevant point, by brute force, at one degree.
            match relevant_orbits(&datum, 0, 4) {
                Ok(r) if r.relevant.len() == 1 && r.relevant[0].aut_order.is_some() => {}
                other => return Outcome::fail(checks, "stabilizer", format!("{datum:?}: {other:?}")),
            }
        }
        for datum in broken_examples(&field) {
            checks += 1;
            match relevant_counts(&datum, lo, hi) {
                Ok(counts) if counts.iter().all(|&c| c == 1) => {
                    return Outcome::fail(checks, "broken genericity", format!("q={} {datum:?}", field.q()))
                }
                Ok(_) => {}
                Err(e) => return Outcome::fail(checks, "enumeration failed", e),
            }
        }
    }
    let detail = if skipped.is_empty() {
        "one relevant point per degree; broken data deviate".to_string()
    } else {
        format!(
            "one relevant point per degree; broken data deviate; no generic datum exists for {}",
            skipped.join(", ")
        )
    };
    Outcome::ok(checks, detail)
}

fn kummer_trace_norm() -> Outcome {
    let base = Field::prime(3).expect("F_3");
    let mut checks = 0;
    for m in 1..=3u32 {
        let ext = Field::new(3, m).expect("extension");
        let emb = match Embedding::new(&base, &ext) {
            Ok(e) => e,
            Err(e) => return Outcome::fail(checks, "embedding failed", e.to_string()),
        };
        for a in 0..2 {
            let chi = MultiplicativeCharacter::new(&base, a);
            let pulled = match pullback_norm(&chi, &ext) {
                Ok(c) => c,
                Err(e) => return Outcome::fail(checks, "pullback failed", e.to_string()),
            };
            for x in ext.units() {
                checks += 1;
                let lhs = pulled.eval(x).expect("unit");
                let rhs = chi.eval(emb.norm(x)).expect("unit");
                if lhs != rhs {
                    return Outcome::fail(checks, "chi(Nm x)", format!("m={m} chi={a} x={}", x.0));
                }
            }
        }
    }
    Outcome::ok(checks, "q=3, m=1,2,3, all characters and units")
}

// ---------------------------------------------------------------------------
// Randomized property checks.

const PROPERTY_FIELDS: [u32; 8] = [3, 4, 5, 7, 8, 9, 11, 13];

fn random_field(rng: &mut ChaCha8Rng) -> Field {
    fields(&PROPERTY_FIELDS, u32::MAX)
        .choose(rng)
        .expect("nonempty")
        .clone()
}

fn random_table(rng: &mut ChaCha8Rng, field: &Field) -> TraceTable {
    let order = field.char_order();
    let entries = field
        .units()
        .map(|x| {
            let v = if rng.gen_bool(0.3) {
                Cyclotomic::zero(order)
            } else {
                &Cyclotomic::root(order, rng.gen_range(0..order) as i64)
                    .scale_int(rng.gen_range(-2..=2))
                    + &Cyclotomic::root(order, rng.gen_range(0..order) as i64)
            };
            (x, v)
        })
        .collect();
    TraceTable::new(field, entries, "random")
}

fn random_descriptor(rng: &mut ChaCha8Rng, label: &str) -> LocalMonodromy {
    let r = |n: i64, d: i64| Rational::new(n, d);
    match rng.gen_range(0..4) {
        0 => {
            let d = rng.gen_range(2..7);
            let a = rng.gen_range(0..d);
            let b = rng.gen_range(0..d);
            LocalMonodromy::tame(
                label,
                vec![JordanBlock::new(r(a, d), 1), JordanBlock::new(r(b, d), 1)],
            )
        }
        1 => LocalMonodromy::tame(label, vec![JordanBlock::new(r(rng.gen_range(0..3), 3), 2)]),
        2 => LocalMonodromy::wild(label, vec![(r(1, 2), 2)], WildStructure::Induced, vec![]),
        _ => LocalMonodromy::wild(
            label,
            vec![(r(1, 1), 1)],
            WildStructure::Split,
            vec![JordanBlock::new(r(rng.gen_range(0..3), 3), 1)],
        ),
    }
}

fn property_suites(opts: &SuiteOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let per = (opts.cases / 5).max(1);
    let mut checks = 0u64;
    macro_rules! require {
        ($cond:expr, $what:expr, $cx:expr) => {
            checks += 1;
            if !$cond {
                return Outcome::fail(checks, $what, $cx);
            }
        };
    }

    // Orthogonality of characters.
    for _ in 0..per {
        let field = random_field(&mut rng);
        let m = field.q() as i64 - 1;
        let chi = MultiplicativeCharacter::new(&field, rng.gen_range(1..m.max(2)));
        let t = Elem(rng.gen_range(1..field.q()));
        let psi = AdditiveCharacter::new(&field, t);
        let s_chi = field
            .units()
            .fold(Cyclotomic::zero(1), |acc, x| &acc + &chi.eval(x).expect("unit"));
        let s_psi = field
            .elements()
            .fold(Cyclotomic::zero(1), |acc, x| &acc + &psi.eval(x));
        require!(
            (chi.is_trivial() || s_chi.is_zero()) && s_psi.is_zero(),
            "orthogonality",
            format!("q={} chi={} psi={}", field.q(), chi.index(), t.0)
        );
    }

    // Gauss sum norm.
    for _ in 0..per {
        let field = random_field(&mut rng);
        let m = field.q() as i64 - 1;
        let chi = MultiplicativeCharacter::new(&field, rng.gen_range(1..m.max(2)));
        let psi = AdditiveCharacter::new(&field, Elem(rng.gen_range(1..field.q())));
        if chi.is_trivial() {
            continue;
        }
        let g = gauss_sum(&psi, &chi).expect("same field");
        require!(
            &g * &g.conj() == Cyclotomic::from_int(1, field.q() as i64),
            "gauss norm",
            format!("q={} chi={} psi={}", field.q(), chi.index(), psi.twist().0)
        );
    }

    // Convolution algebra over F_5.
    let f5 = Field::prime(5).expect("F_5");
    let delta = crate::trace::delta_one(&f5);
    for _ in 0..per {
        let (a, b, c) = (
            random_table(&mut rng, &f5),
            random_table(&mut rng, &f5),
            random_table(&mut rng, &f5),
        );
        let conv = |x: &TraceTable, y: &TraceTable| {
            mult_convolution(x, y, ConvolutionMode::Naive).expect("same field")
        };
        let ab = conv(&a, &b);
        let dft = mult_convolution(&a, &b, ConvolutionMode::Dft).expect("same field");
        require!(
            ab.values() == conv(&b, &a).values()
                && conv(&ab, &c).values() == conv(&a, &conv(&b, &c)).values()
                && conv(&a, &delta).values() == a.values()
                && dft.values() == ab.values(),
            "convolution algebra",
            format!("seed={} tables {:?}", opts.seed, a.values())
        );
    }

    // Rigidity index: parity, permutation invariance, both code paths.
    for _ in 0..per {
        let k = rng.gen_range(1..6);
        let descriptors: Vec<LocalMonodromy> = (0..k)
            .map(|i| random_descriptor(&mut rng, &format!("x{i}")))
            .collect();
        let locals: Vec<AdjointLocal> = descriptors
            .iter()
            .map(|d| adjoint_local(d).expect("rank two"))
            .collect();
        let h0 = rng.gen_range(0..2);
        let input = RigidityInput {
            genus: rng.gen_range(0..2),
            points: locals.clone(),
            dim_ad: 3,
            h0,
        };
        let mut shuffled = input.clone();
        shuffled.points.shuffle(&mut rng);
        let a = rigidity_index(&input).map(|r| r.index);
        let b = rigidity_index_via_euler(&input);
        let c = rigidity_index(&shuffled).map(|r| r.index);
        let raw: i64 = locals.iter().map(|p| p.a).sum::<i64>()
            + (2 * input.genus as i64 - 2) * 3
            + 2 * h0 as i64;
        require!(
            raw % 2 == 0 && a == b && a == c,
            "rigidity index",
            format!("{input:?}: {a:?} {b:?} {c:?}")
        );
    }

    // Character group law on random units.
    for _ in 0..per {
        let field = random_field(&mut rng);
        let m = field.q() as i64 - 1;
        let c1 = MultiplicativeCharacter::new(&field, rng.gen_range(0..m));
        let c2 = MultiplicativeCharacter::new(&field, rng.gen_range(0..m));
        let prod = c1.mul(&c2).expect("same field");
        let x = field.exp(rng.gen_range(0..m));
        require!(
            prod.eval(x).unwrap() == &c1.eval(x).unwrap() * &c2.eval(x).unwrap(),
            "character product",
            format!("q={} {} {} x={}", field.q(), c1.index(), c2.index(), x.0)
        );
    }
    Outcome::ok(checks, format!("seed {:#x}, {} cases", opts.seed, checks))
}
