//! Rank-two bundles on `P^1` with level structure at the ramified points.
//!
//! Bundles are written `O(a) e1 + O(b) e2` with `a >= b`; only the gap
//! `k = a - b` matters for the level data, so normal forms are listed per
//! gap. In each fiber `L'` is the line of `e1` and `L''` the line of `e2`.
//!
//! Relevance is decided from a finite list of one-parameter subgroups of the
//! automorphism group. [`relevance_bruteforce`] recomputes the answer by
//! enumerating all automorphisms over `F_q` and serves as an oracle.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characters::MultiplicativeCharacter;
use crate::cyclotomic::RootSum;
use crate::datum::{CharPair, Datum, DatumKind};
use crate::ff::{Elem, Field};
use crate::trace::TraceTable;

/// Largest `q` accepted by the Hecke oracle unless overridden.
pub const DEFAULT_HECKE_CAP: u32 = 13;
/// Largest automorphism group enumerated by the brute-force checks.
pub const AUT_ENUM_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("q = {q} exceeds the enumeration cap {cap}")]
    CapExceeded { q: u64, cap: u64 },
    #[error("configuration is not one of the listed normal forms: {0}")]
    Unclassified(String),
    #[error("datum {0} requires odd characteristic")]
    CharacteristicTwo(DatumKind),
    #[error("split cap must be at least 2")]
    SplitCapTooSmall,
    #[error("datum and field do not match")]
    SpecMismatch,
}

type Vec2 = [Elem; 2];
/// Row-major 2x2 matrix.
type Mat = [[Elem; 2]; 2];

/// A point of `P^1` in a fiber, normalized to `[u:1]` or `[1:0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Line(Vec2);

impl Line {
    pub const E1: Line = Line([Elem::ONE, Elem::ZERO]);
    pub const E2: Line = Line([Elem::ZERO, Elem::ONE]);
    pub const DIAG: Line = Line([Elem::ONE, Elem::ONE]);

    pub fn span(field: &Field, v: Vec2) -> Option<Line> {
        if !v[1].is_zero() {
            let u = field.div(v[0], v[1]).ok()?;
            Some(Line([u, Elem::ONE]))
        } else if !v[0].is_zero() {
            Some(Line::E1)
        } else {
            None
        }
    }

    pub fn vector(&self) -> Vec2 {
        self.0
    }

    pub fn contains(&self, field: &Field, v: Vec2) -> bool {
        det(field, [self.0, v]).is_zero()
    }

    fn all(field: &Field) -> Vec<Line> {
        let mut out = vec![Line::E1];
        out.extend(field.elements().map(|u| Line([u, Elem::ONE])));
        out
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.0[0], self.0[1])
    }
}

impl Serialize for Line {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn vec_str(v: &Vec2) -> String {
    format!("({},{})", v[0], v[1])
}

fn ser_vec<S: Serializer>(v: &Vec2, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&vec_str(v))
}

/// Level data in the fibers over the ramified points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "datum")]
pub enum Level {
    /// Lines at `0`, `1`, `inf`.
    A { lines: [Line; 3] },
    /// A line at `0`; at `inf` a vector `v1` and a vector `v2` taken
    /// modulo `v1`.
    B {
        l0: Line,
        #[serde(serialize_with = "ser_vec")]
        v1: Vec2,
        #[serde(serialize_with = "ser_vec")]
        v2: Vec2,
    },
    /// A line at `0` and two independent lines at `inf`.
    C { l0: Line, linf: [Line; 2] },
}

impl Level {
    pub fn kind(&self) -> DatumKind {
        match self {
            Level::A { .. } => DatumKind::A,
            Level::B { .. } => DatumKind::B,
            Level::C { .. } => DatumKind::C,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::A { lines } => write!(f, "l0={} l1={} linf={}", lines[0], lines[1], lines[2]),
            Level::B { l0, v1, v2 } => {
                write!(f, "l0={} v1={} v2={}", l0, vec_str(v1), vec_str(v2))
            }
            Level::C { l0, linf } => write!(f, "l0={} linf1={} linf2={}", l0, linf[0], linf[1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BundleConfig {
    pub degree: i64,
    /// `(a, b)` with `a >= b` and `a + b = degree`.
    pub splitting: (i64, i64),
    pub level: Level,
}

impl BundleConfig {
    pub fn gap(&self) -> u32 {
        (self.splitting.0 - self.splitting.1) as u32
    }

    /// Tensor with `O(n)`.
    pub fn twisted(&self, n: i64) -> BundleConfig {
        BundleConfig {
            degree: self.degree + 2 * n,
            splitting: (self.splitting.0 + n, self.splitting.1 + n),
            level: self.level.clone(),
        }
    }
}

impl fmt::Display for BundleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "O({})+O({}) {}",
            self.splitting.0, self.splitting.1, self.level
        )
    }
}

/// A one-parameter subgroup of the automorphism group together with the
/// restriction of the level character to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Witness {
    /// `G_m`; the restricted character is `chi_index` of `F_q^x`.
    Torus {
        subgroup: String,
        factors: Vec<String>,
        character: u32,
    },
    /// `G_a`; the restricted character is `y -> psi(coefficient * y)`.
    Additive {
        subgroup: String,
        coordinate: String,
        coefficient: Elem,
    },
}

impl Witness {
    pub fn is_nontrivial(&self, datum: &Datum) -> bool {
        let field = datum.field();
        match self {
            Witness::Torus { character, .. } => {
                let chi = MultiplicativeCharacter::new(field, *character as i64);
                chi.exponent(field.primitive_root()).expect("unit") != 0
            }
            Witness::Additive { coefficient, .. } => {
                let psi = datum.psi().scaled(*coefficient);
                field.units().any(|y| psi.exponent(y) != 0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelevanceVerdict {
    pub relevant: bool,
    pub witness: Option<Witness>,
}

fn check_char(datum: &Datum) -> Result<(), ModuliError> {
    match datum.kind() {
        DatumKind::B | DatumKind::C if datum.field().p() == 2 => {
            Err(ModuliError::CharacteristicTwo(datum.kind()))
        }
        _ => Ok(()),
    }
}

fn normal_forms(kind: DatumKind, k: u32) -> Vec<Level> {
    let (e1, e2) = ([Elem::ONE, Elem::ZERO], [Elem::ZERO, Elem::ONE]);
    let (l1, l2, ld) = (Line::E1, Line::E2, Line::DIAG);
    match (kind, k) {
        (DatumKind::A, 0) => [
            [l1, ld, l2],
            [l1, l1, l2],
            [l2, l1, l1],
            [l1, l2, l1],
            [l1, l1, l1],
        ]
        .into_iter()
        .map(|lines| Level::A { lines })
        .collect(),
        (DatumKind::A, _) => {
            let mut out: Vec<Level> = (0..8u32)
                .map(|mask| Level::A {
                    lines: [0, 1, 2].map(|i| if mask >> i & 1 == 1 { l1 } else { l2 }),
                })
                .collect();
            if k == 1 {
                out.push(Level::A { lines: [l2, ld, l2] });
            }
            out
        }
        (DatumKind::B, 0) => vec![
            Level::B { l0: l1, v1: e2, v2: e1 },
            Level::B { l0: l1, v1: e1, v2: e2 },
        ],
        (DatumKind::B, _) => [l1, l2]
            .into_iter()
            .flat_map(|l0| {
                [(e1, e2), (e2, e1)]
                    .into_iter()
                    .map(move |(v1, v2)| Level::B { l0, v1, v2 })
            })
            .collect(),
        (DatumKind::C, 0) => vec![
            Level::C { l0: l1, linf: [ld, l2] },
            Level::C { l0: l1, linf: [l1, l2] },
            Level::C { l0: l2, linf: [l1, l2] },
        ],
        (DatumKind::C, _) => [l1, l2]
            .into_iter()
            .flat_map(|l0| {
                [[l1, l2], [l2, l1], [ld, l2]]
                    .into_iter()
                    .map(move |linf| Level::C { l0, linf })
            })
            .collect(),
    }
}

/// One representative per isomorphism class, for each degree in `degrees`
/// and each splitting with gap at most `split_cap`.
pub fn enumerate_configs(
    datum: &Datum,
    degrees: RangeInclusive<i64>,
    split_cap: u32,
) -> Result<Vec<BundleConfig>, ModuliError> {
    check_char(datum)?;
    if split_cap < 2 {
        return Err(ModuliError::SplitCapTooSmall);
    }
    let mut out = Vec::new();
    for d in degrees {
        let mut k = d.rem_euclid(2) as u32;
        while k <= split_cap {
            let a = (d + k as i64) / 2;
            let b = (d - k as i64) / 2;
            for level in normal_forms(datum.kind(), k) {
                out.push(BundleConfig {
                    degree: d,
                    splitting: (a, b),
                    level,
                });
            }
            k += 2;
        }
    }
    Ok(out)
}

fn torus(subgroup: &str, chars: &[(&str, &MultiplicativeCharacter)]) -> Witness {
    let field = chars[0].1.field();
    let m = (field.q() - 1).max(1) as u64;
    let character = chars.iter().map(|(_, c)| c.index() as u64).sum::<u64>() % m;
    Witness::Torus {
        subgroup: subgroup.to_string(),
        factors: chars.iter().map(|(n, _)| n.to_string()).collect(),
        character: character as u32,
    }
}

fn additive(subgroup: &str, coordinate: &str, coefficient: Elem) -> Witness {
    Witness::Additive {
        subgroup: subgroup.to_string(),
        coordinate: coordinate.to_string(),
        coefficient,
    }
}

const POINT_NAMES: [&str; 3] = ["0", "1", "inf"];

fn named<'a>(point: &str, pair: &'a CharPair, slot: usize) -> (String, &'a MultiplicativeCharacter) {
    (format!("chi{}^({})", point, slot + 1), &pair[slot])
}

fn torus_named(subgroup: &str, chars: Vec<(String, &MultiplicativeCharacter)>) -> Witness {
    let borrowed: Vec<(&str, &MultiplicativeCharacter)> =
        chars.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    torus(subgroup, &borrowed)
}

fn unclassified(config: &BundleConfig) -> ModuliError {
    ModuliError::Unclassified(config.to_string())
}

/// The one-parameter subgroups whose restricted characters decide relevance.
pub fn witness_subgroups(datum: &Datum, config: &BundleConfig) -> Result<Vec<Witness>, ModuliError> {
    check_char(datum)?;
    let field = datum.field();
    let k = config.gap();
    if config.level.kind() != datum.kind() {
        return Err(unclassified(config));
    }
    let center = || -> Witness {
        let mut chars = Vec::new();
        let pairs: Vec<(&str, &CharPair)> = match datum {
            Datum::A { chi0, chi1, chiinf, .. } => vec![("0", chi0), ("1", chi1), ("inf", chiinf)],
            Datum::B { chi0, .. } => vec![("0", chi0)],
            Datum::C { chi0, chiinf, .. } => vec![("0", chi0), ("inf", chiinf)],
        };
        for (p, pair) in pairs {
            chars.push(named(p, pair, 0));
            chars.push(named(p, pair, 1));
        }
        torus_named("center", chars)
    };
    match (datum, &config.level) {
        (Datum::A { chi0, chi1, chiinf, .. }, Level::A { lines }) => {
            let pairs = [chi0, chi1, chiinf];
            // Scaling a line subbundle P acts on l_x = P through chi^(1) and
            // on the quotient through chi^(2) otherwise.
            let scaling = |name: &str, on: &dyn Fn(usize) -> bool| {
                let chars = (0..3)
                    .map(|x| named(POINT_NAMES[x], pairs[x], if on(x) { 0 } else { 1 }))
                    .collect();
                torus_named(name, chars)
            };
            if k == 0 {
                let distinct = lines[0] != lines[1] && lines[1] != lines[2] && lines[0] != lines[2];
                if distinct {
                    return Ok(vec![center()]);
                }
                let p = lines[0];
                return Ok(vec![
                    scaling("G_m on P", &|x| lines[x] == p),
                    scaling("G_m on Q", &|x| lines[x] != p),
                ]);
            }
            if k == 1 && *lines == [Line::E2, Line::DIAG, Line::E2] {
                return Ok(vec![center()]);
            }
            if lines.iter().all(|l| *l == Line::E1 || *l == Line::E2) {
                return Ok(vec![
                    scaling("G_m on L'", &|x| lines[x] == Line::E1),
                    scaling("G_m on L''", &|x| lines[x] == Line::E2),
                ]);
            }
            Err(unclassified(config))
        }
        (Datum::B { phi, .. }, Level::B { l0, v1, v2 }) => {
            let line1 = Line::span(field, *v1).ok_or_else(|| unclassified(config))?;
            if Line::span(field, *v2).is_none() || line1.contains(field, *v2) {
                return Err(unclassified(config));
            }
            let first = || additive("unipotent fixing v1", "upper-right", phi[0]);
            let second = || additive("unipotent vanishing at inf", "lower-left first order", phi[1]);
            if k == 0 {
                return Ok(if *l0 == line1 { vec![first()] } else { Vec::new() });
            }
            if !(*l0 == Line::E1 || *l0 == Line::E2) {
                return Err(unclassified(config));
            }
            if line1 == Line::E1 {
                Ok(vec![first()])
            } else if line1 == Line::E2 {
                if k >= 2 || *l0 == Line::E1 {
                    Ok(vec![second()])
                } else {
                    Ok(Vec::new())
                }
            } else {
                Err(unclassified(config))
            }
        }
        (Datum::C { chi0, chiinf, phi, .. }, Level::C { l0, linf }) => {
            if linf[0] == linf[1] {
                return Err(unclassified(config));
            }
            let pair = |name: &str, s0: usize, sinf: usize| {
                torus_named(name, vec![named("0", chi0, s0), named("inf", chiinf, sinf)])
            };
            if k == 0 {
                if *l0 == linf[0] {
                    return Ok(vec![pair("G_m on linf1", 0, 0), pair("G_m on linf2", 1, 1)]);
                }
                if *l0 == linf[1] {
                    return Ok(vec![pair("G_m on linf1", 1, 0), pair("G_m on linf2", 0, 1)]);
                }
                return Ok(vec![center()]);
            }
            let eps0 = match *l0 {
                l if l == Line::E1 => 0,
                l if l == Line::E2 => 1,
                _ => return Err(unclassified(config)),
            };
            if *linf == [Line::E1, Line::E2] {
                Ok(vec![pair("G_m on L'", eps0, 0), pair("G_m on L''", 1 - eps0, 1)])
            } else if *linf == [Line::E2, Line::E1] {
                Ok(vec![pair("G_m on L'", eps0, 1), pair("G_m on L''", 1 - eps0, 0)])
            } else if *linf == [Line::DIAG, Line::E2] {
                if k >= 2 || eps0 == 0 {
                    let diff = field.sub(phi[0], phi[1]);
                    Ok(vec![
                        center(),
                        additive("unipotent vanishing at inf", "diagonal first order", diff),
                    ])
                } else {
                    Ok(vec![center()])
                }
            } else {
                Err(unclassified(config))
            }
        }
        _ => Err(unclassified(config)),
    }
}

/// Relevant iff the level character is trivial on every listed subgroup.
pub fn relevance_test(datum: &Datum, config: &BundleConfig) -> Result<RelevanceVerdict, ModuliError> {
    let witness = witness_subgroups(datum, config)?
        .into_iter()
        .find(|w| w.is_nontrivial(datum));
    Ok(RelevanceVerdict {
        relevant: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelevantOrbit {
    pub config: BundleConfig,
    /// `|Aut(F_q)|` when small enough to enumerate.
    pub aut_order: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelevantOrbits {
    pub d: i64,
    pub generic: bool,
    pub relevant: Vec<RelevantOrbit>,
}

pub fn relevant_orbits(datum: &Datum, d: i64, split_cap: u32) -> Result<RelevantOrbits, ModuliError> {
    let mut relevant = Vec::new();
    for config in enumerate_configs(datum, d..=d, split_cap)? {
        if relevance_test(datum, &config)?.relevant {
            let aut_order = match aut_order(datum, &config) {
                Ok(n) => Some(n),
                Err(ModuliError::CapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            relevant.push(RelevantOrbit { config, aut_order });
        }
    }
    Ok(RelevantOrbits {
        d,
        generic: datum.is_generic(),
        relevant,
    })
}

/// Relevant configurations at the largest gap; expected empty for generic
/// parameters.
pub fn split_cap_canary(
    datum: &Datum,
    degrees: RangeInclusive<i64>,
    split_cap: u32,
) -> Result<Vec<BundleConfig>, ModuliError> {
    let mut out = Vec::new();
    for config in enumerate_configs(datum, degrees, split_cap)? {
        if config.gap() == split_cap && relevance_test(datum, &config)?.relevant {
            out.push(config);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Linear algebra in a fiber.

fn det(f: &Field, cols: [Vec2; 2]) -> Elem {
    f.sub(f.mul(cols[0][0], cols[1][1]), f.mul(cols[0][1], cols[1][0]))
}

fn apply(f: &Field, m: &Mat, v: Vec2) -> Vec2 {
    [
        f.add(f.mul(m[0][0], v[0]), f.mul(m[0][1], v[1])),
        f.add(f.mul(m[1][0], v[0]), f.mul(m[1][1], v[1])),
    ]
}

/// `(x, y)` with `w = x u + y v`.
fn coords(f: &Field, u: Vec2, v: Vec2, w: Vec2) -> Vec2 {
    let d = f.inv(det(f, [u, v])).expect("basis");
    [
        f.mul(det(f, [w, v]), d),
        f.mul(det(f, [u, w]), d),
    ]
}

fn mat_det(f: &Field, m: &Mat) -> Elem {
    f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]))
}

/// A complement to a line: `e2` unless the line is `L''`.
fn complement(f: &Field, l: Line) -> Vec2 {
    if l.contains(f, [Elem::ZERO, Elem::ONE]) {
        [Elem::ONE, Elem::ZERO]
    } else {
        [Elem::ZERO, Elem::ONE]
    }
}

/// Scalars on `ell` and on the quotient for a map sending `ell` to `ell'`,
/// or `None` when the line is not carried over or the map is singular.
fn iwahori_scalars(f: &Field, m: &Mat, src: Line, dst: Line) -> Option<(Elem, Elem)> {
    if mat_det(f, m).is_zero() {
        return None;
    }
    let (u, v) = (src.vector(), complement(f, src));
    let (u2, v2) = (dst.vector(), complement(f, dst));
    let img_u = coords(f, u2, v2, apply(f, m, u));
    if !img_u[1].is_zero() {
        return None;
    }
    let img_v = coords(f, u2, v2, apply(f, m, v));
    Some((img_u[0], img_v[1]))
}

struct Exponents<'a> {
    f: &'a Field,
    order: u64,
    mul_step: u64,
    add_step: u64,
}

impl<'a> Exponents<'a> {
    fn new(f: &'a Field) -> Self {
        let order = f.char_order() as u64;
        Exponents {
            f,
            order,
            mul_step: order / (f.q() - 1).max(1) as u64,
            add_step: order / f.p() as u64,
        }
    }

    fn chi(&self, c: &MultiplicativeCharacter, x: Elem) -> u64 {
        c.exponent(x).expect("unit") as u64 * self.mul_step
    }

    fn pair(&self, c: &CharPair, s: (Elem, Elem)) -> u64 {
        self.chi(&c[0], s.0) + self.chi(&c[1], s.1)
    }

    fn psi(&self, datum: &Datum, x: Elem) -> u64 {
        datum.psi().exponent(x) as u64 * self.add_step
    }

    fn reduce(&self, e: u64) -> u32 {
        (e % self.order) as u32
    }

    fn field(&self) -> &Field {
        self.f
    }
}

// ---------------------------------------------------------------------------
// Automorphisms over F_q.

/// Fibers of an automorphism: at `0`, at `1`, and at `inf` to first order in
/// the local coordinate `1/t`.
struct Fibers {
    at0: Mat,
    at1: Mat,
    inf0: Mat,
    inf1: Mat,
}

fn aut_group_size(q: u64, k: u32) -> u64 {
    if k == 0 {
        (q * q - 1) * (q * q - q)
    } else {
        (q - 1) * (q - 1) * q.pow(k + 1)
    }
}

fn for_each_aut(f: &Field, k: u32, mut visit: impl FnMut(&Fibers)) {
    let zero = Elem::ZERO;
    if k == 0 {
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        let m = [[a, b], [c, d]];
                        if mat_det(f, &m).is_zero() {
                            continue;
                        }
                        visit(&Fibers {
                            at0: m,
                            at1: m,
                            inf0: m,
                            inf1: [[zero; 2]; 2],
                        });
                    }
                }
            }
        }
        return;
    }
    let q = f.q() as u64;
    let mut coeffs = vec![zero; k as usize + 1];
    for lam in f.units() {
        for mu in f.units() {
            for idx in 0..q.pow(k + 1) {
                let mut r = idx;
                for c in coeffs.iter_mut() {
                    *c = Elem((r % q) as u32);
                    r /= q;
                }
                let at1 = coeffs.iter().fold(zero, |acc, &c| f.add(acc, c));
                visit(&Fibers {
                    at0: [[lam, coeffs[0]], [zero, mu]],
                    at1: [[lam, at1], [zero, mu]],
                    inf0: [[lam, coeffs[k as usize]], [zero, mu]],
                    inf1: [[zero, coeffs[k as usize - 1]], [zero, zero]],
                });
            }
        }
    }
}

/// Character exponent of an automorphism, or `None` if it does not preserve
/// the level structure.
fn aut_character(datum: &Datum, level: &Level, g: &Fibers, ex: &Exponents) -> Option<u64> {
    let f = ex.field();
    match (datum, level) {
        (Datum::A { chi0, chi1, chiinf, .. }, Level::A { lines }) => {
            let s0 = iwahori_scalars(f, &g.at0, lines[0], lines[0])?;
            let s1 = iwahori_scalars(f, &g.at1, lines[1], lines[1])?;
            let si = iwahori_scalars(f, &g.inf0, lines[2], lines[2])?;
            Some(ex.pair(chi0, s0) + ex.pair(chi1, s1) + ex.pair(chiinf, si))
        }
        (Datum::B { chi0, phi, .. }, Level::B { l0, v1, v2 }) => {
            let s0 = iwahori_scalars(f, &g.at0, *l0, *l0)?;
            let a = coords(f, *v1, *v2, apply(f, &g.inf0, *v1));
            let b = coords(f, *v1, *v2, apply(f, &g.inf0, *v2));
            if a != [Elem::ONE, Elem::ZERO] || b[1] != Elem::ONE {
                return None;
            }
            let upper = b[0];
            let lower = coords(f, *v1, *v2, apply(f, &g.inf1, *v1))[1];
            let arg = f.add(f.mul(phi[0], upper), f.mul(phi[1], lower));
            Some(ex.pair(chi0, s0) + ex.psi(datum, arg))
        }
        (Datum::C { chi0, chiinf, phi, .. }, Level::C { l0, linf }) => {
            let s0 = iwahori_scalars(f, &g.at0, *l0, *l0)?;
            let (w1, w2) = (linf[0].vector(), linf[1].vector());
            let a = coords(f, w1, w2, apply(f, &g.inf0, w1));
            let b = coords(f, w1, w2, apply(f, &g.inf0, w2));
            if !a[1].is_zero() || !b[0].is_zero() {
                return None;
            }
            let x1 = coords(f, w1, w2, apply(f, &g.inf1, w1))[0];
            let x2 = coords(f, w1, w2, apply(f, &g.inf1, w2))[1];
            // The homomorphic coordinate on the congruence part is the
            // first-order diagonal divided by the torus part.
            let x1 = f.div(x1, a[0]).expect("unit");
            let x2 = f.div(x2, b[1]).expect("unit");
            let arg = f.add(f.mul(phi[0], x1), f.mul(phi[1], x2));
            Some(ex.pair(chi0, s0) + ex.pair(chiinf, (a[0], b[1])) + ex.psi(datum, arg))
        }
        _ => None,
    }
}

fn check_aut_cap(datum: &Datum, config: &BundleConfig) -> Result<(), ModuliError> {
    check_char(datum)?;
    if config.level.kind() != datum.kind() {
        return Err(unclassified(config));
    }
    let q = datum.field().q() as u64;
    let size = aut_group_size(q, config.gap());
    if size > AUT_ENUM_CAP {
        return Err(ModuliError::CapExceeded {
            q,
            cap: AUT_ENUM_CAP,
        });
    }
    Ok(())
}

/// Number of automorphisms over `F_q` preserving the level structure.
pub fn aut_order(datum: &Datum, config: &BundleConfig) -> Result<u64, ModuliError> {
    check_aut_cap(datum, config)?;
    let ex = Exponents::new(datum.field());
    let mut n = 0u64;
    for_each_aut(datum.field(), config.gap(), |g| {
        if aut_character(datum, &config.level, g, &ex).is_some() {
            n += 1;
        }
    });
    Ok(n)
}

/// Relevance decided by evaluating the level character on every
/// automorphism over `F_q`.
pub fn relevance_bruteforce(datum: &Datum, config: &BundleConfig) -> Result<bool, ModuliError> {
    check_aut_cap(datum, config)?;
    let ex = Exponents::new(datum.field());
    let mut trivial = true;
    for_each_aut(datum.field(), config.gap(), |g| {
        if let Some(e) = aut_character(datum, &config.level, g, &ex) {
            if ex.reduce(e) != 0 {
                trivial = false;
            }
        }
    });
    Ok(trivial)
}

/// Total number of level structures over `F_q` on a fixed bundle.
pub fn level_count(kind: DatumKind, q: u64) -> u64 {
    match kind {
        DatumKind::A => (q + 1).pow(3),
        DatumKind::B => (q + 1) * (q * q - 1) * (q - 1),
        DatumKind::C => (q + 1) * (q + 1) * q,
    }
}

/// `|Aut(V)(F_q)|` for the bundle of gap `k`.
pub fn bundle_aut_size(q: u64, k: u32) -> u64 {
    aut_group_size(q, k)
}

/// Every level structure over `F_q`, for orbit-counting checks. Vectors at
/// `inf` for datum B are listed with `v2` running over representatives of
/// the quotient.
pub fn all_levels(kind: DatumKind, field: &Field) -> Vec<Level> {
    let lines = Line::all(field);
    let mut out = Vec::new();
    match kind {
        DatumKind::A => {
            for &a in &lines {
                for &b in &lines {
                    for &c in &lines {
                        out.push(Level::A { lines: [a, b, c] });
                    }
                }
            }
        }
        DatumKind::B => {
            for &l0 in &lines {
                for x in field.elements() {
                    for y in field.elements() {
                        let v1 = [x, y];
                        if x.is_zero() && y.is_zero() {
                            continue;
                        }
                        let w = complement(field, Line::span(field, v1).expect("nonzero"));
                        for s in field.units() {
                            out.push(Level::B {
                                l0,
                                v1,
                                v2: [field.mul(s, w[0]), field.mul(s, w[1])],
                            });
                        }
                    }
                }
            }
        }
        DatumKind::C => {
            for &l0 in &lines {
                for &a in &lines {
                    for &b in &lines {
                        if a != b {
                            out.push(Level::C { l0, linf: [a, b] });
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hecke oracle.

/// Fiber of `(a0 + a1 t, b0 + b1 t; c, d)` at a finite point.
fn fiber_at(f: &Field, m: &[Elem; 6], x: Elem) -> Mat {
    let [a0, a1, b0, b1, c, d] = *m;
    [
        [f.add(a0, f.mul(a1, x)), f.add(b0, f.mul(b1, x))],
        [c, d],
    ]
}

/// Weight exponent and slice membership for one modification matrix.
fn hecke_weight(datum: &Datum, m: &[Elem; 6], ex: &Exponents) -> Option<u64> {
    let f = ex.field();
    let zero = Elem::ZERO;
    let one = Elem::ONE;
    let [a0, a1, b0, b1, c, d] = *m;
    let inf0: Mat = [[a1, b1], [c, d]];
    let inf1: Mat = [[a0, b0], [zero, zero]];
    let at0 = fiber_at(f, m, zero);
    match datum {
        Datum::A { chi0, chi1, chiinf, .. } => {
            let s0 = iwahori_scalars(f, &at0, Line::E1, Line::E2)?;
            let s1 = iwahori_scalars(f, &fiber_at(f, m, one), Line::DIAG, Line::DIAG)?;
            let si = iwahori_scalars(f, &inf0, Line::E2, Line::E2)?;
            if s1.0 != one {
                return None;
            }
            Some(ex.pair(chi0, s0) + ex.pair(chi1, s1) + ex.pair(chiinf, si))
        }
        Datum::B { chi0, phi, .. } => {
            let s0 = iwahori_scalars(f, &at0, Line::E1, Line::E2)?;
            // Source basis (e2, e1) at inf, target basis (e2', e1').
            let (v1, v2) = ([zero, one], [one, zero]);
            let img1 = coords(f, v1, v2, apply(f, &inf0, v1));
            let img2 = coords(f, v1, v2, apply(f, &inf0, v2));
            if img1 != [one, zero] || img2[1] != one {
                return None;
            }
            let lower = coords(f, v1, v2, apply(f, &inf1, v1))[1];
            let upper = img2[0];
            let arg = f.add(f.mul(phi[0], lower), f.mul(phi[1], upper));
            Some(ex.pair(chi0, s0) + ex.psi(datum, arg))
        }
        Datum::C { chi0, chiinf, phi, .. } => {
            let s0 = iwahori_scalars(f, &at0, Line::E1, Line::E2)?;
            let (w1, w2) = (Line::DIAG.vector(), Line::E2.vector());
            let img1 = coords(f, w1, w2, apply(f, &inf0, w1));
            let img2 = coords(f, w1, w2, apply(f, &inf0, w2));
            if !img1[1].is_zero() || !img2[0].is_zero() || img1[0].is_zero() || img2[1].is_zero() {
                return None;
            }
            if img1[0] != one {
                return None;
            }
            let beta1 = coords(f, w1, w2, apply(f, &inf1, w1))[0];
            let beta2 = coords(f, w1, w2, apply(f, &inf1, w2))[1];
            let arg = f.add(f.mul(phi[0], beta1), f.mul(phi[1], beta2));
            Some(ex.pair(chi0, s0) + ex.pair(chiinf, (img1[0], img2[1])) + ex.psi(datum, arg))
        }
    }
}

/// Trace function of the eigen local system obtained by summing over all
/// modification matrices `(a0 + a1 t, b0 + b1 t; c, d)` from the relevant
/// point of degree 0 to that of degree 1, grouped by the zero of the
/// determinant.
pub fn hecke_trace_bruteforce(datum: &Datum, field: &Field) -> Result<TraceTable, ModuliError> {
    hecke_trace_bruteforce_with_cap(datum, field, DEFAULT_HECKE_CAP)
}

pub fn hecke_trace_bruteforce_with_cap(
    datum: &Datum,
    field: &Field,
    cap: u32,
) -> Result<TraceTable, ModuliError> {
    if datum.field() != field {
        return Err(ModuliError::SpecMismatch);
    }
    check_char(datum)?;
    if field.q() > cap {
        return Err(ModuliError::CapExceeded {
            q: field.q() as u64,
            cap: cap as u64,
        });
    }
    let ex = Exponents::new(field);
    let q = field.q() as u64;
    let m = (q - 1) as usize;
    let order = field.char_order();
    let partial: Vec<Vec<RootSum>> = (0..q)
        .into_par_iter()
        .map(|a0| {
            let mut sums: Vec<RootSum> = (0..m).map(|_| RootSum::new(order)).collect();
            let mut entries = [Elem(a0 as u32), Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO];
            for rest in 0..q.pow(5) {
                let mut r = rest;
                for e in entries.iter_mut().skip(1) {
                    *e = Elem((r % q) as u32);
                    r /= q;
                }
                let Some(w) = hecke_weight(datum, &entries, &ex) else {
                    continue;
                };
                let [a0, a1, b0, b1, c, d] = entries;
                let d0 = field.sub(field.mul(a0, d), field.mul(b0, c));
                let d1 = field.sub(field.mul(a1, d), field.mul(b1, c));
                if d0.is_zero() || d1.is_zero() {
                    continue;
                }
                let y = field.neg(field.div(d0, d1).expect("unit"));
                sums[field.dlog(y).expect("unit") as usize].push(ex.reduce(w));
            }
            sums
        })
        .collect();
    let mut sums: Vec<RootSum> = (0..m).map(|_| RootSum::new(order)).collect();
    for part in &partial {
        for (acc, s) in sums.iter_mut().zip(part) {
            acc.merge(s);
        }
    }
    let excluded = if datum.kind() == DatumKind::A {
        vec![Elem::ONE]
    } else {
        Vec::new()
    };
    let entries = field
        .units()
        .filter(|x| !excluded.contains(x))
        .map(|x| (x, -sums[field.dlog(x).expect("unit") as usize].to_cyclotomic()))
        .collect();
    Ok(TraceTable::new(
        field,
        entries,
        format!("hecke[{}]", datum.kind()),
    ))
}
