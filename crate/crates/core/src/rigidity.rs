//! Swan and Artin conductors of local monodromy, the Euler characteristic
//! of a local system on an open curve, the cohomological rigidity index, and
//! the classification of rigid rank-two local systems on `P^1`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datum::DatumKind;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("Swan conductor {0} is not an integer")]
    NonIntegralSwan(String),
    #[error("descriptor outside the rank-two case analysis: {0}")]
    UnclassifiedCase(String),
    #[error("rigidity index {0} is odd")]
    OddIndex(i64),
    #[error("rigidity index {0} is negative")]
    NotRealizable(i64),
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A Jordan block of the tame generator: eigenvalue `exp(2 pi i e)` with
/// `e` in `[0, 1)`, and block size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub eigen: Rational,
    pub size: u32,
}

impl JordanBlock {
    pub fn new(eigen: Rational, size: u32) -> JordanBlock {
        let e = eigen - eigen.floor();
        JordanBlock { eigen: e, size }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WildStructure {
    /// Induced from a character of a ramified quadratic extension.
    Induced,
    /// Sum of characters.
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LocalKind {
    Tame {
        blocks: Vec<JordanBlock>,
    },
    /// Positive breaks with multiplicities; `tame` describes the break-zero part.
    Wild {
        breaks: Vec<(Rational, u32)>,
        structure: WildStructure,
        tame: Vec<JordanBlock>,
    },
}

/// Local monodromy at one point, as the data the conductor formulas consume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalMonodromy {
    pub label: String,
    pub kind: LocalKind,
}

impl LocalMonodromy {
    pub fn tame(label: &str, blocks: Vec<JordanBlock>) -> LocalMonodromy {
        LocalMonodromy {
            label: label.to_string(),
            kind: LocalKind::Tame { blocks },
        }
    }

    pub fn wild(
        label: &str,
        breaks: Vec<(Rational, u32)>,
        structure: WildStructure,
        tame: Vec<JordanBlock>,
    ) -> LocalMonodromy {
        LocalMonodromy {
            label: label.to_string(),
            kind: LocalKind::Wild {
                breaks,
                structure,
                tame,
            },
        }
    }

    pub fn rank(&self) -> u32 {
        match &self.kind {
            LocalKind::Tame { blocks } => blocks.iter().map(|b| b.size).sum(),
            LocalKind::Wild { breaks, tame, .. } => {
                breaks.iter().map(|b| b.1).sum::<u32>() + tame.iter().map(|b| b.size).sum::<u32>()
            }
        }
    }

    pub fn is_tame(&self) -> bool {
        match &self.kind {
            LocalKind::Tame { .. } => true,
            LocalKind::Wild { breaks, .. } => breaks.iter().all(|b| b.0.is_zero()),
        }
    }

    fn tame_blocks(&self) -> &[JordanBlock] {
        match &self.kind {
            LocalKind::Tame { blocks } => blocks,
            LocalKind::Wild { tame, .. } => tame,
        }
    }

    /// `dim V^I`: one invariant line per unipotent Jordan block in the tame part.
    pub fn invariants(&self) -> u32 {
        self.tame_blocks()
            .iter()
            .filter(|b| b.eigen.is_zero())
            .count() as u32
    }
}

/// `Sw = sum lambda_i m_i`, required to be an integer.
pub fn swan_from_breaks(d: &LocalMonodromy) -> Result<i64, RigidityError> {
    let total = match &d.kind {
        LocalKind::Tame { .. } => Rational::zero(),
        LocalKind::Wild { breaks, .. } => breaks
            .iter()
            .fold(Rational::zero(), |acc, (l, m)| acc + l * Rational::from(*m as i64)),
    };
    if !total.is_integer() {
        return Err(RigidityError::NonIntegralSwan(total.to_string()));
    }
    Ok(total.to_integer())
}

/// `a = dim V/V^I + Sw` for the standard representation.
pub fn artin_conductor(d: &LocalMonodromy) -> Result<i64, RigidityError> {
    Ok((d.rank() - d.invariants()) as i64 + swan_from_breaks(d)?)
}

/// Dimension of the centralizer of a matrix with the given Jordan blocks.
pub fn centralizer_dim(blocks: &[JordanBlock]) -> u64 {
    let mut total = 0u64;
    for a in blocks {
        for b in blocks {
            if a.eigen == b.eigen {
                total += a.size.min(b.size) as u64;
            }
        }
    }
    total
}

/// Artin conductor of the trace-free adjoint for tame monodromy of any
/// rank: `n^2 - dim Z(T)`.
pub fn adjoint_conductor_tame(blocks: &[JordanBlock]) -> i64 {
    let n: u64 = blocks.iter().map(|b| b.size as u64).sum();
    (n * n - centralizer_dim(blocks)) as i64
}

/// Local contribution of the trace-free adjoint at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointLocal {
    pub a: i64,
    pub sw: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rank2Case {
    Central,
    TameNoncentral,
    Induced,
    Split,
}

pub fn rank2_case(d: &LocalMonodromy) -> Result<Rank2Case, RigidityError> {
    if d.rank() != 2 {
        return Err(RigidityError::UnclassifiedCase(format!(
            "{}: rank {} is not 2",
            d.label,
            d.rank()
        )));
    }
    let half = Rational::new(1, 2);
    let one = Rational::from(1);
    match &d.kind {
        LocalKind::Tame { blocks } => {
            let central = blocks.len() == 2 && blocks[0].eigen == blocks[1].eigen;
            Ok(if central {
                Rank2Case::Central
            } else {
                Rank2Case::TameNoncentral
            })
        }
        LocalKind::Wild {
            breaks,
            structure,
            tame,
        } => {
            let positive: Vec<(Rational, u32)> =
                breaks.iter().copied().filter(|b| !b.0.is_zero()).collect();
            match (structure, positive.as_slice(), tame.len()) {
                (WildStructure::Induced, [(l, 2)], 0) if *l == half => Ok(Rank2Case::Induced),
                (WildStructure::Split, [(l, 2)], 0) if *l == one => Ok(Rank2Case::Split),
                (WildStructure::Split, [(l, 1)], 1) if *l == one => Ok(Rank2Case::Split),
                _ => Err(RigidityError::UnclassifiedCase(format!(
                    "{}: wild rank-two descriptor {:?}",
                    d.label, d.kind
                ))),
            }
        }
    }
}

/// `a(End^0)` in rank two: central 0, tame noncentral 2, and 4 for the
/// two wild shapes.
pub fn adjoint_conductor_rank2(d: &LocalMonodromy) -> Result<i64, RigidityError> {
    Ok(adjoint_local_rank2(d)?.a)
}

pub fn adjoint_local_rank2(d: &LocalMonodromy) -> Result<AdjointLocal, RigidityError> {
    Ok(match rank2_case(d)? {
        Rank2Case::Central => AdjointLocal { a: 0, sw: 0 },
        Rank2Case::TameNoncentral => AdjointLocal { a: 2, sw: 0 },
        Rank2Case::Induced => AdjointLocal { a: 4, sw: 1 },
        Rank2Case::Split => AdjointLocal { a: 4, sw: 2 },
    })
}

/// Adjoint local data for any descriptor: general rank when tame, rank two
/// otherwise.
pub fn adjoint_local(d: &LocalMonodromy) -> Result<AdjointLocal, RigidityError> {
    match &d.kind {
        LocalKind::Tame { blocks } => Ok(AdjointLocal {
            a: adjoint_conductor_tame(blocks),
            sw: 0,
        }),
        LocalKind::Wild { .. } => adjoint_local_rank2(d),
    }
}

/// `chi_c(U, L) = (2 - 2g - #S) rank - sum Sw_x`.
pub fn gos_euler(genus: u32, num_points: u32, rank: u32, swans: &[i64]) -> i64 {
    (2 - 2 * genus as i64 - num_points as i64) * rank as i64 - swans.iter().sum::<i64>()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityInput {
    pub genus: u32,
    pub points: Vec<AdjointLocal>,
    pub dim_ad: u32,
    pub h0: u32,
}

impl RigidityInput {
    pub fn from_descriptors(
        genus: u32,
        descriptors: &[LocalMonodromy],
        dim_ad: u32,
        h0: u32,
    ) -> Result<RigidityInput, RigidityError> {
        let points = descriptors
            .iter()
            .map(adjoint_local)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RigidityInput {
            genus,
            points,
            dim_ad,
            h0,
        })
    }

    fn validate(&self) -> Result<(), RigidityError> {
        if self.dim_ad == 0 {
            return Err(RigidityError::Invalid("dim_ad must be positive".into()));
        }
        for p in &self.points {
            let drop = p.a - p.sw;
            if p.sw < 0 || drop < 0 || drop > self.dim_ad as i64 {
                return Err(RigidityError::Invalid(format!(
                    "a = {} and Sw = {} are incompatible with dimension {}",
                    p.a, p.sw, self.dim_ad
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub index: i64,
    pub rigid: bool,
    pub euler_characteristic: i64,
}

fn check_index(index: i64) -> Result<i64, RigidityError> {
    if index.is_odd() {
        return Err(RigidityError::OddIndex(index));
    }
    if index < 0 {
        return Err(RigidityError::NotRealizable(index));
    }
    Ok(index)
}

/// `dim H^1 = sum a_x + (2g - 2) dim_ad + 2 h0`; rigid iff zero.
pub fn rigidity_index(input: &RigidityInput) -> Result<RigidityReport, RigidityError> {
    input.validate()?;
    let raw = input.points.iter().map(|p| p.a).sum::<i64>()
        + (2 * input.genus as i64 - 2) * input.dim_ad as i64
        + 2 * input.h0 as i64;
    let index = check_index(raw)?;
    let swans: Vec<i64> = input.points.iter().map(|p| p.sw).collect();
    Ok(RigidityReport {
        index,
        rigid: index == 0,
        euler_characteristic: gos_euler(
            input.genus,
            input.points.len() as u32,
            input.dim_ad,
            &swans,
        ),
    })
}

/// The same dimension from the Euler characteristic and the local
/// invariants: `-chi_c(U, L) - sum dim L^{I_x} + 2 h0`.
pub fn rigidity_index_via_euler(input: &RigidityInput) -> Result<i64, RigidityError> {
    input.validate()?;
    let swans: Vec<i64> = input.points.iter().map(|p| p.sw).collect();
    let chi = gos_euler(
        input.genus,
        input.points.len() as u32,
        input.dim_ad,
        &swans,
    );
    let invariants: i64 = input
        .points
        .iter()
        .map(|p| input.dim_ad as i64 - (p.a - p.sw))
        .sum();
    check_index(-chi - invariants + 2 * input.h0 as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank2Type {
    TypeI,
    TypeII,
    TypeIII,
    NotRigid,
}

/// Match rank-two local data on `P^1` against the three rigid shapes: three
/// tame points; tame plus an induced half-break point; tame plus a
/// split point with break 1.
pub fn classify_rank2(points: &[LocalMonodromy], p: u32) -> Result<Rank2Type, RigidityError> {
    if p == 2 {
        return Err(RigidityError::CharacteristicTwo);
    }
    let mut cases = Vec::with_capacity(points.len());
    for d in points {
        match rank2_case(d) {
            Ok(c) => cases.push(c),
            Err(RigidityError::UnclassifiedCase(_)) => return Ok(Rank2Type::NotRigid),
            Err(e) => return Err(e),
        }
    }
    let count = |c: Rank2Case| cases.iter().filter(|&&x| x == c).count();
    let tame = count(Rank2Case::TameNoncentral);
    Ok(match (cases.len(), tame, count(Rank2Case::Induced), count(Rank2Case::Split)) {
        (3, 3, 0, 0) => Rank2Type::TypeI,
        (2, 1, 1, 0) => Rank2Type::TypeII,
        (2, 1, 0, 1) => Rank2Type::TypeIII,
        _ => Rank2Type::NotRigid,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointConductors {
    pub label: String,
    pub sw_std: i64,
    pub a_std: i64,
    pub sw_adj: i64,
    pub a_adj: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConductorReport {
    pub points: Vec<PointConductors>,
    pub total_a_std: i64,
    pub total_a_adj: i64,
}

pub fn conductor_report(descriptors: &[LocalMonodromy]) -> Result<ConductorReport, RigidityError> {
    let mut points = Vec::new();
    for d in descriptors {
        let adj = adjoint_local(d)?;
        points.push(PointConductors {
            label: d.label.clone(),
            sw_std: swan_from_breaks(d)?,
            a_std: artin_conductor(d)?,
            sw_adj: adj.sw,
            a_adj: adj.a,
        });
    }
    Ok(ConductorReport {
        total_a_std: points.iter().map(|p| p.a_std).sum(),
        total_a_adj: points.iter().map(|p| p.a_adj).sum(),
        points,
    })
}

/// Local monodromy of the eigen local system of each datum for generic
/// parameters.
pub fn datum_descriptors(kind: DatumKind) -> Vec<LocalMonodromy> {
    let r = |n, d| Rational::new(n, d);
    let generic_tame = |label: &str| {
        LocalMonodromy::tame(
            label,
            vec![JordanBlock::new(r(1, 3), 1), JordanBlock::new(r(2, 3), 1)],
        )
    };
    match kind {
        DatumKind::A => vec![
            generic_tame("0"),
            LocalMonodromy::tame(
                "1",
                vec![JordanBlock::new(r(0, 1), 1), JordanBlock::new(r(1, 2), 1)],
            ),
            generic_tame("inf"),
        ],
        DatumKind::B => vec![
            generic_tame("0"),
            LocalMonodromy::wild("inf", vec![(r(1, 2), 2)], WildStructure::Induced, vec![]),
        ],
        DatumKind::C => vec![
            generic_tame("0"),
            LocalMonodromy::wild(
                "inf",
                vec![(r(1, 1), 1)],
                WildStructure::Split,
                vec![JordanBlock::new(r(1, 3), 1)],
            ),
        ],
    }
}

pub fn datum_conductors(kind: DatumKind) -> Result<ConductorReport, RigidityError> {
    conductor_report(&datum_descriptors(kind))
}

fn parse_rational(s: &str) -> Result<Rational, RigidityError> {
    let err = || RigidityError::Parse(format!("invalid rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n.trim().parse().map_err(|_| err())?;
    let d: i64 = d.trim().parse().map_err(|_| err())?;
    if d == 0 || n.abs() > 1 << 40 || d.abs() > 1 << 40 {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

fn parse_blocks(s: &str) -> Result<Vec<JordanBlock>, RigidityError> {
    s.split(',')
        .map(|b| {
            let (e, size) = match b.split_once('^') {
                Some((e, k)) => (
                    e,
                    k.trim()
                        .parse::<u32>()
                        .map_err(|_| RigidityError::Parse(format!("invalid block size {k:?}")))?,
                ),
                None => (b, 1),
            };
            if size == 0 || size > 1 << 16 {
                return Err(RigidityError::Parse("block size out of range".into()));
            }
            Ok(JordanBlock::new(parse_rational(e)?, size))
        })
        .collect()
}

impl FromStr for LocalMonodromy {
    type Err = RigidityError;

    /// `[label=]tame(e^k, ...)` or
    /// `[label=]wild(l x m, ...; induced|split[; tame=e^k, ...])`, where `e`
    /// and `l` are rationals such as `1/2`.
    fn from_str(s: &str) -> Result<LocalMonodromy, RigidityError> {
        let err = |m: &str| RigidityError::Parse(m.to_string());
        let s = s.trim();
        let (label, body) = match s.split_once('=') {
            Some((l, b)) if !l.contains('(') => (l.trim().to_string(), b.trim()),
            _ => (String::new(), s),
        };
        if let Some(inner) = body.strip_prefix("tame(").and_then(|b| b.strip_suffix(')')) {
            return Ok(LocalMonodromy {
                label,
                kind: LocalKind::Tame {
                    blocks: parse_blocks(inner)?,
                },
            });
        }
        let inner = body
            .strip_prefix("wild(")
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| err("expected tame(...) or wild(...)"))?;
        let mut parts = inner.split(';');
        let breaks = parts
            .next()
            .ok_or_else(|| err("missing breaks"))?
            .split(',')
            .map(|b| {
                let (l, m) = b.split_once('x').ok_or_else(|| err("expected 'slope x mult'"))?;
                let m: u32 = m.trim().parse().map_err(|_| err("invalid multiplicity"))?;
                let l = parse_rational(l)?;
                if l.is_negative() || m == 0 || m > 1 << 16 {
                    return Err(err("break out of range"));
                }
                Ok((l, m))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let structure = match parts.next().map(str::trim) {
            Some("induced") => WildStructure::Induced,
            Some("split") | None => WildStructure::Split,
            Some(other) => return Err(err(&format!("unknown structure {other:?}"))),
        };
        let tame = match parts.next().map(str::trim) {
            Some(t) => parse_blocks(
                t.strip_prefix("tame=")
                    .ok_or_else(|| err("expected tame=..."))?,
            )?,
            None => Vec::new(),
        };
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
        Ok(LocalMonodromy {
            label,
            kind: LocalKind::Wild {
                breaks,
                structure,
                tame,
            },
        })
    }
}

impl fmt::Display for LocalMonodromy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = |v: &[JordanBlock]| {
            v.iter()
                .map(|b| format!("{}^{}", b.eigen, b.size))
                .collect::<Vec<_>>()
                .join(",")
        };
        if !self.label.is_empty() {
            write!(f, "{}=", self.label)?;
        }
        match &self.kind {
            LocalKind::Tame { blocks: b } => write!(f, "tame({})", blocks(b)),
            LocalKind::Wild {
                breaks,
                structure,
                tame,
            } => {
                let br = breaks
                    .iter()
                    .map(|(l, m)| format!("{l}x{m}"))
                    .collect::<Vec<_>>()
                    .join(",");
                let st = match structure {
                    WildStructure::Induced => "induced",
                    WildStructure::Split => "split",
                };
                if tame.is_empty() {
                    write!(f, "wild({br};{st})")
                } else {
                    write!(f, "wild({br};{st};tame={})", blocks(tame))
                }
            }
        }
    }
}

/// Point shorthand used on the command line: `kind[:a[:sw]]` with kind one
/// of `tame`, `tame-pr`, `central`, `induced`, `split`, `wild`. Missing
/// values take the rank-two defaults of the kind.
pub fn parse_point_shorthand(s: &str) -> Result<AdjointLocal, RigidityError> {
    let mut it = s.trim().split(':');
    let kind = it.next().unwrap_or_default();
    let (a, sw) = match kind {
        "tame" | "tame-pr" => (Some(2), Some(0)),
        "central" => (Some(0), Some(0)),
        "induced" => (Some(4), Some(1)),
        "split" => (Some(4), Some(2)),
        "wild" => (None, None),
        other => return Err(RigidityError::Parse(format!("unknown point kind {other:?}"))),
    };
    let num = |v: Option<&str>| -> Result<Option<i64>, RigidityError> {
        v.map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| RigidityError::Parse(format!("invalid integer {t:?}")))
        })
        .transpose()
    };
    let a = num(it.next())?.or(a);
    let sw = num(it.next())?.or(sw);
    if it.next().is_some() {
        return Err(RigidityError::Parse("too many fields".into()));
    }
    match (a, sw) {
        (Some(a), Some(sw)) => Ok(AdjointLocal { a, sw }),
        _ => Err(RigidityError::Parse(format!(
            "{kind} needs explicit conductor and Swan values"
        ))),
    }
}
