//! Text notation for fields, elements, characters and key=value config files.
//!
//! * fields: `q=3^2`, `3^2`, `q=9`, `9`
//! * elements: coefficient lists `[c0,c1,...]` or the canonical index
//! * characters: `chi:a` and `psi:t` with `t` an element

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ff::{prime_factors, Elem, Field, FieldError, DEFAULT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("cannot parse {what} from {input:?}")]
    Syntax { what: &'static str, input: String },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
}

fn syntax(what: &'static str, input: &str) -> NotationError {
    NotationError::Syntax {
        what,
        input: input.to_string(),
    }
}

fn parse_u64(what: &'static str, s: &str) -> Result<u64, NotationError> {
    s.trim().parse::<u64>().map_err(|_| syntax(what, s))
}

/// `(p, n)` from field notation, without building tables.
pub fn parse_field_params(s: &str) -> Result<(u64, u32), NotationError> {
    let body = s.trim();
    let body = body.strip_prefix("q=").or_else(|| body.strip_prefix("q =")).unwrap_or(body);
    if let Some((p, n)) = body.split_once('^') {
        let p = parse_u64("prime", p)?;
        let n = parse_u64("degree", n)?;
        let n = u32::try_from(n).map_err(|_| syntax("degree", s))?;
        return Ok((p, n));
    }
    let q = parse_u64("field size", body)?;
    if q < 2 {
        return Err(NotationError::NotPrimePower(q));
    }
    // Trial division is bounded by the default table cap.
    if q > DEFAULT_CAP * DEFAULT_CAP {
        return Err(FieldError::CapExceeded {
            q: q as u128,
            cap: DEFAULT_CAP,
        }
        .into());
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(NotationError::NotPrimePower(q));
    }
    let p = factors[0];
    let (mut n, mut r) = (0u32, q);
    while r > 1 {
        r /= p;
        n += 1;
    }
    Ok((p, n))
}

pub fn parse_field(s: &str) -> Result<Field, NotationError> {
    parse_field_with_cap(s, DEFAULT_CAP)
}

pub fn parse_field_with_cap(s: &str, cap: u64) -> Result<Field, NotationError> {
    let (p, n) = parse_field_params(s)?;
    Ok(Field::with_cap(p, n, cap)?)
}

pub fn field_notation(field: &Field) -> String {
    if field.n() == 1 {
        format!("q={}", field.p())
    } else {
        format!("q={}^{}", field.p(), field.n())
    }
}

pub fn format_elem(field: &Field, x: Elem) -> String {
    let coeffs: Vec<String> = field.coeffs(x).iter().map(|c| c.to_string()).collect();
    format!("[{}]", coeffs.join(","))
}

/// A coefficient list `[c0,c1,...]` (shorter lists are zero-padded) or a
/// canonical index.
pub fn parse_elem(field: &Field, s: &str) -> Result<Elem, NotationError> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let mut coeffs = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                let c = parse_u64("coefficient", part)?;
                if c >= field.p() as u64 {
                    return Err(syntax("coefficient below p", part));
                }
                coeffs.push(c as u32);
            }
        }
        if coeffs.len() > field.n() as usize {
            return Err(syntax("element of the field", s));
        }
        return Ok(field.from_coeffs(&coeffs)?);
    }
    let idx = parse_u64("element", t)?;
    Ok(field.elem(idx)?)
}

/// Comma-separated signed integers.
pub fn parse_index_list(s: &str) -> Result<Vec<i64>, NotationError> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|part| part.trim().parse::<i64>().map_err(|_| syntax("integer", part)))
        .collect()
}

pub fn parse_pair(s: &str) -> Result<[i64; 2], NotationError> {
    let v = parse_index_list(s)?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(syntax("pair of integers", s)),
    }
}

/// A character written as `chi:a` or `psi:t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterLiteral {
    Chi(i64),
    Psi(String),
}

impl CharacterLiteral {
    /// The twist of an additive literal, resolved in `field`.
    pub fn twist(&self, field: &Field) -> Result<Option<Elem>, NotationError> {
        match self {
            CharacterLiteral::Chi(_) => Ok(None),
            CharacterLiteral::Psi(t) => parse_elem(field, t).map(Some),
        }
    }
}

impl FromStr for CharacterLiteral {
    type Err = NotationError;
    fn from_str(s: &str) -> Result<Self, NotationError> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("chi:") {
            let a = rest.trim().parse::<i64>().map_err(|_| syntax("character index", s))?;
            return Ok(CharacterLiteral::Chi(a));
        }
        if let Some(rest) = t.strip_prefix("psi:") {
            if rest.trim().is_empty() {
                return Err(syntax("additive twist", s));
            }
            return Ok(CharacterLiteral::Psi(rest.trim().to_string()));
        }
        Err(syntax("character literal", s))
    }
}

impl fmt::Display for CharacterLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterLiteral::Chi(a) => write!(f, "chi:{a}"),
            CharacterLiteral::Psi(t) => write!(f, "psi:{t}"),
        }
    }
}

/// Plain `key=value` lines; `#` starts a comment, blank lines are skipped.
/// Later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, NotationError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(NotationError::Config {
                line: i + 1,
                message: "expected key=value".into(),
            });
        };
        let key = k.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(NotationError::Config {
                line: i + 1,
                message: format!("bad key {key:?}"),
            });
        }
        let key = key.replace('_', "-");
        let value = v.trim().to_string();
        if let Some(slot) = out.iter_mut().find(|(k, _)| *k == key) {
            slot.1 = value;
        } else {
            out.push((key, value));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_forms() {
        for s in ["q=3^2", "3^2", "9", "q=9", " q=9 "] {
            let f = parse_field(s).unwrap();
            assert_eq!((f.p(), f.n()), (3, 2));
            assert_eq!(field_notation(&f), "q=3^2");
        }
        assert_eq!(parse_field("6").unwrap_err(), NotationError::NotPrimePower(6));
        assert!(parse_field("q=4^1").is_err());
        assert!(parse_field("q=2^40").is_err());
    }

    #[test]
    fn element_forms() {
        let f = parse_field("q=3^2").unwrap();
        let x = parse_elem(&f, "[1,2]").unwrap();
        assert_eq!(x, Elem(7));
        assert_eq!(format_elem(&f, x), "[1,2]");
        assert_eq!(parse_elem(&f, "7").unwrap(), x);
        assert_eq!(parse_elem(&f, "[2]").unwrap(), Elem(2));
        assert!(parse_elem(&f, "[3,0]").is_err());
        assert!(parse_elem(&f, "[1,1,1]").is_err());
        assert!(parse_elem(&f, "9").is_err());
    }

    #[test]
    fn literals_and_config() {
        assert_eq!("chi:3".parse::<CharacterLiteral>().unwrap(), CharacterLiteral::Chi(3));
        let f = parse_field("5").unwrap();
        let psi: CharacterLiteral = "psi:[2]".parse().unwrap();
        assert_eq!(psi.twist(&f).unwrap(), Some(Elem(2)));
        let cfg = parse_config("# c\nq = 5\ndatum=A # x\nq=7\n").unwrap();
        assert_eq!(cfg, vec![("q".into(), "7".into()), ("datum".into(), "A".into())]);
        assert!(parse_config("oops").is_err());
    }
}
