//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! Values are stored in the power basis `1, z, ..., z^{phi(N)-1}` with a
//! shared positive denominator, reduced modulo the `N`-th cyclotomic
//! polynomial. Mixed orders are lifted to their lcm.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order accepted by the text and JSON parsers.
pub const MAX_PARSE_ORDER: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("galois exponent {c} is not a unit modulo {order}")]
    NotCoprime { c: i64, order: u32 },
    #[error("order {from} does not divide {to}")]
    NotADivisor { from: u32, to: u32 },
    #[error("order must be positive")]
    ZeroOrder,
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut d = 2u32;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn mobius(n: u32) -> i32 {
    let mut m = n;
    let mut sign = 1;
    let mut d = 2u32;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

fn cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the `n`-th cyclotomic polynomial, low to high.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    assert!(n > 0, "cyclotomic polynomial of order 0");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let divisors: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly: Vec<i64> = vec![1];
    // Product over d | n of (x^d - 1)^{mu(n/d)}: multiply first, then divide.
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i64; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let len = poly.len() - d;
            let mut quot = vec![0i64; len];
            for i in 0..len {
                let prev = if i >= d { quot[i - d] } else { 0 };
                quot[i] = prev - poly[i];
            }
            poly = quot;
        }
    }
    debug_assert_eq!(poly.len() as u32, euler_phi(n) + 1);
    debug_assert_eq!(*poly.last().unwrap(), 1);
    let poly = Arc::new(poly);
    cache().lock().unwrap().insert(n, poly.clone());
    poly
}

fn lcm(a: u32, b: u32) -> u32 {
    (a as u64 / num_integer::gcd(a as u64, b as u64) * b as u64) as u32
}

/// Reduce an integer polynomial modulo the order-`n` cyclotomic polynomial.
fn reduce(n: u32, mut v: Vec<BigInt>) -> Vec<BigInt> {
    let phi_poly = cyclotomic_poly(n);
    let d = phi_poly.len() - 1;
    if v.len() > d {
        for i in (d..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[i]);
            let base = i - d;
            for (j, &m) in phi_poly[..d].iter().enumerate() {
                if m != 0 {
                    v[base + j] -= &c * m;
                }
            }
        }
    }
    v.resize(d, BigInt::zero());
    v
}

/// An element of `Q(zeta_N)`.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    fn normalized(order: u32, num: Vec<BigInt>, den: BigInt) -> Cyclotomic {
        let mut g = den.abs();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        let g = g * sign;
        if num.iter().all(Zero::is_zero) {
            return Cyclotomic {
                order,
                num,
                den: BigInt::one(),
            };
        }
        if g.is_one() {
            return Cyclotomic { order, num, den };
        }
        let num = num.into_iter().map(|c| c / &g).collect();
        Cyclotomic {
            order,
            num,
            den: den / g,
        }
    }

    /// Build from an unreduced integer polynomial in `z` over a denominator.
    pub fn from_poly(order: u32, poly: Vec<BigInt>, den: BigInt) -> Result<Cyclotomic, CycError> {
        if order == 0 {
            return Err(CycError::ZeroOrder);
        }
        if den.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        Ok(Cyclotomic::normalized(order, reduce(order, poly), den))
    }

    pub fn zero(order: u32) -> Cyclotomic {
        assert!(order > 0, "order must be positive");
        let d = euler_phi(order) as usize;
        Cyclotomic {
            order,
            num: vec![BigInt::zero(); d],
            den: BigInt::one(),
        }
    }

    pub fn from_int(order: u32, v: i64) -> Cyclotomic {
        let mut c = Cyclotomic::zero(order);
        c.num[0] = BigInt::from(v);
        c
    }

    pub fn one(order: u32) -> Cyclotomic {
        Cyclotomic::from_int(order, 1)
    }

    pub fn from_rational(order: u32, r: &BigRational) -> Cyclotomic {
        let mut c = Cyclotomic::zero(order);
        c.num[0] = r.numer().clone();
        Cyclotomic::normalized(order, c.num, r.denom().clone())
    }

    /// `zeta_order^k`.
    pub fn root(order: u32, k: i64) -> Cyclotomic {
        assert!(order > 0, "order must be positive");
        let k = k.rem_euclid(order as i64) as usize;
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = BigInt::one();
        Cyclotomic::normalized(order, reduce(order, v), BigInt::one())
    }

    /// `sum_k counts[k] zeta_order^k`, with `counts.len() <= order`.
    pub fn from_exponent_counts(order: u32, counts: &[i64]) -> Cyclotomic {
        assert!(order > 0 && counts.len() <= order as usize);
        let v = counts.iter().map(|&c| BigInt::from(c)).collect();
        Cyclotomic::normalized(order, reduce(order, v), BigInt::one())
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.num.len()
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// `Some(r)` when the value is the rational number `r`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    /// Re-express in `Q(zeta_m)` for a multiple `m` of the current order.
    pub fn lift(&self, m: u32) -> Result<Cyclotomic, CycError> {
        if m == 0 || m % self.order != 0 {
            return Err(CycError::NotADivisor {
                from: self.order,
                to: m,
            });
        }
        if m == self.order {
            return Ok(self.clone());
        }
        let step = (m / self.order) as usize;
        let mut v = vec![BigInt::zero(); (self.num.len().max(1) - 1) * step + 1];
        for (k, c) in self.num.iter().enumerate() {
            v[k * step] = c.clone();
        }
        Ok(Cyclotomic::normalized(m, reduce(m, v), self.den.clone()))
    }

    fn lift_pair(&self, other: &Cyclotomic) -> (Cyclotomic, Cyclotomic) {
        let m = lcm(self.order, other.order);
        (self.lift(m).unwrap(), other.lift(m).unwrap())
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Cyclotomic::normalized(self.order, num, &self.den * r.denom())
    }

    pub fn scale_int(&self, k: i64) -> Cyclotomic {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Multiply by `zeta_order'^k` where `order'` is `root_order`.
    pub fn mul_root(&self, root_order: u32, k: i64) -> Cyclotomic {
        let m = lcm(self.order, root_order);
        let a = self.lift(m).unwrap();
        let shift = (k.rem_euclid(root_order as i64) as u64 * (m / root_order) as u64 % m as u64)
            as usize;
        if shift == 0 {
            return a;
        }
        let mut v = vec![BigInt::zero(); shift + a.num.len()];
        for (i, c) in a.num.into_iter().enumerate() {
            v[i + shift] = c;
        }
        // Fold the powers back below m before reducing.
        if v.len() > m as usize {
            let extra = v.split_off(m as usize);
            for (i, c) in extra.into_iter().enumerate() {
                v[i] += c;
            }
        }
        Cyclotomic::normalized(m, reduce(m, v), a.den)
    }

    /// The automorphism `zeta -> zeta^c`, `gcd(c, N) = 1`.
    pub fn galois_act(&self, c: i64) -> Result<Cyclotomic, CycError> {
        let n = self.order as i64;
        if num_integer::gcd(c.rem_euclid(n), n) != 1 {
            return Err(CycError::NotCoprime {
                c,
                order: self.order,
            });
        }
        let c = c.rem_euclid(n) as usize;
        let mut v = vec![BigInt::zero(); self.order as usize];
        for (k, coef) in self.num.iter().enumerate() {
            if !coef.is_zero() {
                v[k * c % self.order as usize] += coef;
            }
        }
        Ok(Cyclotomic::normalized(
            self.order,
            reduce(self.order, v),
            self.den.clone(),
        ))
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Cyclotomic {
        self.galois_act(self.order as i64 - 1)
            .expect("-1 is always a unit")
    }

    pub fn inverse(&self) -> Result<Cyclotomic, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        let modulus: Vec<BigRational> = cyclotomic_poly(self.order)
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let a: Vec<BigRational> = self.coeffs();
        let s = rat_poly::inverse_mod(&a, &modulus).ok_or(CycError::DivisionByZero)?;
        let den = s
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = s
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        Cyclotomic::from_poly(self.order, num, den)
    }

    pub fn try_div(&self, other: &Cyclotomic) -> Result<Cyclotomic, CycError> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Cyclotomic {
        let mut result = Cyclotomic::one(self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// Floating point value with an error bound on each coordinate.
    pub fn embed_complex(&self) -> ComplexApprox {
        let n = self.order as f64;
        let den = rat_to_f64(&BigRational::new(BigInt::one(), self.den.clone()));
        let mut re = 0.0;
        let mut im = 0.0;
        let mut mass = 0.0;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::INFINITY) * den;
            let theta = std::f64::consts::TAU * k as f64 / n;
            re += v * theta.cos();
            im += v * theta.sin();
            mass += v.abs();
        }
        let terms = self.num.len() as f64 + 4.0;
        ComplexApprox {
            re,
            im,
            err: 8.0 * f64::EPSILON * terms * mass.max(1.0),
        }
    }

    pub fn abs(&self) -> f64 {
        let z = self.embed_complex();
        z.re.hypot(z.im)
    }

    fn to_text(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            terms.push(format!("{}/{} * z^{}", r.numer(), r.denom(), k));
        }
        format!("cyc({})[{}]", self.order, terms.join(" + "))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Cyclotomic, CycError> {
        serde_json::from_str(s).map_err(|e| CycError::Parse(e.to_string()))
    }

    fn from_terms(order: u32, terms: Vec<(u64, BigRational)>) -> Result<Cyclotomic, CycError> {
        if order == 0 {
            return Err(CycError::ZeroOrder);
        }
        if order > MAX_PARSE_ORDER {
            return Err(CycError::Parse(format!(
                "order {order} exceeds {MAX_PARSE_ORDER}"
            )));
        }
        let den = terms
            .iter()
            .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
        let mut v = vec![BigInt::zero(); order as usize];
        for (k, r) in terms {
            let scaled = (r * BigRational::from_integer(den.clone())).to_integer();
            v[(k % order as u64) as usize] += scaled;
        }
        Cyclotomic::from_poly(order, v, den)
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

mod rat_poly {
    use num_rational::BigRational;
    use num_traits::Zero;

    fn trim(a: &mut Vec<BigRational>) {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let c = &r[top] / &lead;
            let shift = top - db;
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] -= &c * bj;
            }
            q[shift] = c;
            r.pop();
            trim(&mut r);
        }
        (q, r)
    }

    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// `s` with `s * a = 1 mod m`, or `None` when `gcd(a, m) != 1`.
    pub fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
        let mut r0 = m.to_vec();
        let mut r1 = a.to_vec();
        trim(&mut r0);
        trim(&mut r1);
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![num_traits::One::one()];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].clone();
        let (_, s) = divrem(&s0, m);
        Some(s.into_iter().map(|x| x / &c).collect())
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = self.lift_pair(other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::ops::Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.order != rhs.order {
            let (a, b) = self.lift_pair(rhs);
            return &a + &b;
        }
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(x, y)| x * &rhs.den + y * &self.den)
            .collect();
        Cyclotomic::normalized(self.order, num, &self.den * &rhs.den)
    }
}

impl std::ops::Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl std::ops::Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.order != rhs.order {
            let (a, b) = self.lift_pair(rhs);
            return &a * &b;
        }
        if self.is_zero() || rhs.is_zero() {
            return Cyclotomic::zero(self.order);
        }
        let mut v = vec![BigInt::zero(); self.num.len() + rhs.num.len() - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.num.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        Cyclotomic::normalized(self.order, reduce(self.order, v), &self.den * &rhs.den)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl std::ops::Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl FromStr for Cyclotomic {
    type Err = CycError;

    /// Parses `cyc(N)[a/b * z^k + ...]`. Exponents may exceed `N` and
    /// repeated exponents are summed.
    fn from_str(s: &str) -> Result<Cyclotomic, CycError> {
        let err = |m: &str| CycError::Parse(m.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = compact
            .strip_prefix("cyc(")
            .ok_or_else(|| err("expected 'cyc('"))?;
        let close = rest.find(')').ok_or_else(|| err("expected ')'"))?;
        let order: u32 = rest[..close]
            .parse()
            .map_err(|_| err("invalid order"))?;
        let body = rest[close + 1..]
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| err("expected '[...]'"))?;
        let mut terms = Vec::new();
        if !body.is_empty() {
            for term in body.split('+') {
                let (coef, power) = term
                    .split_once("*z^")
                    .ok_or_else(|| err("expected 'coef * z^k'"))?;
                let k: u64 = power.parse().map_err(|_| err("invalid exponent"))?;
                let (n, d) = match coef.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (coef, "1"),
                };
                let n: BigInt = n.parse().map_err(|_| err("invalid numerator"))?;
                let d: BigInt = d.parse().map_err(|_| err("invalid denominator"))?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                terms.push((k, BigRational::new(n, d)));
            }
        }
        Cyclotomic::from_terms(order, terms)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(v: &BigInt) -> JsonInt {
        match v.to_i64() {
            Some(x) => JsonInt::Small(x),
            None => JsonInt::Big(v.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt, CycError> {
        match self {
            JsonInt::Small(x) => Ok(BigInt::from(*x)),
            JsonInt::Big(s) => s
                .parse()
                .map_err(|_| CycError::Parse(format!("invalid integer {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    k: u64,
    num: JsonInt,
    den: JsonInt,
}

#[derive(Serialize, Deserialize)]
struct JsonCyc {
    #[serde(rename = "N")]
    order: u32,
    terms: Vec<JsonTerm>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let r = BigRational::new(c.clone(), self.den.clone());
                JsonTerm {
                    k: k as u64,
                    num: JsonInt::from_big(r.numer()),
                    den: JsonInt::from_big(r.denom()),
                }
            })
            .collect();
        JsonCyc {
            order: self.order,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Cyclotomic, D::Error> {
        use serde::de::Error;
        let raw = JsonCyc::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let n = t.num.to_big().map_err(D::Error::custom)?;
            let den = t.den.to_big().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((t.k, BigRational::new(n, den)));
        }
        Cyclotomic::from_terms(raw.order, terms).map_err(D::Error::custom)
    }
}

/// Accumulates integer combinations of `N`-th roots of unity.
#[derive(Clone, Debug)]
pub struct RootSum {
    order: u32,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn new(order: u32) -> RootSum {
        assert!(order > 0, "order must be positive");
        RootSum {
            order,
            counts: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Add `zeta^k`.
    #[inline]
    pub fn push(&mut self, k: u32) {
        self.counts[(k % self.order) as usize] += 1;
    }

    #[inline]
    pub fn push_n(&mut self, k: u32, times: i64) {
        self.counts[(k % self.order) as usize] += times;
    }

    pub fn merge(&mut self, other: &RootSum) {
        assert_eq!(self.order, other.order);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::from_exponent_counts(self.order, &self.counts)
    }
}

/// Sums of values of one fixed order, each multiplied by a power of `zeta`.
/// Reduction happens once, in [`finish`](Self::finish).
pub struct CycAccumulator {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycAccumulator {
    pub fn new(order: u32) -> CycAccumulator {
        assert!(order > 0, "order must be positive");
        CycAccumulator {
            order,
            num: vec![BigInt::zero(); order as usize],
            den: BigInt::one(),
        }
    }

    /// Add `value * zeta^shift`; `value` must already have this order.
    pub fn add_rotated(&mut self, value: &Cyclotomic, shift: u32) {
        assert_eq!(value.order, self.order, "accumulator order mismatch");
        if value.is_zero() {
            return;
        }
        let scale_value = if value.den == self.den {
            BigInt::one()
        } else {
            let l = self.den.lcm(&value.den);
            let up = &l / &self.den;
            if !up.is_one() {
                for c in self.num.iter_mut() {
                    *c *= &up;
                }
            }
            let s = &l / &value.den;
            self.den = l;
            s
        };
        let n = self.order as usize;
        let shift = shift as usize % n;
        for (i, c) in value.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let slot = (i + shift) % n;
            if scale_value.is_one() {
                self.num[slot] += c;
            } else {
                self.num[slot] += c * &scale_value;
            }
        }
    }

    pub fn finish(self) -> Cyclotomic {
        Cyclotomic::normalized(self.order, reduce(self.order, self.num), self.den)
    }
}
