//! Finite fields `F_q = F_p[x]/(f)` backed by dense log/exp tables.
//!
//! Elements are identified with their index `sum c_i p^i`, where `c_i` are the
//! coefficients of the reduced representative. The index order is the
//! canonical element order used everywhere else in the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on `q`; tables are `O(q)` in memory.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field size {q} exceeds cap {cap}")]
    CapExceeded { q: u128, cap: u64 },
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("F_{sub} is not a subfield of F_{ext}")]
    NotASubfield { sub: u32, ext: u32 },
    #[error("element index {index} out of range for F_{q}")]
    OutOfRange { index: u64, q: u32 },
}

/// An element index. Only meaningful together with its [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FieldData {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

/// A finite field with canonical modulus and generator. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.n == other.0.n)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.n)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.n == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.n)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= n / d {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, coefficients low to high, no trailing zeros.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] as u64 * lead_inv % p as u64;
            let shift = top - dm;
            for (j, &mj) in m.iter().enumerate() {
                let sub = c * mj as u64 % p as u64;
                r[shift + j] = ((r[shift + j] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
        rem(&prod, m, p)
    }

    pub fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = rem(&[1], m, p);
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let mut out = vec![0u32; len];
        for (i, slot) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *slot = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    /// Rabin's test for a monic polynomial of degree `n >= 1`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = (f.len() - 1) as u32;
        if n == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = vec![0, 1];
        // h_k = x^{p^k} mod f
        let mut powers = Vec::with_capacity(n as usize + 1);
        let mut h = rem(&x, f, p);
        powers.push(h.clone());
        for _ in 0..n {
            h = powmod(&h, p as u64, f, p);
            powers.push(h.clone());
        }
        // powers[k] = x^{p^k}
        if !sub(&powers[n as usize], &rem(&x, f, p), p).is_empty() {
            return false;
        }
        for r in super::prime_factors(n as u64) {
            let k = (n as u64 / r) as usize;
            let g = gcd(f, &sub(&powers[k], &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// Lex-least monic irreducible of degree `n` over `F_p`, ordered by the
/// tuple `(c_0, ..., c_{n-1})`. Returned low to high, including the leading 1.
pub fn canonical_modulus(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    let total = (p as u64).pow(n);
    for m in 0..total {
        // c_0 is the most significant digit of m.
        let mut coeffs = vec![0u32; n as usize + 1];
        let mut rest = m;
        for i in (0..n as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[n as usize] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    pub fn new(p: u64, n: u32) -> Result<Field, FieldError> {
        Field::with_cap(p, n, DEFAULT_CAP)
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Field::new(p, 1)
    }

    pub fn with_cap(p: u64, n: u32, cap: u64) -> Result<Field, FieldError> {
        if n == 0 {
            return Err(FieldError::DegreeZero);
        }
        let cap = cap.min(u32::MAX as u64);
        if p < 2 || (p <= cap && !is_prime(p)) {
            return Err(FieldError::NonPrime(p));
        }
        if p > cap {
            return Err(FieldError::CapExceeded {
                q: (p as u128).saturating_pow(n),
                cap,
            });
        }
        let mut q: u128 = 1;
        for _ in 0..n {
            q *= p as u128;
            if q > cap as u128 {
                return Err(FieldError::CapExceeded {
                    q: (p as u128).saturating_pow(n),
                    cap,
                });
            }
        }
        Ok(Field::build(p as u32, n, q as u32))
    }

    fn build(p: u32, n: u32, q: u32) -> Field {
        let modulus = canonical_modulus(p, n);
        let to_poly = |e: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(n as usize);
            let mut r = e;
            for _ in 0..n {
                v.push(r % p);
                r /= p;
            }
            poly::trim(&mut v);
            v
        };
        let from_poly = |v: &[u32]| -> u32 {
            v.iter().rev().fold(0u32, |acc, &c| acc * p + c)
        };

        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let mut generator = 1u32;
        if q > 2 {
            for cand in 2..q {
                let c = to_poly(cand);
                let primitive = factors.iter().all(|&r| {
                    let v = poly::powmod(&c, order / r, &modulus, p);
                    v != [1]
                });
                if primitive {
                    generator = cand;
                    break;
                }
            }
        }

        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let g = to_poly(generator);
        let mut cur = vec![1u32];
        for k in 0..(q - 1) {
            let idx = from_poly(&cur);
            exp[k as usize] = idx;
            log[idx as usize] = k;
            cur = poly::mulmod(&cur, &g, &modulus, p);
        }

        let mut data = FieldData {
            p,
            n,
            q,
            modulus,
            generator: Elem(generator),
            exp,
            log,
            trace: Vec::new(),
        };
        let mut trace = vec![0u32; q as usize];
        for x in 1..q {
            let mut acc = 0u32;
            let mut y = x;
            for _ in 0..n {
                acc = add_idx(&data, acc, y);
                y = pow_idx(&data, y, p as u64);
            }
            debug_assert!(acc < p);
            trace[x as usize] = acc;
        }
        data.trace = trace;
        Field(Arc::new(data))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Coefficients of the defining polynomial, low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The least element of multiplicative order `q - 1`.
    pub fn primitive_root(&self) -> Elem {
        self.0.generator
    }

    /// Order of the roots of unity needed for character values: `lcm(p, q-1)`.
    pub fn char_order(&self) -> u32 {
        let a = self.0.p as u64;
        let b = (self.0.q - 1).max(1) as u64;
        (a / num_integer::gcd(a, b) * b) as u32
    }

    pub fn elem(&self, index: u64) -> Result<Elem, FieldError> {
        if index >= self.0.q as u64 {
            return Err(FieldError::OutOfRange { index, q: self.0.q });
        }
        Ok(Elem(index as u32))
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() > self.0.n as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::OutOfRange {
                index: u64::MAX,
                q: self.0.q,
            });
        }
        Ok(Elem(
            coeffs
                .iter()
                .rev()
                .fold(0u32, |acc, &c| acc * self.0.p + c),
        ))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.0.n as usize);
        let mut r = a.0;
        for _ in 0..self.0.n {
            v.push(r % self.0.p);
            r /= self.0.p;
        }
        v
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> {
        (1..self.0.q).map(Elem)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(add_idx(&self.0, a.0, b.0))
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let d = &self.0;
        if d.n == 1 {
            return Elem((d.p - a.0) % d.p);
        }
        let mut out = 0u32;
        let mut place = 1u32;
        let mut x = a.0;
        for _ in 0..d.n {
            let c = x % d.p;
            out += ((d.p - c) % d.p) * place;
            x /= d.p;
            place = place.wrapping_mul(d.p);
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.0;
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let k = (d.log[a.index()] as u64 + d.log[b.index()] as u64) % (d.q - 1) as u64;
        Elem(d.exp[k as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        let d = &self.0;
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let k = (d.q - 1 - d.log[a.index()]) % (d.q - 1);
        Ok(Elem(d.exp[k as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents require `a != 0`, and `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem, FieldError> {
        if a.0 == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => Err(FieldError::DivisionByZero),
                std::cmp::Ordering::Equal => Ok(Elem::ONE),
                std::cmp::Ordering::Greater => Ok(Elem::ZERO),
            };
        }
        let m = (self.0.q - 1) as i64;
        let k = (self.0.log[a.index()] as i64 * e.rem_euclid(m)).rem_euclid(m);
        Ok(Elem(self.0.exp[k as usize]))
    }

    /// Discrete log base [`Field::primitive_root`], in `[0, q-1)`.
    pub fn dlog(&self, a: Elem) -> Result<u32, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::LogOfZero);
        }
        Ok(self.0.log[a.index()])
    }

    /// `g^k` for the canonical generator.
    pub fn exp(&self, k: i64) -> Elem {
        let m = (self.0.q - 1) as i64;
        Elem(self.0.exp[k.rem_euclid(m) as usize])
    }

    pub fn frobenius(&self, a: Elem) -> Elem {
        Elem(pow_idx(&self.0, a.0, self.0.p as u64))
    }

    /// Absolute trace to `F_p`, returned as an integer in `[0, p)`.
    pub fn trace(&self, a: Elem) -> u32 {
        self.0.trace[a.index()]
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Result<u32, FieldError> {
        let k = self.dlog(a)?;
        let m = self.0.q - 1;
        Ok(m / num_integer::gcd(m, k))
    }

    pub fn element(&self, value: Elem) -> FieldElement {
        FieldElement {
            field: self.clone(),
            value,
        }
    }
}

fn add_idx(d: &FieldData, a: u32, b: u32) -> u32 {
    if d.n == 1 {
        return (a + b) % d.p;
    }
    let mut out = 0u32;
    let mut place = 1u32;
    let (mut x, mut y) = (a, b);
    for _ in 0..d.n {
        out += ((x % d.p + y % d.p) % d.p) * place;
        x /= d.p;
        y /= d.p;
        place = place.wrapping_mul(d.p);
    }
    out
}

fn pow_idx(d: &FieldData, a: u32, e: u64) -> u32 {
    if a == 0 {
        return if e == 0 { 1 } else { 0 };
    }
    let m = (d.q - 1) as u64;
    d.exp[((d.log[a as usize] as u64 * (e % m)) % m) as usize]
}

/// A field element bundled with its field. Arithmetic through the `try_`
/// methods reports mixed-field operands; the operator impls panic instead.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.value.0, self.field)
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            Err(FieldError::SpecMismatch)
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.add(self.value, other.value)))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.sub(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.mul(self.value, other.value)))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.div(self.value, other.value)?))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        Ok(self.field.element(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, FieldError> {
        Ok(self.field.element(self.field.pow(self.value, e)?))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$inner(rhs).expect("field operation failed")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.element(self.field.neg(self.value))
    }
}

/// A field embedding `F_q -> F_Q` for `F_q` a subfield of `F_Q`.
///
/// The image of the canonical generator `x` of the subfield is the least
/// root (in element order) of the subfield's modulus inside the extension.
#[derive(Clone)]
pub struct Embedding {
    sub: Field,
    ext: Field,
    image: Vec<u32>,
    preimage: HashMap<u32, u32>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({} -> {})", self.sub, self.ext)
    }
}

impl Embedding {
    pub fn new(sub: &Field, ext: &Field) -> Result<Embedding, FieldError> {
        if sub.p() != ext.p() || ext.n() % sub.n() != 0 {
            return Err(FieldError::NotASubfield {
                sub: sub.q(),
                ext: ext.q(),
            });
        }
        let eval = |coeffs: &[u32], r: Elem| -> Elem {
            coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| {
                ext.add(ext.mul(acc, r), Elem(c))
            })
        };
        let root = ext
            .elements()
            .find(|&r| eval(sub.modulus(), r).is_zero())
            .expect("subfield modulus splits in the extension");
        let image: Vec<u32> = sub
            .elements()
            .map(|a| eval(&sub.coeffs(a), root).0)
            .collect();
        let preimage = image
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        Ok(Embedding {
            sub: sub.clone(),
            ext: ext.clone(),
            image,
            preimage,
        })
    }

    pub fn sub(&self) -> &Field {
        &self.sub
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    /// Relative degree `[F_Q : F_q]`.
    pub fn degree(&self) -> u32 {
        self.ext.n() / self.sub.n()
    }

    pub fn embed(&self, a: Elem) -> Elem {
        Elem(self.image[a.index()])
    }

    pub fn restrict(&self, b: Elem) -> Option<Elem> {
        self.preimage.get(&b.0).map(|&i| Elem(i))
    }

    /// Relative norm `x^{(Q-1)/(q-1)}`.
    pub fn norm(&self, b: Elem) -> Elem {
        let e = (self.ext.q() as u64 - 1) / (self.sub.q() as u64 - 1);
        let v = self.ext.pow(b, e as i64).expect("nonnegative exponent");
        self.restrict(v).expect("norm lies in the subfield")
    }

    /// Relative trace `x + x^q + ... + x^{q^{m-1}}`.
    pub fn trace(&self, b: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut y = b;
        for _ in 0..self.degree() {
            acc = self.ext.add(acc, y);
            y = self.ext.pow(y, self.sub.q() as i64).expect("nonnegative exponent");
        }
        self.restrict(acc).expect("trace lies in the subfield")
    }
}
