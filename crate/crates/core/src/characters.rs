//! Multiplicative and additive characters of finite fields, Gauss sums and
//! base change along field extensions.
//!
//! `chi_a(g^k) = zeta_{q-1}^{a k}` for the canonical generator `g`, and
//! `psi_t(x) = zeta_p^{Tr(t x)}`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::cyclotomic::{CycError, Cyclotomic, RootSum};
use crate::ff::{Elem, Embedding, Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("multiplicative character evaluated at zero")]
    EvalAtZero,
    #[error("characters belong to different fields")]
    SpecMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyc(#[from] CycError),
}

/// `chi_a` with `a` taken modulo `q - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiplicativeCharacter {
    field: Field,
    index: u32,
}

impl fmt::Debug for MultiplicativeCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi:{}@{}", self.index, self.field)
    }
}

impl MultiplicativeCharacter {
    pub fn new(field: &Field, index: i64) -> MultiplicativeCharacter {
        let m = (field.q() - 1).max(1) as i64;
        MultiplicativeCharacter {
            field: field.clone(),
            index: index.rem_euclid(m) as u32,
        }
    }

    pub fn trivial(field: &Field) -> MultiplicativeCharacter {
        MultiplicativeCharacter::new(field, 0)
    }

    /// The quadratic character; requires odd `q`.
    pub fn quadratic(field: &Field) -> Option<MultiplicativeCharacter> {
        if field.q() % 2 == 1 {
            Some(MultiplicativeCharacter::new(field, (field.q() as i64 - 1) / 2))
        } else {
            None
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u32 {
        let m = (self.field.q() - 1).max(1);
        m / num_integer::gcd(m, self.index).max(1)
    }

    /// `chi(x) = zeta_{q-1}^{exponent(x)}` for a unit `x`.
    pub fn exponent(&self, x: Elem) -> Result<u32, CharacterError> {
        let m = (self.field.q() - 1).max(1) as u64;
        let k = self.field.dlog(x).map_err(|_| CharacterError::EvalAtZero)? as u64;
        Ok((k * self.index as u64 % m) as u32)
    }

    pub fn eval(&self, x: Elem) -> Result<Cyclotomic, CharacterError> {
        let e = self.exponent(x)?;
        Ok(Cyclotomic::root(self.value_order(), e as i64))
    }

    /// Like [`eval`](Self::eval) but with `chi(0) = 0` for nontrivial `chi`
    /// and `1` for the trivial one.
    pub fn eval_extended(&self, x: Elem) -> Cyclotomic {
        if x.is_zero() {
            let v = if self.is_trivial() { 1 } else { 0 };
            return Cyclotomic::from_int(self.value_order(), v);
        }
        self.eval(x).expect("nonzero argument")
    }

    /// Order of the roots of unity in which values are expressed.
    pub fn value_order(&self) -> u32 {
        (self.field.q() - 1).max(1)
    }

    pub fn mul(&self, other: &MultiplicativeCharacter) -> Result<MultiplicativeCharacter, CharacterError> {
        if self.field != other.field {
            return Err(CharacterError::SpecMismatch);
        }
        Ok(MultiplicativeCharacter::new(
            &self.field,
            self.index as i64 + other.index as i64,
        ))
    }

    pub fn inverse(&self) -> MultiplicativeCharacter {
        MultiplicativeCharacter::new(&self.field, -(self.index as i64))
    }

    pub fn pow(&self, e: i64) -> MultiplicativeCharacter {
        MultiplicativeCharacter::new(&self.field, self.index as i64 * e)
    }

    /// `chi(-1)`, which is `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        let minus_one = self.field.neg(Elem::ONE);
        let e = self.exponent(minus_one).expect("-1 is a unit");
        if e == 0 {
            1
        } else {
            -1
        }
    }
}

/// `psi_t(x) = zeta_p^{Tr(t x)}`.
#[derive(Clone, PartialEq, Eq)]
pub struct AdditiveCharacter {
    field: Field,
    twist: Elem,
}

impl fmt::Debug for AdditiveCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "psi:{}@{}", self.twist, self.field)
    }
}

impl AdditiveCharacter {
    pub fn new(field: &Field, twist: Elem) -> AdditiveCharacter {
        assert!(twist.0 < field.q(), "twist outside the field");
        AdditiveCharacter {
            field: field.clone(),
            twist,
        }
    }

    /// `psi_1`.
    pub fn standard(field: &Field) -> AdditiveCharacter {
        AdditiveCharacter::new(field, Elem::ONE)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn twist(&self) -> Elem {
        self.twist
    }

    pub fn is_trivial(&self) -> bool {
        self.twist.is_zero()
    }

    /// `Tr(t x)` in `[0, p)`.
    #[inline]
    pub fn exponent(&self, x: Elem) -> u32 {
        self.field.trace(self.field.mul(self.twist, x))
    }

    pub fn eval(&self, x: Elem) -> Cyclotomic {
        Cyclotomic::root(self.field.p(), self.exponent(x) as i64)
    }

    /// `y -> psi(c y)`.
    pub fn scaled(&self, c: Elem) -> AdditiveCharacter {
        AdditiveCharacter::new(&self.field, self.field.mul(self.twist, c))
    }
}

/// `G(psi, chi) = sum_{y != 0} psi(y) chi(y)`.
pub fn gauss_sum(
    psi: &AdditiveCharacter,
    chi: &MultiplicativeCharacter,
) -> Result<Cyclotomic, CharacterError> {
    if psi.field != chi.field {
        return Err(CharacterError::SpecMismatch);
    }
    let field = &psi.field;
    let order = field.char_order();
    let add_step = order / field.p();
    let mul_step = order / (field.q() - 1).max(1);
    let mut acc = RootSum::new(order);
    for y in field.units() {
        let e = psi.exponent(y) * add_step + chi.exponent(y)? * mul_step;
        acc.push(e);
    }
    Ok(acc.to_cyclotomic())
}

/// `G(psi, chi)^{-1}` as `conj(G) / q` when both characters are nontrivial,
/// otherwise by exact division.
pub fn gauss_sum_inverse(
    psi: &AdditiveCharacter,
    chi: &MultiplicativeCharacter,
) -> Result<Cyclotomic, CharacterError> {
    let g = gauss_sum(psi, chi)?;
    if psi.is_trivial() || chi.is_trivial() {
        return Ok(g.inverse()?);
    }
    let q = BigRational::new(BigInt::from(1), BigInt::from(psi.field.q()));
    Ok(g.conj().scale(&q))
}

/// The character `x -> chi(Nm(x))` of an extension field.
pub fn pullback_norm(
    chi: &MultiplicativeCharacter,
    ext: &Field,
) -> Result<MultiplicativeCharacter, CharacterError> {
    let emb = Embedding::new(&chi.field, ext)?;
    let big = (ext.q() - 1) as u64;
    let small = (chi.field.q() - 1).max(1) as u64;
    // Nm(g_ext) is a generator of the subfield; its log is coprime to q - 1.
    let norm_gen = emb.norm(ext.primitive_root());
    let e = if small == 1 { 0 } else { chi.field.dlog(norm_gen)? as u64 };
    let index = (chi.index as u64 * e % small) * (big / small);
    Ok(MultiplicativeCharacter::new(ext, index as i64))
}

/// The character `x -> psi(Tr_{ext/F}(x))` of an extension field.
pub fn pullback_trace(
    psi: &AdditiveCharacter,
    ext: &Field,
) -> Result<AdditiveCharacter, CharacterError> {
    let emb = Embedding::new(&psi.field, ext)?;
    Ok(AdditiveCharacter::new(ext, emb.embed(psi.twist)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gauss_sum_over_f3() {
        let f = Field::prime(3).unwrap();
        let g = gauss_sum(
            &AdditiveCharacter::standard(&f),
            &MultiplicativeCharacter::quadratic(&f).unwrap(),
        )
        .unwrap();
        assert_eq!(g, &Cyclotomic::root(3, 1) - &Cyclotomic::root(3, 2));
        assert_eq!(&g * &g, Cyclotomic::from_int(3, -3));
    }

    #[test]
    fn trivial_characters() {
        let f = Field::prime(7).unwrap();
        let psi = AdditiveCharacter::standard(&f);
        let triv = MultiplicativeCharacter::trivial(&f);
        assert_eq!(gauss_sum(&psi, &triv).unwrap(), Cyclotomic::from_int(1, -1));
        let psi0 = AdditiveCharacter::new(&f, Elem::ZERO);
        assert_eq!(gauss_sum(&psi0, &triv).unwrap(), Cyclotomic::from_int(1, 6));
    }

    #[test]
    fn strict_and_extended_zero() {
        let f = Field::prime(5).unwrap();
        let chi = MultiplicativeCharacter::new(&f, 1);
        assert_eq!(chi.eval(Elem::ZERO), Err(CharacterError::EvalAtZero));
        assert!(chi.eval_extended(Elem::ZERO).is_zero());
        assert_eq!(
            MultiplicativeCharacter::trivial(&f).eval_extended(Elem::ZERO),
            Cyclotomic::one(4)
        );
    }
}
