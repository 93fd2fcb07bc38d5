use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{TraceError, TraceTable};
use crate::cyclotomic::{CycAccumulator, Cyclotomic};
use crate::ff::{Elem, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionMode {
    /// Direct `O(q^2)` summation.
    Naive,
    /// Transform to the dual of `Z/(q-1)` through the discrete log.
    Dft,
}

/// Indicator function of `1`, the unit for multiplicative convolution.
pub fn delta_one(field: &Field) -> TraceTable {
    TraceTable::from_fn(field, "delta_1", |x| {
        Cyclotomic::from_int(1, i64::from(x == Elem::ONE))
    })
}

/// `(f * g)(x) = sum_{uv = x} f(u) g(v)` over `F_q^x`.
pub fn mult_convolution(f: &TraceTable, g: &TraceTable, mode: ConvolutionMode) -> Result<TraceTable, TraceError> {
    if f.field() != g.field() {
        return Err(TraceError::SpecMismatch);
    }
    if !f.is_full() || !g.is_full() {
        return Err(TraceError::DomainMismatch);
    }
    let label = format!("({})*({})", f.label(), g.label());
    let out = match mode {
        ConvolutionMode::Naive => naive(f, g),
        ConvolutionMode::Dft => dft(f, g),
    };
    Ok(out.with_label(label))
}

fn naive(f: &TraceTable, g: &TraceTable) -> TraceTable {
    let field = f.field();
    let units: Vec<Elem> = field.units().collect();
    let entries = units
        .par_iter()
        .map(|&x| {
            let mut acc = Cyclotomic::zero(1);
            for &u in &units {
                let v = field.div(x, u).expect("unit");
                let fu = f.get(u).expect("full domain");
                let gv = g.get(v).expect("full domain");
                acc = &acc + &(fu * gv);
            }
            (x, acc)
        })
        .collect();
    TraceTable::new(field, entries, "")
}

fn lcm(a: u32, b: u32) -> u32 {
    a / num_integer::gcd(a, b) * b
}

fn dft(f: &TraceTable, g: &TraceTable) -> TraceTable {
    let field = f.field();
    let m = field.q() - 1;
    let order = f
        .values()
        .iter()
        .chain(g.values())
        .fold(m, |acc, v| lcm(acc, v.order()));
    let step = order / m;
    let lifted = |t: &TraceTable| -> Vec<Cyclotomic> {
        (0..m)
            .map(|j| t.get(field.exp(j as i64)).expect("full domain").lift(order).expect("divides"))
            .collect()
    };
    let fl = lifted(f);
    let gl = lifted(g);
    let transform = |vals: &[Cyclotomic], sign: i64| -> Vec<Cyclotomic> {
        (0..m)
            .into_par_iter()
            .map(|k| {
                let mut acc = CycAccumulator::new(order);
                for (j, v) in vals.iter().enumerate() {
                    let e = (sign * j as i64 * k as i64).rem_euclid(m as i64) as u32;
                    acc.add_rotated(v, e * step);
                }
                acc.finish()
            })
            .collect()
    };
    let fh = transform(&fl, 1);
    let gh = transform(&gl, 1);
    let prod: Vec<Cyclotomic> = fh.iter().zip(&gh).map(|(a, b)| a * b).collect();
    let back = transform(&prod, -1);
    let inv_m = BigRational::new(BigInt::from(1), BigInt::from(m));
    let entries = back
        .into_iter()
        .enumerate()
        .map(|(s, v)| (field.exp(s as i64), v.scale(&inv_m)))
        .collect();
    TraceTable::new(field, entries, "")
}
