use serde::Serialize;

use super::{hypergeom_trace, HypergeomSpec, TraceError, TraceTable};
use crate::characters::{gauss_sum_inverse, AdditiveCharacter, MultiplicativeCharacter};
use crate::cyclotomic::{Cyclotomic, RootSum};
use crate::datum::{Datum, DatumKind};
use crate::ff::{Elem, Field};

/// Trace of Frobenius of the eigen local system attached to a datum, on the
/// open curve: `F_q^x - {1}` for datum A and `F_q^x` for B and C.
pub fn eigen_trace(datum: &Datum, field: &Field) -> Result<TraceTable, TraceError> {
    if datum.field() != field || datum.characters().iter().any(|c| c.field() != field) {
        return Err(TraceError::SpecMismatch);
    }
    let m = (field.q() - 1) as u64;
    let order = field.char_order();
    let mul_step = order as u64 / m;
    let add_step = order as u64 / field.p() as u64;
    let log = |x: Elem| field.dlog(x).expect("unit") as u64;
    let one = Elem::ONE;
    let mut sums: Vec<RootSum> = (0..m).map(|_| RootSum::new(order)).collect();
    let mut push = |x: Elem, mul_exp: u64, add_exp: u64| {
        let e = (mul_exp % m) * mul_step + add_exp * add_step;
        sums[log(x) as usize].push((e % order as u64) as u32);
    };

    let excluded: Vec<Elem> = match datum {
        Datum::A {
            chi0, chi1, chiinf, ..
        } => {
            let idx = |c: &MultiplicativeCharacter| c.index() as u64;
            for a in field.units().filter(|&a| a != one) {
                for d in field.units().filter(|&d| d != one) {
                    let one_a = field.sub(one, a);
                    let one_d = field.sub(one, d);
                    let x = field
                        .div(field.mul(one_a, one_d), field.mul(a, d))
                        .expect("unit");
                    if x == one {
                        continue;
                    }
                    let s = field.sub(field.add(a, d), one);
                    let e = idx(&chi0[0]) * log(one_d)
                        + idx(&chi0[1]) * log(one_a)
                        + idx(&chiinf[0]) * log(d)
                        + idx(&chiinf[1]) * log(a)
                        + idx(&chi1[1]) * log(s);
                    push(x, e, 0);
                }
            }
            vec![one]
        }
        Datum::B { chi0, phi, psi } => {
            for b in field.units() {
                for c in field.units() {
                    let x = field.mul(b, c);
                    let arg = field.add(field.mul(phi[0], b), field.mul(phi[1], c));
                    let e = chi0[1].index() as u64 * log(b) + chi0[0].index() as u64 * log(c);
                    push(x, e, psi.exponent(arg) as u64);
                }
            }
            Vec::new()
        }
        Datum::C {
            chi0,
            chiinf,
            phi,
            psi,
        } => {
            let diff = field.sub(phi[0], phi[1]);
            for b in field.units() {
                for d in field.units().filter(|&d| d != one) {
                    let one_d = field.sub(one, d);
                    let x = field.div(field.mul(b, one_d), d).expect("unit");
                    let e = chi0[0].index() as u64 * log(one_d)
                        + chiinf[1].index() as u64 * log(d)
                        + chi0[1].index() as u64 * log(b);
                    push(x, e, psi.exponent(field.mul(diff, b)) as u64);
                }
            }
            Vec::new()
        }
    };
    let entries = field
        .units()
        .filter(|x| !excluded.contains(x))
        .map(|x| (x, -sums[log(x) as usize].to_cyclotomic()))
        .collect();
    Ok(TraceTable::new(
        field,
        entries,
        format!("f_F[{}]", datum.kind()),
    ))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityOptions {
    /// Deliberately corrupt the constant; exercises the failure path.
    pub perturb_constant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub datum: DatumKind,
    pub q: u32,
    pub constant: Cyclotomic,
    pub holds: bool,
    /// First point where the two sides differ.
    pub witness: Option<u32>,
    pub lhs: Option<Cyclotomic>,
    pub rhs: Option<Cyclotomic>,
    pub points_checked: usize,
}

pub fn verify_identity(datum: &Datum, field: &Field) -> Result<IdentityReport, TraceError> {
    verify_identity_with(datum, field, IdentityOptions::default())
}

fn sign(c: &MultiplicativeCharacter) -> Cyclotomic {
    Cyclotomic::from_int(1, c.sign())
}

fn nontrivial_product(
    a: &MultiplicativeCharacter,
    b: &MultiplicativeCharacter,
    what: &str,
) -> Result<MultiplicativeCharacter, TraceError> {
    let g = a.mul(b)?;
    if g.is_trivial() {
        return Err(TraceError::GenericityViolated(format!(
            "Gauss sum argument {what} is trivial"
        )));
    }
    Ok(g)
}

/// Compare the eigen trace with a constant multiple of a hypergeometric
/// trace. Datum A uses `-chi_inf1(-1) chi_inf2(-1) G(psi, chi01 chi_inf1)^-1
/// G(psi, chi02 chi_inf2)^-1`; datum C uses `-chi02(-1) chi_inf2(-1)
/// G(psi', chi01 chi_inf2)^-1` with `psi' = psi((phi2 - phi1) .)`; datum B
/// is a rescaled two-variable Kloosterman-type sum evaluated at
/// `phi1 phi2 x`.
pub fn verify_identity_with(
    datum: &Datum,
    field: &Field,
    opts: IdentityOptions,
) -> Result<IdentityReport, TraceError> {
    let lhs = eigen_trace(datum, field)?;
    if datum.psi().is_trivial() {
        return Err(TraceError::GenericityViolated(
            "additive character is trivial".into(),
        ));
    }
    let (mut constant, h, scale) = match datum {
        Datum::A {
            chi0,
            chi1,
            chiinf,
            psi,
        } => {
            if !chi1[1].is_trivial() {
                return Err(TraceError::NonTrivialChi21);
            }
            let g1 = nontrivial_product(&chi0[0], &chiinf[0], "chi0^(1) chi_inf^(1)")?;
            let g2 = nontrivial_product(&chi0[1], &chiinf[1], "chi0^(2) chi_inf^(2)")?;
            let c = &(&sign(&chiinf[0]) * &sign(&chiinf[1]))
                * &(&gauss_sum_inverse(psi, &g1)? * &gauss_sum_inverse(psi, &g2)?);
            let h = HypergeomSpec::new(
                psi.clone(),
                vec![chi0[0].clone(), chi0[1].clone()],
                vec![chiinf[0].clone(), chiinf[1].clone()],
            );
            (-c, h, Elem::ONE)
        }
        Datum::B { chi0, phi, psi } => {
            if phi[0].is_zero() || phi[1].is_zero() {
                return Err(TraceError::GenericityViolated(
                    "phi vanishes on a coordinate".into(),
                ));
            }
            let c = &chi0[1].eval(phi[0])?.conj() * &chi0[0].eval(phi[1])?.conj();
            let h = HypergeomSpec::new(
                psi.clone(),
                vec![chi0[1].clone(), chi0[0].clone()],
                Vec::new(),
            );
            (-c, h, field.mul(phi[0], phi[1]))
        }
        Datum::C {
            chi0,
            chiinf,
            phi,
            psi,
        } => {
            if phi[0] == phi[1] {
                return Err(TraceError::GenericityViolated("phi1 equals phi2".into()));
            }
            let psi2: AdditiveCharacter = psi.scaled(field.sub(phi[1], phi[0]));
            let g = nontrivial_product(&chi0[0], &chiinf[1], "chi0^(1) chi_inf^(2)")?;
            let c = &(&sign(&chi0[1]) * &sign(&chiinf[1])) * &gauss_sum_inverse(&psi2, &g)?;
            let h = HypergeomSpec::new(
                psi2,
                vec![chi0[0].clone(), chi0[1].clone()],
                vec![chiinf[1].clone()],
            );
            (-c, h, Elem::ONE)
        }
    };
    if opts.perturb_constant {
        constant = &constant + &Cyclotomic::one(1);
    }
    let rhs_table = hypergeom_trace(field, &h)?;
    let mut report = IdentityReport {
        datum: datum.kind(),
        q: field.q(),
        constant: constant.clone(),
        holds: true,
        witness: None,
        lhs: None,
        rhs: None,
        points_checked: 0,
    };
    for (x, fx) in lhs.iter() {
        let hx = rhs_table.get(field.mul(scale, x)).expect("full domain");
        let rhs = &constant * hx;
        report.points_checked += 1;
        if *fx != rhs {
            report.holds = false;
            report.witness = Some(x.0);
            report.lhs = Some(fx.clone());
            report.rhs = Some(rhs);
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerTwist {
    /// Index of the character applied to `x`.
    pub at_x: u32,
    /// Index of the character applied to `1 - x`.
    pub at_one_minus_x: u32,
    pub constant: Cyclotomic,
}

/// Experimental: for datum A with a nontrivial second character at `1`,
/// search for `theta_a(x) theta_b(1 - x) c` relating the eigen trace to the
/// hypergeometric trace of the reduced parameters. Results are reported,
/// never asserted.
pub fn kummer_twist_search(datum: &Datum, field: &Field) -> Result<Vec<KummerTwist>, TraceError> {
    let Datum::A {
        chi0, chiinf, psi, ..
    } = datum
    else {
        return Err(TraceError::GenericityViolated(
            "twist search applies to datum A".into(),
        ));
    };
    let lhs = eigen_trace(datum, field)?;
    let h = HypergeomSpec::new(
        psi.clone(),
        vec![chi0[0].clone(), chi0[1].clone()],
        vec![chiinf[0].clone(), chiinf[1].clone()],
    );
    let rhs = hypergeom_trace(field, &h)?;
    let m = field.q() as i64 - 1;
    let mut found = Vec::new();
    for a in 0..m {
        let ta = MultiplicativeCharacter::new(field, a);
        for b in 0..m {
            let tb = MultiplicativeCharacter::new(field, b);
            let twisted: Vec<(Elem, Cyclotomic)> = lhs
                .points()
                .iter()
                .map(|&x| {
                    let w = &ta.eval(x).expect("unit")
                        * &tb.eval(field.sub(Elem::ONE, x)).expect("x != 1");
                    (x, &w * rhs.get(x).expect("full domain"))
                })
                .collect();
            let Some((x0, base)) = twisted.iter().find(|(_, v)| !v.is_zero()) else {
                continue;
            };
            let c = lhs.get(*x0).expect("domain").try_div(base)?;
            if twisted
                .iter()
                .all(|(x, v)| *lhs.get(*x).expect("domain") == &c * v)
            {
                found.push(KummerTwist {
                    at_x: a as u32,
                    at_one_minus_x: b as u32,
                    constant: c,
                });
            }
        }
    }
    Ok(found)
}
