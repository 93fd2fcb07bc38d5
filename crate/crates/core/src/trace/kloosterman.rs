use rayon::prelude::*;
use serde::Serialize;

use super::{mult_convolution, ConvolutionMode, TraceError, TraceTable};
use crate::characters::AdditiveCharacter;
use crate::cyclotomic::{Cyclotomic, RootSum};
use crate::ff::{Elem, Field};

fn check_psi(field: &Field, psi: &AdditiveCharacter) -> Result<(), TraceError> {
    if psi.field() != field {
        return Err(TraceError::SpecMismatch);
    }
    if psi.is_trivial() {
        return Err(TraceError::TrivialPsi);
    }
    Ok(())
}

/// `Kl_n(a) = sum_{x_1 ... x_n = a} psi(x_1 + ... + x_n)` by enumerating the
/// first `n - 1` coordinates.
pub fn kloosterman(field: &Field, psi: &AdditiveCharacter, n: u32, a: Elem) -> Result<Cyclotomic, TraceError> {
    check_psi(field, psi)?;
    if n == 0 {
        return Err(TraceError::InvalidArity("n must be at least 1".into()));
    }
    let log_a = field.dlog(a).map_err(|_| TraceError::ZeroArgument)? as usize;
    let m = (field.q() - 1) as usize;
    let p = field.p();
    let traces: Vec<u32> = (0..m).map(|k| psi.exponent(field.exp(k as i64))).collect();

    let free = (n - 1) as usize;
    let mut acc = RootSum::new(p);
    let mut idx = vec![0usize; free];
    loop {
        let logsum: usize = idx.iter().sum::<usize>() % m;
        let last = (log_a + m - logsum) % m;
        let tr = idx.iter().map(|&k| traces[k]).sum::<u32>() + traces[last];
        acc.push(tr % p);
        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == free {
                return Ok(acc.to_cyclotomic());
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `Kl_n` at every unit at once, by dynamic programming over
/// (discrete log of the product, trace of the sum).
pub fn kloosterman_table(field: &Field, psi: &AdditiveCharacter, n: u32) -> Result<TraceTable, TraceError> {
    check_psi(field, psi)?;
    if n == 0 {
        return Err(TraceError::InvalidArity("n must be at least 1".into()));
    }
    let m = (field.q() - 1) as usize;
    let p = field.p() as usize;
    let traces: Vec<usize> = (0..m)
        .map(|k| psi.exponent(field.exp(k as i64)) as usize)
        .collect();
    let mut counts = vec![0i64; m * p];
    for k in 0..m {
        counts[k * p + traces[k]] += 1;
    }
    for _ in 1..n {
        let mut next = vec![0i64; m * p];
        for k in 0..m {
            for s in 0..p {
                let c = counts[k * p + s];
                if c == 0 {
                    continue;
                }
                for (k2, &t) in traces.iter().enumerate() {
                    next[((k + k2) % m) * p + (s + t) % p] += c;
                }
            }
        }
        counts = next;
    }
    let entries = field
        .units()
        .map(|x| {
            let k = field.dlog(x).expect("unit") as usize;
            let v = Cyclotomic::from_exponent_counts(p as u32, &counts[k * p..(k + 1) * p]);
            (x, v)
        })
        .collect();
    Ok(TraceTable::new(field, entries, format!("Kl_{n}")))
}

/// `Kl_n` as the `n`-fold multiplicative self-convolution of `psi`.
pub fn kloosterman_via_convolution(
    field: &Field,
    psi: &AdditiveCharacter,
    n: u32,
    mode: ConvolutionMode,
) -> Result<TraceTable, TraceError> {
    check_psi(field, psi)?;
    if n == 0 {
        return Err(TraceError::InvalidArity("n must be at least 1".into()));
    }
    let kernel = TraceTable::from_fn(field, "psi", |x| psi.eval(x));
    let mut acc = kernel.clone();
    for _ in 1..n {
        acc = mult_convolution(&acc, &kernel, mode)?;
    }
    Ok(acc.with_label(format!("Kl_{n}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilRow {
    pub q: u32,
    pub n: u32,
    pub bound: f64,
    pub max_abs: f64,
    pub max_ratio: f64,
    /// Units `a` at which the bound fails.
    pub violations: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub rows: Vec<WeilRow>,
    pub tolerance: f64,
    pub all_ok: bool,
}

/// Check `|Kl_n(a)| <= n q^{(n-1)/2} + tolerance` for every unit `a` of
/// every field, with the standard additive character.
pub fn weil_scan(fields: &[Field], n: u32, tolerance: f64) -> Result<WeilReport, TraceError> {
    let rows: Result<Vec<WeilRow>, TraceError> = fields
        .par_iter()
        .map(|field| {
            let psi = AdditiveCharacter::standard(field);
            let table = kloosterman_table(field, &psi, n)?;
            let q = field.q() as f64;
            let bound = n as f64 * q.powf((n as f64 - 1.0) / 2.0);
            let mut max_abs = 0.0f64;
            let mut violations = Vec::new();
            for (a, v) in table.iter() {
                let z = v.embed_complex();
                let r = z.re.hypot(z.im);
                max_abs = max_abs.max(r);
                if r > bound + tolerance {
                    violations.push(a.0);
                }
            }
            Ok(WeilRow {
                q: field.q(),
                n,
                bound,
                max_abs,
                max_ratio: max_abs / bound,
                violations,
            })
        })
        .collect();
    let rows = rows?;
    let all_ok = rows.iter().all(|r| r.violations.is_empty());
    Ok(WeilReport {
        rows,
        tolerance,
        all_ok,
    })
}
