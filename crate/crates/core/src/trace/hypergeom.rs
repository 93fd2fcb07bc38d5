use super::{mult_convolution, ConvolutionMode, TraceError, TraceTable};
use crate::characters::{AdditiveCharacter, MultiplicativeCharacter};
use crate::cyclotomic::RootSum;
use crate::ff::Field;

/// Parameters of the hypergeometric sum
/// `sum_{prod x_i = x prod y_j} psi(sum x_i - sum y_j) prod chi_i(x_i) prod rho_j(y_j)`.
#[derive(Clone, Debug)]
pub struct HypergeomSpec {
    pub psi: AdditiveCharacter,
    pub chis: Vec<MultiplicativeCharacter>,
    pub rhos: Vec<MultiplicativeCharacter>,
}

impl HypergeomSpec {
    pub fn new(
        psi: AdditiveCharacter,
        chis: Vec<MultiplicativeCharacter>,
        rhos: Vec<MultiplicativeCharacter>,
    ) -> HypergeomSpec {
        HypergeomSpec { psi, chis, rhos }
    }

    /// Some upper parameter equals a lower one, so the sum is reducible.
    pub fn has_cancellation(&self) -> bool {
        self.chis.iter().any(|c| self.rhos.contains(c))
    }

    fn label(&self) -> String {
        let idx = |v: &[MultiplicativeCharacter]| {
            v.iter()
                .map(|c| c.index().to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "H(psi:{}; {}; {})",
            self.psi.twist(),
            idx(&self.chis),
            idx(&self.rhos)
        )
    }

    fn validate(&self, field: &Field) -> Result<(), TraceError> {
        if self.chis.is_empty() && self.rhos.is_empty() {
            return Err(TraceError::InvalidArity("no parameters".into()));
        }
        let same = self.psi.field() == field
            && self
                .chis
                .iter()
                .chain(&self.rhos)
                .all(|c| c.field() == field);
        if same {
            Ok(())
        } else {
            Err(TraceError::SpecMismatch)
        }
    }
}

/// Direct summation when there are at most four variables, otherwise
/// iterated convolution.
pub fn hypergeom_trace(field: &Field, h: &HypergeomSpec) -> Result<TraceTable, TraceError> {
    if h.chis.len() + h.rhos.len() <= 4 {
        hypergeom_trace_direct(field, h)
    } else {
        hypergeom_trace_convolution(field, h, ConvolutionMode::Naive)
    }
}

/// Enumerate all `(x_i, y_j)` in `(F_q^x)^{n+m}`.
pub fn hypergeom_trace_direct(field: &Field, h: &HypergeomSpec) -> Result<TraceTable, TraceError> {
    h.validate(field)?;
    let m = (field.q() - 1) as usize;
    let p = field.p();
    let order = field.char_order();
    let add_step = order / p;
    let mul_step = order / m as u32;
    let traces: Vec<u32> = (0..m)
        .map(|k| h.psi.exponent(field.exp(k as i64)))
        .collect();

    // Per variable: sign of its log in the product and of its trace in psi.
    let weights: Vec<(bool, u64)> = h
        .chis
        .iter()
        .map(|c| (true, c.index() as u64))
        .chain(h.rhos.iter().map(|r| (false, r.index() as u64)))
        .collect();
    let vars = weights.len();
    let mut sums: Vec<RootSum> = (0..m).map(|_| RootSum::new(order)).collect();
    let mut idx = vec![0usize; vars];
    'outer: loop {
        let mut log_x = 0usize;
        let mut tr = 0u64;
        let mut chi_exp = 0u64;
        for (&k, &(upper, a)) in idx.iter().zip(&weights) {
            if upper {
                log_x += k;
                tr += traces[k] as u64;
            } else {
                log_x += m - k;
                tr += (p - traces[k]) as u64;
            }
            chi_exp += a * k as u64;
        }
        let e = (tr % p as u64) * add_step as u64 + (chi_exp % m as u64) * mul_step as u64;
        sums[log_x % m].push((e % order as u64) as u32);
        let mut pos = 0;
        loop {
            if pos == vars {
                break 'outer;
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
    let entries = sums
        .iter()
        .enumerate()
        .map(|(k, s)| (field.exp(k as i64), s.to_cyclotomic()))
        .collect();
    Ok(TraceTable::new(field, entries, h.label()))
}

/// Convolve the kernels `u -> psi(u) chi_i(u)` and `v -> psi(-1/v) rho_j(1/v)`.
pub fn hypergeom_trace_convolution(
    field: &Field,
    h: &HypergeomSpec,
    mode: ConvolutionMode,
) -> Result<TraceTable, TraceError> {
    h.validate(field)?;
    let mut kernels = Vec::new();
    for chi in &h.chis {
        kernels.push(TraceTable::from_fn(field, "", |u| {
            &h.psi.eval(u) * &chi.eval(u).expect("unit")
        }));
    }
    for rho in &h.rhos {
        kernels.push(TraceTable::from_fn(field, "", |v| {
            let w = field.inv(v).expect("unit");
            &h.psi.eval(field.neg(w)) * &rho.eval(w).expect("unit")
        }));
    }
    let mut acc = kernels[0].clone();
    for k in &kernels[1..] {
        acc = mult_convolution(&acc, k, mode)?;
    }
    Ok(acc.with_label(h.label()))
}
