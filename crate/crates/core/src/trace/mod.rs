//! Exponential sums over finite fields as exact trace tables.

mod convolution;
mod eigen;
mod hypergeom;
mod kloosterman;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::characters::CharacterError;
use crate::cyclotomic::{CycError, Cyclotomic};
use crate::ff::{Elem, Field};

pub use convolution::{delta_one, mult_convolution, ConvolutionMode};
pub use eigen::{
    eigen_trace, kummer_twist_search, verify_identity, verify_identity_with, IdentityOptions,
    IdentityReport, KummerTwist,
};
pub use hypergeom::{
    hypergeom_trace, hypergeom_trace_convolution, hypergeom_trace_direct, HypergeomSpec,
};
pub use kloosterman::{
    kloosterman, kloosterman_table, kloosterman_via_convolution, weil_scan, WeilReport, WeilRow,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("argument must be a unit")]
    ZeroArgument,
    #[error("additive character must be nontrivial")]
    TrivialPsi,
    #[error("tables have incompatible domains")]
    DomainMismatch,
    #[error("inputs belong to different fields")]
    SpecMismatch,
    #[error("hypothesis violated: {0}")]
    GenericityViolated(String),
    #[error("datum A identity requires the second character at 1 to be trivial")]
    NonTrivialChi21,
    #[error("invalid arity: {0}")]
    InvalidArity(String),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Cyc(#[from] CycError),
}

/// Exact values of a function on a subset of `F_q^x`, in element order.
#[derive(Clone, PartialEq)]
pub struct TraceTable {
    field: Field,
    points: Vec<Elem>,
    values: Vec<Cyclotomic>,
    label: String,
}

impl fmt::Debug for TraceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TraceTable")
            .field("field", &self.field)
            .field("label", &self.label)
            .field("entries", &self.points.iter().zip(&self.values).collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Serialize)]
pub struct TraceEntry {
    pub x: u32,
    pub value: Cyclotomic,
}

impl TraceTable {
    /// Build from `(point, value)` pairs; points are sorted and must be
    /// distinct nonzero elements.
    pub fn new(field: &Field, mut entries: Vec<(Elem, Cyclotomic)>, label: impl Into<String>) -> TraceTable {
        entries.sort_by_key(|(x, _)| *x);
        assert!(entries.windows(2).all(|w| w[0].0 != w[1].0), "duplicate points");
        assert!(entries.iter().all(|(x, _)| !x.is_zero()), "zero in domain");
        let (points, values) = entries.into_iter().unzip();
        TraceTable {
            field: field.clone(),
            points,
            values,
            label: label.into(),
        }
    }

    /// Tabulate `f` on every unit.
    pub fn from_fn(field: &Field, label: impl Into<String>, f: impl Fn(Elem) -> Cyclotomic) -> TraceTable {
        let entries = field.units().map(|x| (x, f(x))).collect();
        TraceTable::new(field, entries, label)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when the domain is all of `F_q^x`.
    pub fn is_full(&self) -> bool {
        self.points.len() as u32 == self.field.q() - 1
    }

    pub fn get(&self, x: Elem) -> Option<&Cyclotomic> {
        self.points.binary_search(&x).ok().map(|i| &self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elem, &Cyclotomic)> {
        self.points.iter().copied().zip(self.values.iter())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> TraceTable {
        self.label = label.into();
        self
    }

    /// Drop the listed points from the domain.
    pub fn without(&self, excluded: &[Elem]) -> TraceTable {
        let entries = self
            .iter()
            .filter(|(x, _)| !excluded.contains(x))
            .map(|(x, v)| (x, v.clone()))
            .collect();
        TraceTable::new(&self.field, entries, self.label.clone())
    }

    pub fn entries(&self) -> Vec<TraceEntry> {
        self.iter()
            .map(|(x, v)| TraceEntry {
                x: x.0,
                value: v.clone(),
            })
            .collect()
    }
}
