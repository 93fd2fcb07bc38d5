//! The three rank-two automorphic data on `P^1` with their character
//! parameters.
//!
//! * `A`: Iwahori level at `0, 1, inf` with tame characters at each point.
//! * `B`: Iwahori at `0`, pro-unipotent Iwahori at `inf` with a linear
//!   functional `phi = (phi1, phi2)`.
//! * `C`: Iwahori at `0`, at `inf` a torus character together with an
//!   additive character through `phi = (phi1, phi2)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::characters::{AdditiveCharacter, MultiplicativeCharacter};
use crate::ff::{Elem, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatumKind {
    A,
    B,
    C,
}

impl fmt::Display for DatumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DatumKind::A => "A",
            DatumKind::B => "B",
            DatumKind::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for DatumKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "A" | "a" => Ok(DatumKind::A),
            "B" | "b" => Ok(DatumKind::B),
            "C" | "c" => Ok(DatumKind::C),
            other => Err(format!("unknown datum {other:?}")),
        }
    }
}

/// A pair of characters `(chi^(1), chi^(2))` at one point.
pub type CharPair = [MultiplicativeCharacter; 2];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Datum {
    A {
        chi0: CharPair,
        chi1: CharPair,
        chiinf: CharPair,
        psi: AdditiveCharacter,
    },
    B {
        chi0: CharPair,
        phi: [Elem; 2],
        psi: AdditiveCharacter,
    },
    C {
        chi0: CharPair,
        chiinf: CharPair,
        phi: [Elem; 2],
        psi: AdditiveCharacter,
    },
}

fn pair(field: &Field, idx: [i64; 2]) -> CharPair {
    [
        MultiplicativeCharacter::new(field, idx[0]),
        MultiplicativeCharacter::new(field, idx[1]),
    ]
}

fn is_trivial_product(chars: &[&MultiplicativeCharacter]) -> bool {
    let m = (chars[0].field().q() - 1).max(1) as u64;
    chars.iter().map(|c| c.index() as u64).sum::<u64>() % m == 0
}

impl Datum {
    /// Datum A with the standard additive character.
    pub fn a(field: &Field, chi0: [i64; 2], chi1: [i64; 2], chiinf: [i64; 2]) -> Datum {
        Datum::A {
            chi0: pair(field, chi0),
            chi1: pair(field, chi1),
            chiinf: pair(field, chiinf),
            psi: AdditiveCharacter::standard(field),
        }
    }

    pub fn b(field: &Field, chi0: [i64; 2], phi: [Elem; 2]) -> Datum {
        Datum::B {
            chi0: pair(field, chi0),
            phi,
            psi: AdditiveCharacter::standard(field),
        }
    }

    pub fn c(field: &Field, chi0: [i64; 2], chiinf: [i64; 2], phi: [Elem; 2]) -> Datum {
        Datum::C {
            chi0: pair(field, chi0),
            chiinf: pair(field, chiinf),
            phi,
            psi: AdditiveCharacter::standard(field),
        }
    }

    pub fn with_psi(self, twist: Elem) -> Datum {
        match self {
            Datum::A {
                chi0,
                chi1,
                chiinf,
                psi,
            } => Datum::A {
                psi: AdditiveCharacter::new(psi.field(), twist),
                chi0,
                chi1,
                chiinf,
            },
            Datum::B { chi0, phi, psi } => Datum::B {
                psi: AdditiveCharacter::new(psi.field(), twist),
                chi0,
                phi,
            },
            Datum::C {
                chi0,
                chiinf,
                phi,
                psi,
            } => Datum::C {
                psi: AdditiveCharacter::new(psi.field(), twist),
                chi0,
                chiinf,
                phi,
            },
        }
    }

    pub fn kind(&self) -> DatumKind {
        match self {
            Datum::A { .. } => DatumKind::A,
            Datum::B { .. } => DatumKind::B,
            Datum::C { .. } => DatumKind::C,
        }
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        match self {
            Datum::A { psi, .. } | Datum::B { psi, .. } | Datum::C { psi, .. } => psi,
        }
    }

    pub fn field(&self) -> &Field {
        self.psi().field()
    }

    pub fn chi0(&self) -> &CharPair {
        match self {
            Datum::A { chi0, .. } | Datum::B { chi0, .. } | Datum::C { chi0, .. } => chi0,
        }
    }

    /// Every character of the datum, for consistency checks.
    pub fn characters(&self) -> Vec<&MultiplicativeCharacter> {
        match self {
            Datum::A {
                chi0, chi1, chiinf, ..
            } => chi0.iter().chain(chi1).chain(chiinf).collect(),
            Datum::B { chi0, .. } => chi0.iter().collect(),
            Datum::C { chi0, chiinf, .. } => chi0.iter().chain(chiinf).collect(),
        }
    }

    /// The points of `S`, ramified, as labels.
    pub fn ramified_points(&self) -> &'static [&'static str] {
        match self {
            Datum::A { .. } => &["0", "1", "inf"],
            Datum::B { .. } | Datum::C { .. } => &["0", "inf"],
        }
    }

    /// The determinant condition: the product of all torus characters is trivial.
    pub fn det_condition(&self) -> bool {
        match self {
            Datum::A {
                chi0, chi1, chiinf, ..
            } => is_trivial_product(&[
                &chi0[0], &chi0[1], &chi1[0], &chi1[1], &chiinf[0], &chiinf[1],
            ]),
            Datum::B { .. } => true,
            Datum::C { chi0, chiinf, .. } => {
                is_trivial_product(&[&chi0[0], &chi0[1], &chiinf[0], &chiinf[1]])
            }
        }
    }

    /// The genericity predicate under which a unique relevant point exists.
    pub fn is_generic(&self) -> bool {
        match self {
            Datum::A {
                chi0, chi1, chiinf, ..
            } => {
                self.det_condition()
                    && (0..8).all(|mask: u32| {
                        let pick = |pair: &'_ CharPair, bit: u32| -> MultiplicativeCharacter {
                            pair[((mask >> bit) & 1) as usize].clone()
                        };
                        let (x, y, z) = (pick(chi0, 0), pick(chi1, 1), pick(chiinf, 2));
                        !is_trivial_product(&[&x, &y, &z])
                    })
            }
            Datum::B { phi, .. } => !phi[0].is_zero() && !phi[1].is_zero(),
            Datum::C {
                chi0, chiinf, phi, ..
            } => {
                self.det_condition()
                    && !is_trivial_product(&[&chi0[0], &chiinf[0]])
                    && !is_trivial_product(&[&chi0[0], &chiinf[1]])
                    && phi[0] != phi[1]
            }
        }
    }
}
