//! Exact arithmetic in Q, quadratic fields and cyclotomic fields, together
//! with their places, prime ideals, residue fields and Galois groups.
//!
//! Elements are stored in the power basis of the ring-of-integers generator
//! θ as an integer numerator vector over a common positive denominator.

mod element;
mod galois;
mod ideal;
mod places;
mod residue;
mod subfield;

pub use element::FieldElement;
pub use galois::{galois_apply, GaloisElement};
pub use ideal::ideal_norm_of_generators;
pub use places::{
    abs_value, archimedean_places, embed, extension_info, frobenius_element, frobenius_lift, inertia_tau, places_above, primes_above, reduce_element,
    theta_value, valuation, valuation_via_hensel, valuation_via_norm, AbsValue, ArchPlace, ExtensionInfo, Place, PlaceKind, PrimeIdeal, Valuation,
};
pub use residue::{ResidueElem, ResidueField};
pub use subfield::{embed_generator, inertia_fixed_field, lift, restrict};

use crate::arith::{euler_phi, is_squarefree, zpoly};
use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("quadratic parameter {0} must be squarefree and not 0 or 1")]
    BadQuadratic(i64),
    #[error("cyclotomic parameter must be at least 1")]
    BadCyclotomic,
    #[error("elements belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p} is ramified in {field}")]
    Ramified { p: u64, field: String },
    #[error("{p} is unramified in {field}")]
    Unramified { p: u64, field: String },
    #[error("element has a pole at the prime above {0}")]
    Pole(u64),
    #[error("the zero ideal has no norm")]
    ZeroIdeal,
    #[error("division by zero")]
    DivisionByZero,
}

/// The supported families of abelian number fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Rationals,
    Quadratic(i64),
    Cyclotomic(u64),
}

/// A number field with monogenic ring of integers Z[θ].
#[derive(Debug)]
pub struct NumberField {
    kind: FieldKind,
    degree: usize,
    minpoly: Vec<Integer>,
    disc: Integer,
    /// θ^k in the power basis for `0 <= k < max(2n - 1, m)`.
    powers: Vec<Vec<Integer>>,
}

pub type Field = Arc<NumberField>;

/// Builds a field from its family tag. Cyclotomic moduli m ≡ 2 mod 4 are
/// replaced by m/2, and m ∈ {1, 2} gives the rationals.
pub fn make_field(kind: FieldKind) -> Result<Field, FieldError> {
    let kind = match kind {
        FieldKind::Quadratic(d) => {
            if d == 0 || d == 1 || !is_squarefree(d) {
                return Err(FieldError::BadQuadratic(d));
            }
            kind
        }
        FieldKind::Cyclotomic(0) => return Err(FieldError::BadCyclotomic),
        FieldKind::Cyclotomic(m) if m <= 2 => FieldKind::Rationals,
        FieldKind::Cyclotomic(m) if m % 4 == 2 => FieldKind::Cyclotomic(m / 2),
        k => k,
    };
    let (minpoly, disc) = match kind {
        FieldKind::Rationals => (zpoly::from_i64(&[-1, 1]), Integer::from(1)),
        FieldKind::Quadratic(d) => {
            if d.rem_euclid(4) == 1 {
                (zpoly::from_i64(&[-(d - 1) / 4, -1, 1]), Integer::from(d))
            } else {
                (zpoly::from_i64(&[-d, 0, 1]), Integer::from(4 * d))
            }
        }
        FieldKind::Cyclotomic(m) => (zpoly::cyclotomic(m), cyclotomic_disc(m)),
    };
    let degree = minpoly.len() - 1;
    let span = match kind {
        FieldKind::Cyclotomic(m) => (m as usize).max(2 * degree),
        _ => 2 * degree,
    };
    let mut powers: Vec<Vec<Integer>> = Vec::with_capacity(span);
    let mut cur = vec![Integer::new(); degree];
    cur[0] = Integer::from(1);
    for _ in 0..span {
        powers.push(cur.clone());
        // multiply by θ: shift and reduce by the monic minimal polynomial
        let top = cur[degree - 1].clone();
        for i in (1..degree).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = Integer::new();
        if top != 0 {
            for i in 0..degree {
                cur[i] -= &top * &minpoly[i];
            }
        }
    }
    Ok(Arc::new(NumberField {
        kind,
        degree,
        minpoly,
        disc,
        powers,
    }))
}

/// Field discriminant of Q(ζ_m) for m ≢ 2 mod 4:
/// (-1)^(φ/2) m^φ / Π_{p|m} p^(φ/(p-1)).
fn cyclotomic_disc(m: u64) -> Integer {
    let phi = euler_phi(m);
    let mut num = Integer::from(m).pow(phi as u32);
    for (p, _) in crate::arith::factor_u64(m) {
        num /= Integer::from(p).pow((phi / (p - 1)) as u32);
    }
    if (phi / 2) % 2 == 1 {
        -num
    } else {
        num
    }
}

use rug::ops::Pow;

impl NumberField {
    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic minimal polynomial of θ, low degree first.
    pub fn minpoly(&self) -> &[Integer] {
        &self.minpoly
    }

    pub fn discriminant(&self) -> &Integer {
        &self.disc
    }

    /// θ^k in the power basis (k below the precomputed span).
    pub(crate) fn theta_power(&self, k: usize) -> &[Integer] {
        &self.powers[k]
    }

    /// Human-readable description of θ.
    pub fn theta_description(&self) -> String {
        match self.kind {
            FieldKind::Rationals => "1".into(),
            FieldKind::Quadratic(d) if d.rem_euclid(4) == 1 => format!("(1+sqrt({d}))/2"),
            FieldKind::Quadratic(d) => format!("sqrt({d})"),
            FieldKind::Cyclotomic(m) => format!("zeta_{m}"),
        }
    }

    /// Conductor of the field as an abelian extension of Q.
    pub fn conductor(&self) -> u64 {
        match self.kind {
            FieldKind::Rationals => 1,
            FieldKind::Quadratic(_) => self.disc.clone().abs().to_u64().unwrap(),
            FieldKind::Cyclotomic(m) => m,
        }
    }

    /// Whether the rational prime p ramifies.
    pub fn is_ramified(&self, p: u64) -> bool {
        self.conductor().is_multiple_of(p) && self.kind != FieldKind::Rationals
    }

    /// All Galois elements in canonical order (identity first).
    pub fn galois_group(&self) -> Vec<GaloisElement> {
        GaloisElement::all(self)
    }

    pub fn literal(&self) -> String {
        match self.kind {
            FieldKind::Rationals => "Q".into(),
            FieldKind::Quadratic(d) => format!("Q(sqrt {d})"),
            FieldKind::Cyclotomic(m) => format!("Q(zeta {m})"),
        }
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

pub fn rationals() -> Field {
    make_field(FieldKind::Rationals).unwrap()
}

pub fn quadratic(d: i64) -> Result<Field, FieldError> {
    make_field(FieldKind::Quadratic(d))
}

pub fn cyclotomic(m: u64) -> Result<Field, FieldError> {
    make_field(FieldKind::Cyclotomic(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_examples() {
        let q = cyclotomic(1).unwrap();
        assert_eq!(q.kind(), FieldKind::Rationals);
        assert_eq!(q.degree(), 1);

        let k = quadratic(5).unwrap();
        assert_eq!(k.minpoly(), &zpoly::from_i64(&[-1, -1, 1])[..]);
        // oracle: b^2 - 4ac of x^2 - x - 1
        let (a, b, c) = (1i64, -1i64, -1i64);
        assert_eq!(*k.discriminant(), b * b - 4 * a * c);

        let k = cyclotomic(4).unwrap();
        assert_eq!(k.degree(), 2);
        assert_eq!(k.minpoly(), &zpoly::from_i64(&[1, 0, 1])[..]);
        assert_eq!(*k.discriminant(), -4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(quadratic(8).unwrap_err(), FieldError::BadQuadratic(8));
        assert_eq!(quadratic(1).unwrap_err(), FieldError::BadQuadratic(1));
        assert_eq!(quadratic(0).unwrap_err(), FieldError::BadQuadratic(0));
        assert_eq!(cyclotomic(0).unwrap_err(), FieldError::BadCyclotomic);
    }

    #[test]
    fn cyclotomic_discriminants() {
        // Q(zeta_3) = Q(sqrt -3), Q(zeta_5) has discriminant 125, Q(zeta_9) has -3^9
        assert_eq!(*cyclotomic(3).unwrap().discriminant(), -3);
        assert_eq!(*cyclotomic(5).unwrap().discriminant(), 125);
        assert_eq!(*cyclotomic(9).unwrap().discriminant(), -19683);
        assert_eq!(cyclotomic(10).unwrap().kind(), FieldKind::Cyclotomic(5));
    }

    #[test]
    fn quadratic_discriminant_matches_poly_discriminant() {
        for d in [-7i64, -5, -3, -2, -1, 2, 3, 5, 6, 13, 17] {
            let k = quadratic(d).unwrap();
            let f = k.minpoly();
            let disc = Integer::from(&f[1] * &f[1]) - Integer::from(4) * &f[0];
            assert_eq!(*k.discriminant(), disc);
        }
    }
}
