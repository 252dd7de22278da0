use super::element::reduce_poly;
use super::{FieldElement, FieldError, FieldKind, NumberField};
use crate::arith::{gcd_u64, mult_order};
use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// An element of Gal(K/Q) for a supported field K.
///
/// Cyclotomic fields: `c` is a unit mod m acting by ζ ↦ ζ^c. Quadratic
/// fields: `c = 1` is the identity and `c = -1` is conjugation √d ↦ -√d.
/// The rationals only carry the identity `c = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaloisElement {
    pub kind: FieldKind,
    pub c: i64,
}

impl GaloisElement {
    pub fn identity(field: &NumberField) -> Self {
        GaloisElement { kind: field.kind(), c: 1 }
    }

    /// Complex conjugation (the identity on Q and on real quadratic fields).
    pub fn complex_conjugation(field: &NumberField) -> Self {
        match field.kind() {
            FieldKind::Rationals => Self::identity(field),
            FieldKind::Quadratic(d) => GaloisElement {
                kind: field.kind(),
                c: if d < 0 { -1 } else { 1 },
            },
            FieldKind::Cyclotomic(m) => GaloisElement {
                kind: field.kind(),
                c: m as i64 - 1,
            },
        }
    }

    /// Every group element, identity first, then by increasing `c`.
    pub fn all(field: &NumberField) -> Vec<Self> {
        let kind = field.kind();
        match kind {
            FieldKind::Rationals => vec![GaloisElement { kind, c: 1 }],
            FieldKind::Quadratic(_) => vec![GaloisElement { kind, c: 1 }, GaloisElement { kind, c: -1 }],
            FieldKind::Cyclotomic(m) => (1..m).filter(|&c| gcd_u64(c, m) == 1).map(|c| GaloisElement { kind, c: c as i64 }).collect(),
        }
    }

    /// The cyclotomic element ζ ↦ ζ^c (c reduced mod m).
    pub fn cyclotomic(m: u64, c: u64) -> Self {
        GaloisElement {
            kind: FieldKind::Cyclotomic(m),
            c: (c % m) as i64,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1
    }

    pub fn compose(&self, o: &GaloisElement) -> GaloisElement {
        assert_eq!(self.kind, o.kind, "composition across fields");
        let c = match self.kind {
            FieldKind::Cyclotomic(m) => (self.c * o.c).rem_euclid(m as i64),
            _ => self.c * o.c,
        };
        GaloisElement { kind: self.kind, c }
    }

    pub fn pow(&self, k: u32) -> GaloisElement {
        let mut r = GaloisElement { kind: self.kind, c: 1 };
        for _ in 0..k {
            r = r.compose(self);
        }
        r
    }

    pub fn inverse(&self) -> GaloisElement {
        let ord = self.order();
        self.pow(ord as u32 - 1)
    }

    pub fn order(&self) -> u64 {
        match self.kind {
            FieldKind::Cyclotomic(m) => mult_order(self.c as u64, m),
            _ => {
                if self.c == 1 {
                    1
                } else {
                    2
                }
            }
        }
    }

    /// Applies the automorphism, checking that the element lives in the
    /// field this element belongs to.
    pub fn apply(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if a.field().kind() != self.kind {
            return Err(FieldError::FieldMismatch(format!("{:?}", self.kind), a.field().literal()));
        }
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &FieldElement) -> FieldElement {
        if self.c == 1 {
            return a.clone();
        }
        let field = a.field();
        let num = a.num();
        let n = field.degree();
        match self.kind {
            FieldKind::Rationals => a.clone(),
            FieldKind::Quadratic(d) => {
                let out = if d.rem_euclid(4) == 1 {
                    vec![Integer::from(&num[0] + &num[1]), Integer::from(-&num[1])]
                } else {
                    vec![num[0].clone(), Integer::from(-&num[1])]
                };
                FieldElement::from_parts(field, out, a.den().clone())
            }
            FieldKind::Cyclotomic(m) => {
                let mut spread = vec![Integer::new(); m as usize];
                for (j, x) in num.iter().enumerate() {
                    if *x != 0 {
                        let k = (j as u64 * self.c as u64) % m;
                        spread[k as usize] += x;
                    }
                }
                let mut out = vec![Integer::new(); n];
                for (k, x) in spread.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    let row = field.theta_power(k);
                    for i in 0..n {
                        if row[i] != 0 {
                            out[i] += x * &row[i];
                        }
                    }
                }
                let out = reduce_poly(field, out);
                FieldElement::from_parts(field, out, a.den().clone())
            }
        }
    }
}

impl fmt::Display for GaloisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            _ if self.c == 1 => f.write_str("identity"),
            FieldKind::Quadratic(_) => f.write_str("conjugation"),
            FieldKind::Cyclotomic(m) => write!(f, "zeta_{m} -> zeta_{m}^{}", self.c),
            FieldKind::Rationals => f.write_str("identity"),
        }
    }
}

/// Applies `g` to `a` (the Galois action on field elements).
pub fn galois_apply(g: &GaloisElement, a: &FieldElement) -> Result<FieldElement, FieldError> {
    g.apply(a)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn identity_fixes_everything() {
        let k = cyclotomic(5).unwrap();
        let a = FieldElement::from_i64s(&k, &[3, -1, 4, 1]);
        assert_eq!(GaloisElement::identity(&k).apply(&a).unwrap(), a);
    }

    #[test]
    fn conjugation_on_gaussian_integers() {
        let k = cyclotomic(4).unwrap();
        let i = FieldElement::theta(&k);
        let conj = GaloisElement::complex_conjugation(&k);
        assert_eq!(conj.apply(&i).unwrap(), i.neg());
    }

    #[test]
    fn composition_in_units_mod_five() {
        let k = cyclotomic(5).unwrap();
        let z = FieldElement::theta(&k);
        let s = GaloisElement::cyclotomic(5, 2);
        let twice = s.apply(&s.apply(&z).unwrap()).unwrap();
        assert_eq!(twice, z.pow(4));
        assert_eq!(s.order(), 4);
        assert_eq!(s.compose(&s), GaloisElement::cyclotomic(5, 4));
    }

    #[test]
    fn action_is_a_ring_homomorphism() {
        let k = cyclotomic(9).unwrap();
        let a = FieldElement::from_i64s(&k, &[1, 2, 0, -3, 5, 1]);
        let b = FieldElement::from_i64s(&k, &[-2, 0, 7, 1, 0, 4]);
        for g in k.galois_group() {
            let ga = g.apply(&a).unwrap();
            let gb = g.apply(&b).unwrap();
            assert_eq!(g.apply(&a.mul(&b)).unwrap(), ga.mul(&gb));
            assert_eq!(g.apply(&a.add(&b)).unwrap(), ga.add(&gb));
        }
    }

    #[test]
    fn field_mismatch_is_reported() {
        let k = cyclotomic(5).unwrap();
        let q = quadratic(5).unwrap();
        let g = GaloisElement::identity(&k);
        assert!(g.apply(&FieldElement::one(&q)).is_err());
    }

    #[test]
    fn quadratic_conjugation() {
        let k = quadratic(5).unwrap();
        let t = FieldElement::theta(&k);
        let g = k.galois_group()[1];
        // (1+√5)/2 ↦ (1-√5)/2 = 1 - θ
        assert_eq!(g.apply(&t).unwrap(), t.neg().add_int(1));
    }
}
