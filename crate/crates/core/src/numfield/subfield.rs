//! Inclusions between supported fields and restriction of elements to them.

use super::{cyclotomic, inertia_tau, rationals, Field, FieldElement, FieldError, FieldKind};
use crate::arith::solve_rational;
use rug::Rational;

/// θ of `sub` written in `field`, for the inclusions Q ⊆ L, L ⊆ L and
/// Q(ζ_m') ⊆ Q(ζ_m) with m' | m.
pub fn embed_generator(sub: &Field, field: &Field) -> Option<FieldElement> {
    match (sub.kind(), field.kind()) {
        (FieldKind::Rationals, _) => Some(FieldElement::one(field)),
        (a, b) if a == b => Some(FieldElement::theta(field)),
        (FieldKind::Cyclotomic(s), FieldKind::Cyclotomic(m)) if m % s == 0 => Some(FieldElement::theta(field).pow((m / s) as u32)),
        _ => None,
    }
}

fn basis_images(sub: &Field, field: &Field) -> Option<Vec<FieldElement>> {
    let g = embed_generator(sub, field)?;
    let mut out = vec![FieldElement::one(field)];
    for _ in 1..sub.degree() {
        let next = out.last().unwrap().mul(&g);
        out.push(next);
    }
    Some(out)
}

/// The image of an element of `sub` in `field`.
pub fn lift(a: &FieldElement, field: &Field) -> Option<FieldElement> {
    let imgs = basis_images(a.field(), field)?;
    Some(
        a.coeffs()
            .iter()
            .zip(&imgs)
            .fold(FieldElement::zero(field), |acc, (c, b)| acc.add(&b.scale_rat(c))),
    )
}

/// `a` as an element of `sub`, or None when it does not lie there.
pub fn restrict(a: &FieldElement, sub: &Field) -> Option<FieldElement> {
    let imgs = basis_images(sub, a.field())?;
    let cols: Vec<Vec<Rational>> = imgs.iter().map(|b| b.coeffs()).collect();
    let n = a.field().degree();
    let m: Vec<Vec<Rational>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let x = solve_rational(&m, &a.coeffs())?;
    Some(FieldElement::from_coeffs(sub, &x))
}

/// Fixed field of the inertia generator at a ramified p: Q for quadratic
/// fields, Q(ζ_{m/p}) for Q(ζ_m).
pub fn inertia_fixed_field(field: &Field, p: u64) -> Result<Field, FieldError> {
    inertia_tau(field, p)?;
    match field.kind() {
        FieldKind::Cyclotomic(m) => cyclotomic(m / p),
        _ => Ok(rationals()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{quadratic, GaloisElement};

    #[test]
    fn restriction_inverts_lift() {
        let l = cyclotomic(15).unwrap();
        let sub = inertia_fixed_field(&l, 5).unwrap();
        assert_eq!(sub.kind(), FieldKind::Cyclotomic(3));
        let a = FieldElement::from_i64s(&sub, &[2, -7]);
        let up = lift(&a, &l).unwrap();
        assert_eq!(restrict(&up, &sub).unwrap(), a);
        let tau = inertia_tau(&l, 5).unwrap();
        assert_eq!(up.galois(&tau).unwrap(), up);
        // ζ_15 itself is moved by τ and does not descend
        assert!(restrict(&FieldElement::theta(&l), &sub).is_none());
    }

    #[test]
    fn quadratic_descends_to_rationals() {
        let k = quadratic(5).unwrap();
        let q = inertia_fixed_field(&k, 5).unwrap();
        assert_eq!(q.kind(), FieldKind::Rationals);
        let r = FieldElement::from_rational(&k, &Rational::from((3, 4)));
        assert_eq!(restrict(&r, &q).unwrap().as_rational().unwrap(), Rational::from((3, 4)));
        assert!(restrict(&FieldElement::theta(&k), &q).is_none());
        assert_eq!(GaloisElement::all(&k).len(), 2);
    }
}
