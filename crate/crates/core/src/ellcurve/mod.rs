//! Elliptic curves over Q with points over the supported abelian fields.

mod division;
mod formal;
mod goodprime;
mod jacobian;
mod reduction;

pub use division::{division_polynomial, division_polynomial_mod, roots_in_field, torsion_points, two_torsion_polynomial, RootSearch, TorsionSearch};
pub use formal::{formal_p_series, FormalPSeries};
pub use goodprime::{
    check_p_torsion, select_good_prime, torsion_free_by_reduction, GoodPrimeConfig, GoodPrimeReport, Mode, ReductionWitness, RejectedPrime, TorsionCheck,
};
pub use reduction::{
    count_points, count_points_ext, frobenius_annihilates, frobenius_image, frobenius_poly, is_ordinary, reduce_point, resultant_with_cyclotomic, torsion_test,
    FrobeniusData, ResPoint, ResidueCurve, TorsionWitness, DEFAULT_COUNT_BUDGET,
};

use crate::heights::ProjPoint;
use crate::numfield::{rationals, Field, FieldElement, FieldError, GaloisElement};
use rug::ops::Pow;
use rug::{Integer, Rational};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("singular Weierstrass equation")]
    Singular,
    #[error("point is not on the curve (residual {0})")]
    NotOnCurve(String),
    #[error("points lie on different curves or fields")]
    Mismatch,
    #[error("bad reduction at {0}")]
    BadPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} exceeds the enumeration budget; use diagnostic mode")]
    BudgetExceeded(u64),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("truncation order {order} cannot certify the [{p}]-series")]
    TruncationTooSmall { p: u64, order: usize },
    #[error("no admissible prime below {0}; use diagnostic mode or a larger budget")]
    NoPrimeInBudget(u64),
    #[error("[r]P != O for r = {0}")]
    ResultantWitnessFailed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Class-number-one j-invariants with their CM discriminants.
const CM_J: [(i64, i64); 13] = [
    (0, -3),
    (1728, -4),
    (-3375, -7),
    (8000, -8),
    (-32768, -11),
    (54000, -12),
    (287496, -16),
    (-884736, -19),
    (-12288000, -27),
    (16581375, -28),
    (-884736000, -43),
    (-147197952000, -67),
    (-262537412640768000, -163),
];

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticCurve {
    a: [Integer; 5],
    disc: Integer,
    cm: Option<i64>,
}

pub type Curve = Arc<EllipticCurve>;

impl EllipticCurve {
    /// Builds the curve; `cm` is a declared CM discriminant, otherwise the
    /// class-number-one j-invariants are recognized.
    pub fn new(a: [Integer; 5], cm: Option<i64>) -> Result<Curve, CurveError> {
        let mut e = EllipticCurve { a, disc: Integer::new(), cm };
        e.disc = e.compute_disc();
        if e.disc == 0 {
            return Err(CurveError::Singular);
        }
        if e.cm.is_none() {
            let j = e.j_invariant();
            if *j.denom() == 1 {
                e.cm = CM_J.iter().find(|(jj, _)| *j.numer() == *jj).map(|(_, d)| *d);
            }
        }
        Ok(Arc::new(e))
    }

    pub fn from_i64s(a: [i64; 5]) -> Result<Curve, CurveError> {
        EllipticCurve::new(a.map(Integer::from), None)
    }

    pub fn a(&self) -> &[Integer; 5] {
        &self.a
    }

    /// b2, b4, b6, b8.
    pub fn b(&self) -> [Integer; 4] {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = Integer::from(a1 * a1) + 4 * a2.clone();
        let b4 = Integer::from(a1 * a3) + 2 * a4.clone();
        let b6 = Integer::from(a3 * a3) + 4 * a6.clone();
        let b8 = Integer::from(a1 * a1) * a6 + 4 * Integer::from(a2 * a6) - Integer::from(a1 * a3) * a4 + Integer::from(a2 * a3) * a3 - Integer::from(a4 * a4);
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> Integer {
        let [b2, b4, _, _] = self.b();
        Integer::from(&b2 * &b2) - 24 * b4
    }

    fn compute_disc(&self) -> Integer {
        let [b2, b4, b6, b8] = self.b();
        -Integer::from(&b2 * &b2) * &b8 - 8 * Integer::from((&b4).pow(3u32)) - 27 * Integer::from(&b6 * &b6) + 9 * Integer::from(&b2 * &b4) * &b6
    }

    pub fn discriminant(&self) -> &Integer {
        &self.disc
    }

    pub fn j_invariant(&self) -> Rational {
        Rational::from((self.c4().pow(3u32), self.disc.clone()))
    }

    pub fn cm_discriminant(&self) -> Option<i64> {
        self.cm
    }

    pub fn is_cm(&self) -> bool {
        self.cm.is_some()
    }

    /// Good reduction at p for this model (p does not divide Δ).
    pub fn is_good(&self, p: u64) -> bool {
        !self.disc.is_divisible(&Integer::from(p))
    }

    /// Coefficients as elements of `field`.
    pub fn coeffs_in(&self, field: &Field) -> [FieldElement; 5] {
        self.a.clone().map(|c| FieldElement::from_integer(field, c))
    }

    /// Left side minus right side of the Weierstrass equation at (x, y).
    pub fn residual(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let [a1, a2, a3, a4, a6] = self.coeffs_in(x.field());
        let lhs = y.mul(&y.add(&a1.mul(x)).add(&a3));
        let rhs = x.mul(&x.mul(&x.add(&a2)).add(&a4)).add(&a6);
        lhs.sub(&rhs)
    }

    pub fn literal(&self) -> String {
        let [a1, a2, a3, a4, a6] = &self.a;
        format!("curve a1={a1} a2={a2} a3={a3} a4={a4} a6={a6}")
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        let term = |c: &Integer, m: &str, first: bool| -> String {
            if *c == 0 {
                return String::new();
            }
            let sign = if *c < 0 {
                " - "
            } else if first {
                ""
            } else {
                " + "
            };
            let abs = Integer::from(c.abs_ref());
            let coef = if abs == 1 && !m.is_empty() { String::new() } else { abs.to_string() };
            format!("{sign}{coef}{m}")
        };
        write!(
            f,
            "y^2{}{} = x^3{}{}{}",
            term(a1, "xy", false),
            term(a3, "y", false),
            term(a2, "x^2", false),
            term(a4, "x", false),
            term(a6, "", false)
        )
    }
}

/// A point of E(L): the identity O or an affine pair on the curve.
#[derive(Clone, Debug)]
pub struct ECPoint {
    curve: Curve,
    field: Field,
    xy: Option<(FieldElement, FieldElement)>,
}

impl ECPoint {
    pub fn infinity(curve: &Curve, field: &Field) -> ECPoint {
        ECPoint {
            curve: curve.clone(),
            field: field.clone(),
            xy: None,
        }
    }

    /// Affine point, checked exactly against the curve equation.
    pub fn new(curve: &Curve, x: FieldElement, y: FieldElement) -> Result<ECPoint, CurveError> {
        x.same_field(&y)?;
        let r = curve.residual(&x, &y);
        if !r.is_zero() {
            return Err(CurveError::NotOnCurve(r.to_string()));
        }
        Ok(ECPoint {
            curve: curve.clone(),
            field: x.field().clone(),
            xy: Some((x, y)),
        })
    }

    pub fn from_rationals(curve: &Curve, x: Rational, y: Rational) -> Result<ECPoint, CurveError> {
        let q = rationals();
        ECPoint::new(curve, FieldElement::from_rational(&q, &x), FieldElement::from_rational(&q, &y))
    }

    pub fn from_i64s(curve: &Curve, field: &Field, x: i64, y: i64) -> Result<ECPoint, CurveError> {
        ECPoint::new(curve, FieldElement::from_int(field, x), FieldElement::from_int(field, y))
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.xy.is_none()
    }

    pub fn xy(&self) -> Option<&(FieldElement, FieldElement)> {
        self.xy.as_ref()
    }

    pub fn x(&self) -> Option<&FieldElement> {
        self.xy.as_ref().map(|(x, _)| x)
    }

    pub fn y(&self) -> Option<&FieldElement> {
        self.xy.as_ref().map(|(_, y)| y)
    }

    /// The same point viewed over a field containing its coordinates.
    pub fn base_change(&self, field: &Field) -> Result<ECPoint, CurveError> {
        if field.kind() == self.field.kind() {
            return Ok(self.clone());
        }
        let lift = |a: &FieldElement| crate::numfield::lift(a, field).ok_or(CurveError::Mismatch);
        Ok(match &self.xy {
            None => ECPoint::infinity(&self.curve, field),
            Some((x, y)) => ECPoint {
                curve: self.curve.clone(),
                field: field.clone(),
                xy: Some((lift(x)?, lift(y)?)),
            },
        })
    }

    /// The same point over a subfield containing its coordinates.
    pub fn restrict(&self, sub: &Field) -> Option<ECPoint> {
        Some(match &self.xy {
            None => ECPoint::infinity(&self.curve, sub),
            Some((x, y)) => ECPoint {
                curve: self.curve.clone(),
                field: sub.clone(),
                xy: Some((crate::numfield::restrict(x, sub)?, crate::numfield::restrict(y, sub)?)),
            },
        })
    }

    fn check(&self, o: &ECPoint) -> Result<(), CurveError> {
        if self.curve != o.curve || self.field.kind() != o.field.kind() {
            return Err(CurveError::Mismatch);
        }
        Ok(())
    }

    pub fn neg(&self) -> ECPoint {
        match &self.xy {
            None => self.clone(),
            Some((x, y)) => {
                let [a1, _, a3, _, _] = self.curve.coeffs_in(&self.field);
                let ny = y.neg().sub(&a1.mul(x)).sub(&a3);
                ECPoint {
                    curve: self.curve.clone(),
                    field: self.field.clone(),
                    xy: Some((x.clone(), ny)),
                }
            }
        }
    }

    pub fn add(&self, o: &ECPoint) -> Result<ECPoint, CurveError> {
        self.check(o)?;
        Ok(self.add_unchecked(o))
    }

    fn add_unchecked(&self, o: &ECPoint) -> ECPoint {
        let ((x1, y1), (x2, y2)) = match (&self.xy, &o.xy) {
            (None, _) => return o.clone(),
            (_, None) => return self.clone(),
            (Some(p), Some(q)) => (p, q),
        };
        let [a1, a2, a3, a4, a6] = self.curve.coeffs_in(&self.field);
        let (lambda, nu) = if x1 == x2 {
            let denom = y1.add(y2).add(&a1.mul(x2)).add(&a3);
            if denom.is_zero() {
                return ECPoint::infinity(&self.curve, &self.field);
            }
            let x1sq = x1.square();
            let num_l = x1sq.scale_i64(3).add(&a2.mul(x1).scale_i64(2)).add(&a4).sub(&a1.mul(y1));
            let num_n = x1sq.mul(x1).neg().add(&a4.mul(x1)).add(&a6.scale_i64(2)).sub(&a3.mul(y1));
            let inv = denom.inv().unwrap();
            (num_l.mul(&inv), num_n.mul(&inv))
        } else {
            let inv = x2.sub(x1).inv().unwrap();
            (y2.sub(y1).mul(&inv), y1.mul(x2).sub(&y2.mul(x1)).mul(&inv))
        };
        let x3 = lambda.square().add(&a1.mul(&lambda)).sub(&a2).sub(x1).sub(x2);
        let y3 = lambda.add(&a1).mul(&x3).neg().sub(&nu).sub(&a3);
        ECPoint {
            curve: self.curve.clone(),
            field: self.field.clone(),
            xy: Some((x3, y3)),
        }
    }

    pub fn double(&self) -> ECPoint {
        self.add_unchecked(self)
    }

    pub fn sub(&self, o: &ECPoint) -> Result<ECPoint, CurveError> {
        self.add(&o.neg())
    }

    /// [k]P by double-and-add.
    pub fn mul_int(&self, k: &Integer) -> ECPoint {
        if let (Some((x, y)), true) = (&self.xy, self.field.degree() == 1 && k.significant_bits() > 8) {
            let (x, y) = (x.as_rational().unwrap(), y.as_rational().unwrap());
            return match jacobian::mul_rational(&self.curve, &x, &y, k) {
                None => ECPoint::infinity(&self.curve, &self.field),
                Some((x, y)) => ECPoint {
                    curve: self.curve.clone(),
                    field: self.field.clone(),
                    xy: Some((FieldElement::from_rational(&self.field, &x), FieldElement::from_rational(&self.field, &y))),
                },
            };
        }
        let base = if *k < 0 { self.neg() } else { self.clone() };
        let k = Integer::from(k.abs_ref());
        let mut acc = ECPoint::infinity(&self.curve, &self.field);
        for i in (0..k.significant_bits()).rev() {
            acc = acc.double();
            if k.get_bit(i) {
                acc = acc.add_unchecked(&base);
            }
        }
        acc
    }

    pub fn mul_i64(&self, k: i64) -> ECPoint {
        self.mul_int(&Integer::from(k))
    }

    /// σ(P), applying σ coordinatewise.
    pub fn galois(&self, g: &GaloisElement) -> Result<ECPoint, CurveError> {
        Ok(match &self.xy {
            None => self.clone(),
            Some((x, y)) => ECPoint {
                curve: self.curve.clone(),
                field: self.field.clone(),
                xy: Some((g.apply(x)?, g.apply(y)?)),
            },
        })
    }

    /// Σ_j c_j σ^j(P).
    pub fn apply_poly(&self, g: &GaloisElement, coeffs: &[Integer]) -> Result<ECPoint, CurveError> {
        // σP = ±P collapses Σ c_j σ^j P to one scalar multiple
        let image = self.galois(g)?;
        for sign in [1i64, -1] {
            if (sign == 1 && image == *self) || (sign == -1 && image == self.neg()) {
                let mut k = Integer::new();
                let mut s = Integer::from(1);
                for c in coeffs {
                    k += Integer::from(c * &s);
                    s *= sign;
                }
                return Ok(self.mul_int(&k));
            }
        }
        let mut acc = ECPoint::infinity(&self.curve, &self.field);
        let mut cur = self.clone();
        for (j, c) in coeffs.iter().enumerate() {
            if j > 0 {
                cur = cur.galois(g)?;
            }
            if *c != 0 {
                acc = acc.add_unchecked(&cur.mul_int(c));
            }
        }
        Ok(acc)
    }

    /// [1 : x] in P^1, with O ↦ [0 : 1].
    pub fn x_proj(&self) -> ProjPoint {
        let coords = match &self.xy {
            None => vec![FieldElement::zero(&self.field), FieldElement::one(&self.field)],
            Some((x, _)) => vec![FieldElement::one(&self.field), x.clone()],
        };
        ProjPoint::new(coords).expect("nonzero coordinates")
    }

    /// ψ(P) = [1 : x : y] in P^2, with O ↦ [0 : 0 : 1].
    pub fn psi(&self) -> ProjPoint {
        let coords = match &self.xy {
            None => vec![FieldElement::zero(&self.field), FieldElement::zero(&self.field), FieldElement::one(&self.field)],
            Some((x, y)) => vec![FieldElement::one(&self.field), x.clone(), y.clone()],
        };
        ProjPoint::new(coords).expect("nonzero coordinates")
    }

    pub fn literal(&self) -> String {
        match &self.xy {
            None => "point O".to_string(),
            Some((x, y)) => format!("point x={x} y={y}"),
        }
    }
}

impl PartialEq for ECPoint {
    fn eq(&self, o: &ECPoint) -> bool {
        self.curve == o.curve && self.field.kind() == o.field.kind() && self.xy == o.xy
    }
}

impl fmt::Display for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.xy {
            None => f.write_str("O"),
            Some((x, y)) => write!(f, "({x}, {y})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::quadratic;

    fn r(n: i64, d: i64) -> FieldElement {
        FieldElement::from_rational(&rationals(), &Rational::from((n, d)))
    }

    #[test]
    fn group_law_examples() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 0, -2]).unwrap();
        let q = rationals();
        let p = ECPoint::from_i64s(&e, &q, 3, 5).unwrap();
        let o = ECPoint::infinity(&e, &q);
        assert_eq!(p.add(&o).unwrap(), p);
        assert!(p.add(&p.neg()).unwrap().is_zero());
        // oracle: λ = 27/10, x = λ² - 6, y = -λ(x - 3) - 5 computed by hand
        assert_eq!(p.double(), ECPoint::new(&e, r(129, 100), r(-383, 1000)).unwrap());
        assert_eq!(e.cm_discriminant(), Some(-3));
    }

    #[test]
    fn off_curve_points_are_rejected() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 0, -2]).unwrap();
        assert!(matches!(ECPoint::from_i64s(&e, &rationals(), 3, 4), Err(CurveError::NotOnCurve(_))));
        assert_eq!(EllipticCurve::from_i64s([0, 0, 0, 0, 0]).unwrap_err(), CurveError::Singular);
    }

    #[test]
    fn group_axioms_on_37a() {
        let e = EllipticCurve::from_i64s([0, 0, 1, -1, 0]).unwrap();
        assert_eq!(*e.discriminant(), 37);
        assert!(!e.is_cm());
        let q = rationals();
        let p = ECPoint::from_i64s(&e, &q, 0, 0).unwrap();
        let p2 = p.double();
        let p3 = p2.add(&p).unwrap();
        let p5 = p.mul_i64(5);
        assert_eq!(p5, p3.add(&p2).unwrap());
        assert_eq!(p2.add(&p3).unwrap().add(&p).unwrap(), p2.add(&p3.add(&p).unwrap()).unwrap());
        assert_eq!(p.mul_i64(-3), p3.neg());
        assert!(p.mul_i64(0).is_zero());
    }

    #[test]
    fn rational_points_are_galois_fixed() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 0, -2]).unwrap();
        let k = quadratic(5).unwrap();
        let p = ECPoint::from_i64s(&e, &k, 3, 5).unwrap();
        let conj = k.galois_group()[1];
        assert_eq!(p.galois(&conj).unwrap(), p);
        let lifted = ECPoint::from_i64s(&e, &rationals(), 3, 5).unwrap().base_change(&k).unwrap();
        assert_eq!(lifted, p);
    }
}
