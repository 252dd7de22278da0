//! Fixed test corpus: curves over Q with named points, and twist points
//! (x0, y) over Q(√d) with σP = -P.

use crate::ellcurve::{Curve, ECPoint, EllipticCurve};
use crate::numfield::{quadratic, rationals, FieldElement};
use rug::{Integer, Rational};

#[derive(Clone, Debug)]
pub struct CorpusCurve {
    pub name: &'static str,
    pub curve: Curve,
    /// Points of E(Q) of infinite order.
    pub nontorsion: Vec<ECPoint>,
    /// Nonzero torsion points of E(Q) with their orders.
    pub torsion: Vec<(ECPoint, u32)>,
}

fn rational_point(e: &Curve, x: i64, y: i64) -> ECPoint {
    ECPoint::from_i64s(e, &rationals(), x, y).expect("corpus point on curve")
}

fn entry(name: &'static str, a: [i64; 5], cm: Option<i64>, nontorsion: &[(i64, i64)], torsion: &[(i64, i64, u32)]) -> CorpusCurve {
    let curve = EllipticCurve::new(a.map(Integer::from), cm).expect("nonsingular corpus curve");
    CorpusCurve {
        name,
        nontorsion: nontorsion.iter().map(|&(x, y)| rational_point(&curve, x, y)).collect(),
        torsion: torsion.iter().map(|&(x, y, n)| (rational_point(&curve, x, y), n)).collect(),
        curve,
    }
}

/// y^2 + y = x^3 - x, y^2 = x^3 + x + 1, y^2 = x^3 - 2, y^2 + y = x^3,
/// y^2 + y = x^3 - x^2.
pub fn curves() -> Vec<CorpusCurve> {
    vec![
        entry("37a", [0, 0, 1, -1, 0], None, &[(0, 0), (1, 0), (2, -3)], &[]),
        entry("x3+x+1", [0, 0, 0, 1, 1], None, &[(0, 1), (0, -1), (72, 611)], &[]),
        entry("x3-2", [0, 0, 0, 0, -2], Some(-3), &[(3, 5), (3, -5)], &[]),
        entry("27a", [0, 0, 1, 0, 0], Some(-3), &[], &[(0, 0, 3), (0, -1, 3)]),
        entry("11a3", [0, -1, 1, 0, 0], None, &[], &[(0, 0, 5), (1, 0, 5), (1, -1, 5), (0, -1, 5)]),
    ]
}

pub fn by_name(name: &str) -> Option<CorpusCurve> {
    curves().into_iter().find(|c| c.name == name)
}

/// Points P over Q(√d) with x(P) = a/b^2 rational and σP = -P, found by
/// searching |a| <= a_max, 1 <= b <= b_max for 4x^3 + b2 x^2 + 2b4 x + b6 = d s^2.
pub fn twist_points(e: &Curve, d: i64, a_max: i64, b_max: i64) -> Vec<ECPoint> {
    let k = quadratic(d).expect("squarefree d");
    // √d in the power basis of θ
    let sqrt_d = if d.rem_euclid(4) == 1 {
        FieldElement::from_i64s(&k, &[-1, 2])
    } else {
        FieldElement::from_i64s(&k, &[0, 1])
    };
    let [a1, _, a3, _, _] = e.a().clone();
    let [b2, b4, b6, _] = e.b();
    let mut out = Vec::new();
    for b in 1..=b_max {
        for a in -a_max..=a_max {
            if crate::arith::gcd_u64(a.unsigned_abs(), b as u64) != 1 && a != 0 {
                continue;
            }
            let x = Rational::from((a, b * b));
            // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
            let x2 = Rational::from(x.square_ref());
            let rhs = Rational::from(&x2 * &x) * 4u32 + Rational::from(&x2 * &b2) + Rational::from(&x * &b4) * 2u32 + &b6;
            if rhs == 0 {
                continue;
            }
            let scaled = Rational::from(&rhs / d);
            let (num, den) = scaled.into_numer_denom();
            if num < 0 || !num.is_perfect_square() || !den.is_perfect_square() {
                continue;
            }
            let s = Rational::from((num.sqrt(), den.sqrt()));
            let base = -(Rational::from(&x * &a1) + &a3);
            let y = FieldElement::from_rational(&k, &base)
                .add(&sqrt_d.scale_rat(&s))
                .scale_rat(&Rational::from((1, 2)));
            let xk = FieldElement::from_rational(&k, &x);
            if let Ok(p) = ECPoint::new(e, xk, y) {
                out.push(p);
            }
        }
    }
    out
}

/// Base twist points over Q(√p), p in {5, 13, 17}, from a small search;
/// the other corpus curves have no twist points in that range.
pub fn twist_corpus() -> Vec<(&'static str, u64, ECPoint)> {
    let mut out = Vec::new();
    for (name, p) in [("27a", 5u64), ("27a", 17), ("11a3", 13), ("11a3", 17)] {
        let c = by_name(name).unwrap();
        for pt in twist_points(&c.curve, p as i64, 40, 2) {
            out.push((name, p, pt));
        }
    }
    out
}
