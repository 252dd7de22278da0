use super::{CurveError, ECPoint, EllipticCurve};
use crate::arith::is_prime;
use crate::numfield::{frobenius_element, reduce_element, valuation, PrimeIdeal, ResidueElem, ResidueField, Valuation};
use rug::ops::Pow;
use rug::Integer;
use serde::{Deserialize, Serialize};

/// Largest p counted by enumeration unless the caller raises it.
pub const DEFAULT_COUNT_BUDGET: u64 = 1_000_000;

/// A point of the reduced curve: None is the identity.
pub type ResPoint = Option<(ResidueElem, ResidueElem)>;

/// The reduction of an integral model modulo a prime, over its residue field.
#[derive(Clone, Debug)]
pub struct ResidueCurve {
    pub k: ResidueField,
    pub a: [ResidueElem; 5],
}

impl ResidueCurve {
    pub fn new(e: &EllipticCurve, k: ResidueField) -> Result<Self, CurveError> {
        if !e.is_good(k.p) {
            return Err(CurveError::BadPrime(k.p));
        }
        let a = e.a().clone().map(|c| k.from_u64(crate::arith::int_mod_u64(&c, k.p)));
        Ok(ResidueCurve { k, a })
    }

    pub fn contains(&self, pt: &ResPoint) -> bool {
        let Some((x, y)) = pt else { return true };
        let k = &self.k;
        let [a1, a2, a3, a4, a6] = &self.a;
        let lhs = k.mul(y, &k.add(&k.add(y, &k.mul(a1, x)), a3));
        let rhs = k.add(&k.mul(x, &k.add(&k.mul(x, &k.add(x, a2)), a4)), a6);
        lhs == rhs
    }

    pub fn neg(&self, pt: &ResPoint) -> ResPoint {
        let (x, y) = pt.as_ref()?;
        let k = &self.k;
        let ny = k.sub(&k.neg(y), &k.add(&k.mul(&self.a[0], x), &self.a[2]));
        Some((x.clone(), ny))
    }

    pub fn add(&self, p: &ResPoint, q: &ResPoint) -> ResPoint {
        let ((x1, y1), (x2, y2)) = match (p, q) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let k = &self.k;
        let [a1, a2, a3, a4, a6] = &self.a;
        let (lambda, nu) = if x1 == x2 {
            let den = k.add(&k.add(&k.add(y1, y2), &k.mul(a1, x2)), a3);
            let inv = k.inv(&den)?;
            let x1sq = k.mul(x1, x1);
            let nl = k.sub(&k.add(&k.add(&k.scale(&x1sq, 3), &k.scale(&k.mul(a2, x1), 2)), a4), &k.mul(a1, y1));
            let nn = k.sub(&k.add(&k.add(&k.neg(&k.mul(&x1sq, x1)), &k.mul(a4, x1)), &k.scale(a6, 2)), &k.mul(a3, y1));
            (k.mul(&nl, &inv), k.mul(&nn, &inv))
        } else {
            let inv = k.inv(&k.sub(x2, x1)).unwrap();
            (k.mul(&k.sub(y2, y1), &inv), k.mul(&k.sub(&k.mul(y1, x2), &k.mul(y2, x1)), &inv))
        };
        let x3 = k.sub(&k.sub(&k.sub(&k.add(&k.mul(&lambda, &lambda), &k.mul(a1, &lambda)), a2), x1), x2);
        let y3 = k.sub(&k.sub(&k.neg(&k.mul(&k.add(&lambda, a1), &x3)), &nu), a3);
        Some((x3, y3))
    }

    pub fn mul_int(&self, pt: &ResPoint, n: &Integer) -> ResPoint {
        let base = if *n < 0 { self.neg(pt) } else { pt.clone() };
        let n = Integer::from(n.abs_ref());
        let mut acc: ResPoint = None;
        for i in (0..n.significant_bits()).rev() {
            acc = self.add(&acc, &acc);
            if n.get_bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }
}

/// Image of P under reduction modulo 𝔓; points with a pole in x reduce to Õ.
pub fn reduce_point(pt: &ECPoint, pr: &PrimeIdeal) -> Result<ResPoint, CurveError> {
    if !pt.curve().is_good(pr.p) {
        return Err(CurveError::BadPrime(pr.p));
    }
    let Some((x, y)) = pt.xy() else { return Ok(None) };
    if let Valuation::Finite(v) = valuation(x, pr) {
        if v < 0 {
            // [x : y : 1] rescaled by a uniformizer power becomes [0 : 1 : 0]
            return Ok(None);
        }
    }
    Ok(Some((reduce_element(x, pr)?, reduce_element(y, pr)?)))
}

fn check_count_prime(e: &EllipticCurve, p: u64, budget: u64) -> Result<(), CurveError> {
    if !is_prime(p) {
        return Err(CurveError::NotPrime(p));
    }
    if !e.is_good(p) {
        return Err(CurveError::BadPrime(p));
    }
    if p > budget {
        return Err(CurveError::BudgetExceeded(p));
    }
    Ok(())
}

/// #Ẽ(F_p) by enumeration of x, and a_p = p + 1 - #Ẽ(F_p).
pub fn count_points(e: &EllipticCurve, p: u64, budget: u64) -> Result<(u64, i64), CurveError> {
    check_count_prime(e, p, budget)?;
    let a: Vec<u64> = e.a().iter().map(|c| crate::arith::int_mod_u64(c, p)).collect();
    let (a1, a2, a3, a4, a6) = (a[0], a[1], a[2], a[3], a[4]);
    let mut n: u64 = 1;
    if p == 2 {
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = (y * y + a1 * x * y + a3 * y) % 2;
                let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                if lhs == rhs {
                    n += 1;
                }
            }
        }
    } else {
        let mut square = vec![false; p as usize];
        for t in 0..p {
            square[(t * t % p) as usize] = true;
        }
        let pm = p as u128;
        for x in 0..p as u128 {
            let r = (((x + a2 as u128) * x % pm + a4 as u128) * x % pm + a6 as u128) % pm;
            let s = (a1 as u128 * x + a3 as u128) % pm;
            let d = ((s * s + 4 * r) % pm) as usize;
            n += if d == 0 {
                1
            } else if square[d] {
                2
            } else {
                0
            };
        }
    }
    Ok((n, p as i64 + 1 - n as i64))
}

/// #Ẽ(F_{p^f}) = p^f + 1 - (α^f + β^f) from a_p.
pub fn count_points_ext(a_p: i64, p: u64, f: u32) -> Integer {
    let mut s_prev = Integer::from(2);
    let mut s = Integer::from(a_p);
    for _ in 1..f {
        let next = Integer::from(&s * a_p) - Integer::from(&s_prev * p);
        s_prev = std::mem::replace(&mut s, next);
    }
    Integer::from(p).pow(f) + 1 - s
}

/// Φ_p(X) = X^2 - a_p X + p, stored low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusData {
    pub p: u64,
    pub a_p: i64,
    pub coeffs: [i64; 3],
}

impl FrobeniusData {
    pub fn coeff_integers(&self) -> Vec<Integer> {
        self.coeffs.iter().map(|&c| Integer::from(c)).collect()
    }

    /// Φ_p(t) at an integer.
    pub fn eval(&self, t: i64) -> Integer {
        Integer::from(t) * t - Integer::from(self.a_p) * t + self.p
    }

    /// Roots have modulus √p: a_p^2 <= 4p.
    pub fn satisfies_hasse(&self) -> bool {
        (self.a_p as i128).pow(2) <= 4 * self.p as i128
    }

    /// Each |a_i| <= (4q)^g with g = 1.
    pub fn satisfies_coefficient_bound(&self) -> bool {
        self.coeffs.iter().all(|c| c.unsigned_abs() <= 4 * self.p)
    }

    pub fn literal(&self) -> String {
        let a = -self.a_p;
        let mid = match a {
            0 => String::new(),
            1 => " + X".to_string(),
            -1 => " - X".to_string(),
            a if a > 0 => format!(" + {a}X"),
            a => format!(" - {}X", -a),
        };
        format!("X^2{mid} + {}", self.p)
    }
}

pub fn frobenius_poly(e: &EllipticCurve, p: u64, budget: u64) -> Result<FrobeniusData, CurveError> {
    let (_, a_p) = count_points(e, p, budget)?;
    let data = FrobeniusData {
        p,
        a_p,
        coeffs: [p as i64, -a_p, 1],
    };
    assert!(data.satisfies_hasse(), "Hasse bound violated at p = {p}");
    assert!(data.satisfies_coefficient_bound(), "coefficient bound violated at p = {p}");
    Ok(data)
}

pub fn is_ordinary(e: &EllipticCurve, p: u64, budget: u64) -> Result<bool, CurveError> {
    let (_, a_p) = count_points(e, p, budget)?;
    Ok(a_p.rem_euclid(p as i64) != 0)
}

/// Res(Φ_p(X), X^m - 1) = Π_{α} (α^m - 1) = p^m - (α^m + β^m) + 1.
pub fn resultant_with_cyclotomic(phi: &FrobeniusData, m: u64) -> Integer {
    assert!(m >= 1);
    let mut s_prev = Integer::from(2);
    let mut s = Integer::from(phi.a_p);
    for _ in 1..m {
        let next = Integer::from(&s * phi.a_p) - Integer::from(&s_prev * phi.p);
        s_prev = std::mem::replace(&mut s, next);
    }
    let r = Integer::from(phi.p).pow(m as u32) - s + 1;
    assert!(r != 0, "resultant vanished");
    r
}

fn check_unramified_good(pt: &ECPoint, p: u64) -> Result<(), CurveError> {
    if !pt.curve().is_good(p) {
        return Err(CurveError::BadPrime(p));
    }
    if pt.field().is_ramified(p) {
        return Err(CurveError::Hypothesis(format!("{p} ramifies in {}", pt.field().literal())));
    }
    Ok(())
}

/// Φ_p(σ)P = [p]P - [a_p]σP + σ²P for σ the Frobenius at p.
pub fn frobenius_image(pt: &ECPoint, phi: &FrobeniusData) -> Result<ECPoint, CurveError> {
    check_unramified_good(pt, phi.p)?;
    let sigma = frobenius_element(pt.field(), phi.p)?;
    pt.apply_poly(&sigma, &phi.coeff_integers())
}

/// Whether Φ_p(σ)P reduces to Õ modulo 𝔓.
pub fn frobenius_annihilates(pt: &ECPoint, phi: &FrobeniusData, pr: &PrimeIdeal) -> Result<bool, CurveError> {
    if pr.p != phi.p {
        return Err(CurveError::Hypothesis(format!("prime {} does not lie above {}", pr.label(), phi.p)));
    }
    let q = frobenius_image(pt, phi)?;
    Ok(reduce_point(&q, pr)?.is_none())
}

/// Outcome of the Frobenius torsion test.
#[derive(Clone, Debug)]
pub enum TorsionWitness {
    /// Φ_p(σ)P = O, and [r]P = O for r = Res(Φ_p, X^m - 1).
    Torsion { r: Integer, m: u64 },
    /// Φ_p(σ)P != O.
    NonTorsion { q: ECPoint },
}

pub fn torsion_test(pt: &ECPoint, phi: &FrobeniusData) -> Result<TorsionWitness, CurveError> {
    let q = frobenius_image(pt, phi)?;
    if !q.is_zero() {
        return Ok(TorsionWitness::NonTorsion { q });
    }
    let m = frobenius_element(pt.field(), phi.p)?.order();
    let r = resultant_with_cyclotomic(phi, m);
    if !pt.mul_int(&r).is_zero() {
        return Err(CurveError::ResultantWitnessFailed(r.to_string()));
    }
    Ok(TorsionWitness::Torsion { r, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::EllipticCurve;
    use crate::numfield::{primes_above, rationals};

    #[test]
    fn counting_examples() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 1, 1]).unwrap();
        assert_eq!(count_points(&e, 5, 100).unwrap(), (9, -3));
        let phi = frobenius_poly(&e, 5, 100).unwrap();
        assert_eq!(phi.literal(), "X^2 + 3X + 5");
        assert!(is_ordinary(&e, 5, 100).unwrap());
        let ss = EllipticCurve::from_i64s([0, 0, 1, 0, 0]).unwrap();
        assert_eq!(count_points(&ss, 2, 100).unwrap(), (3, 0));
        assert!(!is_ordinary(&ss, 2, 100).unwrap());
        assert!(matches!(count_points(&ss, 3, 100), Err(CurveError::BadPrime(3))));
        assert!(matches!(count_points(&e, 101, 100), Err(CurveError::BudgetExceeded(101))));
    }

    #[test]
    fn counting_matches_legendre_oracle() {
        // oracle: N = p + 1 + Σ_x (x³ + x + 1 / p)
        let e = EllipticCurve::from_i64s([0, 0, 0, 1, 1]).unwrap();
        for p in crate::arith::primes_up_to(200).into_iter().filter(|&p| p > 2 && e.is_good(p)) {
            let s: i64 = (0..p as i64).map(|x| crate::arith::kronecker(x * x * x + x + 1, p) as i64).sum();
            assert_eq!(count_points(&e, p, 1000).unwrap().0 as i64, p as i64 + 1 + s);
        }
    }

    #[test]
    fn extension_counts_match_enumeration() {
        // #E(F_25) for y² = x³ + x + 1 via explicit F_25 enumeration
        let e = EllipticCurve::from_i64s([0, 0, 0, 1, 1]).unwrap();
        let k = ResidueField::new(5, vec![2, 0, 1]);
        let c = ResidueCurve::new(&e, k.clone()).unwrap();
        let els = k.elements();
        let mut n = 1u64;
        for x in &els {
            for y in &els {
                if c.contains(&Some((x.clone(), y.clone()))) {
                    n += 1;
                }
            }
        }
        assert_eq!(count_points_ext(-3, 5, 2), n);
    }

    #[test]
    fn resultant_examples() {
        let phi = FrobeniusData {
            p: 5,
            a_p: -3,
            coeffs: [5, 3, 1],
        };
        assert_eq!(resultant_with_cyclotomic(&phi, 1), 9);
        assert_eq!(resultant_with_cyclotomic(&phi, 2), 27);
        // oracle: Π Φ(ζ) over complex m-th roots of unity
        for m in 1..12u64 {
            let mut re = 1.0f64;
            let mut im = 0.0f64;
            for j in 0..m {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let (zr, zi) = (t.cos(), t.sin());
                let (fr, fi) = (zr * zr - zi * zi + 3.0 * zr + 5.0, 2.0 * zr * zi + 3.0 * zi);
                let nr = re * fr - im * fi;
                im = re * fi + im * fr;
                re = nr;
            }
            let r = resultant_with_cyclotomic(&phi, m).to_f64();
            assert!((r - re).abs() < 1e-6 * r.abs().max(1.0), "m = {m}");
        }
    }

    #[test]
    fn reduction_examples() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 0, -2]).unwrap();
        let q = rationals();
        let p = ECPoint::from_i64s(&e, &q, 3, 5).unwrap();
        let pr = &primes_above(&q, 7).unwrap()[0];
        assert_eq!(reduce_point(&p, pr).unwrap(), Some((vec![3], vec![5])));
        assert_eq!(reduce_point(&ECPoint::infinity(&e, &q), pr).unwrap(), None);
        let c = ResidueCurve::new(&e, pr.residue_field()).unwrap();
        let p2 = p.double();
        assert_eq!(
            reduce_point(&p2, pr).unwrap(),
            c.add(&reduce_point(&p, pr).unwrap(), &reduce_point(&p, pr).unwrap())
        );
        let bad = &primes_above(&q, 3).unwrap()[0];
        assert!(matches!(reduce_point(&p, bad), Err(CurveError::BadPrime(3))));
    }

    #[test]
    fn torsion_test_examples() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 0, -2]).unwrap();
        let q = rationals();
        let p = ECPoint::from_i64s(&e, &q, 3, 5).unwrap();
        for ell in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let phi = frobenius_poly(&e, ell, 1000).unwrap();
            assert!(matches!(torsion_test(&p, &phi).unwrap(), TorsionWitness::NonTorsion { .. }));
        }
        let o = ECPoint::infinity(&e, &q);
        let phi = frobenius_poly(&e, 5, 1000).unwrap();
        assert!(matches!(torsion_test(&o, &phi).unwrap(), TorsionWitness::Torsion { .. }));
        // (0,0) is 5-torsion on y² + y = x³ - x²
        let e11 = EllipticCurve::from_i64s([0, -1, 1, 0, 0]).unwrap();
        let t = ECPoint::from_i64s(&e11, &q, 0, 0).unwrap();
        let phi = frobenius_poly(&e11, 3, 1000).unwrap();
        match torsion_test(&t, &phi).unwrap() {
            TorsionWitness::Torsion { r, .. } => assert!(t.mul_int(&r).is_zero()),
            w => panic!("{w:?}"),
        }
    }
}
