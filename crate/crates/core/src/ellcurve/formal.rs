use super::{CurveError, EllipticCurve};
use crate::arith::{int_mod_u64, invmod, mulmod};
use serde::{Deserialize, Serialize};

/// The series [p](T) of the formal group of Ẽ/F_p, truncated below T^order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalPSeries {
    pub p: u64,
    pub order: usize,
    pub coeffs: Vec<u64>,
}

impl FormalPSeries {
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    /// Every nonzero coefficient sits at an index divisible by p.
    pub fn is_series_in_t_p(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(j, &c)| c == 0 || (j as u64).is_multiple_of(self.p))
    }
}

/// Truncated power series arithmetic over F_p.
struct Ring {
    p: u64,
    n: usize,
}

impl Ring {
    fn zero(&self) -> Vec<u64> {
        vec![0; self.n]
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| mulmod(x, c % self.p, self.p)).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().take(self.n - i) {
                out[i + j] = (out[i + j] + mulmod(x, y, self.p)) % self.p;
            }
        }
        out
    }

    fn pow(&self, a: &[u64], k: usize) -> Vec<u64> {
        let mut r = self.one();
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.p;
        v
    }

    fn monomial(&self, k: usize) -> Vec<u64> {
        let mut v = self.zero();
        if k < self.n {
            v[k] = 1;
        }
        v
    }

    /// 1/a for a with unit constant term.
    fn inv(&self, a: &[u64]) -> Vec<u64> {
        let c0 = invmod(a[0], self.p).expect("unit constant term");
        let mut out = self.zero();
        out[0] = c0;
        for k in 1..self.n {
            let mut s = 0u64;
            for j in 1..=k {
                s = (s + mulmod(a[j], out[k - j], self.p)) % self.p;
            }
            out[k] = mulmod((self.p - s) % self.p, c0, self.p);
        }
        out
    }

    /// f(g) for a series g without constant term.
    fn compose(&self, f: &[u64], g: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        for &c in f.iter().rev() {
            out = self.add(&self.mul(&out, g), &self.scale(&self.one(), c));
        }
        out
    }
}

/// w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3, by fixed-point iteration.
/// One extra coefficient is kept so that (w(z2) - w(z1))/(z2 - z1) is exact below T^n.
fn w_series(r: &Ring, a: &[u64; 5]) -> Vec<u64> {
    let r = &Ring { p: r.p, n: r.n + 1 };
    let z = r.monomial(1);
    let z2 = r.monomial(2);
    let mut w = r.zero();
    for _ in 0..r.n {
        let w2 = r.mul(&w, &w);
        let mut next = r.monomial(3);
        next = r.add(&next, &r.scale(&r.mul(&z, &w), a[0]));
        next = r.add(&next, &r.scale(&r.mul(&z2, &w), a[1]));
        next = r.add(&next, &r.scale(&w2, a[2]));
        next = r.add(&next, &r.scale(&r.mul(&z, &w2), a[3]));
        next = r.add(&next, &r.scale(&r.mul(&w2, &w), a[4]));
        w = next;
    }
    w
}

/// F(z1, z2) with z1 = T and z2 = s(T).
fn group_law(r: &Ring, a: &[u64; 5], w: &[u64], s: &[u64]) -> Vec<u64> {
    let t = r.monomial(1);
    // λ = Σ_n w_n (z2^n - z1^n)/(z2 - z1)
    let mut lambda = r.zero();
    let s_pows: Vec<Vec<u64>> = (0..r.n).map(|i| r.pow(s, i)).collect();
    for (n, &wn) in w.iter().enumerate().filter(|(_, c)| **c != 0) {
        let mut q = r.zero();
        for i in 0..n {
            q = r.add(&q, &r.mul(&s_pows[i], &r.monomial(n - 1 - i)));
        }
        lambda = r.add(&lambda, &r.scale(&q, wn));
    }
    let nu = r.sub(&w[..r.n], &r.mul(&lambda, &t));
    let l2 = r.mul(&lambda, &lambda);
    let l3 = r.mul(&l2, &lambda);
    // z1 + z2 + z3 = -(z^2 coefficient)/(z^3 coefficient) after substituting w = λz + ν
    let mut num = r.scale(&lambda, a[0]);
    num = r.add(&num, &r.scale(&l2, a[2]));
    num = r.add(&num, &r.scale(&nu, a[1]));
    num = r.add(&num, &r.scale(&r.mul(&lambda, &nu), 2 * a[3]));
    num = r.add(&num, &r.scale(&r.mul(&l2, &nu), 3 * a[4]));
    let mut den = r.one();
    den = r.add(&den, &r.scale(&lambda, a[1]));
    den = r.add(&den, &r.scale(&l2, a[3]));
    den = r.add(&den, &r.scale(&l3, a[4]));
    let z3 = r.sub(&r.sub(&r.sub(&r.zero(), &r.mul(&num, &r.inv(&den))), &t), s);
    // inverse: i(z) = -z / (1 - a1 z - a3 w(z))
    let w3 = r.compose(&w[..r.n], &z3);
    let d = r.sub(&r.sub(&r.one(), &r.scale(&z3, a[0])), &r.scale(&w3, a[2]));
    r.sub(&r.zero(), &r.mul(&z3, &r.inv(&d)))
}

/// [p](T) for the formal group of Ẽ/F_p, truncated below T^order.
pub fn formal_p_series(e: &EllipticCurve, p: u64, order: usize) -> Result<FormalPSeries, CurveError> {
    if !crate::arith::is_prime(p) {
        return Err(CurveError::NotPrime(p));
    }
    if !e.is_good(p) {
        return Err(CurveError::BadPrime(p));
    }
    if order < p as usize + 1 {
        return Err(CurveError::TruncationTooSmall { p, order });
    }
    let r = Ring { p, n: order };
    let a: [u64; 5] = e.a().clone().map(|c| int_mod_u64(&c, p));
    let w = w_series(&r, &a);
    let t = r.monomial(1);
    let mut s = t.clone();
    for _ in 1..p {
        s = group_law(&r, &a, &w, &s);
    }
    let series = FormalPSeries { p, order, coeffs: s };
    assert!(series.is_series_in_t_p(), "[p]-series is not a series in T^p");
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_coefficients_vanish() {
        let curves = [[0, 0, 1, -1, 0], [0, 0, 0, 1, 1], [0, -1, 1, 0, 0], [1, 0, 0, 0, 1]];
        for a in curves {
            let e = EllipticCurve::from_i64s(a).unwrap();
            for p in [2u64, 3, 5, 7].into_iter().filter(|&p| e.is_good(p)) {
                let s = formal_p_series(&e, p, 2 * p as usize + 1).unwrap();
                assert!(s.first_nonzero().unwrap_or(usize::MAX) >= p as usize);
            }
        }
    }

    #[test]
    fn height_detects_ordinarity() {
        let e = EllipticCurve::from_i64s([0, 0, 0, 1, 1]).unwrap();
        let s = formal_p_series(&e, 5, 11).unwrap();
        assert_eq!(s.first_nonzero(), Some(5));
        let ss = EllipticCurve::from_i64s([0, 0, 1, 0, 0]).unwrap();
        let s = formal_p_series(&ss, 2, 5).unwrap();
        assert_eq!(s.coeffs[2], 0);
        assert_eq!(s.first_nonzero(), Some(4));
        assert!(matches!(formal_p_series(&ss, 2, 2), Err(CurveError::TruncationTooSmall { .. })));
    }

    #[test]
    fn inverse_series_cancels() {
        let e = EllipticCurve::from_i64s([1, -1, 1, 2, 3]).unwrap();
        let p = 13;
        let r = Ring { p, n: 9 };
        let a: [u64; 5] = e.a().clone().map(|c| int_mod_u64(&c, p));
        let w = w_series(&r, &a);
        let t = r.monomial(1);
        let d = r.sub(&r.sub(&r.one(), &r.scale(&t, a[0])), &r.scale(&w, a[2]));
        let inv = r.sub(&r.zero(), &r.mul(&t, &r.inv(&d)));
        assert_eq!(group_law(&r, &a, &w, &inv), r.zero());
        // [2]T = 2T - a1 T^2 + O(T^3)
        let two = group_law(&r, &a, &w, &t);
        assert_eq!((two[1], two[2]), (2, (p - a[0]) % p));
    }
}
