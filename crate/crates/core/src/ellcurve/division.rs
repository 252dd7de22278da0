use super::{ECPoint, EllipticCurve};
use crate::arith::fpoly::{self, Poly};
use crate::arith::{hensel_root, is_prime, modulo, rational_reconstruct, zpoly};
use crate::numfield::{primes_above, Field, FieldElement, PrimeIdeal};
use rug::ops::Pow;
use rug::{Integer, Rational};
use std::collections::HashMap;

/// 4x^3 + b2 x^2 + 2 b4 x + b6, whose roots are the x-coordinates of E[2] \ {O}.
pub fn two_torsion_polynomial(e: &EllipticCurve) -> Vec<Integer> {
    let [b2, b4, b6, _] = e.b();
    vec![b6, 2 * b4, b2, Integer::from(4)]
}

/// f_n from the recurrences for ψ_n, over any polynomial ring given by
/// `mul` and `sub`; `init` holds f_0..f_4 and `bsq` is (ψ_2^2)^2.
fn division_recurrence<P: Clone>(n: u64, init: [P; 5], bsq: &P, mul: &dyn Fn(&P, &P) -> P, sub: &dyn Fn(&P, &P) -> P) -> P {
    let mut memo: HashMap<u64, P> = init.into_iter().enumerate().map(|(i, f)| (i as u64, f)).collect();
    // Indices needed, generated top-down then evaluated bottom-up.
    let mut need = vec![n];
    let mut order: Vec<u64> = Vec::new();
    while let Some(k) = need.pop() {
        if memo.contains_key(&k) || order.contains(&k) {
            continue;
        }
        order.push(k);
        let m = k / 2;
        let deps: Vec<u64> = if k % 2 == 1 {
            vec![m - 1, m, m + 1, m + 2]
        } else {
            vec![m - 2, m - 1, m, m + 1, m + 2]
        };
        need.extend(deps);
    }
    order.sort();
    for k in order {
        let m = k / 2;
        let f = |i: u64| memo[&i].clone();
        let out = if k % 2 == 1 {
            let cube = |a: &P| mul(&mul(a, a), a);
            let t1 = mul(&f(m + 2), &cube(&f(m)));
            let t2 = mul(&f(m - 1), &cube(&f(m + 1)));
            if m % 2 == 0 {
                sub(&mul(&t1, bsq), &t2)
            } else {
                sub(&t1, &mul(&t2, bsq))
            }
        } else {
            let sq = |a: &P| mul(a, a);
            let inner = sub(&mul(&f(m + 2), &sq(&f(m - 1))), &mul(&f(m - 2), &sq(&f(m + 1))));
            mul(&f(m), &inner)
        };
        memo.insert(k, out);
    }
    memo.remove(&n).unwrap()
}

fn initial_polys(e: &EllipticCurve) -> [Vec<Integer>; 5] {
    let [b2, b4, b6, b8] = e.b();
    [
        vec![],
        vec![Integer::from(1)],
        vec![Integer::from(1)],
        vec![b8.clone(), 3 * b6.clone(), 3 * b4.clone(), b2.clone(), Integer::from(3)],
        vec![
            Integer::from(&b4 * &b8) - Integer::from(&b6 * &b6),
            Integer::from(&b2 * &b8) - Integer::from(&b4 * &b6),
            10 * b8.clone(),
            10 * b6.clone(),
            5 * b4.clone(),
            b2.clone(),
            Integer::from(2),
        ],
    ]
}

/// The division polynomial in x alone: ψ_n for odd n and ψ_n/ψ_2 for even n.
pub fn division_polynomial(e: &EllipticCurve, n: u64) -> Vec<Integer> {
    let b = two_torsion_polynomial(e);
    let bsq = zpoly::mul(&b, &b);
    let sub = |a: &Vec<Integer>, b: &Vec<Integer>| -> Vec<Integer> {
        let len = a.len().max(b.len());
        let mut out: Vec<Integer> = (0..len)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect();
        zpoly::trim(&mut out);
        out
    };
    let mul = |a: &Vec<Integer>, b: &Vec<Integer>| zpoly::mul(a, b);
    division_recurrence(n, initial_polys(e), &bsq, &mul, &sub)
}

/// The same polynomial reduced modulo ℓ, computed over F_ℓ throughout.
pub fn division_polynomial_mod(e: &EllipticCurve, n: u64, ell: u64) -> Poly {
    let red = |v: &[Integer]| fpoly::from_ints(v, ell);
    let init = initial_polys(e).map(|v| red(&v));
    let b = red(&two_torsion_polynomial(e));
    let bsq = fpoly::mul(&b, &b, ell);
    let mul = |a: &Poly, b: &Poly| fpoly::mul(a, b, ell);
    let sub = |a: &Poly, b: &Poly| fpoly::sub(a, b, ell);
    division_recurrence(n, init, &bsq, &mul, &sub)
}

/// Outcome of searching for roots in L of a polynomial over L.
#[derive(Clone, Debug)]
pub enum RootSearch {
    /// At some prime ℓ splitting completely in L the reduction has no root
    /// modulo one of the primes above ℓ, so no root lies in L.
    NoRoots { ell: u64 },
    /// Every residue tuple at ℓ was lifted and reconstructed; `roots` are
    /// the verified roots, distinct.
    Found { roots: Vec<FieldElement>, ell: u64 },
    /// The tuple count exceeded the budget or no usable prime was found.
    Incomplete { reason: String },
}

/// Primes above ℓ when ℓ splits completely in L.
fn split_primes(field: &Field, ell: u64) -> Option<Vec<PrimeIdeal>> {
    let ps = primes_above(field, ell).ok()?;
    if ps.len() == field.degree() && ps.iter().all(|p| p.e == 1 && p.f == 1) {
        Some(ps)
    } else {
        None
    }
}

/// Image of a coefficient at a degree-one prime with θ ↦ r modulo n.
fn image_mod(a: &FieldElement, r: &Integer, n: &Integer) -> Option<Integer> {
    let inv = a.den().clone().invert(n).ok()?;
    let v = modulo(zpoly::eval(a.num(), r), n);
    Some(modulo(v * inv, n))
}

/// Reduction of the polynomial at each split prime over F_ℓ.
fn reduce_at(poly: &[FieldElement], ps: &[PrimeIdeal], ell: u64) -> Option<Vec<Poly>> {
    let n = Integer::from(ell);
    let mut out = Vec::with_capacity(ps.len());
    for pr in ps {
        let r = Integer::from(pr.root?);
        let mut f: Poly = Vec::with_capacity(poly.len());
        for c in poly {
            f.push(image_mod(c, &r, &n)?.to_u64().unwrap());
        }
        let deg_ok = f.last().map(|&c| c != 0).unwrap_or(false);
        fpoly::trim(&mut f);
        if !deg_ok {
            return None;
        }
        let g = fpoly::gcd(&f, &fpoly::derivative(&f, ell), ell);
        if g.len() > 1 {
            return None;
        }
        out.push(f);
    }
    Some(out)
}

/// Solves V a = v (mod n) for the Vandermonde matrix V_{j,i} = r_j^i.
fn solve_vandermonde(rs: &[Integer], vs: &[Integer], n: &Integer, ell: u64) -> Vec<Integer> {
    let d = rs.len();
    let mut m: Vec<Vec<Integer>> = rs
        .iter()
        .zip(vs)
        .map(|(r, v)| {
            let mut row: Vec<Integer> = (0..d).map(|i| modulo(r.clone().pow(i as u32), n)).collect();
            row.push(v.clone());
            row
        })
        .collect();
    let ell = Integer::from(ell);
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_divisible(&ell)).expect("Vandermonde is invertible mod ℓ");
        m.swap(col, piv);
        let inv = m[col][col].clone().invert(n).unwrap();
        for k in col..=d {
            m[col][k] = modulo(Integer::from(&m[col][k] * &inv), n);
        }
        for r in 0..d {
            if r != col && m[r][col] != 0 {
                let f = m[r][col].clone();
                for k in col..=d {
                    let t = Integer::from(&f * &m[col][k]);
                    m[r][k] = modulo(&m[r][k] - t, n);
                }
            }
        }
    }
    m.into_iter().map(|row| row[d].clone()).collect()
}

/// Rational reconstruction with a safety margin of 32 bits below the
/// Wang bound, so random residues are rejected with high probability.
fn reconstruct_small(a: &Integer, n: &Integer) -> Option<Rational> {
    let r = rational_reconstruct(a, n)?;
    let limit = n.significant_bits() / 2 - 32;
    if r.numer().significant_bits() > limit || r.denom().significant_bits() > limit {
        return None;
    }
    Some(r)
}

fn eval_in_field(poly: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(x.field());
    for c in poly.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Lifts one residue tuple to a root in L, raising the p-adic precision
/// until reconstruction verifies or `max_bits` is reached.
fn lift_tuple(field: &Field, poly: &[FieldElement], ps: &[PrimeIdeal], tuple: &[u64], ell: u64, max_bits: u32) -> Option<FieldElement> {
    let bits_per = 64 - ell.leading_zeros();
    let mut digits = (256 / bits_per).max(4);
    while digits * bits_per <= max_bits {
        let n = Integer::from(ell).pow(digits);
        let mut rs = Vec::with_capacity(ps.len());
        let mut vs = Vec::with_capacity(ps.len());
        for (pr, &v) in ps.iter().zip(tuple) {
            let r = hensel_root(field.minpoly(), pr.root.unwrap(), ell, digits);
            let fj: Vec<Integer> = poly.iter().map(|c| image_mod(c, &r, &n).unwrap()).collect();
            vs.push(hensel_root(&fj, v, ell, digits));
            rs.push(r);
        }
        let coords = solve_vandermonde(&rs, &vs, &n, ell);
        let recon: Option<Vec<Rational>> = coords.iter().map(|c| reconstruct_small(c, &n)).collect();
        if let Some(q) = recon {
            let mut den = Integer::from(1);
            for c in &q {
                den.lcm_mut(c.denom());
            }
            let num: Vec<Integer> = q.iter().map(|c| c.numer() * Integer::from(&den / c.denom())).collect();
            let x = FieldElement::from_parts(field, num, den);
            if eval_in_field(poly, &x).is_zero() {
                return Some(x);
            }
        }
        digits *= 2;
    }
    None
}

/// Default precision cap for root reconstruction.
pub const ROOT_MAX_BITS: u32 = 8192;

/// Roots in L of Σ poly[i] X^i, via residues at primes splitting completely in L.
pub fn roots_in_field(field: &Field, poly: &[FieldElement], budget: u64) -> RootSearch {
    let mut poly = poly.to_vec();
    while poly.last().map(|c| c.is_zero()).unwrap_or(false) {
        poly.pop();
    }
    if poly.len() <= 1 {
        return RootSearch::Found { roots: vec![], ell: 0 };
    }
    let mut candidates: Vec<(u64, Vec<PrimeIdeal>, Vec<Vec<u64>>)> = Vec::new();
    let mut ell = 50u64;
    while candidates.len() < 6 && ell < 200_000 {
        ell += 1;
        if !is_prime(ell) {
            continue;
        }
        let Some(ps) = split_primes(field, ell) else { continue };
        let Some(reduced) = reduce_at(&poly, &ps, ell) else { continue };
        let roots: Vec<Vec<u64>> = reduced.iter().map(|f| fpoly::roots(f, ell)).collect();
        if roots.iter().any(|r| r.is_empty()) {
            return RootSearch::NoRoots { ell };
        }
        candidates.push((ell, ps, roots));
    }
    let Some((ell, ps, roots)) = candidates
        .into_iter()
        .min_by_key(|(_, _, rs)| rs.iter().map(|r| r.len() as u128).product::<u128>())
    else {
        return RootSearch::Incomplete {
            reason: "no usable split prime".into(),
        };
    };
    let count: u128 = roots.iter().map(|r| r.len() as u128).product();
    if count > budget as u128 {
        return RootSearch::Incomplete {
            reason: format!("{count} residue tuples at {ell} exceed the budget"),
        };
    }
    let mut found: Vec<FieldElement> = Vec::new();
    let mut idx = vec![0usize; roots.len()];
    loop {
        let tuple: Vec<u64> = idx.iter().zip(&roots).map(|(&i, r)| r[i]).collect();
        if let Some(x) = lift_tuple(field, &poly, &ps, &tuple, ell, ROOT_MAX_BITS) {
            if !found.contains(&x) {
                found.push(x);
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                found.sort_by_key(|x| x.to_string());
                return RootSearch::Found { roots: found, ell };
            }
            idx[k] += 1;
            if idx[k] < roots[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Nonzero points of E(L)[n] found by division-polynomial root search.
#[derive(Clone, Debug)]
pub struct TorsionSearch {
    pub n: u64,
    pub points: Vec<ECPoint>,
    /// Every root search ran to completion (no budget cut-off).
    pub exhaustive: bool,
    /// Primes whose residues ruled out x-coordinates in L.
    pub sieve_primes: Vec<u64>,
}

impl TorsionSearch {
    /// E(L)[n] = 0 is established.
    pub fn proves_trivial(&self) -> bool {
        self.exhaustive && self.points.is_empty()
    }
}

/// Whether the reduction of `f` has no root in F_ℓ for one of the first
/// few primes ℓ > n splitting completely in L; returns that ℓ.
fn sieve_mod_split_primes(field: &Field, n: u64, f: &dyn Fn(u64) -> Poly) -> Option<u64> {
    let mut tried = 0;
    let mut ell = n.max(50);
    while tried < 8 && ell < 200_000 {
        ell += 1;
        if !is_prime(ell) || split_primes(field, ell).is_none() {
            continue;
        }
        tried += 1;
        if fpoly::roots(&f(ell), ell).is_empty() {
            return Some(ell);
        }
    }
    None
}

/// A polynomial reduced mod a prime, and the same polynomial over Z.
type PolySource<'a> = (Box<dyn Fn(u64) -> Poly + 'a>, Box<dyn Fn() -> Vec<Integer> + 'a>);

/// Searches E(L)[n] \ {O} through the x-coordinate polynomials and then y.
pub fn torsion_points(e: &super::Curve, field: &Field, n: u64, budget: u64) -> TorsionSearch {
    let lift = |v: Vec<Integer>| -> Vec<FieldElement> { v.iter().map(|c| FieldElement::from_integer(field, c.clone())).collect() };
    let mut out = TorsionSearch {
        n,
        points: vec![],
        exhaustive: true,
        sieve_primes: vec![],
    };
    let mut xs: Vec<FieldElement> = Vec::new();
    let two = two_torsion_polynomial(e);
    let mut sources: Vec<PolySource<'_>> = vec![(Box::new(|ell| division_polynomial_mod(e, n, ell)), Box::new(|| division_polynomial(e, n)))];
    if n.is_multiple_of(2) {
        let t1 = two.clone();
        let t2 = two.clone();
        sources.push((Box::new(move |ell| fpoly::from_ints(&t1, ell)), Box::new(move || t2.clone())));
    }
    for (modular, integral) in &sources {
        if let Some(ell) = sieve_mod_split_primes(field, n, modular.as_ref()) {
            out.sieve_primes.push(ell);
            continue;
        }
        match roots_in_field(field, &lift(integral()), budget) {
            RootSearch::NoRoots { ell } => out.sieve_primes.push(ell),
            RootSearch::Found { roots, .. } => xs.extend(roots),
            RootSearch::Incomplete { .. } => out.exhaustive = false,
        }
    }
    let [a1, a2, a3, a4, a6] = e.coeffs_in(field);
    for x in xs {
        // y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6) = 0
        let lin = a1.mul(&x).add(&a3);
        let cst = x.mul(&x.mul(&x.add(&a2)).add(&a4)).add(&a6).neg();
        let disc = lin.square().sub(&cst.scale_i64(4));
        let ys = if disc.is_zero() {
            vec![lin.scale_rat(&Rational::from((-1, 2)))]
        } else {
            match roots_in_field(field, &[cst, lin, FieldElement::one(field)], budget) {
                RootSearch::NoRoots { .. } => vec![],
                RootSearch::Found { roots, .. } => roots,
                RootSearch::Incomplete { .. } => {
                    out.exhaustive = false;
                    vec![]
                }
            }
        };
        for y in ys {
            let pt = ECPoint::new(e, x.clone(), y).expect("root lies on the curve");
            assert!(pt.mul_int(&Integer::from(n)).is_zero(), "division-polynomial root is not {n}-torsion");
            out.points.push(pt);
        }
    }
    out.points.sort_by_key(|p| p.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::EllipticCurve;
    use crate::numfield::{cyclotomic, quadratic, rationals};

    #[test]
    fn division_polynomials_vanish_on_torsion() {
        // (0,0) has order 5 on y² + y = x³ - x²
        let e = EllipticCurve::from_i64s([0, -1, 1, 0, 0]).unwrap();
        let f5 = division_polynomial(&e, 5);
        assert_eq!(f5.len(), 13);
        assert_eq!(f5[0], 0);
        assert!(division_polynomial(&e, 3)[0] != 0);
        // oracle: ψ_n(P) vanishes exactly when [n]P = O for a point of order 5
        let q = rationals();
        let p = ECPoint::from_i64s(&e, &q, 0, 0).unwrap();
        let x0 = p.x().unwrap().num()[0].clone();
        for n in 2..=10u64 {
            let v = zpoly::eval(&division_polynomial(&e, n), &x0);
            assert_eq!(v == 0, n % 5 == 0, "n = {n}");
        }
        assert_eq!(division_polynomial(&e, 7).len(), 25);
        for ell in [7u64, 101] {
            assert_eq!(division_polynomial_mod(&e, 11, ell), fpoly::from_ints(&division_polynomial(&e, 11), ell));
            assert_eq!(division_polynomial_mod(&e, 8, ell), fpoly::from_ints(&division_polynomial(&e, 8), ell));
        }
    }

    #[test]
    fn rational_torsion_is_found() {
        let e = EllipticCurve::from_i64s([0, -1, 1, 0, 0]).unwrap();
        let q = rationals();
        let t = torsion_points(&e, &q, 5, 10_000);
        assert!(t.exhaustive);
        assert_eq!(t.points.len(), 4);
        let t3 = torsion_points(&e, &q, 3, 10_000);
        assert!(t3.proves_trivial());
    }

    #[test]
    fn two_torsion_over_quadratic_field() {
        // y² = x³ - 5x: 2-torsion x ∈ {0, ±√5}, rational over Q(√5)
        let e = EllipticCurve::from_i64s([0, 0, 0, -5, 0]).unwrap();
        let k = quadratic(5).unwrap();
        let t = torsion_points(&e, &k, 2, 10_000);
        assert!(t.exhaustive);
        assert_eq!(t.points.len(), 3);
        let t = torsion_points(&e, &rationals(), 2, 10_000);
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn roots_in_cyclotomic_field() {
        // X² + X + 1 has the roots ζ_3, ζ_3² in Q(ζ_9)
        let k = cyclotomic(9).unwrap();
        let one = FieldElement::one(&k);
        match roots_in_field(&k, &[one.clone(), one.clone(), one.clone()], 1000) {
            RootSearch::Found { roots, .. } => {
                assert_eq!(roots.len(), 2);
                for r in roots {
                    assert!(r.pow(3).sub(&one).is_zero());
                }
            }
            other => panic!("{other:?}"),
        }
        // X² - 2 has no root in Q(ζ_5)
        let k5 = cyclotomic(5).unwrap();
        let f = [FieldElement::from_int(&k5, -2), FieldElement::zero(&k5), FieldElement::one(&k5)];
        assert!(matches!(roots_in_field(&k5, &f, 1000), RootSearch::NoRoots { .. }));
    }
}
