//! Integer and prime-field helpers: primality, modular arithmetic, and
//! polynomials over Z and F_p.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor_u64(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut k = 1;
    let mut x = a % m;
    while x != 1 {
        x = mulmod(x, a, m);
        k += 1;
    }
    k
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &Integer, p: u64) -> u32 {
    assert!(*n != 0);
    let mut n = n.clone().abs();
    let pi = Integer::from(p);
    if p == 2 {
        return n.find_one(0).unwrap();
    }
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem_ref(&pi).into();
        let (q, r): (Integer, Integer) = (q, r);
        if r != 0 {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(r: &Rational, p: u64) -> i64 {
    val_int(r.numer(), p) as i64 - val_int(r.denom(), p) as i64
}

/// Kronecker symbol (d / p) for a prime p.
pub fn kronecker(d: i64, p: u64) -> i32 {
    if p == 2 {
        if d % 2 == 0 {
            return 0;
        }
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if powmod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Reduction of an integer modulo a 64-bit modulus, in `[0, m)`.
pub fn int_mod_u64(n: &Integer, m: u64) -> u64 {
    let mi = Integer::from(m);
    modulo(Integer::from(n % &mi), &mi).to_u64().unwrap()
}

/// Least nonnegative residue of `x` modulo `m > 0`.
pub fn modulo(x: Integer, m: &Integer) -> Integer {
    let mut r = x % m;
    if r < 0 {
        r += m;
    }
    r
}

/// Reduction of a p-integral rational modulo `p`.
pub fn rat_mod(r: &Rational, p: u64) -> Option<u64> {
    let d = int_mod_u64(r.denom(), p);
    let inv = invmod(d, p)?;
    Some(mulmod(int_mod_u64(r.numer(), p), inv, p))
}

/// Integer polynomial helpers; coefficient vectors are low degree first.
pub mod zpoly {
    use rug::Integer;

    pub fn trim(a: &mut Vec<Integer>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    pub fn mul(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Integer::new(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// Exact quotient by a monic divisor; panics if the remainder is nonzero.
    pub fn div_exact_monic(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
        let (q, r) = divrem_monic(a, b);
        assert!(r.iter().all(|c| *c == 0), "inexact polynomial division");
        q
    }

    pub fn divrem_monic(a: &[Integer], b: &[Integer]) -> (Vec<Integer>, Vec<Integer>) {
        let db = b.len() - 1;
        assert!(b[db] == 1);
        let mut r = a.to_vec();
        if r.len() <= db {
            return (vec![Integer::new()], r);
        }
        let mut q = vec![Integer::new(); r.len() - db];
        for i in (db..r.len()).rev() {
            let c = r[i].clone();
            if c == 0 {
                continue;
            }
            q[i - db] = c.clone();
            for j in 0..=db {
                r[i - db + j] -= &c * &b[j];
            }
        }
        r.truncate(db.max(1));
        (q, r)
    }

    pub fn eval(a: &[Integer], x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in a.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// The m-th cyclotomic polynomial.
    pub fn cyclotomic(m: u64) -> Vec<Integer> {
        // x^m - 1 divided by cyclotomic(d) for proper divisors d.
        let mut num = vec![Integer::new(); m as usize + 1];
        num[0] = Integer::from(-1);
        num[m as usize] = Integer::from(1);
        for d in 1..m {
            if m.is_multiple_of(d) {
                num = div_exact_monic(&num, &cyclotomic(d));
            }
        }
        num
    }

    pub fn from_i64(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&c| Integer::from(c)).collect()
    }
}

/// Polynomials over F_p with coefficients in `[0, p)`, low degree first.
/// The zero polynomial is the empty vector.
pub mod fpoly {
    use super::*;

    pub type Poly = Vec<u64>;

    pub fn trim(a: &mut Poly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn deg(a: &Poly) -> isize {
        a.len() as isize - 1
    }

    pub fn from_ints(a: &[Integer], p: u64) -> Poly {
        let mut v: Poly = a.iter().map(|c| int_mod_u64(c, p)).collect();
        trim(&mut v);
        v
    }

    pub fn add(a: &Poly, b: &Poly, p: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut v: Poly = (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect();
        trim(&mut v);
        v
    }

    pub fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut v: Poly = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(&mut v);
        v
    }

    pub fn scale(a: &Poly, c: u64, p: u64) -> Poly {
        let mut v: Poly = a.iter().map(|&x| mulmod(x, c, p)).collect();
        trim(&mut v);
        v
    }

    pub fn mul(a: &Poly, b: &Poly, p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        let pp = p as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % pp;
            }
        }
        let mut v: Poly = out.into_iter().map(|c| c as u64).collect();
        trim(&mut v);
        v
    }

    pub fn divrem(a: &Poly, b: &Poly, p: u64) -> (Poly, Poly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        let db = b.len() - 1;
        let inv = invmod(*b.last().unwrap(), p).unwrap();
        let mut r = a.clone();
        if r.len() <= db {
            return (vec![], r);
        }
        let mut q = vec![0u64; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = mulmod(r[i], inv, p);
            if c == 0 {
                continue;
            }
            q[i - db] = c;
            for j in 0..=db {
                r[i - db + j] = (r[i - db + j] + p - mulmod(c, b[j], p)) % p;
            }
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &Poly, b: &Poly, p: u64) -> Poly {
        divrem(a, b, p).1
    }

    pub fn monic(a: &Poly, p: u64) -> Poly {
        if a.is_empty() {
            return vec![];
        }
        scale(a, invmod(*a.last().unwrap(), p).unwrap(), p)
    }

    pub fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(&x, p)
    }

    pub fn mulmod_poly(a: &Poly, b: &Poly, m: &Poly, p: u64) -> Poly {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod_poly(a: &Poly, mut e: u128, m: &Poly, p: u64) -> Poly {
        let mut r: Poly = rem(&vec![1], m, p);
        let mut b = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod_poly(&r, &b, m, p);
            }
            b = mulmod_poly(&b, &b, m, p);
            e >>= 1;
        }
        r
    }

    pub fn derivative(a: &Poly, p: u64) -> Poly {
        let mut v: Poly = a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect();
        trim(&mut v);
        v
    }

    pub fn eval(a: &Poly, x: u64, p: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
    }

    /// Factorization into monic irreducibles with multiplicities, sorted by
    /// (degree, coefficients). Deterministic: the equal-degree splitting uses a
    /// fixed-seed generator.
    pub fn factor(a: &Poly, p: u64) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        let f = monic(a, p);
        if f.len() <= 1 {
            return out;
        }
        for (sq, mult) in squarefree(&f, p) {
            for (g, d) in distinct_degree(&sq, p) {
                for h in equal_degree(&g, d, p) {
                    out.push((h, mult));
                }
            }
        }
        out.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
        out
    }

    fn squarefree(f: &Poly, p: u64) -> Vec<(Poly, u32)> {
        // Repeated gcd with the derivative; p-th powers handled by taking roots.
        let mut out = Vec::new();
        let df = derivative(f, p);
        if df.is_empty() {
            // f = g(x^p) = g(x)^p over F_p
            let g: Poly = f.iter().step_by(p as usize).copied().collect();
            for (h, m) in squarefree(&g, p) {
                out.push((h, m * p as u32));
            }
            return out;
        }
        let mut c = gcd(f, &df, p);
        let mut w = divrem(f, &c, p).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = gcd(&w, &c, p);
            let z = divrem(&w, &y, p).0;
            if z.len() > 1 {
                out.push((monic(&z, p), i));
            }
            i += 1;
            w = y;
            c = divrem(&c, &w, p).0;
        }
        if c.len() > 1 {
            let g: Poly = c.iter().step_by(p as usize).copied().collect();
            for (h, m) in squarefree(&g, p) {
                out.push((h, m * p as u32));
            }
        }
        out
    }

    fn distinct_degree(f: &Poly, p: u64) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = f.clone();
        let x: Poly = vec![0, 1];
        let mut h = x.clone();
        let mut d = 0;
        while f.len() > 1 {
            d += 1;
            if 2 * d > f.len() - 1 {
                out.push((f.clone(), f.len() - 1));
                break;
            }
            h = powmod_poly(&h, p as u128, &f, p);
            let g = gcd(&sub(&h, &x, p), &f, p);
            if g.len() > 1 {
                out.push((g.clone(), d));
                f = divrem(&f, &g, p).0;
                h = rem(&h, &f, p);
            }
        }
        out
    }

    fn equal_degree(f: &Poly, d: usize, p: u64) -> Vec<Poly> {
        let n = f.len() - 1;
        if n == d {
            return vec![monic(f, p)];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p ^ (n as u64) << 20);
        loop {
            let r: Poly = {
                let mut v: Poly = (0..n).map(|_| rng.gen_range(0..p)).collect();
                trim(&mut v);
                v
            };
            if r.len() <= 1 {
                continue;
            }
            let g = if p == 2 {
                // trace map r + r^2 + ... + r^(2^(d-1))
                let mut t = r.clone();
                let mut acc = r.clone();
                for _ in 1..d {
                    t = mulmod_poly(&t, &t, f, p);
                    acc = add(&acc, &t, p);
                }
                gcd(&acc, f, p)
            } else {
                let e = ((p as u128).pow(d as u32) - 1) / 2;
                let s = powmod_poly(&r, e, f, p);
                gcd(&sub(&s, &vec![1], p), f, p)
            };
            if g.len() > 1 && g.len() < f.len() {
                let h = divrem(f, &g, p).0;
                let mut out = equal_degree(&g, d, p);
                out.extend(equal_degree(&h, d, p));
                return out;
            }
        }
    }

    /// Distinct roots in F_p, ascending.
    pub fn roots(a: &Poly, p: u64) -> Vec<u64> {
        let mut a = a.clone();
        trim(&mut a);
        if a.len() <= 1 {
            return vec![];
        }
        // restrict to the product of the linear factors: gcd(a, x^p - x)
        let x = vec![0, 1];
        let xp = powmod_poly(&x, p as u128, &a, p);
        let g = gcd(&a, &sub(&xp, &x, p), p);
        if g.len() <= 1 {
            return vec![];
        }
        let mut out: Vec<u64> = factor(&g, p).into_iter().filter(|(g, _)| g.len() == 2).map(|(g, _)| (p - g[0]) % p).collect();
        out.sort();
        out
    }
}

/// Lifts a simple root `r` of `f` modulo `p` to a root modulo `p^k`.
pub fn hensel_root(f: &[Integer], r: u64, p: u64, k: u32) -> Integer {
    let pk = Integer::from(p).pow(k);
    let df: Vec<Integer> = f.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect();
    let mut x = Integer::from(r);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = Integer::from(p).pow(prec);
        let fx = zpoly::eval(f, &x) % &m;
        let dfx = zpoly::eval(&df, &x) % &m;
        let inv = dfx.invert(&m).expect("root is not simple");
        x = modulo(x - fx * inv, &m);
    }
    x % pk
}

/// Rational r/s with r ≡ s·a mod n and |r|, |s| <= sqrt(n/2), if one exists.
pub fn rational_reconstruct(a: &Integer, n: &Integer) -> Option<Rational> {
    let bound = Integer::from(n / 2u32).sqrt();
    let (mut r0, mut r1) = (n.clone(), modulo(a.clone(), n));
    let (mut s0, mut s1) = (Integer::new(), Integer::from(1));
    while r1 > bound {
        let q = Integer::from(&r0 / &r1);
        let r2 = Integer::from(&r0 - &q * &r1);
        let s2 = Integer::from(&s0 - &q * &s1);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1 == 0 || Integer::from(s1.abs_ref()) > bound || Integer::from(r1.gcd_ref(&s1)) != 1 {
        return None;
    }
    Some(Rational::from((r1, s1)))
}

/// Solves `m·x = b` over Q for m with at least as many rows as columns;
/// None if the columns are dependent or the system is inconsistent.
pub fn solve_rational(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Rational>> = m.iter().zip(b).map(|(row, c)| row.iter().cloned().chain([c.clone()]).collect()).collect();
    for col in 0..n {
        let piv = (col..rows).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = Rational::from(a[col][col].recip_ref());
        for c in col..=n {
            a[col][c] *= &inv;
        }
        for r in (0..rows).filter(|&r| r != col) {
            if a[r][col] == 0 {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..=n {
                let t = Rational::from(&f * &a[col][c]);
                a[r][c] -= t;
            }
        }
    }
    if a[n..].iter().any(|row| row[n] != 0) {
        return None;
    }
    Some(a.into_iter().take(n).map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        let r = |v: i64| Rational::from(v);
        let m = vec![vec![r(0), r(2)], vec![r(3), r(1)]];
        let x = solve_rational(&m, &[r(1), r(1)]).unwrap();
        assert_eq!(x, vec![Rational::from((1, 6)), Rational::from((1, 2))]);
        assert!(solve_rational(&[vec![r(1), r(2)], vec![r(2), r(4)]], &[r(0), r(1)]).is_none());
        let tall = vec![vec![r(1)], vec![r(2)], vec![r(0)]];
        assert_eq!(solve_rational(&tall, &[r(3), r(6), r(0)]), Some(vec![r(3)]));
        assert!(solve_rational(&tall, &[r(3), r(6), r(1)]).is_none());
    }

    #[test]
    fn primes_and_orders() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(1_000_003));
        assert_eq!(euler_phi(9), 6);
        assert_eq!(mult_order(2, 5), 4);
        assert_eq!(invmod(3, 7), Some(5));
        assert_eq!(kronecker(5, 11), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, 7), 1);
    }

    #[test]
    fn reconstructs_small_fractions() {
        let n = Integer::from(Integer::u_pow_u(2, 61)) - 1u32;
        for (r, s) in [(3i64, 7i64), (-22, 5), (0, 1), (999, 1000)] {
            let inv = Integer::from(s).invert(&n).unwrap();
            let a = modulo(Integer::from(r) * inv, &n);
            assert_eq!(rational_reconstruct(&a, &n), Some(Rational::from((r, s))));
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(zpoly::cyclotomic(4), zpoly::from_i64(&[1, 0, 1]));
        assert_eq!(zpoly::cyclotomic(9), zpoly::from_i64(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(zpoly::cyclotomic(1), zpoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn factoring_over_fp() {
        let f = fpoly::from_ints(&zpoly::cyclotomic(5), 11);
        assert_eq!(fpoly::factor(&f, 11).len(), 4);
        let f = fpoly::from_ints(&zpoly::cyclotomic(5), 2);
        assert_eq!(fpoly::factor(&f, 2), vec![(vec![1, 1, 1, 1, 1], 1)]);
        let f = fpoly::from_ints(&zpoly::from_i64(&[1, 0, 1]), 2);
        assert_eq!(fpoly::factor(&f, 2), vec![(vec![1, 1], 2)]);
        let f = fpoly::from_ints(&zpoly::cyclotomic(13), 3);
        let fs = fpoly::factor(&f, 3);
        assert_eq!(fs.len(), 4);
        assert!(fs.iter().all(|(g, m)| g.len() == 4 && *m == 1));
        assert_eq!(fpoly::roots(&vec![1, 0, 1], 5), vec![2, 3]);
    }

    #[test]
    fn hensel_lifting() {
        let f = zpoly::from_i64(&[1, 0, 1]);
        let r = hensel_root(&f, 2, 5, 20);
        let m = Integer::from(5).pow(20);
        assert_eq!(modulo(zpoly::eval(&f, &r), &m), 0);
    }
}
