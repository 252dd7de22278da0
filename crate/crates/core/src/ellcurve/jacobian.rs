//! Scalar multiplication of rational points in integral Jacobian coordinates
//! on Y^2 = X^3 - 27c4 X - 54c6, reduced by one gcd per group operation.

use super::EllipticCurve;
use rug::ops::Pow;
use rug::{Integer, Rational};

/// (X : Y : Z) with X' = X/Z^2, Y' = Y/Z^3; Z = 0 is the identity.
#[derive(Clone, Debug)]
struct Jac {
    x: Integer,
    y: Integer,
    z: Integer,
}

struct Short {
    a: Integer,
    /// A power of 6Δ; doubling a reduced point only leaves common factors at its primes.
    junk: Integer,
}

impl Short {
    /// Removes the common factor d with d^2 | X, d^3 | Y, d | Z. In lowest
    /// terms gcd(X, Z) = 1, so gcd(X d^2, (Z d)^2) = d^2; `hint` is a multiple
    /// of d^2 when known.
    fn reduce(mut p: Jac, hint: Option<&Integer>) -> Jac {
        if p.z == 0 {
            return p;
        }
        let z2 = match hint {
            Some(n) => Integer::from(p.z.gcd_ref(n)).square(),
            None => Integer::from(p.z.square_ref()),
        };
        let g = Integer::from(p.x.gcd_ref(&z2));
        if g != 1 {
            let d = g.sqrt();
            p.x.div_exact_mut(&Integer::from(d.square_ref()));
            p.y.div_exact_mut(&Integer::from((&d).pow(3u32)));
            p.z.div_exact_mut(&d);
        }
        if p.z < 0 {
            p.z = -p.z;
            p.y = -p.y;
        }
        p
    }

    fn double(&self, p: &Jac) -> Jac {
        if p.z == 0 || p.y == 0 {
            return Jac {
                x: Integer::from(1),
                y: Integer::from(1),
                z: Integer::new(),
            };
        }
        let xx = Integer::from(p.x.square_ref());
        let yy = Integer::from(p.y.square_ref());
        let zz = Integer::from(p.z.square_ref());
        let s = Integer::from(&p.x * &yy) * 4u32;
        let m = xx * 3u32 + Integer::from(zz.square_ref()) * &self.a;
        let x3 = Integer::from(m.square_ref()) - Integer::from(&s * 2u32);
        let y3 = (&m * Integer::from(&s - &x3)) - Integer::from(yy.square_ref()) * 8u32;
        let z3 = Integer::from(&p.y * &p.z) * 2u32;
        Short::reduce(Jac { x: x3, y: y3, z: z3 }, Some(&self.junk))
    }

    fn add(&self, p: &Jac, q: &Jac) -> Jac {
        if p.z == 0 {
            return q.clone();
        }
        if q.z == 0 {
            return p.clone();
        }
        let z1z1 = Integer::from(p.z.square_ref());
        let z2z2 = Integer::from(q.z.square_ref());
        let u1 = Integer::from(&p.x * &z2z2);
        let u2 = Integer::from(&q.x * &z1z1);
        let s1 = Integer::from(&p.y * &q.z) * &z2z2;
        let s2 = Integer::from(&q.y * &p.z) * &z1z1;
        let h = Integer::from(&u2 - &u1);
        let r = Integer::from(&s2 - &s1);
        if h == 0 {
            return if r == 0 {
                self.double(p)
            } else {
                Jac {
                    x: Integer::from(1),
                    y: Integer::from(1),
                    z: Integer::new(),
                }
            };
        }
        let hh = Integer::from(h.square_ref());
        let hhh = Integer::from(&hh * &h);
        let v = u1 * &hh;
        let x3 = Integer::from(r.square_ref()) - &hhh - Integer::from(&v * 2u32);
        let y3 = (&r * Integer::from(&v - &x3)) - s1 * hhh;
        let z3 = Integer::from(&p.z * &q.z) * h;
        Short::reduce(Jac { x: x3, y: y3, z: z3 }, None)
    }
}

/// [k](x, y) for a rational point; None is the identity.
pub(super) fn mul_rational(e: &EllipticCurve, x: &Rational, y: &Rational, k: &Integer) -> Option<(Rational, Rational)> {
    let [a1, _, a3, _, _] = e.a();
    let [b2, _, _, _] = e.b();
    let junk = Integer::from(Integer::from(e.discriminant() * 6u32).abs_ref()).pow(64u32);
    let short = Short { a: (-27 * e.c4()), junk };
    // X' = 36x + 3b2, Y' = 108(2y + a1 x + a3)
    let xs = Rational::from(x * 36u32) + Integer::from(&b2 * 3u32);
    let ys = (Rational::from(y * 2u32) + Rational::from(x * a1) + a3) * 108u32;
    let d = xs.denom().clone().sqrt();
    assert!(Integer::from(d.square_ref()) == *xs.denom(), "x-denominator is not a square");
    let base = Jac {
        x: xs.numer().clone(),
        y: Rational::from(&ys * Integer::from((&d).pow(3u32))).numer().clone(),
        z: d,
    };
    let kabs = Integer::from(k.abs_ref());
    let mut acc = Jac {
        x: Integer::from(1),
        y: Integer::from(1),
        z: Integer::new(),
    };
    for i in (0..kabs.significant_bits()).rev() {
        acc = short.double(&acc);
        if kabs.get_bit(i) {
            acc = short.add(&acc, &base);
        }
    }
    if acc.z == 0 {
        return None;
    }
    if *k < 0 {
        acc.y = -acc.y;
    }
    let z2 = Integer::from(acc.z.square_ref());
    let z3 = Integer::from(&z2 * &acc.z);
    // gcd(X, Z) = 1 forces gcd(Y, Z) = 1 through the curve equation
    assert!(Integer::from(acc.x.gcd_ref(&acc.z)) == 1, "Jacobian point not in lowest terms");
    // SAFETY: both fractions have coprime parts and positive denominators
    let (xs, ys) = unsafe { (Rational::from_canonical(acc.x, z2), Rational::from_canonical(acc.y, z3)) };
    let x = (xs - Integer::from(&b2 * 3u32)) / 36u32;
    let y = (ys / 108u32 - Rational::from(&x * a1) - a3) / 2u32;
    Some((x, y))
}
