//! Real and complex intervals over MPFR floats with directed rounding.
//!
//! Every operation returns an enclosure of the exact result: lower ends are
//! rounded toward -inf and upper ends toward +inf.

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;
use std::fmt;

/// A closed real interval `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn down<T>(prec: u32, v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Self {
        debug_assert!(lo.is_nan() || hi.is_nan() || lo <= hi);
        Interval { lo, hi }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::new(Float::new(prec), Float::new(prec))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Interval::new(down(prec, v), up(prec, v))
    }

    pub fn from_integer(prec: u32, v: &Integer) -> Self {
        Interval::new(down(prec, v), up(prec, v))
    }

    pub fn from_rational(prec: u32, v: &Rational) -> Self {
        Interval::new(down(prec, v), up(prec, v))
    }

    pub fn from_f64_exact(prec: u32, v: f64) -> Self {
        Interval::new(down(prec, v), up(prec, v))
    }

    /// Enclosure of `[lo, hi]` given as f64 endpoints.
    pub fn span(prec: u32, lo: f64, hi: f64) -> Self {
        Interval::new(down(prec, lo), up(prec, hi))
    }

    pub fn pi(prec: u32) -> Self {
        Interval::new(down(prec, Constant::Pi), up(prec, Constant::Pi))
    }

    pub fn ln2(prec: u32) -> Self {
        Interval::new(down(prec, Constant::Log2), up(prec, Constant::Log2))
    }

    pub fn infinite(prec: u32) -> Self {
        Interval::new(
            Float::with_val(prec, rug::float::Special::Infinity),
            Float::with_val(prec, rug::float::Special::Infinity),
        )
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn lower_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    pub fn upper_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return self.lower_f64();
        }
        let m = Float::with_val(self.prec() + 2, &self.lo + &self.hi) / 2u32;
        m.to_f64()
    }

    /// Upper bound on the distance from the midpoint to either end.
    pub fn radius_f64(&self) -> f64 {
        let w = up(self.prec(), &self.hi - &self.lo);
        (w / 2u32).to_f64_round(Round::Up)
    }

    pub fn width(&self) -> Float {
        up(self.prec(), &self.hi - &self.lo)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lo <= v && self.hi >= v
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval::new(down(p, &self.lo + &o.lo), up(p, &self.hi + &o.hi))
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval::new(down(p, &self.lo - &o.hi), up(p, &self.hi - &o.lo))
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in cands {
            let l = down(p, a * b);
            let h = up(p, a * b);
            lo = Some(match lo {
                Some(x) if x <= l => x,
                _ => l,
            });
            hi = Some(match hi {
                Some(x) if x >= h => x,
                _ => h,
            });
        }
        Interval::new(lo.unwrap(), hi.unwrap())
    }

    pub fn mul_rational(&self, r: &Rational) -> Interval {
        self.mul(&Interval::from_rational(self.prec(), r))
    }

    pub fn mul_i64(&self, k: i64) -> Interval {
        self.mul(&Interval::from_i64(self.prec(), k))
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        a.mul(&a)
    }

    /// Division; the result is unbounded when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        if o.contains_zero() {
            return Interval::new(
                Float::with_val(p, rug::float::Special::NegInfinity),
                Float::with_val(p, rug::float::Special::Infinity),
            );
        }
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in cands {
            let l = down(p, a / b);
            let h = up(p, a / b);
            lo = Some(match lo {
                Some(x) if x <= l => x,
                _ => l,
            });
            hi = Some(match hi {
                Some(x) if x >= h => x,
                _ => h,
            });
        }
        Interval::new(lo.unwrap(), hi.unwrap())
    }

    pub fn div_i64(&self, k: i64) -> Interval {
        self.div(&Interval::from_i64(self.prec(), k))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            self.neg()
        } else {
            let h = if -self.lo.clone() > self.hi { -self.lo.clone() } else { self.hi.clone() };
            Interval::new(Float::new(self.prec()), h)
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        let lo = if self.lo >= o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi >= o.hi { self.hi.clone() } else { o.hi.clone() };
        Interval::new(lo, hi)
    }

    pub fn min(&self, o: &Interval) -> Interval {
        let lo = if self.lo <= o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi <= o.hi { self.hi.clone() } else { o.hi.clone() };
        Interval::new(lo, hi)
    }

    /// Natural logarithm; the lower end is -inf when the interval reaches zero.
    pub fn ln(&self) -> Interval {
        let p = self.prec();
        let mut lo = self.lo.clone();
        if lo <= 0 {
            lo = Float::with_val(p, rug::float::Special::NegInfinity);
        } else {
            lo.ln_round(Round::Down);
        }
        let mut hi = self.hi.clone();
        hi.ln_round(Round::Up);
        Interval::new(lo, hi)
    }

    pub fn exp(&self) -> Interval {
        let mut lo = self.lo.clone();
        lo.exp_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.exp_round(Round::Up);
        Interval::new(lo, hi)
    }

    pub fn sqrt(&self) -> Interval {
        let mut lo = if self.lo < 0 { Float::new(self.prec()) } else { self.lo.clone() };
        lo.sqrt_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.sqrt_round(Round::Up);
        Interval::new(lo, hi)
    }

    /// Enclosures of `(sin x, cos x)`, widened by the radius of `x`.
    pub fn sin_cos(&self) -> (Interval, Interval) {
        let p = self.prec();
        let mid = Float::with_val(p + 4, &self.lo + &self.hi) / 2u32;
        let rad = up(p, &self.hi - &self.lo) / 2u32 + Float::with_val(p, Float::i_exp(1, -(p as i32) + 4));
        let mut s_lo = Float::with_val(p, &mid);
        let mut c_lo = Float::new(p);
        s_lo.sin_cos_round(&mut c_lo, Round::Down);
        let mut s_hi = Float::with_val(p, &mid);
        let mut c_hi = Float::new(p);
        s_hi.sin_cos_round(&mut c_hi, Round::Up);
        let s = Interval::new(down(p, &s_lo - &rad), up(p, &s_hi + &rad));
        let c = Interval::new(down(p, &c_lo - &rad), up(p, &c_hi + &rad));
        (s, c)
    }

    /// `Some(true)` if every point of `self` is `>= o`, `Some(false)` if every
    /// point is `< o`, `None` when the enclosures overlap.
    pub fn ge(&self, o: &Interval) -> Option<bool> {
        if self.lo >= o.hi {
            Some(true)
        } else if self.hi < o.lo {
            Some(false)
        } else {
            None
        }
    }

    pub fn le(&self, o: &Interval) -> Option<bool> {
        o.ge(self)
    }

    /// Hull of both intervals.
    pub fn hull(&self, o: &Interval) -> Interval {
        let lo = if self.lo <= o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi >= o.hi { self.hi.clone() } else { o.hi.clone() };
        Interval::new(lo, hi)
    }

    /// Widens both ends by `r >= 0`.
    pub fn widen(&self, r: &Float) -> Interval {
        let p = self.prec();
        Interval::new(down(p, &self.lo - r), up(p, &self.hi + r))
    }
}

/// Logarithm of a positive integer.
pub fn ln_integer(prec: u32, n: &Integer) -> Interval {
    assert!(*n > 0, "ln of a non-positive integer");
    Interval::from_integer(prec, n).ln()
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lower_f64(), self.upper_f64())
    }
}

/// A complex rectangle `re + i*im`.
#[derive(Clone, Debug)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        let p = re.prec();
        CInterval { re, im: Interval::zero(p) }
    }

    pub fn add(&self, o: &CInterval) -> CInterval {
        CInterval::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn mul(&self, o: &CInterval) -> CInterval {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        CInterval::new(re, im)
    }

    pub fn scale(&self, r: &Interval) -> CInterval {
        CInterval::new(self.re.mul(r), self.im.mul(r))
    }

    pub fn abs(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr()).sqrt()
    }

    /// `exp(2*pi*i*k/m)`.
    pub fn root_of_unity(prec: u32, k: i64, m: i64) -> CInterval {
        let ang = Interval::pi(prec).mul_i64(2 * k).div_i64(m);
        let (s, c) = ang.sin_cos();
        CInterval::new(c, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_simple_values() {
        let a = Interval::from_i64(64, 3);
        let b = Interval::from_i64(64, 7);
        let q = a.div(&b);
        assert!((q.mid_f64() - 3.0 / 7.0).abs() < 1e-15);
        assert!(q.radius_f64() < 1e-18);
        let l = ln_integer(64, &Integer::from(5));
        assert!((l.mid_f64() - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn roots_of_unity_have_modulus_one() {
        for k in 0..9 {
            let z = CInterval::root_of_unity(80, k, 9);
            assert!(z.abs().contains_f64(1.0));
        }
        let i = CInterval::root_of_unity(80, 1, 4);
        assert!(i.re.contains_zero() && i.im.contains_f64(1.0));
    }

    #[test]
    fn comparisons_are_three_valued() {
        let a = Interval::span(64, 1.0, 2.0);
        let b = Interval::span(64, 1.5, 3.0);
        assert_eq!(a.ge(&b), None);
        assert_eq!(Interval::from_i64(64, 4).ge(&b), Some(true));
        assert_eq!(Interval::from_i64(64, 0).ge(&b), Some(false));
    }
}
