use super::{Field, FieldError, GaloisElement, NumberField};
use rug::{Integer, Rational};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// An element of a number field: `(Σ num[i] θ^i) / den` with `den > 0` and
/// `gcd(den, num[0], ..., num[n-1]) = 1`.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    num: Vec<Integer>,
    den: Integer,
}

impl FieldElement {
    /// Builds and normalizes `num / den`.
    pub fn from_parts(field: &Field, mut num: Vec<Integer>, mut den: Integer) -> Self {
        assert_eq!(num.len(), field.degree(), "coefficient vector has wrong length");
        assert!(den != 0, "zero denominator");
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if den != 1 {
            let mut g = den.clone();
            for c in &num {
                if g == 1 {
                    break;
                }
                g.gcd_mut(c);
            }
            if g != 1 {
                for c in num.iter_mut() {
                    c.div_exact_mut(&g);
                }
                den.div_exact_mut(&g);
            }
        }
        if num.iter().all(|c| *c == 0) {
            den = Integer::from(1);
        }
        FieldElement {
            field: field.clone(),
            num,
            den,
        }
    }

    pub fn zero(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            num: vec![Integer::new(); field.degree()],
            den: Integer::from(1),
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Field, v: i64) -> Self {
        Self::from_integer(field, Integer::from(v))
    }

    pub fn from_integer(field: &Field, v: Integer) -> Self {
        let mut e = Self::zero(field);
        e.num[0] = v;
        e
    }

    pub fn from_rational(field: &Field, v: &Rational) -> Self {
        let mut num = vec![Integer::new(); field.degree()];
        num[0] = v.numer().clone();
        // a canonical rational is already in lowest terms
        FieldElement {
            field: field.clone(),
            num,
            den: v.denom().clone(),
        }
    }

    /// The ring-of-integers generator θ.
    pub fn theta(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            num: field.theta_power(1).to_vec(),
            den: Integer::from(1),
        }
    }

    /// Element with the given power-basis coefficients.
    pub fn from_coeffs(field: &Field, coeffs: &[Rational]) -> Self {
        assert_eq!(coeffs.len(), field.degree());
        let mut den = Integer::from(1);
        for c in coeffs {
            den.lcm_mut(c.denom());
        }
        let num = coeffs.iter().map(|c| c.numer() * Integer::from(&den / c.denom())).collect();
        Self::from_parts(field, num, den)
    }

    pub fn from_i64s(field: &Field, coeffs: &[i64]) -> Self {
        let mut num: Vec<Integer> = coeffs.iter().map(|&c| Integer::from(c)).collect();
        num.resize(field.degree(), Integer::new());
        Self::from_parts(field, num, Integer::from(1))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num(&self) -> &[Integer] {
        &self.num
    }

    pub fn den(&self) -> &Integer {
        &self.den
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        self.num.iter().map(|c| Rational::from((c.clone(), self.den.clone()))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.den == 1 && self.num[0] == 1 && self.num[1..].iter().all(|c| *c == 0)
    }

    /// Whether the element lies in Z[θ], the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(|c| *c == 0) {
            Some(Rational::from((self.num[0].clone(), self.den.clone())))
        } else {
            None
        }
    }

    pub fn same_field(&self, o: &FieldElement) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(self.field.literal(), o.field.literal()))
        }
    }

    fn assert_same(&self, o: &FieldElement) {
        if let Err(e) = self.same_field(o) {
            panic!("{e}");
        }
    }

    pub fn add(&self, o: &FieldElement) -> FieldElement {
        self.assert_same(o);
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| Integer::from(a + b)).collect();
            return Self::from_parts(&self.field, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| Integer::from(a * &o.den) + Integer::from(b * &self.den))
            .collect();
        Self::from_parts(&self.field, num, Integer::from(&self.den * &o.den))
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.iter().map(|c| Integer::from(-c)).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &FieldElement) -> FieldElement {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FieldElement) -> FieldElement {
        self.assert_same(o);
        let num = mul_reduce(&self.field, &self.num, &o.num);
        Self::from_parts(&self.field, num, Integer::from(&self.den * &o.den))
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    pub fn scale_int(&self, k: &Integer) -> FieldElement {
        let num = self.num.iter().map(|c| Integer::from(c * k)).collect();
        Self::from_parts(&self.field, num, self.den.clone())
    }

    pub fn scale_i64(&self, k: i64) -> FieldElement {
        self.scale_int(&Integer::from(k))
    }

    pub fn scale_rat(&self, r: &Rational) -> FieldElement {
        let num = self.num.iter().map(|c| Integer::from(c * r.numer())).collect();
        Self::from_parts(&self.field, num, Integer::from(&self.den * r.denom()))
    }

    pub fn add_int(&self, k: i64) -> FieldElement {
        self.add(&FieldElement::from_int(&self.field, k))
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut r = FieldElement::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        r
    }

    /// Product of the images under every non-identity Galois element.
    fn conjugate_product(&self) -> FieldElement {
        let mut acc = FieldElement::one(&self.field);
        for g in self.field.galois_group().iter().skip(1) {
            acc = acc.mul(&g.apply_unchecked(self));
        }
        acc
    }

    /// Absolute norm N_{K/Q}.
    pub fn norm(&self) -> Rational {
        if self.field.degree() == 1 {
            return self.as_rational().unwrap();
        }
        let n = self.mul(&self.conjugate_product());
        n.as_rational().expect("norm is rational")
    }

    /// Trace Tr_{K/Q}.
    pub fn trace(&self) -> Rational {
        let mut acc = FieldElement::zero(&self.field);
        for g in self.field.galois_group() {
            acc = acc.add(&g.apply_unchecked(self));
        }
        acc.as_rational().expect("trace is rational")
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(FieldElement::from_parts(&self.field, vec![self.den.clone()], self.num[0].clone()));
        }
        let c = self.conjugate_product();
        let n = self.mul(&c).as_rational().expect("norm is rational");
        Ok(c.scale_rat(&n.recip()))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(o)?;
        Ok(self.mul(&o.inv()?))
    }

    /// Numerator vector as an integral element (self times its denominator).
    pub fn numerator_element(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.clone(),
            den: Integer::from(1),
        }
    }

    /// Largest bit length among numerator coefficients and the denominator.
    pub fn bit_size(&self) -> u32 {
        self.num
            .iter()
            .map(|c| c.significant_bits())
            .max()
            .unwrap_or(0)
            .max(self.den.significant_bits())
    }

    pub fn galois(&self, g: &GaloisElement) -> Result<FieldElement, FieldError> {
        g.apply(self)
    }
}

/// Product of two numerator vectors reduced modulo the minimal polynomial.
pub(crate) fn mul_reduce(field: &NumberField, a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let n = field.degree();
    if n == 1 {
        return vec![Integer::from(&a[0] * &b[0])];
    }
    let mut prod = vec![Integer::new(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if *y != 0 {
                prod[i + j] += x * y;
            }
        }
    }
    reduce_poly(field, prod)
}

/// Reduces a coefficient vector of any length to the power basis.
pub(crate) fn reduce_poly(field: &NumberField, mut prod: Vec<Integer>) -> Vec<Integer> {
    let n = field.degree();
    if prod.len() <= n {
        prod.resize(n, Integer::new());
        return prod;
    }
    let mut out: Vec<Integer> = prod.drain(..n).collect();
    for (k, c) in prod.into_iter().enumerate() {
        if c == 0 {
            continue;
        }
        let row = field.theta_power(n + k);
        for i in 0..n {
            if row[i] != 0 {
                out[i] += &c * &row[i];
            }
        }
    }
    out
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        *self.field == *o.field && self.den == o.den && self.num == o.num
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Renders in the element literal syntax, e.g. `3/2 + 1/2*w`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let (neg, a) = if *c < 0 { (true, Rational::from(-c)) } else { (false, c.clone()) };
            let body = match i {
                0 => a.to_string(),
                _ => {
                    let mon = if i == 1 { "w".to_string() } else { format!("w^{i}") };
                    if a == 1 {
                        mon
                    } else {
                        format!("{a}*{mon}")
                    }
                }
            };
            if terms.is_empty() {
                terms.push(if neg { format!("-{body}") } else { body });
            } else {
                terms.push(format!("{} {}", if neg { "-" } else { "+" }, body));
            }
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" "))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                FieldElement::$m(self, o)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(&self)
    }
}
