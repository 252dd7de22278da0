use super::element::mul_reduce;
use super::residue::{ResidueElem, ResidueField};
use super::{Field, FieldElement, FieldError, FieldKind, GaloisElement, NumberField};
use crate::arith::fpoly::{self, Poly};
use crate::arith::{euler_phi, gcd_u64, hensel_root, int_mod_u64, invmod, is_prime, kronecker, modulo, mult_order, val_int, zpoly};
use crate::interval::{CInterval, Interval};
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default number of p-adic digits kept in the recorded Hensel root.
const HENSEL_DIGITS: u32 = 24;

/// A prime ideal 𝔭 = (p, g(θ)) of Z[θ], from a factor g^e of the minimal
/// polynomial modulo p.
#[derive(Clone, Debug)]
pub struct PrimeIdeal {
    pub field: FieldKind,
    pub p: u64,
    pub e: u32,
    pub f: u32,
    /// Position among the primes above p in canonical order.
    pub index: usize,
    /// Monic irreducible factor g of the minimal polynomial mod p.
    pub factor: Poly,
    /// For residue degree one: θ mod 𝔭.
    pub root: Option<u64>,
    /// For e = f = 1: a root of the minimal polynomial modulo p^digits.
    pub hensel: Option<(Integer, u32)>,
    /// Integral element with v_𝔭 = e - 1 and v_𝔮 >= e_𝔮 at the other primes above p.
    beta: Vec<Integer>,
    /// Integral element with v_𝔭 = 0 and v_𝔮 >= e_𝔮 at the other primes above p.
    cofactor: Vec<Integer>,
    /// A local uniformizer: p when e = 1, g(θ) otherwise.
    pub uniformizer: Vec<Integer>,
}

impl PrimeIdeal {
    /// Absolute norm q = p^f.
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.f)
    }

    pub fn local_degree(&self) -> u32 {
        self.e * self.f
    }

    pub fn residue_field(&self) -> ResidueField {
        ResidueField::new(self.p, self.factor.clone())
    }

    pub fn uniformizer_element(&self, field: &Field) -> FieldElement {
        FieldElement::from_parts(field, self.uniformizer.clone(), Integer::from(1))
    }

    /// Generators (p, g(θ)) of the ideal.
    pub fn generators(&self, field: &Field) -> Vec<FieldElement> {
        let g = fpoly_to_element(field, &self.factor);
        vec![FieldElement::from_int(field, self.p as i64), g]
    }

    pub fn label(&self) -> String {
        format!("P{}_{}(e={},f={})", self.p, self.index, self.e, self.f)
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.p == o.p && self.factor == o.factor
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn fpoly_to_element(field: &Field, g: &Poly) -> FieldElement {
    let v: Vec<Integer> = g.iter().map(|&c| Integer::from(c)).collect();
    FieldElement::from_parts(field, super::element::reduce_poly(field, v), Integer::from(1))
}

fn fpoly_to_ints(field: &NumberField, g: &Poly) -> Vec<Integer> {
    let v: Vec<Integer> = g.iter().map(|&c| Integer::from(c)).collect();
    super::element::reduce_poly(field, v)
}

/// All primes above the rational prime p with their (e, f), ordered by
/// residue degree, then by θ mod 𝔭 (or the factor coefficients).
pub fn primes_above(field: &Field, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let minp = fpoly::from_ints(field.minpoly(), p);
    let mut factors = fpoly::factor(&minp, p);
    factors.sort_by(|(a, _), (b, _)| {
        let ka = (a.len(), if a.len() == 2 { (p - a[0]) % p } else { 0 }, a.clone());
        let kb = (b.len(), if b.len() == 2 { (p - b[0]) % p } else { 0 }, b.clone());
        ka.cmp(&kb)
    });
    let mut out = Vec::with_capacity(factors.len());
    for (i, (g, e)) in factors.iter().enumerate() {
        let mut h: Poly = vec![1];
        for (j, (gj, ej)) in factors.iter().enumerate() {
            if j != i {
                for _ in 0..*ej {
                    h = fpoly::mul(&h, gj, p);
                }
            }
        }
        let mut b = h.clone();
        for _ in 1..*e {
            b = fpoly::mul(&b, g, p);
        }
        let f = (g.len() - 1) as u32;
        let root = if f == 1 { Some((p - g[0]) % p) } else { None };
        let hensel = match (root, *e) {
            (Some(r), 1) => Some((hensel_root(field.minpoly(), r, p, HENSEL_DIGITS), HENSEL_DIGITS)),
            _ => None,
        };
        let uniformizer = if *e == 1 {
            let mut u = vec![Integer::new(); field.degree()];
            u[0] = Integer::from(p);
            u
        } else {
            fpoly_to_ints(field, g)
        };
        out.push(PrimeIdeal {
            field: field.kind(),
            p,
            e: *e,
            f,
            index: i,
            factor: g.clone(),
            root,
            hensel,
            beta: fpoly_to_ints(field, &b),
            cofactor: fpoly_to_ints(field, &h),
            uniformizer,
        });
    }
    Ok(out)
}

/// A valuation: an integer, or +∞ for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

fn check_prime_field(a: &FieldElement, pr: &PrimeIdeal) {
    assert_eq!(a.field().kind(), pr.field, "element and prime belong to different fields");
}

/// v_𝔭(α), normalized so that v_𝔭(p) = e.
pub fn valuation(a: &FieldElement, pr: &PrimeIdeal) -> Valuation {
    check_prime_field(a, pr);
    if a.is_zero() {
        return Valuation::Infinity;
    }
    let vd = val_int(a.den(), pr.p) as i64;
    Valuation::Finite(val_integral(a.field(), a.num(), pr) - vd * pr.e as i64)
}

/// Valuation of a nonzero integral element: strip the rational p-content,
/// then count how often multiplying by β/p stays integral.
fn val_integral(field: &NumberField, num: &[Integer], pr: &PrimeIdeal) -> i64 {
    let p = Integer::from(pr.p);
    let content = num.iter().filter(|c| **c != 0).map(|c| val_int(c, pr.p)).min().unwrap() as i64;
    let mut cur: Vec<Integer> = if content > 0 {
        let pc = p.clone().pow(content as u32);
        num.iter().map(|c| Integer::from(c / &pc)).collect()
    } else {
        num.to_vec()
    };
    let mut k = 0i64;
    loop {
        let t = mul_reduce(field, &cur, &pr.beta);
        if t.iter().all(|c| c.is_divisible(&p)) {
            cur = t.into_iter().map(|c| c / &p).collect();
            k += 1;
        } else {
            return content * pr.e as i64 + k;
        }
    }
}

/// Independent check for e = f = 1 primes: evaluate at the p-adic root of
/// the minimal polynomial, raising the precision until the value is nonzero.
pub fn valuation_via_hensel(a: &FieldElement, pr: &PrimeIdeal) -> Option<Valuation> {
    let r = pr.root?;
    if pr.e != 1 {
        return None;
    }
    if a.is_zero() {
        return Some(Valuation::Infinity);
    }
    let p = Integer::from(pr.p);
    let mut digits = 8u32;
    loop {
        let root = hensel_root(a.field().minpoly(), r, pr.p, digits);
        let m = p.clone().pow(digits);
        let v = modulo(zpoly::eval(a.num(), &root), &m);
        if v != 0 {
            let vn = val_int(&v, pr.p) as i64;
            return Some(Valuation::Finite(vn - val_int(a.den(), pr.p) as i64));
        }
        digits *= 2;
    }
}

/// Independent check when 𝔭 is the only prime above p: v = v_p(N(α)) / f.
pub fn valuation_via_norm(a: &FieldElement, pr: &PrimeIdeal) -> Option<Valuation> {
    let g = (a.field().degree() as u32) / (pr.e * pr.f);
    if g != 1 {
        return None;
    }
    if a.is_zero() {
        return Some(Valuation::Infinity);
    }
    let n = a.norm();
    let v = val_int(n.numer(), pr.p) as i64 - val_int(n.denom(), pr.p) as i64;
    Some(Valuation::Finite(v / pr.f as i64))
}

/// Image of α in the residue field O/𝔭 = F_p[x]/(g).
pub fn reduce_element(a: &FieldElement, pr: &PrimeIdeal) -> Result<ResidueElem, FieldError> {
    check_prime_field(a, pr);
    let k = pr.residue_field();
    let p = pr.p;
    if a.is_zero() {
        return Ok(k.zero());
    }
    let s = val_int(a.den(), p);
    let dprime = a.den() / Integer::from(p).pow(s);
    let dinv = invmod(int_mod_u64(&dprime, p), p).unwrap();
    let field = a.field();
    let reduce_ints = |v: &[Integer]| -> ResidueElem {
        let mut poly: Poly = v.iter().map(|c| int_mod_u64(c, p)).collect();
        fpoly::trim(&mut poly);
        k.reduce(&poly)
    };
    let base = if s == 0 {
        reduce_ints(a.num())
    } else {
        let mut t = a.num().to_vec();
        for _ in 0..s {
            t = mul_reduce(field, &t, &pr.cofactor);
        }
        let ps = Integer::from(p).pow(s);
        if !t.iter().all(|c| c.is_divisible(&ps)) {
            return Err(FieldError::Pole(p));
        }
        let t: Vec<Integer> = t.into_iter().map(|c| c / &ps).collect();
        let h = reduce_ints(&pr.cofactor);
        let hinv = k.inv(&k.pow(&h, s as u128)).expect("cofactor is a unit at the prime");
        k.mul(&reduce_ints(&t), &hinv)
    };
    Ok(fpoly::scale(&base, dinv, p))
}

/// An archimedean place, given by the image of θ under one embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchPlace {
    pub index: usize,
    pub real: bool,
    /// Cyclotomic: θ ↦ exp(2πi k/m) with this k. Quadratic: the sign of √d.
    pub exponent: i64,
    /// Approximate embedded value of θ (real, imaginary).
    pub theta_approx: (f64, f64),
}

#[derive(Clone, Debug)]
pub enum PlaceKind {
    Archimedean(ArchPlace),
    Finite(PrimeIdeal),
}

/// A place v of K with its local degree [K_v : Q_v] and n_v = [K_v:Q_v]/[K:Q].
#[derive(Clone, Debug)]
pub struct Place {
    pub kind: PlaceKind,
    pub local_degree: u32,
    pub n_v: Rational,
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        matches!(self.kind, PlaceKind::Archimedean(_))
    }

    pub fn prime(&self) -> Option<&PrimeIdeal> {
        match &self.kind {
            PlaceKind::Finite(pr) => Some(pr),
            _ => None,
        }
    }

    pub fn arch(&self) -> Option<&ArchPlace> {
        match &self.kind {
            PlaceKind::Archimedean(a) => Some(a),
            _ => None,
        }
    }

    pub fn residue_char(&self) -> Option<u64> {
        self.prime().map(|p| p.p)
    }

    pub fn residue_size(&self) -> Option<u128> {
        self.prime().map(|p| p.norm())
    }

    pub fn finite(pr: PrimeIdeal, field_degree: usize) -> Place {
        let ld = pr.local_degree();
        Place {
            kind: PlaceKind::Finite(pr),
            local_degree: ld,
            n_v: Rational::from((ld, field_degree as u32)),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PlaceKind::Archimedean(a) => format!("inf_{}", a.index),
            PlaceKind::Finite(pr) => pr.label(),
        }
    }
}

/// Archimedean places in canonical order.
pub fn archimedean_places(field: &Field) -> Vec<Place> {
    let n = field.degree() as u32;
    let mk = |index: usize, real: bool, exponent: i64, approx: (f64, f64)| {
        let ld = if real { 1 } else { 2 };
        Place {
            kind: PlaceKind::Archimedean(ArchPlace {
                index,
                real,
                exponent,
                theta_approx: approx,
            }),
            local_degree: ld,
            n_v: Rational::from((ld, n)),
        }
    };
    match field.kind() {
        FieldKind::Rationals => vec![mk(0, true, 0, (1.0, 0.0))],
        FieldKind::Quadratic(d) => {
            let s = (d.unsigned_abs() as f64).sqrt();
            let half = d.rem_euclid(4) == 1;
            let val = |sign: f64| {
                if d > 0 {
                    if half {
                        ((1.0 + sign * s) / 2.0, 0.0)
                    } else {
                        (sign * s, 0.0)
                    }
                } else if half {
                    (0.5, sign * s / 2.0)
                } else {
                    (0.0, sign * s)
                }
            };
            if d > 0 {
                vec![mk(0, true, 1, val(1.0)), mk(1, true, -1, val(-1.0))]
            } else {
                vec![mk(0, false, 1, val(1.0))]
            }
        }
        FieldKind::Cyclotomic(m) => (1..m)
            .filter(|&k| 2 * k < m && gcd_u64(k, m) == 1)
            .enumerate()
            .map(|(i, k)| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                mk(i, false, k as i64, (ang.cos(), ang.sin()))
            })
            .collect(),
    }
}

/// Finite places above p.
pub fn places_above(field: &Field, p: u64) -> Result<Vec<Place>, FieldError> {
    Ok(primes_above(field, p)?.into_iter().map(|pr| Place::finite(pr, field.degree())).collect())
}

/// Enclosure of the image of θ under an archimedean place.
pub fn theta_value(field: &NumberField, arch: &ArchPlace, prec: u32) -> CInterval {
    match field.kind() {
        FieldKind::Rationals => CInterval::real(Interval::from_i64(prec, 1)),
        FieldKind::Quadratic(d) => {
            let s = Interval::from_i64(prec, d.abs()).sqrt().mul_i64(arch.exponent);
            let root = if d > 0 { CInterval::real(s) } else { CInterval::new(Interval::zero(prec), s) };
            if d.rem_euclid(4) == 1 {
                let one = CInterval::real(Interval::from_i64(prec, 1));
                let sum = one.add(&root);
                CInterval::new(sum.re.div_i64(2), sum.im.div_i64(2))
            } else {
                root
            }
        }
        FieldKind::Cyclotomic(m) => CInterval::root_of_unity(prec, arch.exponent, m as i64),
    }
}

/// Enclosure of the image of α under an archimedean place.
pub fn embed(a: &FieldElement, arch: &ArchPlace, prec: u32) -> CInterval {
    let t = theta_value(a.field(), arch, prec);
    let mut acc = CInterval::real(Interval::zero(prec));
    for c in a.num().iter().rev() {
        acc = acc.mul(&t).add(&CInterval::real(Interval::from_integer(prec, c)));
    }
    if *a.den() != 1 {
        let d = Interval::from_integer(prec, a.den());
        acc = CInterval::new(acc.re.div(&d), acc.im.div(&d));
    }
    acc
}

/// A normalized absolute value |α|_v.
#[derive(Clone, Debug)]
pub enum AbsValue {
    Zero,
    /// Exactly p^exponent (finite places).
    PPower {
        p: u64,
        exponent: Rational,
    },
    /// An enclosure (archimedean places).
    Approx(Interval),
}

impl AbsValue {
    /// log |α|_v as an interval (-∞ for zero).
    pub fn ln(&self, prec: u32) -> Interval {
        match self {
            AbsValue::Zero => Interval::infinite(prec).neg(),
            AbsValue::PPower { p, exponent } => crate::interval::ln_integer(prec, &Integer::from(*p)).mul_rational(exponent),
            AbsValue::Approx(i) => i.ln(),
        }
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        match self {
            AbsValue::Zero => Interval::zero(prec),
            AbsValue::PPower { .. } => self.ln(prec).exp(),
            AbsValue::Approx(i) => i.clone(),
        }
    }
}

/// |α|_v: p^(-v_𝔭(α)/e) at finite places, the modulus of the embedding at
/// archimedean places.
pub fn abs_value(a: &FieldElement, v: &Place, prec: u32) -> AbsValue {
    match &v.kind {
        PlaceKind::Finite(pr) => match valuation(a, pr) {
            Valuation::Infinity => AbsValue::Zero,
            Valuation::Finite(k) => AbsValue::PPower {
                p: pr.p,
                exponent: Rational::from((-k, pr.e as i64)),
            },
        },
        PlaceKind::Archimedean(arch) => {
            if a.is_zero() {
                AbsValue::Zero
            } else {
                AbsValue::Approx(embed(a, arch, prec).abs())
            }
        }
    }
}

/// Frobenius at an unramified p: ζ ↦ ζ^p, or the identity/conjugation in a
/// quadratic field according to whether p splits.
pub fn frobenius_element(field: &Field, p: u64) -> Result<GaloisElement, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if field.is_ramified(p) {
        return Err(FieldError::Ramified { p, field: field.literal() });
    }
    Ok(match field.kind() {
        FieldKind::Rationals => GaloisElement::identity(field),
        FieldKind::Quadratic(_) => {
            let d = field.discriminant().to_i64().unwrap();
            let c = if kronecker(d, p) == 1 { 1 } else { -1 };
            GaloisElement { kind: field.kind(), c }
        }
        FieldKind::Cyclotomic(m) => GaloisElement::cyclotomic(m, p % m),
    })
}

/// An element acting as x ↦ x^p on every residue field above p, ramified
/// or not: c ≡ 1 mod p^k and c ≡ p mod m/p^k in Q(ζ_m), the identity in a
/// quadratic field where p ramifies.
pub fn frobenius_lift(field: &Field, p: u64) -> Result<GaloisElement, FieldError> {
    if !field.is_ramified(p) {
        return frobenius_element(field, p);
    }
    Ok(match field.kind() {
        FieldKind::Cyclotomic(m) => {
            let mut pk = 1;
            while m % (pk * p) == 0 {
                pk *= p;
            }
            let rest = m / pk;
            let c = (1..m).find(|&c| c % pk == 1 % pk && c % rest == p % rest).expect("CRT solution exists");
            GaloisElement::cyclotomic(m, c)
        }
        _ => GaloisElement::identity(field),
    })
}

/// A generator of Gal(L / Q(ζ_{m/p})), which lies in the inertia group at
/// p: the smallest unit c ≡ 1 mod m/p of full order φ(m)/φ(m/p).
pub fn inertia_tau(field: &Field, p: u64) -> Result<GaloisElement, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if !field.is_ramified(p) {
        return Err(FieldError::Unramified { p, field: field.literal() });
    }
    Ok(match field.kind() {
        FieldKind::Rationals => unreachable!("Q is unramified"),
        FieldKind::Quadratic(_) => GaloisElement { kind: field.kind(), c: -1 },
        FieldKind::Cyclotomic(m) => {
            let sub = m / p;
            let order = euler_phi(m) / euler_phi(sub);
            let c = (2..m)
                .find(|&c| gcd_u64(c, m) == 1 && c % sub == 1 % sub && mult_order(c, m) == order)
                .expect("inertia element exists");
            GaloisElement::cyclotomic(m, c)
        }
    })
}

/// Ramification index and local conductor exponent of L/Q at p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionInfo {
    pub field: FieldKind,
    pub p: u64,
    pub e: u32,
    pub k: u32,
}

/// e_p(L/Q) from the prime decomposition and k = ord_p of the conductor.
/// For abelian L/Q the p-part of the conductor is local, so k is the
/// smallest exponent with L_𝔮 inside Q_p(ζ_{p^k}) times an unramified field.
pub fn extension_info(field: &Field, p: u64) -> Result<ExtensionInfo, FieldError> {
    let primes = primes_above(field, p)?;
    let e = primes[0].e;
    let mut k = 0u32;
    let mut c = field.conductor();
    while c.is_multiple_of(p) {
        c /= p;
        k += 1;
    }
    // Local-degree comparison: the inertia degree must divide φ(p^k) and
    // exceed one exactly when k >= 1.
    let phi = if k == 0 { 1 } else { euler_phi(p.pow(k)) };
    assert!((k >= 1) == (e > 1), "conductor exponent disagrees with ramification");
    assert!(phi % e as u64 == 0, "ramification index does not divide φ(p^k)");
    Ok(ExtensionInfo { field: field.kind(), p, e, k })
}
