use crate::arith::solve_rational;
use crate::ellcurve::{frobenius_poly, torsion_test, CurveError, ECPoint, EllipticCurve, TorsionWitness};
use crate::heights::{adaptive, weil_height, HeightError, ProjPoint};
use crate::interval::{ln_integer, CInterval, Interval};
use crate::numfield::{archimedean_places, embed, FieldElement, GaloisElement};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const PREC: u32 = 128;
pub const DEFAULT_MAX_DOUBLINGS: u32 = 24;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("tolerance {tol:e} not reached within {steps} doublings")]
    ToleranceUnreachable { tol: f64, steps: u32 },
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Which projective map the height is taken along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// [1 : x], O ↦ [0 : 1].
    X,
    /// [1 : x : y], O ↦ [0 : 0 : 1].
    Psi,
}

impl Normalization {
    fn project(self, q: &ECPoint) -> ProjPoint {
        match self {
            Normalization::X => q.x_proj(),
            Normalization::Psi => q.psi(),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "x" => Ok(Normalization::X),
            "psi" => Ok(Normalization::Psi),
            _ => Err(format!("unknown normalization {s:?}")),
        }
    }
}

/// Explicit constants for one curve. All reals are upper bounds rounded up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightComparisonBound {
    pub curve: String,
    pub embedding: String,
    /// Common denominator R in R·X^7 = G1·F1 + G2·F2 and R·Z^7 = G3·F1 + G4·F2.
    pub resultant_multiple: String,
    /// sup |h_x(2P) - 4 h_x(P)|.
    pub c_dup_x: f64,
    /// sup |h_ψ(P) - (3/2) h_x(P)|.
    pub c_psi_x: f64,
    /// sup |h_ψ(2P) - 4 h_ψ(P)|.
    pub c_dup: f64,
    pub c_psi: f64,
    pub b: f64,
}

impl HeightComparisonBound {
    pub fn c_dup_for(&self, n: Normalization) -> f64 {
        match n {
            Normalization::X => self.c_dup_x,
            Normalization::Psi => self.c_dup,
        }
    }

    pub fn b_interval(&self) -> Interval {
        Interval::from_f64_exact(PREC, self.b)
    }
}

/// Homogenized x(2P) = F1/F2 as coefficient lists from X^4 down to Z^4.
pub fn duplication_forms(e: &EllipticCurve) -> [Vec<Integer>; 2] {
    let [b2, b4, b6, b8] = e.b();
    let f1 = vec![Integer::from(1), Integer::new(), -b4.clone(), Integer::from(-2 * &b6), -b8];
    let f2 = vec![Integer::new(), Integer::from(4), b2, Integer::from(2 * &b4), b6];
    [f1, f2]
}

/// Coefficients (X^3 down to Z^3) of G1, G2 with G1·F1 + G2·F2 = target.
fn sylvester_solve(f: &[Vec<Integer>; 2], target: usize) -> Vec<Rational> {
    let mut m = vec![vec![Rational::new(); 8]; 8];
    for (k, form) in f.iter().enumerate() {
        for shift in 0..4 {
            for (i, c) in form.iter().enumerate() {
                m[i + shift][4 * k + shift] = Rational::from(c);
            }
        }
    }
    let mut rhs = vec![Rational::new(); 8];
    rhs[target] = Rational::from(1);
    solve_rational(&m, &rhs).expect("duplication forms share a zero")
}

fn abs_sum(xs: &[Integer]) -> Integer {
    xs.iter().map(|c| Integer::from(c.abs_ref())).sum()
}

fn log_up(v: &Interval) -> f64 {
    v.ln().upper_f64().max(0.0)
}

/// Common denominator R of both Sylvester solutions, and the larger of the
/// two coefficient sums of the integral identities R·X^7, R·Z^7 = G·F1 + G'·F2.
fn duplication_multiple(f: &[Vec<Integer>; 2]) -> (Integer, Integer) {
    let sols = [sylvester_solve(f, 0), sylvester_solve(f, 7)];
    let den = sols.iter().flatten().fold(Integer::from(1), |l, q| l.lcm(q.denom()));
    let lower = sols
        .iter()
        .map(|s| {
            let ints: Vec<Integer> = s.iter().map(|q| Rational::from(q * &den).numer().clone()).collect();
            abs_sum(&ints)
        })
        .max()
        .unwrap();
    (den, lower)
}

/// C_dup for x and ψ, C_ψ = C_dup/3 and B = 2·C_ψ + log 2.
pub fn height_comparison_bound(e: &EllipticCurve) -> HeightComparisonBound {
    let f = duplication_forms(e);
    let up = abs_sum(&f[0]).max(abs_sum(&f[1]));
    let (den, lower) = duplication_multiple(&f);
    let c_dup_x = log_up(&Interval::from_integer(PREC, &up)).max(log_up(&Interval::from_integer(PREC, &lower)));

    let [a1, a2, a3, a4, a6] = e.a().clone().map(|c| Integer::from(c.abs_ref()));
    let root = Interval::from_integer(PREC, &(Integer::from(1) + &a2 + &a4 + &a6)).sqrt();
    let a_up = Interval::from_integer(PREC, &(a1.clone() + &a3)).add(&root);
    let s = Interval::from_integer(PREC, &(Integer::from(1) + &a1 + &a2 + &a3 + &a4 + &a6));
    let c_psi_x = log_up(&a_up).max(s.ln().div_i64(2).upper_f64().max(0.0));

    let c_dup = Interval::from_f64_exact(PREC, c_psi_x)
        .mul_i64(5)
        .add(&Interval::from_f64_exact(PREC, c_dup_x).mul_rational(&Rational::from((3, 2))))
        .upper_f64();
    let c_psi = Interval::from_f64_exact(PREC, c_dup).div_i64(3);
    let b = c_psi.mul_i64(2).add(&Interval::ln2(PREC));
    HeightComparisonBound {
        curve: e.literal(),
        embedding: "psi = [1 : x : y]".into(),
        resultant_multiple: den.to_string(),
        c_dup_x,
        c_psi_x,
        c_dup,
        c_psi: c_psi.upper_f64(),
        b: b.upper_f64(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalHeightResult {
    pub value: f64,
    /// Rigorous: the true value lies in [lo, hi] and hi - value, value - lo <= error.
    pub error: f64,
    pub lo: f64,
    pub hi: f64,
    pub steps: u32,
    pub normalization: Normalization,
    /// r with [r]P = O when P was shown to be torsion.
    pub torsion_order_multiple: Option<String>,
}

impl CanonicalHeightResult {
    fn zero(normalization: Normalization, steps: u32, r: Integer) -> Self {
        CanonicalHeightResult {
            value: 0.0,
            error: 0.0,
            lo: 0.0,
            hi: 0.0,
            steps,
            normalization,
            torsion_order_multiple: Some(r.to_string()),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.torsion_order_multiple.is_some()
    }

    pub fn interval(&self) -> Interval {
        Interval::span(PREC, self.lo, self.hi)
    }
}

/// Certifies torsion through Φ_p(σ)P = O at the first good unramified p >= 11.
fn torsion_by_frobenius(pt: &ECPoint) -> Result<Option<Integer>, CanonicalError> {
    let e = pt.curve();
    let p = (11u64..)
        .find(|&p| crate::arith::is_prime(p) && e.is_good(p) && !pt.field().is_ramified(p))
        .unwrap();
    let phi = frobenius_poly(e, p, crate::ellcurve::DEFAULT_COUNT_BUDGET)?;
    Ok(match torsion_test(pt, &phi)? {
        TorsionWitness::Torsion { r, .. } => Some(r),
        TorsionWitness::NonTorsion { .. } => None,
    })
}

/// 4^{-n}·h widened by the tail c/(3·4^n), clipped at 0.
fn enclosure(h: Interval, n: u32, c: f64) -> Interval {
    let four_n = Integer::from(1) << (2 * n);
    let h = h.div(&Interval::from_integer(PREC, &four_n));
    let tail = Interval::from_f64_exact(PREC, c).div(&Interval::from_integer(PREC, &(four_n * 3u32)));
    let w = h.widen(tail.hi());
    let zero = Float::new(PREC);
    let lo = if *w.lo() < zero { zero } else { w.lo().clone() };
    Interval::new(lo, w.hi().clone())
}

fn tail_f64(c: f64, n: u32) -> f64 {
    c / 3.0 / 4f64.powi(n as i32)
}

/// X^4, X^3 Z, X^2 Z^2, X Z^3, Z^4 from three products and five squarings/products.
fn quartic_monomials(x: &Integer, z: &Integer) -> [Integer; 5] {
    let x2 = Integer::from(x.square_ref());
    let z2 = Integer::from(z.square_ref());
    let xz = Integer::from(x * z);
    [
        Integer::from(x2.square_ref()),
        Integer::from(&x2 * &xz),
        Integer::from(xz.square_ref()),
        Integer::from(&xz * &z2),
        Integer::from(z2.square_ref()),
    ]
}

/// A quartic form, coefficients from X^4 down to Z^4, at precomputed monomials.
fn eval_quartic(f: &[Integer], m: &[Integer; 5]) -> Integer {
    let mut acc = Integer::new();
    for (c, t) in f.iter().zip(m) {
        if *c != 0 {
            acc += Integer::from(c * t);
        }
    }
    acc
}

/// F2(x, 1) = 4x^3 + b2 x^2 + 2b4 x + b6 on an enclosure of x.
fn f2_affine(f2: &[Integer], x: &Interval) -> Interval {
    let mut acc = Interval::zero(x.prec());
    for c in &f2[1..] {
        acc = acc.mul(x).add(&Interval::from_integer(x.prec(), c));
    }
    acc
}

/// h([1 : x : y]) for rational x = X/Z in lowest terms. At finite places
/// max(1, |x|, |y|) = max(1, |x|)^{3/2} exactly on an integral model, so the
/// finite part is (3/2) log Z; only archimedean places need y, and y'^2 =
/// F2(x, 1) is evaluated on an enclosure of x.
fn psi_height_rational_x(pt: &ECPoint, x: &Integer, z: &Integer, f2: &[Integer], y0: &FieldElement, x0: &Rational, prec: u32) -> Interval {
    let iv = |v: &Integer| Interval::from_integer(prec, v);
    let xi = iv(x).div(&iv(z));
    let ratio = f2_affine(f2, &xi).div(&f2_affine(f2, &Interval::from_rational(prec, x0)));
    let q = ratio.max(&Interval::zero(prec)).sqrt();
    let [a1, _, a3, _, _] = pt.curve().a();
    let shift = CInterval::real(xi.mul(&iv(a1)).add(&iv(a3)).neg());
    let half = Interval::from_rational(prec, &Rational::from((1, 2)));
    let one = Interval::from_i64(prec, 1);
    let mut acc = Interval::zero(prec);
    for v in archimedean_places(pt.field()) {
        let y = embed(y0, v.arch().unwrap(), prec).scale(&q).add(&shift).scale(&half);
        let m = one.max(&xi.abs()).max(&y.abs());
        acc = acc.add(&m.ln().mul_i64(v.local_degree as i64));
    }
    let n = pt.field().degree() as i64;
    ln_integer(prec, z).mul_rational(&Rational::from((3, 2))).add(&acc.div_i64(n))
}

/// The orbit P, 2P, 4P, ... in one of two representations.
enum Orbit {
    /// Exact points over L.
    Points { q: ECPoint, seen: Vec<FieldElement> },
    /// x(2^n P) = X/Z in coprime integers. y is recovered up to sign from
    /// y'^2 = F2(X, Z)/Z^4 with y' = 2y + a1 x + a3; ĥ is even, so the sign
    /// does not change the limit or the tail.
    RationalX {
        xz: (Integer, Integer),
        seen: Vec<(Integer, Integer)>,
        forms: [Vec<Integer>; 2],
        multiple: Integer,
        y0: FieldElement,
        x0: Rational,
    },
}

impl Orbit {
    fn new(pt: &ECPoint) -> Orbit {
        let (x, y) = pt.xy().expect("nonzero point");
        match x.as_rational() {
            None => Orbit::Points { q: pt.clone(), seen: vec![] },
            Some(xr) => {
                let e = pt.curve();
                let forms = duplication_forms(e);
                let (multiple, _) = duplication_multiple(&forms);
                let [a1, _, a3, _, _] = e.coeffs_in(pt.field());
                let y0 = y.scale_i64(2).add(&a1.mul(x)).add(&a3);
                let xz = (xr.numer().clone(), xr.denom().clone());
                Orbit::RationalX {
                    xz,
                    seen: vec![],
                    forms,
                    multiple,
                    y0,
                    x0: xr,
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Orbit::Points { q, .. } => q.is_zero(),
            Orbit::RationalX { xz, .. } => xz.1 == 0,
        }
    }

    /// Index k < n with x(2^k P) = x(2^n P), i.e. 2^n P = ±2^k P.
    fn repeat(&self) -> Option<usize> {
        match self {
            Orbit::Points { q, seen } => seen.iter().position(|x| Some(x) == q.x()),
            Orbit::RationalX { xz, seen, .. } => seen.iter().position(|s| s == xz),
        }
    }

    fn height(&self, norm: Normalization, pt: &ECPoint) -> Result<Interval, HeightError> {
        match self {
            Orbit::Points { q, .. } => weil_height(&norm.project(q), PREC),
            Orbit::RationalX { xz: (x, z), forms, y0, x0, .. } => match norm {
                Normalization::X => Ok(ln_integer(PREC, &Integer::from(x.abs_ref()).max(z.clone()))),
                Normalization::Psi => adaptive(PREC, |prec| Some(psi_height_rational_x(pt, x, z, &forms[1], y0, x0, prec))),
            },
        }
    }

    fn advance(&mut self) {
        match self {
            Orbit::Points { q, seen } => {
                seen.push(q.x().unwrap().clone());
                *q = q.double();
            }
            Orbit::RationalX { xz, seen, forms, multiple, .. } => {
                let mono = quartic_monomials(&xz.0, &xz.1);
                let f1 = eval_quartic(&forms[0], &mono);
                let f2 = eval_quartic(&forms[1], &mono);
                // any common factor of F1, F2 divides R because gcd(X, Z) = 1
                let g = Integer::from(f1.gcd_ref(multiple)).gcd(&f2);
                let (mut nx, mut nz) = (f1.div_exact(&g), f2.div_exact(&g));
                if nz < 0 {
                    nx = -nx;
                    nz = -nz;
                }
                seen.push(std::mem::replace(xz, (nx, nz)));
            }
        }
    }
}

/// ĥ(P) = lim 4^{-n} h(2^n P), stopped once the geometric tail and the
/// numerical radius fit inside `tol`; exactly 0 on certified torsion.
pub fn canonical_height(pt: &ECPoint, norm: Normalization, tol: f64) -> Result<CanonicalHeightResult, CanonicalError> {
    canonical_height_with(pt, norm, tol, DEFAULT_MAX_DOUBLINGS, &height_comparison_bound(pt.curve()))
}

fn torsion_multiple(pt: &ECPoint, n: u32, k: Option<usize>) -> Integer {
    let two_n = Integer::from(1) << n;
    let cands = match k {
        None => vec![two_n],
        Some(k) => {
            let two_k = Integer::from(1) << k as u32;
            vec![Integer::from(&two_n - &two_k), two_n + two_k]
        }
    };
    cands
        .into_iter()
        .find(|r| pt.mul_int(r).is_zero())
        .expect("doubling orbit repeat without torsion")
}

pub fn canonical_height_with(
    pt: &ECPoint,
    norm: Normalization,
    tol: f64,
    max_doublings: u32,
    bound: &HeightComparisonBound,
) -> Result<CanonicalHeightResult, CanonicalError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if pt.is_zero() {
        return Ok(CanonicalHeightResult::zero(norm, 0, Integer::from(1)));
    }
    let c = bound.c_dup_for(norm);
    let mut orbit = Orbit::new(pt);
    // h_x(P) > C_dup,x/3 forces ĥ_x(P) > 0, so the torsion test can be skipped
    let hx = orbit.height(Normalization::X, pt)?;
    if hx.lower_f64() <= bound.c_dup_x / 3.0 {
        if let Some(r) = torsion_by_frobenius(pt)? {
            return Ok(CanonicalHeightResult::zero(norm, 0, r));
        }
    }
    for n in 0..=max_doublings {
        let rep = orbit.repeat();
        if orbit.is_zero() || rep.is_some() {
            return Ok(CanonicalHeightResult::zero(norm, n, torsion_multiple(pt, n, rep)));
        }
        if tail_f64(c, n) <= tol / 2.0 {
            let enc = enclosure(orbit.height(norm, pt)?, n, c);
            let (lo, hi) = (enc.lower_f64(), enc.upper_f64());
            let value = (lo + hi) / 2.0;
            let error = (hi - value).max(value - lo);
            if norm == Normalization::Psi {
                let ex = enclosure(orbit.height(Normalization::X, pt)?, n, bound.c_dup_x).mul_rational(&Rational::from((3, 2)));
                assert!(
                    ex.ge(&enc) != Some(false) && enc.ge(&ex) != Some(false),
                    "psi height disagrees with (3/2) x height"
                );
            }
            if error <= tol {
                return Ok(CanonicalHeightResult {
                    value,
                    error,
                    lo,
                    hi,
                    steps: n,
                    normalization: norm,
                    torsion_order_multiple: None,
                });
            }
        }
        orbit.advance();
    }
    Err(CanonicalError::ToleranceUnreachable { tol, steps: max_doublings })
}

/// ĥ(Σ x_i) <= t·Σ ĥ(x_i) for t = number of points, up to the combined tolerance.
pub fn parallelogram_check(points: &[ECPoint], tol: f64) -> Result<bool, CanonicalError> {
    assert!(!points.is_empty(), "need at least one point");
    let mut sum = points[0].clone();
    for p in &points[1..] {
        sum = sum.add(p)?;
    }
    let lhs = canonical_height(&sum, Normalization::Psi, tol)?;
    let t = points.len() as f64;
    let hs = crate::par::par_map(points, |p| canonical_height(p, Normalization::Psi, tol));
    let mut rhs = 0.0;
    for h in hs {
        rhs += h?.value;
    }
    Ok(lhs.value <= t * rhs + tol * (1.0 + t * t))
}

/// |ĥ(σP) - ĥ(P)| <= 2·tol for every σ in Gal(L/Q).
pub fn galois_invariance_check(pt: &ECPoint, tol: f64) -> Result<bool, CanonicalError> {
    let base = canonical_height(pt, Normalization::Psi, tol)?;
    let sigmas = GaloisElement::all(pt.field());
    let imgs = crate::par::par_map(&sigmas, |s| -> Result<f64, CanonicalError> {
        Ok(canonical_height(&pt.galois(s)?, Normalization::Psi, tol)?.value)
    });
    for v in imgs {
        if (v? - base.value).abs() > 2.0 * tol {
            return Ok(false);
        }
    }
    Ok(true)
}
