//! Weil heights on projective space and the logarithmic v-adic distance.

use crate::interval::{ln_integer, Interval};
use crate::numfield::{
    archimedean_places, embed, ideal_norm_of_generators, valuation, Field, FieldElement, FieldError, Place, PlaceKind, PrimeIdeal, Valuation,
};
use rug::{Integer, Rational};
use std::fmt;

/// Working precision for the first interval evaluation.
pub const START_PREC: u32 = 128;
/// Largest working precision tried before giving up.
pub const MAX_PREC: u32 = 1 << 15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeightError {
    #[error("all coordinates are zero")]
    AllZero,
    #[error("points have different dimensions")]
    DimensionMismatch,
    #[error("points are equal")]
    EqualPoints,
    #[error("points are not congruent modulo {0}")]
    NotCongruent(String),
    #[error("undecidable at the precision cap of {0} bits")]
    PrecisionCap(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point [x_0 : ... : x_n] of P^n(K).
#[derive(Clone, Debug)]
pub struct ProjPoint {
    field: Field,
    coords: Vec<FieldElement>,
}

impl ProjPoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self, HeightError> {
        let first = coords.first().ok_or(HeightError::AllZero)?;
        let field = first.field().clone();
        for c in &coords {
            c.same_field(first)?;
        }
        if coords.iter().all(|c| c.is_zero()) {
            return Err(HeightError::AllZero);
        }
        Ok(ProjPoint { field, coords })
    }

    pub fn from_i64s(field: &Field, xs: &[i64]) -> Result<Self, HeightError> {
        ProjPoint::new(xs.iter().map(|&x| FieldElement::from_int(field, x)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn scale(&self, c: &FieldElement) -> ProjPoint {
        assert!(!c.is_zero(), "scaling by zero");
        ProjPoint {
            field: self.field.clone(),
            coords: self.coords.iter().map(|x| x.mul(c)).collect(),
        }
    }

    /// Coordinates multiplied by the lcm of their denominators.
    pub fn integral_coords(&self) -> Vec<FieldElement> {
        let mut l = Integer::from(1);
        for c in &self.coords {
            l.lcm_mut(c.den());
        }
        self.coords.iter().map(|c| c.scale_int(&l)).collect()
    }

    /// All 2×2 minors x_i y_j - x_j y_i with i < j.
    pub fn minors(&self, o: &ProjPoint) -> Vec<FieldElement> {
        let n = self.coords.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.coords[i].mul(&o.coords[j]).sub(&self.coords[j].mul(&o.coords[i])));
            }
        }
        out
    }

    /// Projective equality: every minor vanishes.
    pub fn proj_eq(&self, o: &ProjPoint) -> bool {
        self.coords.len() == o.coords.len() && self.minors(o).iter().all(|m| m.is_zero())
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// Runs `f` at doubling precision until it returns `Some`.
pub fn adaptive<T>(start: u32, mut f: impl FnMut(u32) -> Option<T>) -> Result<T, HeightError> {
    let mut prec = start.max(64);
    loop {
        if let Some(v) = f(prec) {
            return Ok(v);
        }
        if prec >= MAX_PREC {
            return Err(HeightError::PrecisionCap(prec));
        }
        prec *= 2;
    }
}

/// log max_k |x_k| at an archimedean place, or None if the enclosure still
/// touches zero.
fn log_max_arch(xs: &[FieldElement], arch: &crate::numfield::ArchPlace, prec: u32) -> Option<Interval> {
    let mut m: Option<Interval> = None;
    for x in xs.iter().filter(|x| !x.is_zero()) {
        let a = embed(x, arch, prec).abs();
        m = Some(match m {
            None => a,
            Some(b) => b.max(&a),
        });
    }
    let m = m?;
    if m.is_positive() {
        Some(m.ln())
    } else {
        None
    }
}

/// Absolute logarithmic Weil height h(x), as an enclosure.
pub fn weil_height(x: &ProjPoint, prec: u32) -> Result<Interval, HeightError> {
    let ints = x.integral_coords();
    let norm = ideal_norm_of_generators(&ints)?;
    let places = archimedean_places(x.field());
    let n = x.field().degree() as i64;
    let eval = |p: u32| -> Option<Interval> {
        let mut acc = ln_integer(p, &norm).neg();
        for v in &places {
            let l = log_max_arch(&ints, v.arch().unwrap(), p)?;
            acc = acc.add(&l.mul_i64(v.local_degree as i64));
        }
        Some(acc.div_i64(n))
    };
    adaptive(prec, eval)
}

/// The value of δ_v: +∞, an exact rational multiple of log p, or an
/// archimedean enclosure.
#[derive(Clone, Debug)]
pub enum Delta {
    Infinity,
    LogP { p: u64, coeff: Rational },
    Approx(Interval),
}

impl Delta {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Delta::Infinity)
    }

    /// Enclosure of δ_v (a point at +∞ when infinite).
    pub fn to_interval(&self, prec: u32) -> Interval {
        match self {
            Delta::Infinity => Interval::infinite(prec),
            Delta::LogP { p, coeff } => ln_integer(prec, &Integer::from(*p)).mul_rational(coeff),
            Delta::Approx(i) => i.clone(),
        }
    }
}

fn min_valuation(xs: &[FieldElement], pr: &PrimeIdeal) -> i64 {
    xs.iter().map(|x| valuation(x, pr)).min().and_then(|v| v.finite()).expect("nonzero point")
}

/// Exact finite-place distance (v_min(minors) - v_min(x) - v_min(y)) / e,
/// as a multiple of log p; None for equal points.
pub fn delta_finite(x: &ProjPoint, y: &ProjPoint, pr: &PrimeIdeal) -> Option<Rational> {
    let minors = x.minors(y);
    let vm = match minors.iter().map(|m| valuation(m, pr)).min().unwrap_or(Valuation::Infinity) {
        Valuation::Infinity => return None,
        Valuation::Finite(v) => v,
    };
    let k = vm - min_valuation(x.coords(), pr) - min_valuation(y.coords(), pr);
    Some(Rational::from((k, pr.e as i64)))
}

/// δ_v(x, y) = -log(max|minor|_v / (max|x|_v max|y|_v)), +∞ when x = y.
pub fn delta_v(x: &ProjPoint, y: &ProjPoint, v: &Place, prec: u32) -> Result<Delta, HeightError> {
    if x.coords.len() != y.coords.len() {
        return Err(HeightError::DimensionMismatch);
    }
    x.coords[0].same_field(&y.coords[0])?;
    match &v.kind {
        PlaceKind::Finite(pr) => Ok(match delta_finite(x, y, pr) {
            None => Delta::Infinity,
            Some(coeff) => Delta::LogP { p: pr.p, coeff },
        }),
        PlaceKind::Archimedean(arch) => {
            let minors = x.minors(y);
            if minors.iter().all(|m| m.is_zero()) {
                return Ok(Delta::Infinity);
            }
            let val = adaptive(prec, |p| {
                let lm = log_max_arch(&minors, arch, p)?;
                let lx = log_max_arch(x.coords(), arch, p)?;
                let ly = log_max_arch(y.coords(), arch, p)?;
                Some(lx.add(&ly).sub(&lm))
            })?;
            Ok(Delta::Approx(val))
        }
    }
}

/// Outcome of comparing h(x) + h(y) with a place-sum lower bound.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub lhs: Interval,
    pub rhs: Interval,
    pub holds: bool,
}

fn decide(lhs: Interval, rhs: Interval) -> Comparison {
    // Equality cases are counted as holding when the enclosures overlap.
    let holds = lhs.ge(&rhs) != Some(false);
    Comparison { lhs, rhs, holds }
}

/// h(x) + h(y) against Σ_{v ∈ T} n_v δ_v(x, y) - log 2.
pub fn check_local_global(x: &ProjPoint, y: &ProjPoint, places: &[Place], prec: u32) -> Result<Comparison, HeightError> {
    if x.proj_eq(y) {
        return Err(HeightError::EqualPoints);
    }
    let lhs = weil_height(x, prec)?.add(&weil_height(y, prec)?);
    let mut rhs = Interval::ln2(lhs.prec()).neg();
    for v in places {
        let d = delta_v(x, y, v, prec)?.to_interval(lhs.prec());
        rhs = rhs.add(&d.mul_rational(&v.n_v));
    }
    Ok(decide(lhs, rhs))
}

/// Checks P ≡ Q at each listed prime, then compares h(P) + h(Q) with
/// (1/[L:Q]) Σ log N(𝔓_i) - log 2.
pub fn congruence_height_bound(p: &ProjPoint, q: &ProjPoint, primes: &[PrimeIdeal], prec: u32) -> Result<Comparison, HeightError> {
    if p.proj_eq(q) {
        return Err(HeightError::EqualPoints);
    }
    let n = p.field().degree() as i64;
    let lhs = weil_height(p, prec)?.add(&weil_height(q, prec)?);
    let w = lhs.prec();
    let mut rhs = Interval::ln2(w).neg();
    for pr in primes {
        let d = delta_finite(p, q, pr).expect("distinct points");
        if d < Rational::from((1, pr.e as i64)) {
            return Err(HeightError::NotCongruent(pr.label()));
        }
        let term = ln_integer(w, &Integer::from(pr.p)).mul_i64(pr.f as i64).div_i64(n);
        rhs = rhs.add(&term);
    }
    Ok(decide(lhs, rhs))
}
