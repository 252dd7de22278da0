use super::division::torsion_points;
use super::reduction::{count_points, count_points_ext, DEFAULT_COUNT_BUDGET};
use super::{Curve, CurveError};
use crate::arith::is_prime;
use crate::interval::Interval;
use crate::numfield::{primes_above, Field, FieldKind};
use rug::Integer;
use serde::{Deserialize, Serialize};

/// Theorem mode enforces p > exp(B + 1); diagnostic mode skips it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theorem,
    Diagnostic,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theorem" => Ok(Mode::Theorem),
            "diagnostic" => Ok(Mode::Diagnostic),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GoodPrimeConfig {
    pub mode: Mode,
    pub start: u64,
    /// Largest prime tried.
    pub prime_budget: u64,
    pub count_budget: u64,
    /// Residue tuples allowed per root search.
    pub root_budget: u64,
    /// Division-polynomial route runs for p up to this bound.
    pub division_max_p: u64,
    /// B from the height comparison, required in theorem mode.
    pub b: Option<Interval>,
}

impl Default for GoodPrimeConfig {
    fn default() -> Self {
        GoodPrimeConfig {
            mode: Mode::Diagnostic,
            start: 2,
            prime_budget: 100_000,
            count_budget: DEFAULT_COUNT_BUDGET,
            root_budget: 20_000,
            division_max_p: 97,
            b: None,
        }
    }
}

/// A good prime 𝔩 ∤ p of L with p ∤ #Ẽ(k_𝔩); E(L)[p] injects into Ẽ(k_𝔩).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionWitness {
    pub ell: u64,
    pub f: u32,
    pub count: String,
}

/// Both routes for E(L)[p] = 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionCheck {
    pub p: u64,
    pub field: FieldKind,
    pub division_ran: bool,
    pub division_points: usize,
    pub division_exhaustive: bool,
    pub division_sieve_primes: Vec<u64>,
    pub reduction_witness: Option<ReductionWitness>,
    pub trivial: bool,
}

/// First good prime ℓ != p, unramified in L, whose residue fields have a
/// point count prime to p.
pub fn torsion_free_by_reduction(e: &Curve, field: &Field, p: u64, tries: usize, count_budget: u64) -> Option<ReductionWitness> {
    let mut ell = 1u64;
    let mut seen = 0;
    while seen < tries {
        ell += 1;
        if !is_prime(ell) || ell == p || !e.is_good(ell) || field.is_ramified(ell) || ell > count_budget {
            continue;
        }
        seen += 1;
        let f = primes_above(field, ell).ok()?[0].f;
        let (_, a) = count_points(e, ell, count_budget).ok()?;
        let n = count_points_ext(a, ell, f);
        if !n.is_divisible(&Integer::from(p)) {
            return Some(ReductionWitness { ell, f, count: n.to_string() });
        }
    }
    None
}

/// Checks E(L)[p] = 0 by division-polynomial search over L and by
/// reduction at an auxiliary prime; the routes must not disagree.
pub fn check_p_torsion(e: &Curve, field: &Field, p: u64, cfg: &GoodPrimeConfig) -> TorsionCheck {
    let reduction_witness = torsion_free_by_reduction(e, field, p, 60, cfg.count_budget);
    let (division_ran, points, exhaustive, sieve) = if p <= cfg.division_max_p {
        let t = torsion_points(e, field, p, cfg.root_budget);
        (true, t.points.len(), t.exhaustive, t.sieve_primes)
    } else {
        (false, 0, false, vec![])
    };
    assert!(
        !(points > 0 && reduction_witness.is_some()),
        "p-torsion found in E(L) although reduction at an auxiliary prime excludes it"
    );
    let trivial = points == 0 && ((division_ran && exhaustive) || reduction_witness.is_some());
    TorsionCheck {
        p,
        field: field.kind(),
        division_ran,
        division_points: points,
        division_exhaustive: exhaustive,
        division_sieve_primes: sieve,
        reduction_witness,
        trivial,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedPrime {
    pub p: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodPrimeReport {
    pub p: u64,
    pub mode: Mode,
    /// Upper end of exp(B + 1) in theorem mode.
    pub threshold: Option<f64>,
    pub cm_discriminant: Option<i64>,
    pub a_p: i64,
    pub ordinary: Option<bool>,
    pub torsion: Option<TorsionCheck>,
    pub rejected: Vec<RejectedPrime>,
}

/// Smallest admissible p >= start: good reduction, p > exp(B + 1) in
/// theorem mode, and E(L)[p] = 0 (non-CM) or ordinary reduction (CM).
pub fn select_good_prime(e: &Curve, field: &Field, cfg: &GoodPrimeConfig) -> Result<(u64, GoodPrimeReport), CurveError> {
    let threshold = match cfg.mode {
        Mode::Diagnostic => None,
        Mode::Theorem => {
            let b = cfg.b.clone().ok_or_else(|| CurveError::Hypothesis("theorem mode needs B".into()))?;
            let one = Interval::from_i64(b.prec(), 1);
            Some(b.add(&one).exp())
        }
    };
    let mut rejected = Vec::new();
    let mut p = cfg.start.max(2) - 1;
    while p < cfg.prime_budget {
        p += 1;
        if !is_prime(p) {
            continue;
        }
        if !e.is_good(p) {
            rejected.push(RejectedPrime {
                p,
                reason: "bad reduction".into(),
            });
            continue;
        }
        if let Some(t) = &threshold {
            let pi = Interval::from_i64(t.prec(), p as i64);
            if pi.lo() <= t.hi() {
                continue;
            }
        }
        if p > cfg.count_budget {
            return Err(CurveError::BudgetExceeded(p));
        }
        let (_, a_p) = count_points(e, p, cfg.count_budget)?;
        let report = |ordinary, torsion| GoodPrimeReport {
            p,
            mode: cfg.mode,
            threshold: threshold.as_ref().map(|t| t.upper_f64()),
            cm_discriminant: e.cm_discriminant(),
            a_p,
            ordinary,
            torsion,
            rejected: rejected.clone(),
        };
        if e.is_cm() {
            let ordinary = a_p.rem_euclid(p as i64) != 0;
            if ordinary {
                return Ok((p, report(Some(true), None)));
            }
            rejected.push(RejectedPrime {
                p,
                reason: "supersingular".into(),
            });
        } else {
            let t = check_p_torsion(e, field, p, cfg);
            if t.trivial {
                return Ok((p, report(None, Some(t))));
            }
            rejected.push(RejectedPrime {
                p,
                reason: format!("E(L)[{p}] not shown trivial"),
            });
        }
    }
    Err(CurveError::NoPrimeInBudget(cfg.prime_budget))
}
