use super::{
    BoundCertificate, Branch, CertifyConfig, CertifyError, CheckStatus, Ctx, HeightCheck, PointDigest, PrimeCheck, PrimeCheckKind, Relation, Verdict, PREC,
};
use crate::ellcurve::{check_p_torsion, is_ordinary, reduce_point, torsion_points, ECPoint};
use crate::heights::{check_local_global, delta_finite};
use crate::interval::Interval;
use crate::numfield::{extension_info, inertia_fixed_field, inertia_tau, places_above, primes_above, valuation, ExtensionInfo, FieldElement, GaloisElement};
use rug::Rational;
use serde::{Deserialize, Serialize};

/// Above this size of x([p]P) the Weil-height form of the distance bound is skipped.
const WEIL_CHECK_BITS: u32 = 1 << 20;

/// v_𝔓(τ(α)^p - α^p) at each prime above p, against e = v_𝔓(p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdCheck {
    pub p: u64,
    pub e: u32,
    pub tau: GaloisElement,
    /// None is +∞ (the difference vanishes).
    pub valuations: Vec<(String, Option<i64>)>,
    pub holds: bool,
}

pub fn ad_congruence_check(alpha: &FieldElement, p: u64) -> Result<AdCheck, CertifyError> {
    let field = alpha.field();
    let tau = inertia_tau(field, p)?;
    let primes = primes_above(field, p)?;
    for pr in &primes {
        if valuation(alpha, pr).finite().is_some_and(|v| v < 0) {
            return Err(CertifyError::Hypothesis(format!("{alpha} is not integral at {}", pr.label())));
        }
    }
    let k = p as u32;
    let d = alpha.galois(&tau)?.pow(k).sub(&alpha.pow(k));
    let e = primes[0].e;
    let valuations: Vec<(String, Option<i64>)> = primes.iter().map(|pr| (pr.label(), valuation(&d, pr).finite())).collect();
    let holds = valuations.iter().all(|(_, v)| v.is_none_or(|v| v >= e as i64));
    Ok(AdCheck { p, e, tau, valuations, holds })
}

/// [p]τP != [p]P: δ_𝔓 >= log p at each 𝔓 | p, so ĥ([p]τP) + ĥ([p]P) >= log p - B
/// and ĥ(P) >= (log p - B)/(2p^2).
fn distance_argument(ctx: &Ctx, pt: &ECPoint, q1: &ECPoint, q2: &ECPoint, cert: &mut BoundCertificate) -> Result<(), CertifyError> {
    let field = pt.field();
    let p = ctx.p;
    let n = field.degree() as i64;
    let (s1, s2) = (q1.psi(), q2.psi());
    let mut weighted = Rational::new();
    for pr in primes_above(field, p)? {
        let c = delta_finite(&s1, &s2, &pr).expect("distinct points");
        cert.prime_checks.push(PrimeCheck {
            prime: pr.label(),
            kind: PrimeCheckKind::Distance,
            value: c.to_string(),
            required: ">= 1".into(),
            holds: c >= 1,
        });
        weighted += c * Rational::from(((pr.e * pr.f) as i64, n));
    }
    cert.prime_checks.push(PrimeCheck {
        prime: format!("all above {p}"),
        kind: PrimeCheckKind::WeightedDistance,
        value: weighted.to_string(),
        required: ">= 1".into(),
        holds: weighted >= 1,
    });
    let bits = q1.x().map_or(0, |x| x.bit_size()).max(q2.x().map_or(0, |x| x.bit_size()));
    if bits <= WEIL_CHECK_BITS {
        let c = check_local_global(&s1, &s2, &places_above(field, p)?, PREC)?;
        cert.height_checks.push(HeightCheck::new(
            "h(psi Q1) + h(psi Q2) >= sum n_v delta_v - log 2",
            &c.lhs,
            Relation::AtLeast,
            &c.rhs,
        ));
    } else {
        cert.notes.push(format!("Weil-height distance bound skipped: x has {bits} bits"));
    }
    let rhs = ctx.ln_p().mul_rational(&weighted).sub(&ctx.b());
    let pi = Interval::from_i64(PREC, p as i64);
    let p2h = pi.mul(&pi).mul(&ctx.measured.interval());
    let h1 = ctx
        .height_until(q1, |h| HeightCheck::new("", &h.add(h), Relation::AtLeast, &rhs).status == CheckStatus::Verified)?
        .interval();
    let h2 = ctx
        .height_until(q2, |h| HeightCheck::new("", &h.add(h), Relation::AtLeast, &rhs).status == CheckStatus::Verified)?
        .interval();
    cert.height_checks
        .push(HeightCheck::new("ĥ(Q1) + ĥ(Q2) >= sum n_v delta_v - B", &h1.add(&h2), Relation::AtLeast, &rhs));
    cert.height_checks.push(HeightCheck::new("ĥ(Q1) = p^2 ĥ(P)", &h1, Relation::Equal, &p2h));
    cert.height_checks.push(HeightCheck::new("ĥ(Q2) = p^2 ĥ(P)", &h2, Relation::Equal, &p2h));
    let lower = ctx.ln_p().sub(&ctx.b()).div(&pi.mul(&pi).mul_i64(2));
    ctx.conclude(cert, lower);
    Ok(())
}

fn inertia_setup(ctx: &Ctx, pt: &ECPoint, branch: Branch) -> Result<(BoundCertificate, GaloisElement, ExtensionInfo, ECPoint), CertifyError> {
    let field = pt.field();
    let p = ctx.p;
    if !field.is_ramified(p) {
        return Err(CertifyError::Hypothesis(format!("{p} is unramified in {}", field.literal())));
    }
    if !pt.curve().is_good(p) {
        return Err(CertifyError::Hypothesis(format!("bad reduction at {p}")));
    }
    let tau = inertia_tau(field, p)?;
    let ext = extension_info(field, p)?;
    let mut cert = ctx.skeleton(pt, branch);
    cert.galois_element = Some(tau);
    cert.galois_role = Some("inertia".into());
    cert.extension = Some(ext.clone());
    let tp = pt.galois(&tau)?;
    Ok((cert, tau, ext, tp))
}

/// Descends a τ-fixed point to L^τ and certifies it there; `drop` checks the
/// strict decrease of the inductive invariant.
fn descend(
    ctx: &Ctx,
    fixed: &ECPoint,
    cert: &mut BoundCertificate,
    drop: impl Fn(&ExtensionInfo, &ExtensionInfo) -> (String, bool),
) -> Result<(), CertifyError> {
    let p = ctx.p;
    let sub = inertia_fixed_field(fixed.field(), p)?;
    let Some(down) = fixed.restrict(&sub) else {
        cert.notes.push(format!("τ-fixed point does not lie in {}", sub.literal()));
        cert.verdict = Verdict::RefutedStep;
        return Ok(());
    };
    let before = cert.extension.clone().expect("extension recorded");
    let after = extension_info(&sub, p)?;
    let (value, holds) = drop(&before, &after);
    cert.prime_checks.push(PrimeCheck {
        prime: format!("{p}"),
        kind: PrimeCheckKind::DescentDrop,
        value,
        required: "strict decrease".into(),
        holds,
    });
    let child = super::certify_at(&down, p, ctx.cfg, None)?;
    cert.height_checks.push(HeightCheck::new(
        "ĥ(descended point) = ĥ(P)",
        &child.measured.interval(),
        Relation::Equal,
        &ctx.measured.interval(),
    ));
    cert.intermediate_bound = child.intermediate_bound;
    cert.theorem_bound = child.theorem_bound;
    cert.claimed_bound = child.claimed_bound;
    if let Some(c) = child.claimed_bound {
        let ci = Interval::span(PREC, c, c);
        cert.height_checks.push(HeightCheck::new(
            "claimed bound <= measured ĥ(P)",
            &ci,
            Relation::AtMost,
            &ctx.measured.interval(),
        ));
    }
    cert.verdict = if cert.steps_hold() { child.verdict } else { Verdict::RefutedStep };
    cert.descent = Some(Box::new(child));
    Ok(())
}

/// Non-CM curve, p ramified in L, E(L)[p] = 0 checked over L.
pub fn certify_ramified_noncm(pt: &ECPoint, p: u64, cfg: &CertifyConfig) -> Result<BoundCertificate, CertifyError> {
    let ctx = Ctx::new(pt, p, cfg, None)?;
    if let Some(r) = &ctx.measured.torsion_order_multiple {
        return Ok(super::torsion_certificate(&ctx, pt, &r.parse().expect("integer witness")));
    }
    run_noncm(&ctx, pt)
}

pub(super) fn run_noncm(ctx: &Ctx, pt: &ECPoint) -> Result<BoundCertificate, CertifyError> {
    if pt.curve().is_cm() {
        return Err(CertifyError::Hypothesis("CM curve: use the CM descent step".into()));
    }
    let (mut cert, _, _, tp) = inertia_setup(ctx, pt, Branch::RamifiedNoncm)?;
    let (e, field, p) = (pt.curve(), pt.field(), ctx.p);
    let record = match ctx.report.as_ref().and_then(|r| r.torsion.clone()).filter(|t| t.field == field.kind()) {
        Some(t) => t,
        None => check_p_torsion(e, field, p, &ctx.cfg.good_prime),
    };
    cert.torsion_record = Some(record.clone());
    cert.notes
        .push("E(L)[p] = 0 is checked over this L only, by division-polynomial roots and by reduction".into());
    if !record.trivial {
        return Err(CertifyError::Hypothesis(format!("E(L)[{p}] = 0 not established over {}", field.literal())));
    }
    let q1 = tp.mul_i64(p as i64);
    let q2 = pt.mul_i64(p as i64);
    cert.derived.push(PointDigest::of("[p]tau P", &q1));
    cert.derived.push(PointDigest::of("[p]P", &q2));
    if q1 != q2 {
        distance_argument(ctx, pt, &q1, &q2, &mut cert)?;
        return Ok(cert);
    }
    let d = tp.sub(pt)?;
    cert.derived.push(PointDigest::of("(tau-1)P", &d));
    if !d.is_zero() {
        cert.notes
            .push("(tau-1)P is a nonzero point of E(L)[p], contradicting the E(L)[p] = 0 record".into());
        cert.verdict = Verdict::RefutedStep;
        return Ok(cert);
    }
    cert.branch = Branch::RamifiedDescent;
    descend(ctx, pt, &mut cert, |a, b| (format!("e: {} -> {}", a.e, b.e), b.e < a.e))?;
    Ok(cert)
}

/// CM curve, p ordinary and ramified in L with conductor exponent k.
pub fn cm_ramified_step(pt: &ECPoint, p: u64, cfg: &CertifyConfig) -> Result<BoundCertificate, CertifyError> {
    let ctx = Ctx::new(pt, p, cfg, None)?;
    if let Some(r) = &ctx.measured.torsion_order_multiple {
        return Ok(super::torsion_certificate(&ctx, pt, &r.parse().expect("integer witness")));
    }
    run_cm(&ctx, pt)
}

/// A point T of E(L)[n] with τT − T = q, and whether the search over E(L)[n] was exhaustive.
pub fn descent_torsion(q: &ECPoint, tau: &GaloisElement, n: u64, root_budget: u64) -> Result<(Option<ECPoint>, bool), CertifyError> {
    let search = torsion_points(q.curve(), q.field(), n, root_budget);
    for t in &search.points {
        if t.galois(tau)?.sub(t)? == *q {
            return Ok((Some(t.clone()), search.exhaustive));
        }
    }
    Ok((None, search.exhaustive))
}

pub(super) fn run_cm(ctx: &Ctx, pt: &ECPoint) -> Result<BoundCertificate, CertifyError> {
    let (e, field, p) = (pt.curve(), pt.field(), ctx.p);
    if !e.is_cm() {
        return Err(CertifyError::Hypothesis("curve is not CM".into()));
    }
    let (mut cert, tau, ext, tp) = inertia_setup(ctx, pt, Branch::RamifiedDescent)?;
    let ordinary = is_ordinary(e, p, ctx.cfg.good_prime.count_budget.max(p))?;
    cert.ordinary = Some(ordinary);
    if !ordinary {
        return Err(CertifyError::Hypothesis(format!("supersingular reduction at {p}")));
    }
    let q1 = tp.mul_i64(p as i64);
    let q2 = pt.mul_i64(p as i64);
    cert.derived.push(PointDigest::of("[p]tau P", &q1));
    cert.derived.push(PointDigest::of("[p]P", &q2));
    if q1 != q2 {
        cert.notes.push("[p]tau P != [p]P: distance argument, no descent needed".into());
        distance_argument(ctx, pt, &q1, &q2, &mut cert)?;
        return Ok(cert);
    }
    let q = tp.sub(pt)?;
    cert.derived.push(PointDigest::of("(tau-1)P", &q));
    let t = if q.is_zero() {
        ECPoint::infinity(e, field)
    } else {
        for pr in primes_above(field, p)? {
            let red = reduce_point(&q, &pr)?;
            cert.prime_checks.push(PrimeCheck {
                prime: pr.label(),
                kind: PrimeCheckKind::FormalGroup,
                value: if red.is_none() { "O".into() } else { "nonzero".into() },
                required: "O".into(),
                holds: red.is_none(),
            });
        }
        let n = p.pow(ext.k);
        if n > ctx.cfg.cm_torsion_cap {
            cert.notes.push(format!("p^k = {n} exceeds the torsion search cap {}", ctx.cfg.cm_torsion_cap));
            cert.verdict = Verdict::DescentIncomplete;
            return Ok(cert);
        }
        let (found, exhaustive) = descent_torsion(&q, &tau, n, ctx.cfg.good_prime.root_budget)?;
        match found {
            Some(t) => t,
            None => {
                cert.notes.push(if exhaustive {
                    format!("no T in E(L)[{n}] with (tau-1)T = (tau-1)P; L(E[{n}]) is not constructed")
                } else {
                    format!("root search budget exhausted for E(L)[{n}]")
                });
                cert.verdict = Verdict::DescentIncomplete;
                return Ok(cert);
            }
        }
    };
    cert.descent_torsion = Some(PointDigest::of("T", &t));
    let fixed = pt.sub(&t)?;
    if fixed.galois(&tau)? != fixed {
        cert.notes.push("P - T is not fixed by tau".into());
        cert.verdict = Verdict::RefutedStep;
        return Ok(cert);
    }
    descend(ctx, &fixed, &mut cert, |a, b| (format!("k: {} -> {}", a.k, b.k), b.k < a.k))?;
    Ok(cert)
}
