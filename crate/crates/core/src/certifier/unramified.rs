use super::{BoundCertificate, Branch, CertifyConfig, CertifyError, Ctx, HeightCheck, PointDigest, PrimeCheck, PrimeCheckKind, Relation, Verdict, PREC};
use crate::ellcurve::{frobenius_poly, reduce_point, resultant_with_cyclotomic, ECPoint, ResPoint, ResidueCurve};
use crate::heights::{congruence_height_bound, HeightError};
use crate::interval::Interval;
use crate::numfield::{frobenius_lift, primes_above, valuation, PrimeIdeal};
use rug::Integer;

/// Above this size of x(Q) the Weil-height form of the congruence bound is skipped.
const WEIL_CHECK_BITS: u32 = 1 << 20;

/// Φ_p(σ)P ≡ O modulo every prime above p, so ĥ(Φ_p(σ)P) >= log p - B, while
/// ĥ(Φ_p(σ)P) <= 144p^2 ĥ(P); hence ĥ(P) >= (log p - B)/(144p^2).
pub fn certify_unramified(pt: &ECPoint, p: u64, cfg: &CertifyConfig) -> Result<BoundCertificate, CertifyError> {
    if pt.field().is_ramified(p) && !cfg.ramification_weighted {
        return Err(CertifyError::Hypothesis(format!("{p} ramifies in {}", pt.field().literal())));
    }
    if !pt.curve().is_good(p) {
        return Err(CertifyError::Hypothesis(format!("bad reduction at {p}")));
    }
    let ctx = Ctx::new(pt, p, cfg, None)?;
    if let Some(r) = &ctx.measured.torsion_order_multiple {
        return Ok(super::torsion_certificate(&ctx, pt, &r.parse().expect("integer witness")));
    }
    run(&ctx, pt)
}

/// Φ_p(Frob) applied to the reduction of P inside Ẽ(k_𝔓), never touching Φ_p(σ)P.
fn residue_image(pt: &ECPoint, pr: &PrimeIdeal, a_p: i64) -> Result<ResPoint, CertifyError> {
    let rc = ResidueCurve::new(pt.curve(), pr.residue_field())?;
    let k = &rc.k;
    let frob = |q: &ResPoint| q.as_ref().map(|(x, y)| (k.pow(x, pr.p as u128), k.pow(y, pr.p as u128)));
    let r0 = reduce_point(pt, pr)?;
    let r1 = frob(&r0);
    let r2 = frob(&r1);
    let a = rc.add(&rc.mul_int(&r0, &Integer::from(pr.p)), &rc.mul_int(&r1, &Integer::from(-a_p)));
    Ok(rc.add(&a, &r2))
}

pub(super) fn run(ctx: &Ctx, pt: &ECPoint) -> Result<BoundCertificate, CertifyError> {
    let (e, field, p) = (pt.curve(), pt.field(), ctx.p);
    if !e.is_good(p) {
        return Err(CertifyError::Hypothesis(format!("bad reduction at {p}")));
    }
    let ramified = field.is_ramified(p);
    let phi = frobenius_poly(e, p, ctx.cfg.good_prime.count_budget.max(p))?;
    let sigma = frobenius_lift(field, p)?;
    let mut cert = ctx.skeleton(pt, Branch::Unramified);
    cert.constants.a_p = Some(phi.a_p);
    cert.constants.frobenius_polynomial = Some(phi.literal());
    cert.galois_element = Some(sigma);
    cert.galois_role = Some(if ramified { "frobenius-lift" } else { "frobenius" }.into());
    let q = pt.apply_poly(&sigma, &phi.coeff_integers())?;
    cert.derived.push(PointDigest::of("Phi_p(sigma)P", &q));
    if q.is_zero() {
        let r = resultant_with_cyclotomic(&phi, sigma.order());
        cert.branch = Branch::Torsion;
        cert.torsion_witness = Some(r.to_string());
        cert.verdict = if pt.mul_int(&r).is_zero() { Verdict::Torsion } else { Verdict::RefutedStep };
        return Ok(cert);
    }
    let primes = primes_above(field, p)?;
    let x = q.x().expect("affine point");
    for pr in &primes {
        let v = valuation(x, pr).finite();
        cert.prime_checks.push(PrimeCheck {
            prime: pr.label(),
            kind: PrimeCheckKind::Congruence,
            value: v.map_or("inf".into(), |v| v.to_string()),
            required: "< 0".into(),
            holds: v.is_some_and(|v| v < 0),
        });
        let img = residue_image(pt, pr, phi.a_p)?;
        cert.prime_checks.push(PrimeCheck {
            prime: pr.label(),
            kind: PrimeCheckKind::ResidueAnnihilation,
            value: if img.is_none() { "O".into() } else { "nonzero".into() },
            required: "O".into(),
            holds: img.is_none(),
        });
    }
    if x.bit_size() <= WEIL_CHECK_BITS {
        let o = ECPoint::infinity(e, field).psi();
        match congruence_height_bound(&q.psi(), &o, &primes, PREC) {
            Ok(c) => cert.height_checks.push(HeightCheck::new(
                "h(psi Q) + h(psi O) >= sum log N(P_i) / [L:Q] - log 2",
                &c.lhs,
                Relation::AtLeast,
                &c.rhs,
            )),
            Err(HeightError::NotCongruent(pr)) => cert.notes.push(format!("Weil-height congruence bound rejected at {pr}")),
            Err(err) => return Err(err.into()),
        }
    } else {
        cert.notes.push(format!("Weil-height congruence bound skipped: x(Q) has {} bits", x.bit_size()));
    }
    let e_p = primes[0].e as i64;
    let lower_q = ctx.ln_p().div_i64(e_p).sub(&ctx.b());
    let pi = Interval::from_i64(PREC, p as i64);
    let scale = pi.mul(&pi).mul_i64(144);
    let upper_q = scale.mul(&ctx.measured.interval());
    let hq = ctx.height_until(&q, |h| {
        HeightCheck::new("", h, Relation::AtLeast, &lower_q).status == super::CheckStatus::Verified
            && HeightCheck::new("", h, Relation::AtMost, &upper_q).status == super::CheckStatus::Verified
    })?;
    let hq = hq.interval();
    cert.height_checks
        .push(HeightCheck::new("ĥ(Q) >= log p / e - B", &hq, Relation::AtLeast, &lower_q));
    cert.height_checks
        .push(HeightCheck::new("ĥ(Q) <= 144 p^2 ĥ(P)", &hq, Relation::AtMost, &upper_q));
    if ramified {
        cert.notes.push(format!("ramification-weighted bound with e = {e_p}"));
    }
    ctx.conclude(&mut cert, lower_q.div(&scale));
    Ok(cert)
}
