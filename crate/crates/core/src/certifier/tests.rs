use super::*;
use crate::corpus::by_name;
use crate::numfield::{quadratic, rationals, FieldElement};

fn diag(p: u64) -> CertifyConfig {
    CertifyConfig {
        prime: Some(p),
        ..Default::default()
    }
}

fn statuses_hold(c: &BoundCertificate) {
    for cert in c.chain() {
        assert!(cert.prime_checks.iter().all(|c| c.holds), "{:#?}", cert.prime_checks);
        assert!(cert.height_checks.iter().all(HeightCheck::holds), "{:#?}", cert.height_checks);
    }
}

#[test]
fn ad_congruence_examples() {
    let k = quadratic(5).unwrap();
    // √5 = 2w - 1 with w = (1 + √5)/2
    let sqrt5 = FieldElement::from_i64s(&k, &[-1, 2]);
    let c = ad_congruence_check(&sqrt5, 5).unwrap();
    // (-√5)^5 - (√5)^5 = -2·5^2·√5: valuation 2·2 + 1
    assert_eq!((c.e, c.valuations[0].1, c.holds), (2, Some(5), true));
    let c = ad_congruence_check(&sqrt5.add_int(1), 5).unwrap();
    // (1 - √5)^5 - (1 + √5)^5 = -160√5 = -2^5·5·√5: valuation 2 + 1
    assert_eq!((c.valuations[0].1, c.holds), (Some(3), true));
    let c = ad_congruence_check(&FieldElement::from_int(&k, 7), 5).unwrap();
    assert_eq!((c.valuations[0].1, c.holds), (None, true));
    let half = FieldElement::from_rational(&k, &rug::Rational::from((1, 5)));
    assert!(matches!(ad_congruence_check(&half, 5), Err(CertifyError::Hypothesis(_))));
    assert!(ad_congruence_check(&sqrt5, 3).is_err());
}

#[test]
fn unramified_chain_on_cm_curve() {
    let c = by_name("x3-2").unwrap();
    let cert = certify(&c.nontorsion[0], &diag(5)).unwrap();
    assert_eq!((cert.branch, cert.verdict), (Branch::Unramified, Verdict::Certified));
    assert_eq!(cert.constants.frobenius_polynomial.as_deref(), Some("X^2 + 5"));
    // log 5 - B < 0: the chain holds but its bound is vacuous
    assert!(cert.intermediate_bound.unwrap() < 0.0);
    statuses_hold(&cert);
    let upper = cert.height_checks.iter().find(|h| h.name.contains("144")).unwrap();
    assert_eq!(upper.status, CheckStatus::Verified);
    let rep = verify(&BoundCertificate::from_json(&cert.to_json()).unwrap()).unwrap();
    assert!(rep.reproduced, "{:?}", rep.mismatches);
    assert_eq!(rep.verdict, Verdict::Certified);
}

#[test]
fn torsion_point_gets_torsion_verdict() {
    let c = by_name("11a3").unwrap();
    let cert = certify(&c.torsion[0].0, &diag(3)).unwrap();
    assert_eq!((cert.branch, cert.verdict), (Branch::Torsion, Verdict::Torsion));
    let r: rug::Integer = cert.torsion_witness.as_ref().unwrap().parse().unwrap();
    assert!(c.torsion[0].0.mul_int(&r).is_zero());
    assert!(cert.claimed_bound.is_none());
}

#[test]
fn twist_point_distance_branch() {
    let c = by_name("11a3").unwrap();
    let pt = crate::corpus::twist_points(&c.curve, 13, 10, 2).remove(0);
    let cert = certify(&pt, &diag(13)).unwrap();
    assert_eq!((cert.branch, cert.verdict), (Branch::RamifiedNoncm, Verdict::Certified));
    assert!(cert.torsion_record.as_ref().unwrap().trivial);
    let d: Vec<_> = cert.prime_checks.iter().filter(|c| c.kind == PrimeCheckKind::Distance).collect();
    assert_eq!(d.len(), 1);
    // one ramified prime above p: the weighted sum equals the single δ coefficient
    let w = cert.prime_checks.iter().find(|c| c.kind == PrimeCheckKind::WeightedDistance).unwrap();
    assert_eq!(w.value, d[0].value);
    statuses_hold(&cert);
    assert!(verify(&cert).unwrap().reproduced);
}

#[test]
fn rational_point_descends_to_rationals() {
    let c = by_name("37a").unwrap();
    let pt = c.nontorsion[0].base_change(&quadratic(5).unwrap()).unwrap();
    let cert = certify(&pt, &diag(5)).unwrap();
    assert_eq!(cert.branch, Branch::RamifiedDescent);
    assert_eq!(cert.verdict, Verdict::Certified);
    let chain = cert.chain();
    assert_eq!(chain.len(), 2);
    assert_eq!(chain[1].branch, Branch::Unramified);
    assert_eq!(chain[1].inputs.field, "Q");
    let drop = cert.prime_checks.iter().find(|c| c.kind == PrimeCheckKind::DescentDrop).unwrap();
    assert_eq!((drop.value.as_str(), drop.holds), ("e: 2 -> 1", true));
    statuses_hold(&cert);
    assert!(verify(&cert).unwrap().reproduced);
}

#[test]
fn cm_pure_descent() {
    let c = by_name("x3-2").unwrap();
    let pt = c.nontorsion[0].base_change(&quadratic(-7).unwrap()).unwrap();
    let cert = certify(&pt, &diag(7)).unwrap();
    assert_eq!((cert.branch, cert.ordinary), (Branch::RamifiedDescent, Some(true)));
    assert!(cert.descent_torsion.as_ref().unwrap().zero);
    let drop = cert.prime_checks.iter().find(|c| c.kind == PrimeCheckKind::DescentDrop).unwrap();
    assert_eq!((drop.value.as_str(), drop.holds), ("k: 1 -> 0", true));
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(verify(&cert).unwrap().reproduced);
}

#[test]
fn cm_supersingular_prime_is_rejected() {
    let c = by_name("x3-2").unwrap();
    let pt = c.nontorsion[0].base_change(&quadratic(5).unwrap()).unwrap();
    assert!(matches!(certify(&pt, &diag(5)), Err(CertifyError::Hypothesis(_))));
    assert!(matches!(certify_unramified(&pt, 5, &diag(5)), Err(CertifyError::Hypothesis(_))));
    assert_eq!(rationals().degree(), 1);
}

#[test]
fn descent_torsion_search() {
    // y^2 = x^3 - 5x over Q(√5): E[2] = {O, (0,0), (±√5, 0)} and τ(√5, 0) - (√5, 0) = (0, 0)
    let e = crate::ellcurve::EllipticCurve::from_i64s([0, 0, 0, -5, 0]).unwrap();
    let k = quadratic(5).unwrap();
    let tau = crate::numfield::inertia_tau(&k, 5).unwrap();
    let q = crate::ellcurve::ECPoint::from_i64s(&e, &k, 0, 0).unwrap();
    let (t, exhaustive) = descent_torsion(&q, &tau, 2, 20_000).unwrap();
    let t = t.unwrap();
    assert!(exhaustive);
    assert_eq!(t.x().unwrap().as_rational(), None);
    assert_eq!(t.galois(&tau).unwrap().sub(&t).unwrap(), q);
    // (τ-1)T ∈ {O, (0, 0)} for every T in E[2]
    let far = crate::ellcurve::ECPoint::from_i64s(&e, &k, 5, 10).unwrap();
    assert_eq!(descent_torsion(&far, &tau, 2, 20_000).unwrap().0, None);
}
