use super::{certify_at, BoundCertificate, CertifyConfig, CertifyError, HeightCheck, Verdict};
use crate::ellcurve::GoodPrimeConfig;
use crate::parse::{parse_curve, parse_field, parse_point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// The verdict obtained from the raw inputs.
    pub verdict: Verdict,
    /// Same verdict and every recorded claim reproduced.
    pub reproduced: bool,
    pub mismatches: Vec<String>,
}

fn overlap(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] <= b[1] && b[0] <= a[1]
}

/// Checks that recorded statuses follow from recorded numbers and that a
/// certified verdict has every step passing.
fn internal(cert: &BoundCertificate, path: &str, out: &mut Vec<String>) {
    for h in &cert.height_checks {
        if HeightCheck::decide(h.lhs, h.relation, h.rhs) != h.status {
            out.push(format!("{path}: status of {:?} does not follow from its enclosures", h.name));
        }
    }
    if cert.verdict == Verdict::Certified {
        if !cert.steps_hold() {
            out.push(format!("{path}: certified with a failing step"));
        }
        match cert.claimed_bound {
            Some(c) if c <= cert.measured.hi => {}
            _ => out.push(format!("{path}: claimed bound missing or above the measured height")),
        }
    }
    if let Some(d) = &cert.descent {
        internal(d, &format!("{path}/descent"), out);
    }
}

fn compare(old: &BoundCertificate, new: &BoundCertificate, path: &str, out: &mut Vec<String>) {
    let mut diff = |what: &str, same: bool| {
        if !same {
            out.push(format!("{path}: {what} differs"));
        }
    };
    diff("inputs", old.inputs == new.inputs);
    diff("branch", old.branch == new.branch);
    diff("galois element", old.galois_element == new.galois_element);
    diff("derived points", old.derived == new.derived);
    diff("prime checks", old.prime_checks == new.prime_checks);
    diff("torsion witness", old.torsion_witness == new.torsion_witness);
    diff("descent torsion point", old.descent_torsion == new.descent_torsion);
    diff("extension data", old.extension == new.extension);
    diff(
        "E(L)[p] record",
        old.torsion_record.as_ref().map(|t| t.trivial) == new.torsion_record.as_ref().map(|t| t.trivial),
    );
    diff("constant B", old.constants.b == new.constants.b && old.constants.c_psi == new.constants.c_psi);
    diff("claimed bound", old.claimed_bound == new.claimed_bound);
    diff("verdict", old.verdict == new.verdict);
    diff(
        "measured height",
        overlap([old.measured.lo, old.measured.hi], [new.measured.lo, new.measured.hi]),
    );
    diff("height check list", old.height_checks.len() == new.height_checks.len());
    for (a, b) in old.height_checks.iter().zip(&new.height_checks) {
        diff(
            &format!("height check {:?}", a.name),
            a.name == b.name && a.status == b.status && overlap(a.lhs, b.lhs) && overlap(a.rhs, b.rhs),
        );
    }
    match (&old.descent, &new.descent) {
        (None, None) => {}
        (Some(a), Some(b)) => compare(a, b, &format!("{path}/descent"), out),
        _ => out.push(format!("{path}: descent chain differs")),
    }
}

/// Re-runs the certificate from its raw inputs and compares every claim.
pub fn verify(cert: &BoundCertificate) -> Result<VerifyReport, CertifyError> {
    let mut mismatches = Vec::new();
    internal(cert, "root", &mut mismatches);
    let i = &cert.inputs;
    let field = parse_field(&i.field)?;
    let curve = parse_curve(&i.curve, i.cm_discriminant)?;
    let pt = parse_point(&i.point, &curve, &field)?;
    let cfg = CertifyConfig {
        mode: i.mode,
        tol: i.tol,
        max_doublings: i.max_doublings,
        prime: Some(i.p),
        good_prime: GoodPrimeConfig {
            mode: i.mode,
            count_budget: GoodPrimeConfig::default().count_budget.max(i.p),
            ..Default::default()
        },
        cm_torsion_cap: i.cm_torsion_cap,
        ramification_weighted: i.ramification_weighted,
    };
    let fresh = certify_at(&pt, i.p, &cfg, None)?;
    compare(cert, &fresh, "root", &mut mismatches);
    let reproduced = mismatches.is_empty();
    let verdict = if reproduced { fresh.verdict } else { Verdict::RefutedStep };
    Ok(VerifyReport {
        verdict,
        reproduced,
        mismatches,
    })
}
