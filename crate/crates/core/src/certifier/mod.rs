//! Certified lower bounds ĥ(P) >= 1/(12p)^2 for nontorsion points of
//! elliptic curves over Q, base-changed to abelian fields L.
//!
//! Each certificate records the Galois element used, the derived points,
//! exact congruence and distance checks at the primes above p, enclosed
//! height inequalities, and nested certificates for descents to fixed fields.

mod ramified;
mod unramified;
mod verify;

pub use ramified::{ad_congruence_check, certify_ramified_noncm, cm_ramified_step, descent_torsion, AdCheck};
pub use unramified::certify_unramified;
pub use verify::{verify, VerifyReport};

use crate::arith::{int_mod_u64, invmod, mulmod};
use crate::canonical::{
    canonical_height_with, height_comparison_bound, CanonicalError, CanonicalHeightResult, HeightComparisonBound, Normalization, DEFAULT_MAX_DOUBLINGS,
};
use crate::ellcurve::{select_good_prime, CurveError, ECPoint, GoodPrimeConfig, GoodPrimeReport, Mode, TorsionCheck};
use crate::heights::HeightError;
use crate::interval::{ln_integer, Interval};
use crate::numfield::{ExtensionInfo, FieldElement, FieldError, GaloisElement};
use crate::parse::ParseError;
use rug::Integer;
use serde::{Deserialize, Serialize};

const PREC: u32 = 128;
/// Coordinates longer than this are stored as digests only.
const LITERAL_MAX: usize = 400;
const DIGEST_MODULUS: u64 = (1 << 61) - 1;

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("undecidable at the precision cap: {0}")]
    PrecisionCap(String),
    #[error(transparent)]
    Curve(CurveError),
    #[error(transparent)]
    Canonical(CanonicalError),
}

impl CertifyError {
    /// Process exit code for the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CertifyError::Parse(_) => 2,
            CertifyError::PrecisionCap(_) => 4,
            CertifyError::Canonical(CanonicalError::Height(HeightError::PrecisionCap(_))) => 4,
            _ => 3,
        }
    }
}

impl From<CurveError> for CertifyError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Hypothesis(s) => CertifyError::Hypothesis(s),
            CurveError::BadPrime(p) => CertifyError::Hypothesis(format!("bad reduction at {p}")),
            e => CertifyError::Curve(e),
        }
    }
}

impl From<FieldError> for CertifyError {
    fn from(e: FieldError) -> Self {
        CertifyError::Hypothesis(e.to_string())
    }
}

impl From<CanonicalError> for CertifyError {
    fn from(e: CanonicalError) -> Self {
        CertifyError::Canonical(e)
    }
}

impl From<HeightError> for CertifyError {
    fn from(e: HeightError) -> Self {
        match e {
            HeightError::PrecisionCap(b) => CertifyError::PrecisionCap(format!("{b} bits")),
            e => CertifyError::Canonical(CanonicalError::Height(e)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub mode: Mode,
    /// Tolerance for the measured ĥ(P).
    pub tol: f64,
    pub max_doublings: u32,
    /// Use this prime instead of selecting one.
    pub prime: Option<u64>,
    pub good_prime: GoodPrimeConfig,
    /// Largest p^k searched for the CM descent torsion point.
    pub cm_torsion_cap: u64,
    /// At a ramified p, use a Frobenius lift and the bound (log p / e - B)/(144p^2).
    pub ramification_weighted: bool,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            mode: Mode::Diagnostic,
            tol: 1e-6,
            max_doublings: DEFAULT_MAX_DOUBLINGS,
            prime: None,
            good_prime: GoodPrimeConfig::default(),
            cm_torsion_cap: 16,
            ramification_weighted: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Unramified,
    RamifiedNoncm,
    RamifiedDescent,
    Torsion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every step check passed and the claimed bound is established.
    Certified,
    Torsion,
    /// The CM torsion search could not finish inside L or the budget.
    DescentIncomplete,
    /// A hypothesis of the branch fails for this input (no bound claimed).
    Flagged,
    /// A recorded step failed; this indicates an implementation error.
    RefutedStep,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::RefutedStep => 5,
            Verdict::Flagged => 3,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertInputs {
    pub curve: String,
    pub cm_discriminant: Option<i64>,
    pub field: String,
    pub point: String,
    pub p: u64,
    pub mode: Mode,
    pub tol: f64,
    pub max_doublings: u32,
    pub cm_torsion_cap: u64,
    pub ramification_weighted: bool,
}

/// Exact identity of a point: the literal when short, plus a residue digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDigest {
    pub label: String,
    pub zero: bool,
    pub literal: Option<String>,
    pub x_bits: u32,
    pub digest: String,
}

fn element_digest(a: &FieldElement) -> u64 {
    let m = DIGEST_MODULUS;
    let mut acc = 0u64;
    let mut r = 1u64;
    for c in a.num() {
        acc = (acc + mulmod(int_mod_u64(c, m), r, m)) % m;
        r = mulmod(r, 1_000_003, m);
    }
    let d = int_mod_u64(a.den(), m);
    mulmod(acc, invmod(d, m).unwrap_or(0), m)
}

impl PointDigest {
    pub fn of(label: &str, pt: &ECPoint) -> Self {
        match pt.xy() {
            None => PointDigest {
                label: label.into(),
                zero: true,
                literal: Some("point O".into()),
                x_bits: 0,
                digest: "0".into(),
            },
            Some((x, y)) => {
                let bits = x.bit_size();
                let literal = if bits < 4 * LITERAL_MAX as u32 {
                    let s = pt.literal();
                    (s.len() <= LITERAL_MAX).then_some(s)
                } else {
                    None
                };
                PointDigest {
                    label: label.into(),
                    zero: false,
                    literal,
                    x_bits: bits,
                    digest: format!("{:016x}{:016x}", element_digest(x), element_digest(y)),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeCheckKind {
    /// v(x(Q)) < 0, so Q reduces to Õ.
    Congruence,
    /// The reduction of P is killed by the same Galois polynomial in Ẽ(k).
    ResidueAnnihilation,
    /// δ as an exact multiple of log p.
    Distance,
    /// Σ (e f / [L:Q]) δ / log p over the primes above p.
    WeightedDistance,
    /// (τ - 1)P lies in the kernel of reduction.
    FormalGroup,
    /// e_p (non-CM) or the conductor exponent k (CM) drops under descent.
    DescentDrop,
}

/// One exact check at a prime above p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub prime: String,
    pub kind: PrimeCheckKind,
    pub value: String,
    pub required: String,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtLeast,
    AtMost,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    /// Decided by the enclosures.
    Verified,
    /// Enclosures overlap; consistent but not strictly decided.
    Consistent,
    Refuted,
}

/// lhs (relation) rhs on enclosures [lo, hi].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightCheck {
    pub name: String,
    pub lhs: [f64; 2],
    pub relation: Relation,
    pub rhs: [f64; 2],
    pub status: CheckStatus,
}

impl HeightCheck {
    pub fn new(name: &str, lhs: &Interval, relation: Relation, rhs: &Interval) -> Self {
        let (l, r) = ([lhs.lower_f64(), lhs.upper_f64()], [rhs.lower_f64(), rhs.upper_f64()]);
        HeightCheck {
            name: name.into(),
            lhs: l,
            relation,
            rhs: r,
            status: Self::decide(l, relation, r),
        }
    }

    pub(crate) fn decide(l: [f64; 2], relation: Relation, r: [f64; 2]) -> CheckStatus {
        match relation {
            Relation::AtLeast if l[0] >= r[1] => CheckStatus::Verified,
            Relation::AtLeast if l[1] < r[0] => CheckStatus::Refuted,
            Relation::AtMost if l[1] <= r[0] => CheckStatus::Verified,
            Relation::AtMost if l[0] > r[1] => CheckStatus::Refuted,
            Relation::Equal if l[1] < r[0] || r[1] < l[0] => CheckStatus::Refuted,
            Relation::Equal if l == r => CheckStatus::Verified,
            _ => CheckStatus::Consistent,
        }
    }

    pub fn holds(&self) -> bool {
        self.status != CheckStatus::Refuted
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub a_p: Option<i64>,
    pub frobenius_polynomial: Option<String>,
    /// Upper bounds.
    pub b: f64,
    pub c_psi: f64,
    pub c_dup: f64,
    pub base_degree: u32,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub inputs: CertInputs,
    pub branch: Branch,
    pub galois_element: Option<GaloisElement>,
    pub galois_role: Option<String>,
    pub derived: Vec<PointDigest>,
    pub prime_checks: Vec<PrimeCheck>,
    pub constants: Constants,
    pub extension: Option<ExtensionInfo>,
    /// The E(L)[p] = 0 record (checked over this L only).
    pub torsion_record: Option<TorsionCheck>,
    pub ordinary: Option<bool>,
    pub height_checks: Vec<HeightCheck>,
    /// Lower end of the bound the chain yields (possibly negative).
    pub intermediate_bound: Option<f64>,
    /// Lower end of 1/(12p)^2, claimed in theorem mode only.
    pub theorem_bound: Option<f64>,
    pub claimed_bound: Option<f64>,
    pub measured: CanonicalHeightResult,
    pub torsion_witness: Option<String>,
    pub descent_torsion: Option<PointDigest>,
    pub descent: Option<Box<BoundCertificate>>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl BoundCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Certificates along the descent chain, outermost first.
    pub fn chain(&self) -> Vec<&BoundCertificate> {
        let mut out = vec![self];
        while let Some(d) = &out.last().unwrap().descent {
            out.push(d);
        }
        out
    }

    pub(crate) fn steps_hold(&self) -> bool {
        self.prime_checks.iter().all(|c| c.holds) && self.height_checks.iter().all(HeightCheck::holds)
    }
}

/// Shared state of one certification run.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a CertifyConfig,
    pub p: u64,
    pub bound: HeightComparisonBound,
    pub measured: CanonicalHeightResult,
    pub report: Option<GoodPrimeReport>,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(pt: &ECPoint, p: u64, cfg: &'a CertifyConfig, report: Option<GoodPrimeReport>) -> Result<Self, CertifyError> {
        let bound = height_comparison_bound(pt.curve());
        let measured = canonical_height_with(pt, Normalization::Psi, cfg.tol, cfg.max_doublings, &bound)?;
        Ok(Ctx {
            cfg,
            p,
            bound,
            measured,
            report,
        })
    }

    pub(crate) fn b(&self) -> Interval {
        self.bound.b_interval()
    }

    pub(crate) fn ln_p(&self) -> Interval {
        ln_integer(PREC, &Integer::from(self.p))
    }

    pub(crate) fn skeleton(&self, pt: &ECPoint, branch: Branch) -> BoundCertificate {
        let e = pt.curve();
        BoundCertificate {
            inputs: CertInputs {
                curve: e.literal(),
                cm_discriminant: e.cm_discriminant(),
                field: pt.field().literal(),
                point: pt.literal(),
                p: self.p,
                mode: self.cfg.mode,
                tol: self.cfg.tol,
                max_doublings: self.cfg.max_doublings,
                cm_torsion_cap: self.cfg.cm_torsion_cap,
                ramification_weighted: self.cfg.ramification_weighted,
            },
            branch,
            galois_element: None,
            galois_role: None,
            derived: vec![],
            prime_checks: vec![],
            constants: Constants {
                a_p: self.report.as_ref().map(|r| r.a_p),
                frobenius_polynomial: None,
                b: self.bound.b,
                c_psi: self.bound.c_psi,
                c_dup: self.bound.c_dup,
                base_degree: 1,
                genus: 1,
            },
            extension: None,
            torsion_record: None,
            ordinary: None,
            height_checks: vec![],
            intermediate_bound: None,
            theorem_bound: None,
            claimed_bound: None,
            measured: self.measured.clone(),
            torsion_witness: None,
            descent_torsion: None,
            descent: None,
            notes: vec![],
            verdict: Verdict::RefutedStep,
        }
    }

    /// ĥ_ψ(Q), refined until `decided` or the run tolerance is reached.
    pub(crate) fn height_until(&self, q: &ECPoint, decided: impl Fn(&Interval) -> bool) -> Result<CanonicalHeightResult, CertifyError> {
        let mut tol = 1e6f64.max(self.cfg.tol);
        loop {
            let r = canonical_height_with(q, Normalization::Psi, tol, self.cfg.max_doublings, &self.bound)?;
            if decided(&r.interval()) || tol <= self.cfg.tol {
                return Ok(r);
            }
            tol = (tol / 64.0).max(self.cfg.tol);
        }
    }

    /// Records the chain's conclusion `lower` for ĥ(P) and sets the verdict.
    pub(crate) fn conclude(&self, cert: &mut BoundCertificate, lower: Interval) {
        cert.intermediate_bound = Some(lower.lower_f64());
        let pi = Interval::from_i64(PREC, self.p as i64);
        let literal = Interval::from_i64(PREC, 1).div(&pi.mul(&pi).mul_i64(144));
        let claimed = match self.cfg.mode {
            Mode::Diagnostic => lower.lower_f64(),
            Mode::Theorem => {
                let one = Interval::from_i64(PREC, 1);
                cert.height_checks
                    .push(HeightCheck::new("p > exp(B + 1)", &pi, Relation::AtLeast, &self.b().add(&one).exp()));
                cert.height_checks
                    .push(HeightCheck::new("chain bound >= 1/(12p)^2", &lower, Relation::AtLeast, &literal));
                cert.theorem_bound = Some(literal.lower_f64());
                literal.lower_f64()
            }
        };
        cert.claimed_bound = Some(claimed);
        let c = Interval::span(PREC, claimed, claimed);
        cert.height_checks.push(HeightCheck::new(
            "claimed bound <= measured ĥ(P)",
            &c,
            Relation::AtMost,
            &self.measured.interval(),
        ));
        cert.verdict = if cert.steps_hold() { Verdict::Certified } else { Verdict::RefutedStep };
    }
}

/// Torsion certificate from a witness r with [r]P = O.
pub(crate) fn torsion_certificate(ctx: &Ctx, pt: &ECPoint, r: &Integer) -> BoundCertificate {
    let mut cert = ctx.skeleton(pt, Branch::Torsion);
    cert.torsion_witness = Some(r.to_string());
    cert.derived.push(PointDigest::of("[r]P", &pt.mul_int(r)));
    cert.verdict = if pt.mul_int(r).is_zero() { Verdict::Torsion } else { Verdict::RefutedStep };
    cert
}

fn select_prime(pt: &ECPoint, cfg: &CertifyConfig) -> Result<(u64, Option<GoodPrimeReport>), CertifyError> {
    let e = pt.curve();
    match cfg.prime {
        Some(p) => {
            if !crate::arith::is_prime(p) {
                return Err(CertifyError::Hypothesis(format!("{p} is not prime")));
            }
            if !e.is_good(p) {
                return Err(CertifyError::Hypothesis(format!("bad reduction at {p}")));
            }
            Ok((p, None))
        }
        None => {
            let mut gp = cfg.good_prime.clone();
            gp.mode = cfg.mode;
            gp.b = Some(height_comparison_bound(e).b_interval());
            let (p, rep) = select_good_prime(e, pt.field(), &gp)?;
            Ok((p, Some(rep)))
        }
    }
}

/// Selects p (unless configured) and dispatches on ramification of L at p
/// and on the CM flag.
pub fn certify(pt: &ECPoint, cfg: &CertifyConfig) -> Result<BoundCertificate, CertifyError> {
    let (p, report) = select_prime(pt, cfg)?;
    certify_at(pt, p, cfg, report)
}

pub(crate) fn certify_at(pt: &ECPoint, p: u64, cfg: &CertifyConfig, report: Option<GoodPrimeReport>) -> Result<BoundCertificate, CertifyError> {
    let ctx = Ctx::new(pt, p, cfg, report)?;
    if let Some(r) = &ctx.measured.torsion_order_multiple {
        return Ok(torsion_certificate(&ctx, pt, &r.parse().expect("integer witness")));
    }
    if !pt.field().is_ramified(p) || cfg.ramification_weighted {
        unramified::run(&ctx, pt)
    } else if pt.curve().is_cm() {
        ramified::run_cm(&ctx, pt)
    } else {
        ramified::run_noncm(&ctx, pt)
    }
}

#[cfg(test)]
mod tests;
