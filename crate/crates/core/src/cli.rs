//! Command-line front end: flag parsing, input assembly and report text.

use crate::canonical::{canonical_height, height_comparison_bound, Normalization};
use crate::certifier::{ad_congruence_check, certify, verify, BoundCertificate, CertifyConfig, CertifyError};
use crate::ellcurve::{frobenius_poly, select_good_prime, Curve, GoodPrimeConfig, Mode, DEFAULT_COUNT_BUDGET};
use crate::heights::{delta_v, weil_height, ProjPoint};
use crate::numfield::{archimedean_places, places_above, Field};
use crate::par::par_map;
use crate::parse::{parse_element, parse_inputs, Inputs, ParseError};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

const PREC: u32 = 128;

#[derive(Parser, Debug)]
#[command(name = "heightbound", version, about = "Heights and certified height lower bounds for elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Inputs shared by every subcommand. Each of --field, --curve, --point is
/// a stanza file path or an inline stanza (the leading keyword may be omitted).
#[derive(Args, Debug, Clone, Default)]
pub struct InputArgs {
    /// Stanza files read in order before the flags below.
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value = "diagnostic")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::canonical::DEFAULT_MAX_DOUBLINGS)]
    pub max_doublings: u32,
    /// Largest prime tried when selecting p.
    #[arg(long, default_value_t = 100_000)]
    pub prime_budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weil height of projective coordinates, or of x(P) and ψ(P).
    Weil {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated projective coordinates over the field.
        #[arg(long)]
        coords: Option<String>,
    },
    /// δ_v between two projective points at the places above p (archimedean if p is absent).
    Delta {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Characteristic polynomial of Frobenius at p.
    Frobpoly {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        p: u64,
    },
    /// Canonical height of each point.
    Canonical {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// `psi` or `x`.
        #[arg(long, default_value = "psi")]
        normalization: String,
    },
    /// Smallest admissible prime for the curve over the field.
    GoodPrime {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Valuations of τ(α)^p - α^p at the primes above p.
    Adcheck {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        p: u64,
    },
    /// Certificate for a lower bound on ĥ(P), one per point.
    Certify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-verifies certificate files.
    Verify {
        certs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit code and report text.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> Outcome {
    Outcome {
        code,
        report: format!("error: {msg}\n"),
    }
}

fn parse_fail(e: ParseError) -> Outcome {
    fail(2, e)
}

fn stanza(value: &str, keyword: &str) -> String {
    if std::path::Path::new(value).is_file() {
        return std::fs::read_to_string(value).unwrap_or_default();
    }
    if value.trim_start().starts_with(keyword) {
        format!("{value}\n")
    } else {
        format!("{keyword} {value}\n")
    }
}

impl InputArgs {
    fn text(&self) -> Result<String, Outcome> {
        let mut text = String::new();
        for f in &self.files {
            text += &std::fs::read_to_string(f).map_err(|e| fail(2, format!("{}: {e}", f.display())))?;
            text.push('\n');
        }
        if let Some(f) = &self.field {
            text += &stanza(f, "field");
        }
        if let Some(c) = &self.curve {
            text += &stanza(c, "curve");
        }
        if let Some(p) = &self.point {
            text += &stanza(p, "point");
        }
        Ok(text)
    }

    fn load(&self) -> Result<Inputs, Outcome> {
        parse_inputs(&self.text()?).map_err(parse_fail)
    }

    fn curve(inp: &Inputs) -> Result<&Curve, Outcome> {
        inp.curve.as_ref().ok_or_else(|| fail(2, "no curve given"))
    }

    /// True when the only point given is `point O`, which needs no curve.
    fn is_bare_identity(&self) -> bool {
        self.files.is_empty() && self.curve.is_none() && self.point.as_deref().is_some_and(|p| matches!(p.trim(), "O" | "point O"))
    }
}

fn proj(field: &Field, s: &str) -> Result<ProjPoint, Outcome> {
    let coords = s
        .split(',')
        .map(|c| parse_element(field, c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(parse_fail)?;
    ProjPoint::new(coords).map_err(|e| fail(2, e))
}

impl RunArgs {
    fn config(&self) -> CertifyConfig {
        CertifyConfig {
            mode: self.mode,
            tol: self.tol,
            max_doublings: self.max_doublings,
            prime: self.p,
            good_prime: GoodPrimeConfig {
                mode: self.mode,
                prime_budget: self.prime_budget,
                ..Default::default()
            },
            ..Default::default()
        }
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Outcome> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| fail(2, format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn certificates_json(certs: &[BoundCertificate]) -> String {
    if certs.len() == 1 {
        certs[0].to_json()
    } else {
        serde_json::to_string_pretty(certs).expect("certificates serialize")
    }
}

fn read_certificates(path: &PathBuf) -> Result<Vec<BoundCertificate>, Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    if let Ok(c) = BoundCertificate::from_json(&text) {
        return Ok(vec![c]);
    }
    serde_json::from_str(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn run_inner(cmd: &Command) -> Result<Outcome, Outcome> {
    let mut out = String::new();
    let code = match cmd {
        Command::Weil { input, coords } => {
            let inp = input.load()?;
            if let Some(c) = coords {
                let h = weil_height(&proj(&inp.field, c)?, PREC).map_err(|e| fail(4, e))?;
                out += &format!("{h}\n");
            }
            for pt in &inp.points {
                let x = weil_height(&pt.x_proj(), PREC).map_err(|e| fail(4, e))?;
                let psi = weil_height(&pt.psi(), PREC).map_err(|e| fail(4, e))?;
                out += &format!("{}: h(x) = {x}, h(psi) = {psi}\n", pt.literal());
            }
            0
        }
        Command::Delta { input, x, y, p } => {
            let inp = input.load()?;
            let (x, y) = (proj(&inp.field, x)?, proj(&inp.field, y)?);
            let places = match p {
                Some(p) => places_above(&inp.field, *p).map_err(|e| fail(3, e))?,
                None => archimedean_places(&inp.field),
            };
            for v in &places {
                let d = delta_v(&x, &y, v, PREC).map_err(|e| fail(3, e))?;
                let text = match &d {
                    crate::heights::Delta::Infinity => "inf".to_string(),
                    crate::heights::Delta::LogP { p, coeff } => format!("{coeff}*log {p} = {}", d.to_interval(PREC)),
                    crate::heights::Delta::Approx(i) => i.to_string(),
                };
                out += &format!("{}: {text}\n", v.label());
            }
            0
        }
        Command::Frobpoly { input, p } => {
            let inp = input.load()?;
            let e = InputArgs::curve(&inp)?;
            let phi = frobenius_poly(e, *p, DEFAULT_COUNT_BUDGET.max(*p)).map_err(|e| fail(3, CertifyError::from(e)))?;
            out += &format!("{}\n", phi.literal());
            0
        }
        Command::Canonical { input, tol, normalization } => {
            let norm = match normalization.as_str() {
                "psi" => Normalization::Psi,
                "x" => Normalization::X,
                n => return Err(fail(2, format!("unknown normalization {n:?}"))),
            };
            if input.is_bare_identity() {
                return Ok(Outcome { code: 0, report: "0\n".into() });
            }
            let inp = input.load()?;
            for pt in &inp.points {
                let r = canonical_height(pt, norm, *tol).map_err(|e| {
                    let e = CertifyError::from(e);
                    fail(e.exit_code(), format!("{}: {e}", pt.literal()))
                })?;
                if r.is_exact_zero() {
                    out += "0\n";
                } else {
                    out += &format!("{} +- {:e}\n", r.value, r.error);
                }
            }
            0
        }
        Command::GoodPrime { input, run } => {
            let inp = input.load()?;
            let e = InputArgs::curve(&inp)?;
            let mut cfg = run.config().good_prime;
            if run.mode == Mode::Theorem {
                cfg.b = Some(height_comparison_bound(e).b_interval());
            }
            let (p, report) = select_good_prime(e, &inp.field, &cfg).map_err(|e| {
                let e = CertifyError::from(e);
                fail(e.exit_code(), e)
            })?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_out(&run.out, &json)?;
            out += &format!("{p}\n");
            0
        }
        Command::Adcheck { input, alpha, p } => {
            let inp = input.load()?;
            let a = parse_element(&inp.field, alpha).map_err(parse_fail)?;
            let c = ad_congruence_check(&a, *p).map_err(|e| fail(e.exit_code(), e))?;
            for (pr, v) in &c.valuations {
                out += &format!("{pr}: v = {}\n", v.map_or("inf".into(), |v| v.to_string()));
            }
            out += &format!("e = {}, tau = {}, holds = {}\n", c.e, c.tau, c.holds);
            if c.holds {
                0
            } else {
                5
            }
        }
        Command::Certify { input, run } => {
            let inp = input.load()?;
            if inp.points.is_empty() {
                return Err(fail(2, "no point given"));
            }
            let cfg = run.config();
            let results = par_map(&inp.points, |pt| certify(pt, &cfg));
            let mut certs = Vec::new();
            for r in results {
                certs.push(r.map_err(|e| fail(e.exit_code(), e))?);
            }
            let json = certificates_json(&certs);
            write_out(&run.out, &json)?;
            for c in &certs {
                out += &format!("{}: {:?} {:?}", c.inputs.point, c.branch, c.verdict);
                if let Some(b) = c.claimed_bound {
                    out += &format!(" claimed {b:e} measured [{:e}, {:e}]", c.measured.lo, c.measured.hi);
                }
                out.push('\n');
            }
            if run.out.is_none() {
                out += &json;
                out.push('\n');
            }
            certs.iter().map(|c| c.verdict.exit_code()).max().unwrap_or(0)
        }
        Command::Verify { certs, out: path } => {
            let mut all = Vec::new();
            for f in certs {
                all.extend(read_certificates(f)?);
            }
            let reports = par_map(&all, verify);
            let mut code = 0;
            for (c, r) in all.iter().zip(reports) {
                match r {
                    Ok(r) => {
                        out += &format!("{}: {:?} reproduced={}\n", c.inputs.point, r.verdict, r.reproduced);
                        for m in &r.mismatches {
                            out += &format!("  {m}\n");
                        }
                        if !r.reproduced {
                            code = code.max(5);
                        }
                        code = code.max(r.verdict.exit_code());
                    }
                    Err(e) => {
                        out += &format!("{}: error: {e}\n", c.inputs.point);
                        code = code.max(e.exit_code());
                    }
                }
            }
            write_out(path, &out)?;
            code
        }
    };
    Ok(Outcome { code, report: out })
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    run_inner(&cli.command).unwrap_or_else(|e| e)
}

/// Parses and runs an argument list; clap usage errors exit with 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome {
            code: if e.use_stderr() { 2 } else { 0 },
            report: e.to_string(),
        },
    }
}
