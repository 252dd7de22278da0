//! Line-stanza input format with exact rationals.
//!
//! ```text
//! field Q(sqrt 5)
//! curve a1=0 a2=0 a3=1 a4=-1 a6=0
//! cm_discriminant = -3
//! point x=0 y=0
//! point x=1/4 + 3*w y=-w^2
//! point O
//! ```
//!
//! `w` is the power-basis generator θ of the field; `#` starts a comment.

use crate::ellcurve::{Curve, ECPoint, EllipticCurve};
use crate::numfield::{cyclotomic, quadratic, rationals, Field, FieldElement};
use rug::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line: 1, col, msg: msg.into() })
}

fn at_line(mut e: ParseError, line: usize, offset: usize) -> ParseError {
    e.line = line;
    e.col += offset;
    e
}

/// `Q`, `Q(sqrt d)`, `Q(sqrt(d))`, `Q(zeta m)`, `Q(zeta(m))`, `Q(i)`.
pub fn parse_field(s: &str) -> Result<Field, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "Q" {
        return Ok(rationals());
    }
    if t == "Q(i)" {
        return quadratic(-1).or_else(|e| err(1, e.to_string()));
    }
    let inner = t.strip_prefix("Q(").and_then(|r| r.strip_suffix(')')).ok_or_else(|| ParseError {
        line: 1,
        col: 1,
        msg: format!("unknown field {s:?}"),
    })?;
    let arg = |rest: &str| -> String { rest.trim_start_matches('(').trim_end_matches(')').to_string() };
    if let Some(rest) = inner.strip_prefix("sqrt") {
        let d: i64 = arg(rest).parse().or_else(|_| err(1, format!("bad radicand in {s:?}")))?;
        return quadratic(d).or_else(|e| err(1, e.to_string()));
    }
    if let Some(rest) = inner.strip_prefix("zeta") {
        let m: u64 = arg(rest).parse().or_else(|_| err(1, format!("bad modulus in {s:?}")))?;
        return cyclotomic(m).or_else(|e| err(1, e.to_string()));
    }
    err(1, format!("unknown field {s:?}"))
}

fn parse_rational(s: &str, col: usize) -> Result<Rational, ParseError> {
    let bad = || ParseError {
        line: 1,
        col,
        msg: format!("bad rational {s:?}"),
    };
    match s.split_once('/') {
        None => s.parse::<Integer>().map(Rational::from).map_err(|_| bad()),
        Some((n, d)) => {
            let n: Integer = n.parse().map_err(|_| bad())?;
            let d: Integer = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return err(col, "zero denominator");
            }
            Ok(Rational::from((n, d)))
        }
    }
}

/// Sum of terms `c`, `c*w^k`, `w^k` with rational c.
pub fn parse_element(field: &Field, s: &str) -> Result<FieldElement, ParseError> {
    let n = field.degree();
    let mut coeffs = vec![Rational::new(); n.max(1)];
    let mut extra: Vec<(usize, Rational)> = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut any = false;
    while i < chars.len() {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        if i == chars.len() {
            break;
        }
        let mut sign = 1;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1;
            }
            i += 1;
        } else if any {
            return err(i + 1, "expected + or -");
        }
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let start = i;
        while i < chars.len() && chars[i] != '+' && chars[i] != '-' {
            i += 1;
        }
        let raw: String = chars[start..i].iter().collect();
        let mut term = raw.trim().to_string();
        for op in ["*", "^"] {
            while term.contains(&format!(" {op}")) || term.contains(&format!("{op} ")) {
                term = term.replace(&format!(" {op}"), op).replace(&format!("{op} "), op);
            }
        }
        if term.contains(char::is_whitespace) {
            return err(start + 1, format!("bad term {:?}", raw.trim()));
        }
        if term.is_empty() {
            return err(start + 1, "empty term");
        }
        let (c, power) = match term.split_once('w') {
            None => (parse_rational(&term, start + 1)?, 0usize),
            Some((pre, post)) => {
                let c = match pre.strip_suffix('*') {
                    Some(c) => parse_rational(c, start + 1)?,
                    None if pre.is_empty() => Rational::from(1),
                    None => return err(start + 1, format!("bad term {term:?}")),
                };
                let k = match post.strip_prefix('^') {
                    Some(k) => k.parse().or_else(|_| err(start + 1, format!("bad exponent in {term:?}")))?,
                    None if post.is_empty() => 1,
                    None => return err(start + 1, format!("bad term {term:?}")),
                };
                (c, k)
            }
        };
        let c = if sign < 0 { -c } else { c };
        if power < n {
            coeffs[power] += c;
        } else {
            extra.push((power, c));
        }
        any = true;
    }
    if !any {
        return err(1, "empty element");
    }
    let mut a = FieldElement::from_coeffs(field, &coeffs);
    for (k, c) in extra {
        a = a.add(&FieldElement::theta(field).pow(k as u32).scale_rat(&c));
    }
    Ok(a)
}

/// `curve a1=.. a2=.. a3=.. a4=.. a6=..`; missing coefficients are zero.
pub fn parse_curve(s: &str, cm: Option<i64>) -> Result<Curve, ParseError> {
    let body = s.trim().strip_prefix("curve").ok_or_else(|| ParseError {
        line: 1,
        col: 1,
        msg: "expected `curve`".into(),
    })?;
    let mut a: [Integer; 5] = Default::default();
    let names = ["a1", "a2", "a3", "a4", "a6"];
    for tok in body.split_whitespace() {
        let col = s.find(tok).unwrap_or(0) + 1;
        let (k, v) = tok.split_once('=').ok_or_else(|| ParseError {
            line: 1,
            col,
            msg: format!("expected key=value, got {tok:?}"),
        })?;
        let i = names.iter().position(|n| *n == k).ok_or_else(|| ParseError {
            line: 1,
            col,
            msg: format!("unknown coefficient {k:?}"),
        })?;
        a[i] = v.parse().or_else(|_| err(col, format!("bad integer {v:?}")))?;
    }
    EllipticCurve::new(a, cm).or_else(|e| err(1, e.to_string()))
}

/// `point O` or `point x=<element> y=<element>`.
pub fn parse_point(s: &str, curve: &Curve, field: &Field) -> Result<ECPoint, ParseError> {
    let body = s
        .trim()
        .strip_prefix("point")
        .ok_or_else(|| ParseError {
            line: 1,
            col: 1,
            msg: "expected `point`".into(),
        })?
        .trim();
    if body == "O" {
        return Ok(ECPoint::infinity(curve, field));
    }
    let xs = body.strip_prefix("x=").ok_or_else(|| ParseError {
        line: 1,
        col: 7,
        msg: "expected x=".into(),
    })?;
    let (x, y) = xs.split_once("y=").ok_or_else(|| ParseError {
        line: 1,
        col: 7,
        msg: "expected y=".into(),
    })?;
    let off = s.find("x=").unwrap_or(0) + 3;
    let x = parse_element(field, x).map_err(|e| at_line(e, 1, off - 1))?;
    let yoff = s.find("y=").unwrap_or(0) + 3;
    let y = parse_element(field, y).map_err(|e| at_line(e, 1, yoff - 1))?;
    ECPoint::new(curve, x, y).or_else(|e| err(off, e.to_string()))
}

/// Everything read from one stanza file.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub field: Field,
    pub curve: Option<Curve>,
    pub points: Vec<ECPoint>,
}

/// Parses a whole stanza file. `field` and `cm_discriminant` lines must
/// precede the lines that use them.
pub fn parse_inputs(text: &str) -> Result<Inputs, ParseError> {
    let mut field = rationals();
    let mut cm = None;
    let mut curve: Option<Curve> = None;
    let mut curve_line: Option<(usize, String)> = None;
    let mut points = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let off = line.len() - trimmed.len();
        let lift = |e: ParseError| at_line(e, ln + 1, off);
        let head = trimmed.split_whitespace().next().unwrap();
        match head {
            "field" => field = parse_field(&trimmed[5..]).map_err(lift)?,
            "cm_discriminant" | "cm_discriminant=" => {
                let v = trimmed.split_once('=').map(|(_, v)| v.trim()).ok_or_else(|| {
                    lift(ParseError {
                        line: 1,
                        col: 1,
                        msg: "expected `cm_discriminant = D`".into(),
                    })
                })?;
                cm = Some(v.parse::<i64>().map_err(|_| {
                    lift(ParseError {
                        line: 1,
                        col: 1,
                        msg: format!("bad discriminant {v:?}"),
                    })
                })?);
                if let Some((l, c)) = &curve_line {
                    curve = Some(parse_curve(c, cm).map_err(|e| at_line(e, *l, 0))?);
                }
            }
            "curve" => {
                curve = Some(parse_curve(trimmed, cm).map_err(lift)?);
                curve_line = Some((ln + 1, trimmed.to_string()));
            }
            "point" => {
                let c = curve.as_ref().ok_or_else(|| {
                    lift(ParseError {
                        line: 1,
                        col: 1,
                        msg: "point before curve".into(),
                    })
                })?;
                points.push(parse_point(trimmed, c, &field).map_err(lift)?);
            }
            _ => {
                return Err(lift(ParseError {
                    line: 1,
                    col: 1,
                    msg: format!("unknown stanza {head:?}"),
                }))
            }
        }
    }
    Ok(Inputs { field, curve, points })
}
