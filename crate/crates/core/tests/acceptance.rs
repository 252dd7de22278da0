//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails or exceeds its runtime budget.

use heightbound::arith::{factor_u64, is_prime};
use heightbound::canonical::{canonical_height, height_comparison_bound, Normalization};
use heightbound::certifier::{ad_congruence_check, certify, verify, BoundCertificate, CertifyConfig, CheckStatus, PrimeCheckKind, Verdict};
use heightbound::corpus::{by_name, curves, twist_corpus};
use heightbound::ellcurve::{
    formal_p_series, frobenius_annihilates, frobenius_poly, is_ordinary, resultant_with_cyclotomic, torsion_test, Curve, ECPoint, FrobeniusData, Mode,
    TorsionWitness,
};
use heightbound::heights::{check_local_global, delta_finite, weil_height, ProjPoint};
use heightbound::interval::Interval;
use heightbound::numfield::{
    abs_value, archimedean_places, cyclotomic, places_above, primes_above, quadratic, rationals, AbsValue, Field, FieldElement, Place,
};
use heightbound::par::par_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use std::time::Instant;

const PREC: u32 = 128;
const BUDGET: u64 = 1_000_000;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    seconds: f64,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_fields() -> Vec<Field> {
    vec![
        rationals(),
        quadratic(-1).unwrap(),
        quadratic(5).unwrap(),
        cyclotomic(5).unwrap(),
        cyclotomic(9).unwrap(),
    ]
}

fn random_element(r: &mut ChaCha8Rng, field: &Field, bound: i64, den_max: i64) -> FieldElement {
    loop {
        let den = r.gen_range(1..=den_max);
        let coeffs: Vec<Rational> = (0..field.degree()).map(|_| Rational::from((r.gen_range(-bound..=bound), den))).collect();
        let a = FieldElement::from_coeffs(field, &coeffs);
        if !a.is_zero() {
            return a;
        }
    }
}

fn prime_support(a: &FieldElement) -> Vec<u64> {
    let n = a.numerator_element().norm();
    let mut out: Vec<u64> = Vec::new();
    for m in [Integer::from(n.numer().abs_ref()), a.den().clone()] {
        let m = m.to_u64().expect("norm fits in u64");
        out.extend(factor_u64(m).into_iter().map(|(p, _)| p));
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn ln_abs_sum(a: &FieldElement, places: &[Place]) -> Interval {
    let mut s = Interval::zero(PREC);
    for v in places {
        s = s.add(&abs_value(a, v, PREC).ln(PREC).mul_rational(&v.n_v));
    }
    s
}

fn c1_product_formula() -> Outcome {
    let fields = small_fields();
    let mut r = rng(1);
    let mut worst = 0f64;
    for i in 0..200 {
        let k = &fields[i % fields.len()];
        let a = random_element(&mut r, k, 30, 12);
        let mut places = archimedean_places(k);
        for p in prime_support(&a) {
            places.extend(places_above(k, p).unwrap());
        }
        let s = ln_abs_sum(&a, &places);
        let dev = s.lower_f64().abs().max(s.upper_f64().abs());
        ensure(dev <= 1e-9, || format!("{a} in {}: sum = {s}", k.literal()))?;
        worst = worst.max(dev);
    }
    let mut checked = 0;
    'outer: for k in &fields {
        for p in [2u64, 3, 5, 7, 11] {
            for pr in primes_above(k, p).unwrap() {
                // q^(-1/[K_v:Q_v]) with q = p^f and [K_v:Q_v] = e f
                let want = Rational::from((-(pr.f as i64), (pr.e * pr.f) as i64));
                let v = Place::finite(pr.clone(), k.degree());
                let exps: Vec<Rational> = pr
                    .generators(k)
                    .iter()
                    .filter(|g| !g.is_zero())
                    .map(|g| match abs_value(g, &v, PREC) {
                        AbsValue::PPower { exponent, .. } => exponent,
                        other => panic!("finite place gave {other:?}"),
                    })
                    .collect();
                let max = exps.iter().max().unwrap().clone();
                ensure(max == want, || {
                    format!("{} in {}: max |g|_v = {p}^{max}, want {p}^{want}", pr.label(), k.literal())
                })?;
                checked += 1;
                if checked == 20 {
                    break 'outer;
                }
            }
        }
    }
    ensure(checked == 20, || format!("only {checked} places"))?;
    Ok(format!("200 elements, max |sum| = {worst:.1e}; extremal value exact at {checked} places"))
}

fn random_proj(r: &mut ChaCha8Rng, k: &Field, dim: usize) -> ProjPoint {
    loop {
        let coords: Vec<FieldElement> = (0..=dim).map(|_| random_element(r, k, 9, 3)).collect();
        if let Ok(p) = ProjPoint::new(coords) {
            return p;
        }
    }
}

fn c2_local_global() -> Outcome {
    let fields = small_fields();
    let mut jobs = Vec::new();
    let mut r = rng(2);
    for (fi, k) in fields.iter().enumerate() {
        for _ in 0..1000 {
            let dim = r.gen_range(1..=2);
            let x = random_proj(&mut r, k, dim);
            let mut y = random_proj(&mut r, k, dim);
            // bias half the pairs towards p-adic closeness
            if r.gen_bool(0.5) {
                let p = [2i64, 3, 5][r.gen_range(0..3)];
                let pk = FieldElement::from_int(k, p.pow(r.gen_range(1..4)));
                let coords: Vec<FieldElement> = x.coords().iter().zip(y.coords()).map(|(a, b)| a.add(&b.mul(&pk))).collect();
                y = ProjPoint::new(coords).unwrap_or(y);
            }
            if x.proj_eq(&y) {
                continue;
            }
            let mut places: Vec<Place> = archimedean_places(k).into_iter().filter(|_| r.gen_bool(0.5)).collect();
            for p in [2u64, 3, 5, 7, 11, 13] {
                if r.gen_bool(0.4) {
                    places.extend(places_above(k, p).unwrap().into_iter().filter(|_| r.gen_bool(0.7)));
                }
            }
            jobs.push((fi, x, y, places));
        }
    }
    let results = par_map(&jobs, |(_, x, y, t)| check_local_global(x, y, t, PREC));
    let mut fails = Vec::new();
    for ((fi, x, y, _), c) in jobs.iter().zip(results) {
        match c {
            Ok(c) if c.holds => {}
            Ok(c) => fails.push(format!("{} {x} {y}: {} < {}", fields[*fi].literal(), c.lhs, c.rhs)),
            Err(e) => fails.push(format!("{x} {y}: {e}")),
        }
    }
    ensure(fails.is_empty(), || format!("{} failures, first {}", fails.len(), fails[0]))?;
    Ok(format!("{} pairs over 5 fields, 0 failures", jobs.len()))
}

/// #Ẽ(F_p) by enumerating all (x, y).
fn naive_count(e: &Curve, p: u64) -> u64 {
    let a: Vec<u64> = e.a().iter().map(|c| c.mod_u(p as u32) as u64).collect();
    let mut n = 1;
    for x in 0..p {
        let rhs = (x * x % p * x + a[1] * x % p * x + a[3] * x + a[4]) % p;
        for y in 0..p {
            let lhs = (y * y + a[0] * x % p * y + a[2] * y) % p;
            if lhs == rhs {
                n += 1;
            }
        }
    }
    n
}

fn good_primes(e: &Curve, max: u64) -> Vec<u64> {
    (2..=max).filter(|&p| is_prime(p) && e.is_good(p)).collect()
}

fn c3_frobenius_coefficients() -> Outcome {
    let mut jobs = Vec::new();
    for c in curves() {
        for p in good_primes(&c.curve, 200) {
            jobs.push((c.name, c.curve.clone(), p));
        }
    }
    let res = par_map(&jobs, |(_, e, p)| (frobenius_poly(e, *p, BUDGET), naive_count(e, *p)));
    for ((name, _, p), (phi, n)) in jobs.iter().zip(res) {
        let phi = phi.map_err(|e| format!("{name} at {p}: {e}"))?;
        let oracle = *p as i64 + 1 - n as i64;
        ensure(phi.a_p == oracle, || format!("{name} at {p}: a_p = {} but naive count gives {oracle}", phi.a_p))?;
        ensure(phi.a_p.pow(2) <= 4 * *p as i64, || format!("{name} at {p}: |a_p| > 2 sqrt p"))?;
        ensure(phi.coeffs.iter().all(|c| c.unsigned_abs() <= 4 * p), || {
            format!("{name} at {p}: coefficient above 4p")
        })?;
    }
    let e = by_name("x3+x+1").unwrap().curve;
    let phi = frobenius_poly(&e, 5, BUDGET).map_err(|e| e.to_string())?;
    ensure(naive_count(&e, 5) == 9 && phi.a_p == -3 && phi.literal() == "X^2 + 3X + 5", || {
        format!("a_5 = {}, {}", phi.a_p, phi.literal())
    })?;
    Ok(format!("{} (curve, p) pairs, 0 violations; a_5 = -3, Phi_5 = X^2 + 3X + 5", jobs.len()))
}

/// Nontorsion then torsion corpus points, padded with doubles to three.
fn three_points(name: &str) -> Vec<ECPoint> {
    let c = by_name(name).unwrap();
    let mut pts: Vec<ECPoint> = c.nontorsion.iter().cloned().chain(c.torsion.iter().map(|t| t.0.clone())).collect();
    while pts.len() < 3 {
        let d = pts[0].mul_i64(pts.len() as i64 + 1);
        pts.push(d);
    }
    pts.truncate(3);
    pts
}

fn c4_annihilation() -> Outcome {
    let fields = [rationals(), quadratic(5).unwrap(), quadratic(-5).unwrap(), cyclotomic(5).unwrap()];
    let mut jobs = Vec::new();
    for c in curves() {
        let pts = three_points(c.name);
        for k in &fields {
            for p in good_primes(&c.curve, 50).into_iter().filter(|&p| !k.is_ramified(p)) {
                for pt in &pts {
                    jobs.push((c.name, pt.base_change(k).unwrap(), p));
                }
            }
        }
    }
    let res = par_map(&jobs, |(_, pt, p)| -> Result<bool, String> {
        let phi = frobenius_poly(pt.curve(), *p, BUDGET).map_err(|e| e.to_string())?;
        for pr in primes_above(pt.field(), *p).map_err(|e| e.to_string())? {
            if !frobenius_annihilates(pt, &phi, &pr).map_err(|e| e.to_string())? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let mut fails = Vec::new();
    for ((name, pt, p), r) in jobs.iter().zip(res) {
        if r != Ok(true) {
            fails.push(format!("{name} {pt} over {} at {p}: {r:?}", pt.field().literal()));
        }
    }
    ensure(fails.is_empty(), || format!("{} failures, first {}", fails.len(), fails[0]))?;
    Ok(format!("{} tuples, 0 failures", jobs.len()))
}

/// Res(Φ, X^m - 1) by reducing X^m modulo Φ to uX + v and taking the norm
/// of u α + v - 1: (c + dα)(c + dβ) = c^2 + a c d + p d^2.
fn resultant_oracle(phi: &FrobeniusData, m: u64) -> Integer {
    let (a, p) = (Integer::from(phi.a_p), Integer::from(phi.p));
    // X^k = u X + v; X^{k+1} = u X^2 + v X = (u a + v) X - u p
    let (mut u, mut v) = (Integer::from(0), Integer::from(1));
    for _ in 0..m {
        let nu = Integer::from(&u * &a) + &v;
        let nv = -Integer::from(&u * &p);
        u = nu;
        v = nv;
    }
    let c = v - 1u32;
    Integer::from(c.square_ref()) + Integer::from(&a * &c) * &u + p * Integer::from(u.square_ref())
}

fn c5_resultant() -> Outcome {
    let mut polys = Vec::new();
    for c in curves() {
        for p in good_primes(&c.curve, 50) {
            polys.push(frobenius_poly(&c.curve, p, BUDGET).map_err(|e| e.to_string())?);
        }
    }
    let res = par_map(&polys, |phi| {
        (1..=200u64).all(|m| {
            let r = resultant_with_cyclotomic(phi, m);
            r != 0 && r == resultant_oracle(phi, m)
        })
    });
    ensure(res.iter().all(|&b| b), || "resultant mismatch or zero".into())?;
    let mut torsion = 0;
    let mut nontorsion = 0;
    let ext = [rationals(), cyclotomic(5).unwrap()];
    for c in curves() {
        for k in &ext {
            for p in good_primes(&c.curve, 30).into_iter().filter(|&p| !k.is_ramified(p)) {
                let phi = frobenius_poly(&c.curve, p, BUDGET).map_err(|e| e.to_string())?;
                for (t, _) in &c.torsion {
                    let t = t.base_change(k).unwrap();
                    match torsion_test(&t, &phi).map_err(|e| e.to_string())? {
                        TorsionWitness::Torsion { r, .. } => ensure(t.mul_int(&r).is_zero(), || format!("[r]{t} != O"))?,
                        TorsionWitness::NonTorsion { .. } => return Err(format!("{} {t} at {p}: Phi_p(sigma)P != O", c.name)),
                    }
                    torsion += 1;
                }
                for pt in &c.nontorsion {
                    let pt = pt.base_change(k).unwrap();
                    ensure(matches!(torsion_test(&pt, &phi), Ok(TorsionWitness::NonTorsion { .. })), || {
                        format!("{} {pt} at {p}", c.name)
                    })?;
                    nontorsion += 1;
                }
            }
        }
    }
    for (name, d, pt) in twist_corpus() {
        let e = by_name(name).unwrap().curve;
        for p in good_primes(&e, 30).into_iter().filter(|&p| p != d) {
            let phi = frobenius_poly(&e, p, BUDGET).map_err(|e| e.to_string())?;
            ensure(matches!(torsion_test(&pt, &phi), Ok(TorsionWitness::NonTorsion { .. })), || {
                format!("{name} {pt} at {p}")
            })?;
            nontorsion += 1;
        }
    }
    Ok(format!(
        "{} polynomials x m <= 200 nonzero and match; {torsion} torsion and {nontorsion} nontorsion checks",
        polys.len()
    ))
}

/// ĥ_x by 12 exact x-only doublings over Q, independent of the library orbit.
fn doubling_oracle(e: &Curve, x0: Rational, n: u32) -> f64 {
    let [b2, b4, b6, b8] = e.b();
    let mut x = x0;
    for _ in 0..n {
        let x2 = Rational::from(x.square_ref());
        let x3 = Rational::from(&x2 * &x);
        let x4 = Rational::from(x2.square_ref());
        let num = x4 - Rational::from(&x2 * &b4) - Rational::from(&x * &b6) * 2u32 - &b8;
        let den = x3 * 4u32 + Rational::from(&x2 * &b2) + Rational::from(&x * &b4) * 2u32 + &b6;
        x = num / den;
    }
    let m = std::cmp::max(Integer::from(x.numer().abs_ref()), x.denom().clone());
    let ln = rug::Float::with_val(128, &m).ln();
    ln.to_f64() / 4f64.powi(n as i32)
}

fn all_corpus_points() -> Vec<(String, ECPoint)> {
    let mut out = Vec::new();
    for c in curves() {
        for p in &c.nontorsion {
            out.push((c.name.to_string(), p.clone()));
        }
        for (t, _) in &c.torsion {
            out.push((c.name.to_string(), t.clone()));
        }
    }
    for (name, d, p) in twist_corpus() {
        out.push((format!("{name}/Q(sqrt {d})"), p));
    }
    out
}

fn c6_canonical() -> Outcome {
    let c = by_name("37a").unwrap();
    let h = canonical_height(&c.nontorsion[0], Normalization::X, 1e-7).map_err(|e| e.to_string())?;
    let oracle = doubling_oracle(&c.curve, Rational::from(0), 12);
    ensure((h.value - oracle).abs() <= 1e-6, || format!("h_x((0,0)) = {} but oracle {oracle}", h.value))?;
    let pts = all_corpus_points();
    let res = par_map(&pts, |(name, p)| -> Result<(f64, f64), String> {
        let hp = |q: &ECPoint, n| canonical_height(q, n, 1e-6).map(|r| r.value).map_err(|e| format!("{name} {q}: {e}"));
        let (h1, h2, hn) = (
            hp(p, Normalization::Psi)?,
            hp(&p.double(), Normalization::Psi)?,
            hp(&p.neg(), Normalization::Psi)?,
        );
        let hx = hp(p, Normalization::X)?;
        ensure((h2 - 4.0 * h1).abs() <= 1e-6, || format!("{name} {p}: h(2P) = {h2}, 4h(P) = {}", 4.0 * h1))?;
        ensure((hn - h1).abs() <= 1e-6, || format!("{name} {p}: h(-P) = {hn}, h(P) = {h1}"))?;
        ensure((h1 - 1.5 * hx).abs() <= 1e-6, || format!("{name} {p}: h_psi = {h1}, h_x = {hx}"))?;
        Ok(((h2 - 4.0 * h1).abs(), (h1 - 1.5 * hx).abs()))
    });
    let mut worst = (0f64, 0f64);
    for r in res {
        let (a, b) = r?;
        worst = (worst.0.max(a), worst.1.max(b));
    }
    Ok(format!(
        "h_x((0,0)) = {:.9} vs oracle {oracle:.9}; {} points, max quadraticity defect {:.1e}, max psi/x defect {:.1e}",
        h.value,
        pts.len(),
        worst.0,
        worst.1
    ))
}

fn twist_base(name: &str, d: u64) -> ECPoint {
    twist_corpus().into_iter().find(|(n, k, _)| *n == name && *k == d).unwrap().2
}

fn c7_height_comparison() -> Outcome {
    let mut bases = Vec::new();
    for name in ["37a", "x3+x+1", "x3-2"] {
        bases.push((name.to_string(), by_name(name).unwrap().nontorsion[0].clone()));
    }
    bases.push(("27a/Q(sqrt 5)".into(), twist_base("27a", 5)));
    bases.push(("11a3/Q(sqrt 17)".into(), twist_base("11a3", 17)));
    let mut jobs = Vec::new();
    for (name, p) in &bases {
        let bound = height_comparison_bound(p.curve());
        let hp = canonical_height(p, Normalization::Psi, 1e-7).map_err(|e| e.to_string())?.interval();
        // [k]P for 0 < |k| <= 250
        let ks: Vec<i64> = (1..=250).collect();
        let multiples: Vec<ECPoint> = if p.field().degree() == 1 {
            par_map(&ks, |&k| p.mul_i64(k))
        } else {
            let mut q = p.clone();
            let mut out = Vec::new();
            for _ in &ks {
                out.push(q.clone());
                q = q.add(p).map_err(|e| e.to_string())?;
            }
            out
        };
        for (k, q) in ks.iter().zip(multiples) {
            jobs.push((name.clone(), -k, q.neg(), hp.mul_i64(k * k), bound.c_psi));
            jobs.push((name.clone(), *k, q, hp.mul_i64(k * k), bound.c_psi));
        }
    }
    for name in ["27a", "11a3"] {
        let c = by_name(name).unwrap();
        let bound = height_comparison_bound(&c.curve);
        for (k, (t, _)) in c.torsion.iter().enumerate().take(2) {
            for j in 1..=10 {
                jobs.push((name.to_string(), (k * 10 + j) as i64, t.mul_i64(j as i64), Interval::zero(PREC), bound.c_psi));
            }
        }
    }
    let res = par_map(&jobs, |(_, _, q, hhat, c)| -> Result<bool, String> {
        let h = weil_height(&q.psi(), PREC).map_err(|e| e.to_string())?;
        let d = h.sub(hhat);
        Ok(d.upper_f64() <= *c && d.lower_f64() >= -*c)
    });
    let mut fails = Vec::new();
    for ((name, k, _, _, _), r) in jobs.iter().zip(res) {
        if r != Ok(true) {
            fails.push(format!("{name} k = {k}: {r:?}"));
        }
    }
    ensure(fails.is_empty(), || format!("{} violations, first {}", fails.len(), fails[0]))?;
    Ok(format!("{} multiples on 5 curves, 0 violations", jobs.len()))
}

fn c8_ad_congruence() -> Outcome {
    let cases = [(quadratic(5).unwrap(), 5u64), (cyclotomic(3).unwrap(), 3), (cyclotomic(9).unwrap(), 3)];
    let mut r = rng(8);
    let mut n = 0;
    for (k, p) in &cases {
        for _ in 0..100 {
            let a = random_element(&mut r, k, 50, 1);
            let c = ad_congruence_check(&a, *p).map_err(|e| format!("{a}: {e}"))?;
            ensure(c.holds, || format!("{a} in {} at {p}: {:?}", k.literal(), c.valuations))?;
            n += 1;
        }
    }
    Ok(format!("{n} elements, 0 failures"))
}

fn c9_twist_distance() -> Outcome {
    let mut jobs = Vec::new();
    for (name, d, base) in twist_corpus() {
        for k in 1..=7 {
            jobs.push((name, d, k, base.mul_i64(k)));
        }
    }
    ensure(jobs.len() >= 25, || format!("only {} twist points", jobs.len()))?;
    let res = par_map(&jobs, |(_, d, _, pt)| -> Result<Vec<Rational>, String> {
        let tau = heightbound::numfield::inertia_tau(pt.field(), *d).map_err(|e| e.to_string())?;
        let q1 = pt.galois(&tau).map_err(|e| e.to_string())?.mul_i64(*d as i64);
        let q2 = pt.mul_i64(*d as i64);
        let mut out = Vec::new();
        for pr in primes_above(pt.field(), *d).map_err(|e| e.to_string())? {
            out.push(delta_finite(&q1.psi(), &q2.psi(), &pr).ok_or("[p]tau P = [p]P")?);
        }
        Ok(out)
    });
    let mut min = None::<Rational>;
    for ((name, d, k, _), r) in jobs.iter().zip(res) {
        for c in r.map_err(|e| format!("{name} [{k}]P over Q(sqrt {d}): {e}"))? {
            ensure(c >= 1, || format!("{name} [{k}]P over Q(sqrt {d}): delta = {c} log p"))?;
            if min.as_ref().is_none_or(|m| c < *m) {
                min = Some(c);
            }
        }
    }
    Ok(format!("{} twist points, min delta = {} log p", jobs.len(), min.unwrap()))
}

fn c10_formal_series() -> Outcome {
    let mut n = 0;
    let mut supersingular = Vec::new();
    for c in curves() {
        for p in [2u64, 3, 5, 7].into_iter().filter(|&p| c.curve.is_good(p)) {
            let s = formal_p_series(&c.curve, p, 60).map_err(|e| e.to_string())?;
            ensure(s.is_series_in_t_p(), || format!("{} at {p}: {:?}", c.name, s.coeffs))?;
            let a = frobenius_poly(&c.curve, p, BUDGET).map_err(|e| e.to_string())?.a_p;
            let want = if a.rem_euclid(p as i64) != 0 { p } else { p * p };
            ensure(s.first_nonzero() == Some(want as usize), || {
                format!("{} at {p}: first nonzero {:?}, want {want}", c.name, s.first_nonzero())
            })?;
            if want != p {
                supersingular.push(format!("{}@{p}", c.name));
            }
            n += 1;
        }
    }
    let s = formal_p_series(&by_name("27a").unwrap().curve, 2, 60).map_err(|e| e.to_string())?;
    ensure(s.first_nonzero() == Some(4), || {
        format!("y^2 + y = x^3 at 2: first nonzero {:?}", s.first_nonzero())
    })?;
    Ok(format!("{n} (curve, p) pairs; supersingular {}", supersingular.join(", ")))
}

fn check_certificate(label: &str, cert: &BoundCertificate) -> Result<(), String> {
    ensure(cert.verdict == Verdict::Certified, || {
        format!("{label}: verdict {:?}, notes {:?}", cert.verdict, cert.notes)
    })?;
    for (depth, c) in cert.chain().into_iter().enumerate() {
        for pc in &c.prime_checks {
            ensure(pc.holds, || {
                format!("{label} level {depth}: {:?} at {} = {} (want {})", pc.kind, pc.prime, pc.value, pc.required)
            })?;
            if pc.kind == PrimeCheckKind::DescentDrop {
                ensure(c.descent.is_some(), || format!("{label}: drop without descent"))?;
            }
        }
        for h in &c.height_checks {
            ensure(h.status != CheckStatus::Refuted, || format!("{label} level {depth}: {} refuted", h.name))?;
        }
        if c.branch == heightbound::certifier::Branch::Unramified {
            let upper = c
                .height_checks
                .iter()
                .find(|h| h.name.contains("144 p^2"))
                .ok_or(format!("{label}: no upper chain"))?;
            ensure(upper.status == CheckStatus::Verified, || format!("{label}: upper chain {:?}", upper.status))?;
        }
        let claimed = c.claimed_bound.ok_or(format!("{label}: no claimed bound"))?;
        ensure(claimed <= c.measured.hi, || format!("{label}: claimed {claimed} > measured {}", c.measured.hi))?;
    }
    let rep = verify(cert).map_err(|e| format!("{label}: verify: {e}"))?;
    ensure(rep.reproduced && rep.verdict == cert.verdict, || {
        format!("{label}: verify mismatches {:?}", rep.mismatches)
    })
}

fn c11_certifier() -> Outcome {
    let diag = |p: Option<u64>| CertifyConfig {
        prime: p,
        ..Default::default()
    };
    let mut runs: Vec<(String, ECPoint, CertifyConfig)> = Vec::new();
    for c in curves() {
        for pt in &c.nontorsion {
            runs.push((format!("{} {pt} / Q", c.name), pt.clone(), diag(None)));
            let (k, p) = if c.curve.is_cm() {
                (quadratic(-7).unwrap(), 7)
            } else {
                (quadratic(5).unwrap(), 5)
            };
            runs.push((format!("{} {pt} / {} at {p}", c.name, k.literal()), pt.base_change(&k).unwrap(), diag(Some(p))));
        }
    }
    for (name, d, pt) in twist_corpus() {
        // supersingular reduction at d fails the hypotheses, so there is no run
        if !is_ordinary(pt.curve(), d, 1_000_000).map_err(|e| e.to_string())? {
            continue;
        }
        runs.push((format!("{name} {pt} / Q(sqrt {d})"), pt, diag(Some(d))));
    }
    let res = par_map(&runs, |(label, pt, cfg)| {
        let cert = certify(pt, cfg).map_err(|e| format!("{label}: {e}"))?;
        check_certificate(label, &cert)?;
        Ok::<_, String>(cert.chain().len())
    });
    let mut descents = 0;
    for r in res {
        descents += r? - 1;
    }
    let pt = by_name("37a").unwrap().nontorsion[0].clone();
    let mut cfg = CertifyConfig {
        mode: Mode::Theorem,
        ..Default::default()
    };
    cfg.good_prime.mode = Mode::Theorem;
    let cert = certify(&pt, &cfg).map_err(|e| format!("theorem mode: {e}"))?;
    check_certificate("theorem mode 37a (0,0)", &cert)?;
    let p = cert.inputs.p as f64;
    let literal = 1.0 / (12.0 * p).powi(2);
    let claimed = cert.claimed_bound.unwrap();
    ensure((claimed - literal).abs() <= 1e-6 * literal, || format!("claimed {claimed}, literal {literal}"))?;
    ensure(cert.measured.lo >= literal, || format!("measured {} < 1/(12p)^2 = {literal}", cert.measured.lo))?;
    Ok(format!(
        "{} diagnostic runs certified and re-verified ({descents} descents); theorem mode at p = {} claims {literal:.3e} <= measured {:.6}",
        runs.len(),
        cert.inputs.p,
        cert.measured.lo
    ))
}

fn main() {
    let all = [
        Criterion {
            id: 1,
            name: "product formula and extremal absolute value",
            seconds: 10.0,
            run: c1_product_formula,
        },
        Criterion {
            id: 2,
            name: "local-global height inequality",
            seconds: 60.0,
            run: c2_local_global,
        },
        Criterion {
            id: 3,
            name: "Frobenius polynomial coefficients",
            seconds: 30.0,
            run: c3_frobenius_coefficients,
        },
        Criterion {
            id: 4,
            name: "Frobenius annihilation mod primes above p",
            seconds: 300.0,
            run: c4_annihilation,
        },
        Criterion {
            id: 5,
            name: "resultant witness and torsion test",
            seconds: 60.0,
            run: c5_resultant,
        },
        Criterion {
            id: 6,
            name: "canonical height",
            seconds: 60.0,
            run: c6_canonical,
        },
        Criterion {
            id: 7,
            name: "Weil versus canonical height",
            seconds: 120.0,
            run: c7_height_comparison,
        },
        Criterion {
            id: 8,
            name: "inertia congruence",
            seconds: 30.0,
            run: c8_ad_congruence,
        },
        Criterion {
            id: 9,
            name: "twist point distance",
            seconds: 300.0,
            run: c9_twist_distance,
        },
        Criterion {
            id: 10,
            name: "formal [p]-series",
            seconds: 30.0,
            run: c10_formal_series,
        },
        Criterion {
            id: 11,
            name: "end-to-end certifier",
            seconds: 600.0,
            run: c11_certifier,
        },
    ];
    // positional arguments select criteria by number; libtest flags are ignored
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in all.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let out = std::panic::catch_unwind(c.run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or("panic".into()))
        });
        let t = start.elapsed().as_secs_f64();
        let (ok, detail) = match out {
            Ok(d) if t <= c.seconds => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s budget", c.seconds)),
            Err(e) => (false, e),
        };
        failed += !ok as u32;
        println!("criterion {:>2} {}: {} ({t:.1}s) {detail}", c.id, c.name, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
