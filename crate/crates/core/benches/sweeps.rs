use criterion::{criterion_group, criterion_main, Criterion};
use heightbound::arith::primes_up_to;
use heightbound::canonical::{canonical_height, Normalization};
use heightbound::corpus::by_name;
use heightbound::ellcurve::{frobenius_poly, ECPoint};
use heightbound::par::{is_parallel, par_map};

fn frobenius_sweep(c: &mut Criterion) {
    let e = by_name("37a").unwrap().curve;
    let primes: Vec<u64> = primes_up_to(3000).into_iter().filter(|&p| e.is_good(p)).collect();
    let f = |p: &u64| frobenius_poly(&e, *p, 1_000_000).unwrap().a_p;
    let mut g = c.benchmark_group("frobenius_sweep");
    g.bench_function(if is_parallel() { "par_map" } else { "par_map (sequential build)" }, |b| {
        b.iter(|| par_map(&primes, f))
    });
    g.bench_function("sequential", |b| b.iter(|| primes.iter().map(f).collect::<Vec<_>>()));
    g.finish();
}

fn canonical_sweep(c: &mut Criterion) {
    let p = by_name("37a").unwrap().nontorsion[0].clone();
    let pts: Vec<ECPoint> = (1..=16).map(|k| p.mul_i64(k)).collect();
    let f = |q: &ECPoint| canonical_height(q, Normalization::Psi, 1e-6).unwrap().value;
    let mut g = c.benchmark_group("canonical_sweep");
    g.sample_size(10);
    g.bench_function(if is_parallel() { "par_map" } else { "par_map (sequential build)" }, |b| {
        b.iter(|| par_map(&pts, f))
    });
    g.bench_function("sequential", |b| b.iter(|| pts.iter().map(f).collect::<Vec<_>>()));
    g.finish();
}

criterion_group!(benches, frobenius_sweep, canonical_sweep);
criterion_main!(benches);
