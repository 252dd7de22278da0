use super::element::mul_reduce;
use super::{FieldElement, FieldError};
use crate::arith::modulo;
use rug::Integer;

/// Norm of the ideal generated by integral elements, computed as the index
/// in Z[θ] of the lattice spanned by every generator times θ^j.
///
/// The lattice contains D·Z[θ] where D is a nonzero rational integer in the
/// ideal (a rational generator, or the norm of one generator), so the
/// triangularization runs modulo D.
pub fn ideal_norm_of_generators(elements: &[FieldElement]) -> Result<Integer, FieldError> {
    let gens: Vec<&FieldElement> = elements.iter().filter(|e| !e.is_zero()).collect();
    if gens.is_empty() {
        return Err(FieldError::ZeroIdeal);
    }
    assert!(gens.iter().all(|e| e.is_integral()), "ideal generators must be integral");
    let field = gens[0].field().clone();
    for g in &gens {
        g.same_field(gens[0])?;
    }
    let n = field.degree();
    let modulus = gens
        .iter()
        .filter_map(|g| g.as_rational().map(|r| r.numer().clone().abs()))
        .min()
        .unwrap_or_else(|| {
            let smallest = gens.iter().min_by_key(|g| g.bit_size()).unwrap();
            smallest.norm().numer().clone().abs()
        });
    if n == 1 {
        let mut g = modulus;
        for e in &gens {
            g.gcd_mut(&e.num()[0]);
        }
        return Ok(g);
    }
    let mut vecs: Vec<Vec<Integer>> = Vec::with_capacity(gens.len() * n);
    for g in &gens {
        for j in 0..n {
            let v = mul_reduce(&field, g.num(), field.theta_power(j));
            vecs.push(v.into_iter().map(|c| modulo(c, &modulus)).collect());
        }
    }
    Ok(lattice_index_mod(vecs, n, modulus))
}

/// Index in Z^n of the lattice spanned by `vecs` and D·Z^n.
fn lattice_index_mod(mut vecs: Vec<Vec<Integer>>, n: usize, d: Integer) -> Integer {
    let mut index = Integer::from(1);
    for i in 0..n {
        // Combine all coordinate-i entries into one pivot vector.
        let mut pivot: Option<Vec<Integer>> = None;
        let mut rest: Vec<Vec<Integer>> = Vec::with_capacity(vecs.len());
        for v in vecs.into_iter() {
            if v[i] == 0 {
                if v.iter().any(|c| *c != 0) {
                    rest.push(v);
                }
                continue;
            }
            match pivot.take() {
                None => pivot = Some(v),
                Some(w) => {
                    let (w2, z) = combine(&w, &v, i, &d);
                    pivot = Some(w2);
                    if z.iter().any(|c| *c != 0) {
                        rest.push(z);
                    }
                }
            }
        }
        // Fold in D·e_i.
        let mut de = vec![Integer::new(); n];
        de[i] = d.clone();
        let (w, z) = match pivot {
            None => (de, None),
            Some(w) => {
                let (w2, z) = combine(&w, &de, i, &d);
                (w2, Some(z))
            }
        };
        if let Some(z) = z {
            if z.iter().any(|c| *c != 0) {
                rest.push(z);
            }
        }
        let g = Integer::from(w[i].gcd_ref(&d));
        index *= &g;
        vecs = rest;
    }
    index
}

/// Unimodular combination of `a` and `b` at coordinate `i`: returns
/// `(u a + v b, -b' a + a' b)` with the first entry gcd and the second zero.
fn combine(a: &[Integer], b: &[Integer], i: usize, d: &Integer) -> (Vec<Integer>, Vec<Integer>) {
    let (g, u, v) = a[i].extended_gcd_ref(&b[i]).into();
    let (g, u, v): (Integer, Integer, Integer) = (g, u, v);
    let a1 = Integer::from(&a[i] / &g);
    let b1 = Integer::from(&b[i] / &g);
    let mut w = Vec::with_capacity(a.len());
    let mut z = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        let wk = Integer::from(&u * &a[k]) + Integer::from(&v * &b[k]);
        let zk = Integer::from(&a1 * &b[k]) - Integer::from(&b1 * &a[k]);
        if k == i {
            w.push(g.clone());
            z.push(Integer::new());
        } else {
            w.push(modulo(wk, d));
            z.push(modulo(zk, d));
        }
    }
    (w, z)
}
