use crate::arith::fpoly::{self, Poly};
use crate::arith::{invmod, mulmod};
use serde::{Deserialize, Serialize};

/// An element of F_{p^f}, a reduced polynomial in the residue generator.
pub type ResidueElem = Poly;

/// The finite field F_p[x]/(g) for a monic irreducible g of degree f.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueField {
    pub p: u64,
    pub modulus: Poly,
}

impl ResidueField {
    pub fn new(p: u64, modulus: Poly) -> Self {
        ResidueField { p, modulus }
    }

    pub fn prime_field(p: u64) -> Self {
        ResidueField { p, modulus: vec![0, 1] }
    }

    pub fn degree(&self) -> u32 {
        (self.modulus.len() - 1) as u32
    }

    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.degree())
    }

    pub fn zero(&self) -> ResidueElem {
        vec![]
    }

    pub fn one(&self) -> ResidueElem {
        vec![1]
    }

    pub fn from_u64(&self, v: u64) -> ResidueElem {
        let v = v % self.p;
        if v == 0 {
            vec![]
        } else {
            vec![v]
        }
    }

    pub fn from_i64(&self, v: i64) -> ResidueElem {
        self.from_u64(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn reduce(&self, a: &Poly) -> ResidueElem {
        fpoly::rem(a, &self.modulus, self.p)
    }

    pub fn add(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        fpoly::add(a, b, self.p)
    }

    pub fn sub(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        fpoly::sub(a, b, self.p)
    }

    pub fn neg(&self, a: &ResidueElem) -> ResidueElem {
        fpoly::sub(&vec![], a, self.p)
    }

    pub fn mul(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        if self.modulus.len() == 2 {
            let x = a.first().copied().unwrap_or(0);
            let y = b.first().copied().unwrap_or(0);
            return self.from_u64(mulmod(x, y, self.p));
        }
        fpoly::mulmod_poly(a, b, &self.modulus, self.p)
    }

    pub fn scale(&self, a: &ResidueElem, k: i64) -> ResidueElem {
        fpoly::scale(a, k.rem_euclid(self.p as i64) as u64, self.p)
    }

    pub fn pow(&self, a: &ResidueElem, e: u128) -> ResidueElem {
        fpoly::powmod_poly(a, e, &self.modulus, self.p)
    }

    pub fn inv(&self, a: &ResidueElem) -> Option<ResidueElem> {
        if a.is_empty() {
            return None;
        }
        if self.modulus.len() == 2 {
            return Some(self.from_u64(invmod(a[0], self.p)?));
        }
        Some(self.pow(a, self.size() - 2))
    }

    pub fn is_zero(&self, a: &ResidueElem) -> bool {
        a.is_empty()
    }

    /// Enumerates all q elements (only sensible for small fields).
    pub fn elements(&self) -> Vec<ResidueElem> {
        let f = self.degree() as usize;
        let q = self.size() as u64;
        (0..q)
            .map(|mut k| {
                let mut v = Vec::with_capacity(f);
                for _ in 0..f {
                    v.push(k % self.p);
                    k /= self.p;
                }
                fpoly::trim(&mut v);
                v
            })
            .collect()
    }

    /// Whether a nonzero element is a square.
    pub fn is_square(&self, a: &ResidueElem) -> bool {
        if a.is_empty() || self.p == 2 {
            return true;
        }
        self.pow(a, (self.size() - 1) / 2) == vec![1]
    }
}
