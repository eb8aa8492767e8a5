// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Integer lattice kept in Hermite form: one basis row per pivot column,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct HermiteLattice {
    dim: usize,
    basis: Vec<Option<Vec<BigInt>>>,
}

impl HermiteLattice {
    pub fn new(dim: usize) -> Self {
        Self { dim, basis: vec![None; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.iter().filter(|b| b.is_some()).count()
    }

    /// Adds `v` to the lattice; returns whether the lattice grew.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        let mut grew = false;
        for j in 0..self.dim {
            if v[j].is_zero() {
                continue;
            }
            match self.basis[j].take() {
                None => {
                    if v[j].is_negative() {
                        v.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    self.basis[j] = Some(v);
                    self.reduce_above(j);
                    return true;
                }
                Some(b) => {
                    let e = b[j].extended_gcd(&v[j]);
                    let g = e.gcd;
                    if g == b[j] {
                        // b's pivot divides v's entry: plain elimination
                        let q = &v[j] / &b[j];
                        for k in j..self.dim {
                            let t = &q * &b[k];
                            v[k] -= t;
                        }
                        self.basis[j] = Some(b);
                        continue;
                    }
                    let bj = &b[j] / &g;
                    let vj = &v[j] / &g;
                    let mut nb = vec![BigInt::zero(); self.dim];
                    let mut nv = vec![BigInt::zero(); self.dim];
                    for k in j..self.dim {
                        nb[k] = &e.x * &b[k] + &e.y * &v[k];
                        nv[k] = &vj * &b[k] - &bj * &v[k];
                    }
                    if nb[j].is_negative() {
                        nb.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    self.basis[j] = Some(nb);
                    self.reduce_above(j);
                    grew = true;
                    v = nv;
                }
            }
        }
        if grew {
            for j in 0..self.dim {
                if self.basis[j].is_some() {
                    self.reduce_above(j);
                }
            }
        }
        grew
    }

    /// Reduce column `j` of every earlier basis row modulo the pivot at `j`.
    fn reduce_above(&mut self, j: usize) {
        let Some(pivot_row) = self.basis[j].clone() else {
            return;
        };
        let pivot = &pivot_row[j];
        for i in 0..j {
            if let Some(row) = self.basis[i].as_mut() {
                let q = row[j].div_floor(pivot);
                if q.is_zero() {
                    continue;
                }
                for k in j..self.dim {
                    let t = &q * &pivot_row[k];
                    row[k] -= t;
                }
            }
        }
    }

    /// Index of the lattice in `Z^dim`, or `None` if it is not of full rank.
    pub fn determinant(&self) -> Option<BigInt> {
        let mut det = BigInt::one();
        for (j, b) in self.basis.iter().enumerate() {
            det *= &b.as_ref()?[j];
        }
        Some(det)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut v = v.to_vec();
        for j in 0..self.dim {
            if v[j].is_zero() {
                continue;
            }
            let Some(b) = self.basis[j].as_ref() else {
                return false;
            };
            let (q, r) = v[j].div_rem(&b[j]);
            if !r.is_zero() {
                return false;
            }
            for k in j..self.dim {
                let t = &q * &b[k];
                v[k] -= t;
            }
        }
        true
    }
}
