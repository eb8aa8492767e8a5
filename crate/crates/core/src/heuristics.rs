// SPDX-License-Identifier: Apache-2.0

//! Cohen-Lenstra averages of the indicator of a nontrivial p-part, the
//! weights `w` of ideals, and automorphism group orders of finite abelian
//! p-groups.
//!
//! The heuristic is formulated for modules of order prime to the degree of
//! the base extension; for quadratic fields that excludes `p = 2`, which is
//! still computable here but not covered by the model.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Default absolute tolerance for [`cl_average`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// How `p` splits in the base ring: `g` places with residue degrees `f_list`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingProfile {
    pub g: usize,
    pub f_list: Vec<u32>,
}

impl SplittingProfile {
    /// `g` places, all of residue degree `f`.
    pub fn uniform(g: usize, f: u32) -> Self {
        assert!(g >= 1 && f >= 1, "empty profile");
        SplittingProfile { g, f_list: vec![f; g] }
    }

    pub fn new(f_list: Vec<u32>) -> Option<Self> {
        if f_list.is_empty() || f_list.contains(&0) {
            return None;
        }
        Some(SplittingProfile { g: f_list.len(), f_list })
    }
}

/// The group `prod Z/p^(exponents[i])` with `exponents` non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PGroupShape {
    pub p: u64,
    pub exponents: Vec<u32>,
}

impl PGroupShape {
    /// Sorts the exponents; rejects zero parts.
    pub fn new(p: u64, mut exponents: Vec<u32>) -> Option<Self> {
        if exponents.contains(&0) || p < 2 {
            return None;
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Some(PGroupShape { p, exponents })
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exponents.iter().sum::<u32>())
    }
}

/// Number of factors `k >= 1` kept in `prod (1 - x^k)` for `x = p^(-f)`.
fn truncation(x: f64, tol: f64) -> u32 {
    (tol.ln() / x.ln()).ceil().max(1.0) as u32 + 4
}

/// `1 - prod_i prod_{k>=1} (1 - p^(-(k+u) f_i))`.
///
/// The Cohen-Lenstra model only covers modules of order prime to the degree
/// of the extension, so for quadratic fields `p = 2` is outside it (genus
/// theory controls the 2-part). The value is still returned for `p = 2`.
pub fn cl_average(p: u64, profile: &SplittingProfile, u: u32, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut prod = 1.0f64;
    for &f in &profile.f_list {
        let x = (p as f64).powi(-(f as i32));
        let terms = truncation(x, tol);
        let mut xk = x.powi(u as i32 + 1);
        for _ in 0..terms {
            prod *= 1.0 - xk;
            xk *= x;
        }
    }
    1.0 - prod
}

/// The same average when all residue degrees equal `f`: `1 - (prod (1 - p^(-(k+u) f)))^g`.
pub fn cl_average_uniform(p: u64, g: usize, f: u32, u: u32, tol: f64) -> f64 {
    let single = 1.0 - cl_average(p, &SplittingProfile::uniform(1, f), u, tol);
    1.0 - single.powi(g as i32)
}

/// `M'_2(Pi_3) = M_{2,0}(Pi_3) * 7/8 + 1/8`.
pub fn adjusted_average_p3(m20: f64) -> f64 {
    m20 * 7.0 / 8.0 + 1.0 / 8.0
}

/// `w` of the ideal `prod q_i^(alpha_i)`, each `q_i` the norm of a distinct prime.
pub fn w_ideal(factors: &[(u64, u32)]) -> BigRational {
    let mut acc = BigRational::one();
    for &(q, alpha) in factors {
        let q = BigInt::from(q);
        acc /= BigRational::from_integer(q.pow(alpha));
        for k in 1..=alpha {
            let qk = BigRational::from_integer(q.pow(k));
            acc /= BigRational::one() - qk.recip();
        }
    }
    acc
}

/// `#Aut(prod Z/p^(e_i))` by Hall's formula.
pub fn aut_order_abelian_p_group(shape: &PGroupShape) -> BigUint {
    aut_order_q(shape.p, &shape.exponents)
}

/// The same count for modules `prod O/P^(e_i)` over a ring with residue field of size `q`.
pub fn aut_order_q(q: u64, exponents: &[u32]) -> BigUint {
    let mut e: Vec<u32> = exponents.to_vec();
    e.sort_unstable();
    let n = e.len();
    if n == 0 {
        return BigUint::one();
    }
    let q = BigUint::from(q);
    // 1-based d_k = max{l : e_l = e_k}, c_k = min{l : e_l = e_k}
    let d: Vec<usize> = (0..n).map(|k| (0..n).filter(|&l| e[l] == e[k]).max().unwrap() + 1).collect();
    let c: Vec<usize> = (0..n).map(|k| (0..n).filter(|&l| e[l] == e[k]).min().unwrap() + 1).collect();
    let mut out = BigUint::one();
    for k in 0..n {
        out *= q.pow(d[k] as u32) - q.pow(k as u32);
    }
    for j in 0..n {
        out *= q.pow(e[j] * (n - d[j]) as u32);
    }
    for i in 0..n {
        out *= q.pow((e[i] - 1) * (n - c[i] + 1) as u32);
    }
    out
}

/// Every partition of `n` as a non-increasing sequence.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `sum 1/#Aut(G)` over the modules `G` of length `alpha` over residue field size `q`.
pub fn w_partition_sum(q: u64, alpha: u32) -> BigRational {
    partitions(alpha).iter().fold(BigRational::zero(), |acc, lambda| {
        acc + BigRational::from_integer(BigInt::from(aut_order_q(q, lambda))).recip()
    })
}
