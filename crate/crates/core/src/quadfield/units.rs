// SPDX-License-Identifier: Apache-2.0

//! Fundamental units of real quadratic fields from the continued fraction
//! expansion of a reduced quadratic irrational attached to the maximal order.

use num_bigint::BigInt;

use super::{OmegaKind, QuadField, Residue, ResidueRing, RingElement};
use crate::arith::{isqrt, mul_mod};
use crate::error::{Error, Result};

/// Image of the fundamental unit in `O_K / p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FundamentalUnitResidue {
    pub residue: Residue,
    /// `N(eps) = +1` or `-1`.
    pub norm: i8,
    /// Length of the continued fraction period.
    pub period: usize,
}

/// The reduced number `theta0 = c + w`, returned as `(c, P, Q)` with
/// `theta0 = (P + sqrt(d)) / Q`.
fn reduced_start(k: &QuadField) -> (i64, u64, u64) {
    let root = isqrt(k.d as u128) as u64;
    match k.omega_kind {
        OmegaKind::Sqrt => (root as i64, root, 1),
        OmegaKind::Half => {
            let p = if root % 2 == 1 { root } else { root - 1 };
            ((p as i64 - 1) / 2, p, 2)
        }
    }
}

/// Partial quotients over one period of the purely periodic expansion of
/// `theta0 = c + w`.
pub fn continued_fraction_period(k: &QuadField) -> Result<Vec<u64>> {
    if !k.is_real() {
        return Err(Error::NotRealField(k.d));
    }
    let d = k.d as u64;
    let root = isqrt(d as u128) as u64;
    let (_, p0, q0) = reduced_start(k);
    let (mut p, mut q) = (p0, q0);
    let mut quotients = Vec::new();
    loop {
        let a = (p + root) / q;
        quotients.push(a);
        let np = a * q - p;
        let nq = (d - np * np) / q;
        p = np;
        q = nq;
        if p == p0 && q == q0 {
            break;
        }
    }
    Ok(quotients)
}

/// `eps = Q_{L-1} theta0 + Q_{L-2}` from the convergent denominators of the period.
fn unit_from_denominators<T, F>(k: &QuadField, quotients: &[u64], zero: T, one: T, step: F) -> (T, T, i64)
where
    T: Clone,
    F: Fn(u64, &T, &T) -> T,
{
    let (mut prev, mut cur) = (one, zero); // Q_{-2}, Q_{-1}
    for &b in quotients {
        let next = step(b, &cur, &prev);
        prev = cur;
        cur = next;
    }
    let (c, _, _) = reduced_start(k);
    (cur, prev, c)
}

/// The fundamental unit reduced mod `p^n`, streamed through the recurrence
/// without ever forming the unit itself.
pub fn fundamental_unit_mod(k: &QuadField, ring: &ResidueRing) -> Result<FundamentalUnitResidue> {
    let quotients = continued_fraction_period(k)?;
    let m = ring.modulus();
    let (ql, ql1, c) = unit_from_denominators(k, &quotients, 0u128, 1u128 % m, |b, cur, prev| {
        (mul_mod(b as u128 % m, *cur, m) + prev) % m
    });
    // eps = ql * (c + w) + ql1
    let cm = crate::arith::reduce_signed(c as i128, m);
    let residue = Residue { x: (mul_mod(ql, cm, m) + ql1) % m, y: ql };
    let norm = if quotients.len() % 2 == 0 { 1 } else { -1 };
    Ok(FundamentalUnitResidue { residue, norm, period: quotients.len() })
}

/// The fundamental unit as an exact ring element. Its size grows like
/// `exp(sqrt(D))`, so this is meant for small fields and for tests.
pub fn fundamental_unit_exact(k: &QuadField) -> Result<RingElement> {
    let quotients = continued_fraction_period(k)?;
    let (ql, ql1, c) = unit_from_denominators(k, &quotients, BigInt::from(0), BigInt::from(1), |b, cur, prev| {
        BigInt::from(b) * cur + prev
    });
    Ok(RingElement { x: &ql * c + ql1, y: ql })
}
