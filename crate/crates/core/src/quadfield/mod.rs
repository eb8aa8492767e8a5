// SPDX-License-Identifier: Apache-2.0

//! Arithmetic of `Q(sqrt(d))`: the maximal order `Z[w]`, prime ideals above a
//! rational prime, roots of unity, fundamental unit residues and the class
//! group.

mod classgroup;
pub mod forms;
mod residue;
mod units;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, inv_mod, kronecker, pow_mod};
use crate::error::{Error, Result};

pub use classgroup::{class_group, class_group_with_bound, ClassGroupData, ReducedClassGroup, DEFAULT_DISC_BOUND};
pub use residue::{Residue, ResidueRing};
pub use units::{continued_fraction_period, fundamental_unit_exact, fundamental_unit_mod, FundamentalUnitResidue};

/// Which integral basis element generates the maximal order over `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaKind {
    /// `w = sqrt(d)`, for `d = 2, 3 mod 4`.
    Sqrt,
    /// `w = (1 + sqrt(d)) / 2`, for `d = 1 mod 4`.
    Half,
}

/// The quadratic field `Q(sqrt(d))` with its ring of integers `Z[w]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadField {
    pub d: i64,
    pub disc: i64,
    pub r1: u32,
    pub r2: u32,
    pub omega_kind: OmegaKind,
}

/// Largest |d| accepted; keeps every norm computation inside `i128`.
const MAX_ABS_D: u64 = 1 << 40;

/// Validates `d` and builds the field.
pub fn make_field(d: i64) -> Result<QuadField> {
    if d == 0 || d == 1 || d.unsigned_abs() > MAX_ABS_D {
        return Err(Error::DegenerateD(d));
    }
    if !arith::is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let (disc, omega_kind) = if d.rem_euclid(4) == 1 { (d, OmegaKind::Half) } else { (4 * d, OmegaKind::Sqrt) };
    let (r1, r2) = if d > 0 { (2, 0) } else { (0, 1) };
    Ok(QuadField { d, disc, r1, r2, omega_kind })
}

impl QuadField {
    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    /// `r2 + 1`, the Z_p-rank predicted by Leopoldt's conjecture.
    pub fn leopoldt_rank(&self) -> u32 {
        self.r2 + 1
    }

    /// `(t, s)` with `w^2 = t*w + s`.
    pub fn omega_relation(&self) -> (i64, i64) {
        match self.omega_kind {
            OmegaKind::Sqrt => (0, self.d),
            OmegaKind::Half => (1, (self.d - 1) / 4),
        }
    }

    /// Norm of `x + y*w`.
    pub fn norm_i128(&self, x: i128, y: i128) -> i128 {
        let (t, s) = self.omega_relation();
        x * x + (t as i128) * x * y - (s as i128) * y * y
    }

    pub fn norm(&self, a: &RingElement) -> BigInt {
        let (t, s) = self.omega_relation();
        &a.x * &a.x + BigInt::from(t) * &a.x * &a.y - BigInt::from(s) * &a.y * &a.y
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let (t, s) = self.omega_relation();
        let yy = &a.y * &b.y;
        RingElement {
            x: &a.x * &b.x + BigInt::from(s) * &yy,
            y: &a.x * &b.y + &a.y * &b.x + BigInt::from(t) * &yy,
        }
    }

    pub fn pow(&self, a: &RingElement, mut e: u64) -> RingElement {
        let mut acc = RingElement::one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Galois conjugate: `w -> t - w`.
    pub fn conj(&self, a: &RingElement) -> RingElement {
        let (t, _) = self.omega_relation();
        RingElement { x: &a.x + BigInt::from(t) * &a.y, y: -&a.y }
    }

    /// Real embedding of `w` with `sqrt(d) > 0`; imaginary part returned separately.
    pub fn omega_f64(&self) -> (f64, f64) {
        let root = (self.d.unsigned_abs() as f64).sqrt();
        match (self.omega_kind, self.is_real()) {
            (OmegaKind::Sqrt, true) => (root, 0.0),
            (OmegaKind::Sqrt, false) => (0.0, root),
            (OmegaKind::Half, true) => ((1.0 + root) / 2.0, 0.0),
            (OmegaKind::Half, false) => (0.5, root / 2.0),
        }
    }

    /// Roots of `X^2 - tX - s` modulo a prime `q`, i.e. the images of `w` in
    /// the residue fields of degree one above `q`.
    pub fn omega_roots_mod(&self, q: u64) -> Vec<u64> {
        let (t, s) = self.omega_relation();
        let qi = q as i64;
        let tq = t.rem_euclid(qi) as u64;
        let sq = s.rem_euclid(qi) as u64;
        if q == 2 {
            return (0..2u64).filter(|&r| (r * r + tq * r + sq) % 2 == 0).collect();
        }
        let disc = self.disc.rem_euclid(qi) as u64;
        let Some(root) = sqrt_mod_prime(disc, q) else {
            return Vec::new();
        };
        let inv2 = (q + 1) / 2;
        let r1 = (tq + root) % q * inv2 % q;
        let r2 = (tq + q - root) % q * inv2 % q;
        if r1 == r2 {
            vec![r1]
        } else {
            let mut v = vec![r1, r2];
            v.sort_unstable();
            v
        }
    }
}

/// Square root modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    let (a128, q128) = (a as u128, q as u128);
    if pow_mod(a128, (q128 - 1) / 2, q128) != 1 {
        return None;
    }
    let mut s = 0;
    let mut m = q - 1;
    while m % 2 == 0 {
        m /= 2;
        s += 1;
    }
    let mut z = 2u128;
    while pow_mod(z, (q128 - 1) / 2, q128) == 1 {
        z += 1;
    }
    let mut c = pow_mod(z, m as u128, q128);
    let mut x = pow_mod(a128, (m as u128 + 1) / 2, q128);
    let mut t = pow_mod(a128, m as u128, q128);
    let mut big_m = s;
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % q128;
            i += 1;
        }
        let b = pow_mod(c, 1u128 << (big_m - i - 1), q128);
        x = x * b % q128;
        c = b * b % q128;
        t = t * c % q128;
        big_m = i;
    }
    Some(x as u64)
}

/// The element `x + y*w` of the maximal order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    pub x: BigInt,
    pub y: BigInt,
}

impl RingElement {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self { x: x.into(), y: y.into() }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(f, "{} - {}w", self.x, -&self.y)
        } else {
            write!(f, "{} + {}w", self.x, self.y)
        }
    }
}

/// The ideal `content * (a*Z + (b + w)*Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadIdeal {
    pub content: u64,
    pub a: u64,
    pub b: i64,
}

impl QuadIdeal {
    pub fn primitive(a: u64, b: i64) -> Self {
        Self { content: 1, a, b }
    }

    pub fn norm(&self) -> u128 {
        (self.content as u128).pow(2) * self.a as u128
    }

    /// Membership of `x + y*w`.
    pub fn contains(&self, x: i128, y: i128) -> bool {
        let c = self.content as i128;
        if x % c != 0 || y % c != 0 {
            return false;
        }
        let (x, y) = (x / c, y / c);
        // x + y*w = y*(b + w) + (x - y*b); the remainder must be a multiple of a
        (x - y * self.b as i128).rem_euclid(self.a as i128) == 0
    }
}

/// Decomposition of `pO_K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Splitting {
    Split { ideals: [QuadIdeal; 2] },
    Inert { ideal: QuadIdeal },
    Ramified { ideal: QuadIdeal },
}

impl Splitting {
    pub fn ramification_index(&self) -> u32 {
        match self {
            Splitting::Ramified { .. } => 2,
            _ => 1,
        }
    }

    pub fn residue_degree(&self) -> u32 {
        match self {
            Splitting::Inert { .. } => 2,
            _ => 1,
        }
    }

    pub fn num_primes(&self) -> u32 {
        match self {
            Splitting::Split { .. } => 2,
            _ => 1,
        }
    }

    /// `(ideal, e, f)` for every prime above p.
    pub fn primes(&self) -> Vec<(QuadIdeal, u32, u32)> {
        match self {
            Splitting::Split { ideals } => ideals.iter().map(|&i| (i, 1, 1)).collect(),
            Splitting::Inert { ideal } => vec![(*ideal, 1, 2)],
            Splitting::Ramified { ideal } => vec![(*ideal, 2, 1)],
        }
    }
}

/// How `p` decomposes in `K`, with explicit prime ideals.
pub fn prime_splitting(k: &QuadField, p: u64) -> Splitting {
    match kronecker(k.disc, p) {
        0 => {
            let r = k.omega_roots_mod(p)[0];
            Splitting::Ramified { ideal: QuadIdeal::primitive(p, -(r as i64)) }
        }
        1 => {
            let roots = k.omega_roots_mod(p);
            Splitting::Split {
                ideals: [QuadIdeal::primitive(p, -(roots[0] as i64)), QuadIdeal::primitive(p, -(roots[1] as i64))],
            }
        }
        _ => Splitting::Inert { ideal: QuadIdeal { content: p, a: 1, b: 0 } },
    }
}

/// A generator of the roots of unity of `O_K` and its order.
pub fn torsion_units(k: &QuadField) -> Vec<(RingElement, u32)> {
    match k.d {
        -1 => vec![(RingElement::new(0, 1), 4)],
        // w = (1 + sqrt(-3))/2 is a primitive sixth root of unity
        -3 => vec![(RingElement::new(0, 1), 6)],
        _ => vec![(RingElement::new(-1, 0), 2)],
    }
}

/// `s` with `p^s || e`, where `e` is the ramification index of `p` in `K`.
pub fn ramification_valuation(k: &QuadField, p: u64) -> u32 {
    if p == 2 && k.disc % 2 == 0 {
        1
    } else {
        0
    }
}

/// Hensel-lift a simple root of `X^2 - tX - s` from mod `p` to mod `p^n`.
pub(crate) fn lift_omega_root(k: &QuadField, r: u64, p: u64, n: u32) -> u128 {
    let m = (p as u128).pow(n);
    let (t, s) = k.omega_relation();
    let t = arith::reduce_signed(t as i128, m);
    let s = arith::reduce_signed(s as i128, m);
    let mut x = r as u128 % m;
    for _ in 0..=n.ilog2() + 1 {
        let fx = (x * x % m + 2 * m - t * x % m - s) % m;
        let dfx = (2 * x + m - t) % m;
        let inv = inv_mod(dfx, m).expect("simple root");
        x = (x + m - fx * inv % m) % m;
    }
    debug_assert_eq!((x * x % m + 2 * m - t * x % m - s) % m, 0);
    x
}
