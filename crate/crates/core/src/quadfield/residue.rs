// SPDX-License-Identifier: Apache-2.0

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::{QuadField, RingElement};
use crate::arith::{inv_mod, mul_mod, reduce_signed};
use crate::error::{Error, Result};

/// Moduli are kept below 2^63 so every product fits in a `u128`.
const MAX_MODULUS: u128 = 1 << 63;

/// The finite ring `O_K / p^n O_K` in the basis `{1, w}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    p: u64,
    n: u32,
    modulus: u128,
    t: u128,
    s: u128,
}

/// `x + y*w` modulo `p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub x: u128,
    pub y: u128,
}

impl ResidueRing {
    pub fn new(k: &QuadField, p: u64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        let modulus = (p as u128)
            .checked_pow(n)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or(Error::ModulusTooLarge { p, n })?;
        let (t, s) = k.omega_relation();
        Ok(Self { p, n, modulus, t: reduce_signed(t as i128, modulus), s: reduce_signed(s as i128, modulus) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn one(&self) -> Residue {
        Residue { x: 1 % self.modulus, y: 0 }
    }

    pub fn from_ints(&self, x: i128, y: i128) -> Residue {
        Residue { x: reduce_signed(x, self.modulus), y: reduce_signed(y, self.modulus) }
    }

    pub fn reduce(&self, a: &RingElement) -> Residue {
        let m = BigInt::from(self.modulus);
        let red = |v: &BigInt| {
            let r = ((v % &m) + &m) % &m;
            r.to_u128().expect("reduced below modulus")
        };
        Residue { x: red(&a.x), y: red(&a.y) }
    }

    pub fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        let m = self.modulus;
        let yy = mul_mod(a.y, b.y, m);
        Residue {
            x: (mul_mod(a.x, b.x, m) + mul_mod(self.s, yy, m)) % m,
            y: (mul_mod(a.x, b.y, m) + mul_mod(a.y, b.x, m) + mul_mod(self.t, yy, m)) % m,
        }
    }

    pub fn add(&self, a: &Residue, b: &Residue) -> Residue {
        Residue { x: (a.x + b.x) % self.modulus, y: (a.y + b.y) % self.modulus }
    }

    pub fn sub(&self, a: &Residue, b: &Residue) -> Residue {
        let m = self.modulus;
        Residue { x: (a.x + m - b.x) % m, y: (a.y + m - b.y) % m }
    }

    pub fn scale(&self, a: &Residue, k: u128) -> Residue {
        let m = self.modulus;
        Residue { x: mul_mod(a.x, k % m, m), y: mul_mod(a.y, k % m, m) }
    }

    pub fn pow(&self, a: &Residue, mut e: u128) -> Residue {
        let mut acc = self.one();
        let mut base = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: &Residue, e: &BigUint) -> Residue {
        let mut acc = self.one();
        for bit in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(bit) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn conj(&self, a: &Residue) -> Residue {
        let m = self.modulus;
        Residue { x: (a.x + mul_mod(self.t, a.y, m)) % m, y: (m - a.y) % m }
    }

    pub fn norm(&self, a: &Residue) -> u128 {
        self.mul(a, &self.conj(a)).x
    }

    pub fn is_unit(&self, a: &Residue) -> bool {
        self.norm(a) % self.p as u128 != 0
    }

    pub fn inv(&self, a: &Residue) -> Option<Residue> {
        let ninv = inv_mod(self.norm(a), self.modulus)?;
        Some(self.scale(&self.conj(a), ninv))
    }

    pub fn is_zero(&self, a: &Residue) -> bool {
        a.x.is_zero() && a.y.is_zero()
    }

    /// Every residue, units or not; only sensible for tiny moduli.
    pub fn enumerate(&self) -> impl Iterator<Item = Residue> + '_ {
        let m = self.modulus;
        (0..m).flat_map(move |x| (0..m).map(move |y| Residue { x, y }))
    }
}
