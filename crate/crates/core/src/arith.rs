// SPDX-License-Identifier: Apache-2.0

//! Small-integer number theory used throughout: primality, factoring,
//! square roots, Kronecker symbols and modular arithmetic below 2^63.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut q = 3;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Trial-division factorization into (prime, exponent) pairs, ascending.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of a factored integer (unordered).
pub fn divisors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(q, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= q;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kronecker symbol (D | p) for a prime p.
pub fn kronecker(disc: i64, p: u64) -> i32 {
    if p == 2 {
        if disc % 2 == 0 {
            return 0;
        }
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = disc.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r as u128, ((p - 1) / 2) as u128, p as u128) == 1 {
        1
    } else {
        -1
    }
}

/// `a * b mod m`; every modulus in this crate stays below 2^63.
#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    (a * b) % m
}

pub fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u128, m: u128) -> Option<u128> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u128)
}

/// Reduce a signed integer into [0, m).
#[inline]
pub fn reduce_signed(a: i128, m: u128) -> u128 {
    a.rem_euclid(m as i128) as u128
}

/// Distinct prime divisors.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(q, _)| q).collect()
}

/// Order of `g` in the cyclic group of order `group_order` generated by some primitive element,
/// using the multiplication closure `pow`.
pub fn element_order<F: Fn(u128) -> bool>(group_order: u64, is_identity_at: F) -> u64 {
    let mut ord = group_order;
    for q in prime_divisors(group_order) {
        while ord % q == 0 && is_identity_at((ord / q) as u128) {
            ord /= q;
        }
    }
    ord
}
