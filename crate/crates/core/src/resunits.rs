// SPDX-License-Identifier: Apache-2.0

//! The unit group `(O_K / p^n)^*` as a product of cyclic groups with explicit
//! generators and discrete logarithms.
//!
//! Split primes reduce to two copies of `(Z/p^n)^*` through the Chinese
//! remainder theorem. For an inert or ramified prime the group is a
//! Teichmuller part of order `q - 1` times the principal units `1 + P`, whose
//! structure comes from the filtration `U_k = 1 + P^k`: the elements
//! `1 + pi^k * beta` generate, their `p`-th powers give the relations, and a
//! Smith form diagonalizes them.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, mul_mod, pow_mod, prime_divisors};
use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix, InvariantFactors};
use crate::quadfield::{lift_omega_root, prime_splitting, QuadField, QuadIdeal, Residue, ResidueRing, Splitting};

/// One prime above `p` with its exponent `n e` in the modulus `p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub prime_ideal: QuadIdeal,
    pub e: u32,
    pub f: u32,
    pub level: u32,
}

/// `(O_K / p^n)^*` with generators of the stated (not necessarily chained) orders.
#[derive(Clone, Debug)]
pub struct ResidueUnitGroup {
    ring: ResidueRing,
    pub modulus_level: u32,
    pub local_factors: Vec<LocalFactor>,
    pub generators: Vec<Residue>,
    pub orders: Vec<u128>,
    structure: Structure,
}

#[derive(Clone, Debug)]
enum Structure {
    /// `x + y w -> (x + y r1, x + y r2)` with one `(Z/p^n)^*` per root.
    Split { roots: [u128; 2], factors: [IntegerUnits; 2] },
    Local(LocalUnits),
}

pub fn residue_unit_group(k: &QuadField, p: u64, n: u32) -> Result<ResidueUnitGroup> {
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let ring = ResidueRing::new(k, p, n)?;
    let splitting = prime_splitting(k, p);
    let local_factors = splitting
        .primes()
        .into_iter()
        .map(|(prime_ideal, e, f)| LocalFactor { prime_ideal, e, f, level: n * e })
        .collect();
    let structure = match splitting {
        Splitting::Split { ideals } => {
            let roots = ideals.map(|i| lift_omega_root(k, (-i.b) as u64, p, n));
            let z = IntegerUnits::new(p, n);
            Structure::Split { roots, factors: [z.clone(), z] }
        }
        Splitting::Inert { .. } => Structure::Local(LocalUnits::new(k, &ring, p, n, 2, None)),
        Splitting::Ramified { ideal } => Structure::Local(LocalUnits::new(k, &ring, p, 2 * n, 1, Some((-ideal.b) as u128))),
    };
    let (generators, orders) = match &structure {
        Structure::Split { roots, factors } => {
            let mut gens = Vec::new();
            let mut orders = Vec::new();
            for (slot, z) in factors.iter().enumerate() {
                for (g, o) in z.generators.iter().zip(&z.orders) {
                    let images = if slot == 0 { [*g, 1] } else { [1, *g] };
                    gens.push(from_images(&ring, roots, images));
                    orders.push(*o);
                }
            }
            (gens, orders)
        }
        Structure::Local(l) => (l.generators.clone(), l.orders.clone()),
    };
    Ok(ResidueUnitGroup { ring, modulus_level: n, local_factors, generators, orders, structure })
}

/// The residue with images `a1, a2` under `w -> r1, r2`.
fn from_images(ring: &ResidueRing, roots: &[u128; 2], images: [u128; 2]) -> Residue {
    let m = ring.modulus();
    let diff = (roots[0] + m - roots[1]) % m;
    let inv = inv_mod(diff, m).expect("distinct roots modulo p");
    let y = mul_mod((images[0] + m - images[1]) % m, inv, m);
    let x = (images[0] + m - mul_mod(y, roots[0], m)) % m;
    Residue { x, y }
}

impl ResidueUnitGroup {
    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn order(&self) -> BigUint {
        self.orders.iter().map(|&o| BigUint::from(o)).product()
    }

    pub fn invariants(&self) -> InvariantFactors {
        let m = IntMatrix::from_rows(self.orders.len(), &diagonal_rows(&self.orders));
        let snf = smith_normal_form(&m);
        InvariantFactors::new(snf.diagonal.into_iter().filter_map(|d| d.to_biguint()).filter(|d| !d.is_one()).collect())
            .expect("Smith diagonal is a divisor chain")
    }

    /// Exponents `v` with `prod generators[i]^v[i] = x`, each reduced modulo its order.
    pub fn discrete_log(&self, x: &Residue) -> Result<Vec<u128>> {
        if !self.ring.is_unit(x) {
            return Err(Error::NotAUnit);
        }
        match &self.structure {
            Structure::Split { roots, factors } => {
                let m = self.ring.modulus();
                let mut out = Vec::new();
                for (r, z) in roots.iter().zip(factors) {
                    let image = (x.x + mul_mod(x.y, *r, m)) % m;
                    out.extend(z.discrete_log(image));
                }
                Ok(out)
            }
            Structure::Local(l) => Ok(l.discrete_log(&self.ring, x)),
        }
    }

    /// `prod generators[i]^v[i]`.
    pub fn evaluate(&self, v: &[u128]) -> Residue {
        self.generators.iter().zip(v).fold(self.ring.one(), |acc, (g, &e)| self.ring.mul(&acc, &self.ring.pow(g, e)))
    }
}

fn diagonal_rows(orders: &[u128]) -> Vec<Vec<BigInt>> {
    (0..orders.len())
        .map(|i| (0..orders.len()).map(|j| if i == j { BigInt::from(orders[i]) } else { BigInt::zero() }).collect())
        .collect()
}

/// `(Z/p^n)^*`: a Teichmuller generator of order `p - 1` and `1 + p` of order
/// `p^(n-1)` for odd `p`; `-1` and `5` for `p = 2`.
#[derive(Clone, Debug)]
struct IntegerUnits {
    p: u64,
    n: u32,
    modulus: u128,
    generators: Vec<u128>,
    orders: Vec<u128>,
    /// Index of the generator of the `p`-part, if nontrivial.
    principal: Option<usize>,
}

impl IntegerUnits {
    fn new(p: u64, n: u32) -> Self {
        let modulus = (p as u128).pow(n);
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        let mut principal = None;
        if p == 2 {
            if n >= 2 {
                generators.push(modulus - 1);
                orders.push(2);
            }
            if n >= 3 {
                principal = Some(generators.len());
                generators.push(5);
                orders.push(modulus / 4);
            }
        } else {
            let g = primitive_root(p) as u128;
            // x -> x^p converges to the Teichmuller lift after n steps
            let mut t = g;
            for _ in 0..n {
                t = pow_mod(t, p as u128, modulus);
            }
            generators.push(t);
            orders.push(p as u128 - 1);
            if n >= 2 {
                principal = Some(generators.len());
                generators.push(1 + p as u128);
                orders.push(modulus / p as u128);
            }
        }
        IntegerUnits { p, n, modulus, generators, orders, principal }
    }

    fn discrete_log(&self, x: u128) -> Vec<u128> {
        let m = self.modulus;
        let mut out = vec![0u128; self.generators.len()];
        if self.p == 2 {
            if self.n < 2 {
                return out;
            }
            let mut u = x;
            if x % 4 == 3 {
                out[0] = 1;
                u = m - x;
            }
            if let Some(i) = self.principal {
                out[i] = cyclic_p_log(self.p, |a, b| mul_mod(a, b, m), 1, 5, self.orders[i], u);
            }
            return out;
        }
        // Teichmuller component: x^(p^(n-1)) depends only on x mod p
        let pn1 = m / self.p as u128;
        let teich = pow_mod(x, pn1, m);
        let tg = self.generators[0];
        out[0] = bsgs(|a, b| mul_mod(a, b, m), 1u128, tg, self.orders[0], teich);
        if let Some(i) = self.principal {
            let inv = inv_mod(teich, m).expect("unit");
            let u = mul_mod(x, inv, m);
            out[i] = cyclic_p_log(self.p, |a, b| mul_mod(a, b, m), 1, self.generators[i], self.orders[i], u);
        }
        out
    }
}

/// Smallest primitive root modulo an odd prime.
fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let qs = prime_divisors(phi);
    (2..p).find(|&g| qs.iter().all(|&q| pow_mod(g as u128, (phi / q) as u128, p as u128) != 1)).expect("primitive root exists")
}

/// Baby-step giant-step: `e` in `[0, order)` with `g^e = h`.
fn bsgs<T: Copy + Eq + std::hash::Hash>(mul: impl Fn(T, T) -> T, one: T, g: T, order: u128, h: T) -> u128 {
    let pow = |mut b: T, mut e: u128| {
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let step = (order as f64).sqrt().ceil() as u128 + 1;
    let mut table = HashMap::with_capacity(step as usize);
    let mut cur = one;
    for j in 0..step {
        table.entry(cur).or_insert(j);
        cur = mul(cur, g);
    }
    // giant step g^(-step)
    let giant = pow(g, (order - step % order) % order);
    let mut gamma = h;
    for i in 0..=step {
        if let Some(&j) = table.get(&gamma) {
            return (i * step + j) % order;
        }
        gamma = mul(gamma, giant);
    }
    panic!("element outside the cyclic group");
}

/// Logarithm in a cyclic group of order `order = p^m`, digit by digit.
fn cyclic_p_log<T: Copy + Eq + std::hash::Hash>(p: u64, mul: impl Fn(T, T) -> T + Copy, one: T, g: T, order: u128, h: T) -> u128 {
    let pow = |mut b: T, mut e: u128| {
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    if order == 1 {
        return 0;
    }
    let p = p as u128;
    let gamma = pow(g, order / p);
    let g_inv = pow(g, order - 1);
    let mut k: u128 = 0;
    let mut pj: u128 = 1;
    while pj < order {
        // (g^-k h)^(order / (p pj)) lies in <gamma>
        let rest = mul(pow(g_inv, k), h);
        let hk = pow(rest, order / (p * pj));
        let digit = bsgs(mul, one, gamma, p, hk);
        k += digit * pj;
        pj *= p;
    }
    k
}

/// Units of `O/P^L` for the single prime `P` above an inert or ramified `p`.
#[derive(Clone, Debug)]
struct LocalUnits {
    p: u64,
    /// Residue field size `p^f`.
    q: u128,
    f: u32,
    /// Exponent `L` of `P` in the modulus.
    length: u32,
    /// `Some(r)` for the ramified case with uniformizer `w - r`.
    ramified_root: Option<u128>,
    /// `(-N(pi)/p)^(-1) mod p`, the residue of `p / pi^2`, ramified case only.
    digit_twist: u128,
    generators: Vec<Residue>,
    orders: Vec<u128>,
    teichmuller: Option<Residue>,
    /// Filtration generators `1 + pi^k beta_j`, ordered by `k` then `j`.
    filtration: Vec<Residue>,
    /// Smith data: columns map filtration exponents to new coordinates.
    v: IntMatrix,
    principal_orders: Vec<u128>,
    /// Which columns of `v` carry a nontrivial cyclic factor.
    principal_cols: Vec<usize>,
}

impl LocalUnits {
    fn new(k: &QuadField, ring: &ResidueRing, p: u64, length: u32, f: u32, ramified_root: Option<u128>) -> Self {
        let q = (p as u128).pow(f);
        let pm = p as u128;
        let digit_twist = match ramified_root {
            Some(r) => {
                // pi-bar = -pi mod P^2, so p / pi^2 = (-N(pi)/p)^(-1) mod P
                let quotient = crate::arith::reduce_signed(-k.norm_i128(-(r as i128), 1) / pm as i128, pm);
                inv_mod(quotient, pm).expect("uniformizer has exact valuation one")
            }
            None => 1,
        };
        let mut this = LocalUnits {
            p,
            q,
            f,
            length,
            ramified_root,
            digit_twist,
            generators: Vec::new(),
            orders: Vec::new(),
            teichmuller: None,
            filtration: Vec::new(),
            v: IntMatrix::zeros(0, 0),
            principal_orders: Vec::new(),
            principal_cols: Vec::new(),
        };
        if q > 2 {
            let t = this.teichmuller_generator(ring);
            this.teichmuller = Some(t);
            this.generators.push(t);
            this.orders.push(q - 1);
        }
        this.build_filtration(ring);
        this
    }

    fn uniformizer_power(&self, ring: &ResidueRing, k: u32) -> Residue {
        match self.ramified_root {
            Some(r) => ring.pow(&ring.from_ints(-(r as i128), 1), k as u128),
            None => ring.from_ints((self.p as i128).pow(k), 0),
        }
    }

    /// Residue-field basis lifted to `O`.
    fn basis(&self, ring: &ResidueRing) -> Vec<Residue> {
        if self.f == 2 {
            vec![ring.one(), ring.from_ints(0, 1)]
        } else {
            vec![ring.one()]
        }
    }

    fn teichmuller_generator(&self, ring: &ResidueRing) -> Residue {
        let order = self.q - 1;
        let qs = prime_divisors(order as u64);
        let pm = self.p as u128;
        let reduce_p = |a: &Residue| Residue { x: a.x % pm, y: if self.f == 2 { a.y % pm } else { 0 } };
        let candidates = (0..pm).flat_map(|y| (0..pm).map(move |x| (x, y)));
        let mut gen = None;
        for (x, y) in candidates {
            if self.f == 1 && y > 0 {
                break;
            }
            let c = ring.from_ints(x as i128, y as i128);
            if !ring.is_unit(&c) {
                continue;
            }
            // order in the residue field must be q - 1
            let primitive = qs.iter().all(|&l| {
                let z = reduce_p(&ring.pow(&c, order / l as u128));
                !(z.x == 1 && z.y == 0)
            });
            if primitive {
                gen = Some(c);
                break;
            }
        }
        let mut t = gen.expect("residue field is cyclic");
        for _ in 0..self.length {
            t = ring.pow(&t, self.q);
        }
        t
    }

    /// Leading level and digits of a principal unit `u != 1`.
    fn leading_digits(&self, ring: &ResidueRing, u: &Residue) -> Option<(u32, Vec<u128>)> {
        let m = ring.modulus();
        let pm = self.p as u128;
        let z = ring.sub(u, &ring.one());
        if ring.is_zero(&z) {
            return None;
        }
        let val = |a: u128| if a == 0 { u32::MAX } else { crate::arith::valuation(a, self.p) };
        match self.ramified_root {
            None => {
                let k = val(z.x).min(val(z.y));
                let pk = pm.pow(k);
                Some((k, vec![(z.x / pk) % pm, (z.y / pk) % pm]))
            }
            Some(r) => {
                // z = c0 + c1 pi with pi = w - r
                let c1 = z.y;
                let c0 = (z.x + mul_mod(z.y, r, m)) % m;
                let (v0, v1) = (val(c0), val(c1));
                let (k, lead, j) = if v0 != u32::MAX && 2 * v0 <= 2 * v1.min(u32::MAX / 2) + 1 {
                    (2 * v0, c0, v0)
                } else {
                    (2 * v1 + 1, c1, v1)
                };
                let unit = (lead / pm.pow(j)) % pm;
                let twist = pow_mod(self.digit_twist, j as u128, pm);
                Some((k, vec![mul_mod(unit, twist, pm)]))
            }
        }
    }

    /// Exponents of `u` on the filtration generators.
    fn filtration_log(&self, ring: &ResidueRing, u: &Residue) -> Vec<u128> {
        let width = self.f as usize;
        let mut out = vec![0u128; self.filtration.len()];
        let mut u = *u;
        while let Some((k, digits)) = self.leading_digits(ring, &u) {
            debug_assert!(k >= 1 && k < self.length);
            let base = (k as usize - 1) * width;
            for (j, &c) in digits.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                out[base + j] += c;
                let g = ring.pow(&self.filtration[base + j], c);
                u = ring.mul(&u, &ring.inv(&g).expect("principal unit"));
            }
        }
        out
    }

    fn build_filtration(&mut self, ring: &ResidueRing) {
        let basis = self.basis(ring);
        for k in 1..self.length {
            let pik = self.uniformizer_power(ring, k);
            for b in &basis {
                self.filtration.push(ring.add(&ring.one(), &ring.mul(&pik, b)));
            }
        }
        let m = self.filtration.len();
        if m == 0 {
            return;
        }
        let pm = self.p as u128;
        let rows: Vec<Vec<BigInt>> = (0..m)
            .map(|i| {
                let gp = ring.pow(&self.filtration[i], pm);
                let mut row: Vec<BigInt> = self.filtration_log(ring, &gp).into_iter().map(|e| -BigInt::from(e)).collect();
                row[i] += BigInt::from(pm);
                row
            })
            .collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(m, &rows));
        for (col, d) in snf.diagonal.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let order = d.to_u128().expect("order fits the modulus range");
            let gen = (0..m).fold(ring.one(), |acc, j| {
                let e = &snf.v_inv[(col, j)];
                let g = &self.filtration[j];
                let term = if e.is_negative() {
                    ring.inv(&ring.pow_big(g, &(-e).to_biguint().unwrap())).unwrap()
                } else {
                    ring.pow_big(g, &e.to_biguint().unwrap())
                };
                ring.mul(&acc, &term)
            });
            self.principal_cols.push(col);
            self.principal_orders.push(order);
            self.generators.push(gen);
            self.orders.push(order);
        }
        self.v = snf.v;
    }

    fn discrete_log(&self, ring: &ResidueRing, x: &Residue) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.generators.len());
        let mut u = *x;
        if let Some(t) = self.teichmuller {
            // x^(q^(L-1)) kills the principal part and fixes the Teichmuller part
            let mut w = *x;
            for _ in 1..self.length {
                w = ring.pow(&w, self.q);
            }
            let e = bsgs(|a, b| ring.mul(&a, &b), ring.one(), t, self.q - 1, w);
            out.push(e);
            u = ring.mul(x, &ring.inv(&w).expect("unit"));
        }
        if self.filtration.is_empty() {
            return out;
        }
        let v = self.filtration_log(ring, &u);
        for (&col, &order) in self.principal_cols.iter().zip(&self.principal_orders) {
            let mut acc = BigInt::zero();
            for (j, &e) in v.iter().enumerate() {
                if e != 0 {
                    acc += BigInt::from(e) * &self.v[(j, col)];
                }
            }
            let r = acc.mod_floor(&BigInt::from(order));
            out.push(r.to_u128().unwrap());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::forms::invariants_from_orders;
    use crate::quadfield::make_field;

    fn group(d: i64, p: u64, n: u32) -> ResidueUnitGroup {
        residue_unit_group(&make_field(d).unwrap(), p, n).unwrap()
    }

    /// Element orders of every unit, by brute force.
    fn brute_force_invariants(g: &ResidueUnitGroup) -> InvariantFactors {
        let ring = g.ring();
        let units: Vec<Residue> = ring.enumerate().filter(|a| ring.is_unit(a)).collect();
        let orders: Vec<u64> = units
            .iter()
            .map(|a| {
                let mut k = 1;
                let mut b = *a;
                while b != ring.one() {
                    b = ring.mul(&b, a);
                    k += 1;
                }
                k
            })
            .collect();
        invariants_from_orders(orders)
    }

    #[test]
    fn small_structures() {
        assert_eq!(group(-1, 3, 1).invariants(), InvariantFactors::from_u64(&[8]));
        assert_eq!(group(5, 5, 1).invariants(), InvariantFactors::from_u64(&[20]));
        assert_eq!(group(-1, 5, 1).invariants(), InvariantFactors::from_u64(&[4, 4]));
    }

    #[test]
    fn matches_brute_force() {
        for d in [-1i64, -2, -3, -5, -7, 2, 3, 5, 6, 7, 10, 13, 17, -15, -129] {
            for (p, nmax) in [(2u64, 3u32), (3, 2), (5, 1), (7, 1)] {
                for n in 1..=nmax {
                    let g = group(d, p, n);
                    assert_eq!(g.invariants(), brute_force_invariants(&g), "d={d} p={p} n={n}");
                }
            }
        }
    }

    #[test]
    fn generators_have_stated_orders() {
        for d in [-1i64, -3, -129, 5, 10, 79] {
            for p in [2u64, 3, 5] {
                for n in 1..=4 {
                    let g = group(d, p, n);
                    let ring = g.ring();
                    for (gen, &o) in g.generators.iter().zip(&g.orders) {
                        assert_eq!(ring.pow(gen, o), ring.one());
                        for l in prime_divisors(o as u64) {
                            assert_ne!(ring.pow(gen, o / l as u128), ring.one(), "d={d} p={p} n={n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn discrete_log_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in [-1i64, -2, -3, -129, 2, 5, 7, 10, 79, 3299] {
            for p in [2u64, 3, 5, 7, 13] {
                for n in 1..=5 {
                    let g = group(d, p, n);
                    let ring = g.ring();
                    let m = ring.modulus();
                    for _ in 0..30 {
                        let x = Residue { x: rng.gen_range(0..m), y: rng.gen_range(0..m) };
                        if !ring.is_unit(&x) {
                            assert_eq!(g.discrete_log(&x), Err(Error::NotAUnit));
                            continue;
                        }
                        let v = g.discrete_log(&x).unwrap();
                        for (e, o) in v.iter().zip(&g.orders) {
                            assert!(e < o);
                        }
                        assert_eq!(g.evaluate(&v), x, "d={d} p={p} n={n}");
                    }
                    for (i, gen) in g.generators.iter().enumerate() {
                        let mut e = vec![0; g.generators.len()];
                        e[i] = 1;
                        assert_eq!(g.discrete_log(gen).unwrap(), e);
                    }
                    assert!(g.discrete_log(&ring.one()).unwrap().iter().all(|&e| e == 0));
                }
            }
        }
    }

    #[test]
    fn order_formula() {
        for d in [-1i64, -3, -5, -129, 2, 3, 5, 79] {
            for p in [2u64, 3, 5, 7, 11, 13] {
                for n in 1..=4 {
                    let g = group(d, p, n);
                    let expected: BigUint = g
                        .local_factors
                        .iter()
                        .map(|lf| {
                            let q = BigUint::from(p).pow(lf.f);
                            (&q - 1u32) * q.pow(n * lf.e - 1)
                        })
                        .product();
                    assert_eq!(g.order(), expected);
                }
            }
        }
    }
}
