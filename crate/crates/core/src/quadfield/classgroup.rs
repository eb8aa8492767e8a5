// SPDX-License-Identifier: Apache-2.0

//! Class group of a quadratic field as a relation lattice on a factor base
//! of prime ideals.
//!
//! Generators are prime ideals of small norm, none above `p`. Relations are
//! factorizations of principal ideals `(alpha)` with `N(alpha)` prime to `p`,
//! so every witness is a unit at `p`. Two certificates make the result
//! unconditional:
//!
//! * every prime ideal of norm below the Minkowski bound is shown to lie in
//!   the subgroup generated by the factor base, and
//! * the relation lattice has determinant equal to the class number counted
//!   with reduced forms.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::forms;
use super::{QuadField, QuadIdeal, RingElement};
use crate::arith::{factor, inv_mod, kronecker, primes_up_to};
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, smith_normal_form, AbelianPresentation, HermiteLattice, IntMatrix, InvariantFactors};

/// Largest `|D|` accepted by [`class_group`].
pub const DEFAULT_DISC_BOUND: u64 = 10_000_000;

/// The class group as generators, relations and principal witnesses.
///
/// Row `j` of `presentation.relations` is the exponent vector of
/// `(principal_witnesses[j])` on `generator_ideals`.
#[derive(Clone, Debug)]
pub struct ClassGroupData {
    pub presentation: AbelianPresentation,
    pub generator_ideals: Vec<QuadIdeal>,
    pub principal_witnesses: Vec<RingElement>,
    pub class_number: u64,
}

/// The class group after diagonalizing the relation matrix.
///
/// Generator `i` has order `orders[i] > 1`. The relation `orders[i] * g_i`
/// is the principal ideal generated by `prod_j witness_j^(generator_witnesses[i][j])`,
/// and each row of `unit_witnesses` combines the witnesses into a unit.
#[derive(Clone, Debug)]
pub struct ReducedClassGroup {
    pub orders: Vec<BigInt>,
    pub generator_witnesses: Vec<Vec<BigInt>>,
    pub unit_witnesses: Vec<Vec<BigInt>>,
}

impl ClassGroupData {
    pub fn invariants(&self) -> Result<InvariantFactors> {
        invariant_factors(&self.presentation)
    }

    pub fn reduce(&self) -> ReducedClassGroup {
        let rel = self.presentation.relations();
        let cols = rel.cols();
        let snf = smith_normal_form(rel);
        let mut orders = Vec::new();
        let mut generator_witnesses = Vec::new();
        let mut unit_witnesses = Vec::new();
        for i in 0..rel.rows() {
            let row = snf.u.row(i).to_vec();
            if i < cols {
                let d = &snf.diagonal[i];
                debug_assert!(!d.is_zero());
                if !d.is_one() {
                    orders.push(d.clone());
                    generator_witnesses.push(row);
                }
            } else {
                unit_witnesses.push(row);
            }
        }
        ReducedClassGroup { orders, generator_witnesses, unit_witnesses }
    }
}

/// Class group of `k` with witnesses prime to `p`, for `|D| <= DEFAULT_DISC_BOUND`.
pub fn class_group(k: &QuadField, p: u64) -> Result<ClassGroupData> {
    class_group_with_bound(k, p, DEFAULT_DISC_BOUND)
}

pub fn class_group_with_bound(k: &QuadField, p: u64, bound: u64) -> Result<ClassGroupData> {
    if k.disc.unsigned_abs() > bound {
        return Err(Error::BoundExceeded { disc: k.disc.unsigned_abs(), bound });
    }
    let h = forms::class_number(k.disc);
    let minkowski = minkowski_bound(k);
    let abs_d = k.disc.unsigned_abs() as f64;
    // the factor base starts below the Minkowski bound and grows past it
    // when the primes above p or the relation search need more room
    let mut small = ((abs_d.ln().powi(2) / 2.0).max(30.0) as u64).min(minkowski);
    loop {
        let mut fb = FactorBase::new(k, p, small);
        if verify_generation(k, p, minkowski, &mut fb) {
            if let Some(data) = search_relations(k, p, h, &fb) {
                return Ok(data);
            }
        }
        if small > MAX_FACTOR_BASE {
            return Err(Error::Internal(format!("class group search failed for d = {}", k.d)));
        }
        small = (2 * small).max(30);
    }
}

const MAX_FACTOR_BASE: u64 = 1 << 16;

fn minkowski_bound(k: &QuadField) -> u64 {
    let root = (k.disc.unsigned_abs() as f64).sqrt();
    let m = if k.is_real() { root / 2.0 } else { 2.0 * root / std::f64::consts::PI };
    m.floor() as u64
}

/// One rational prime of the factor base with the roots of `w` giving its
/// prime ideals `(q, w - r)`.
#[derive(Clone, Debug)]
struct FbPrime {
    q: u64,
    roots: Vec<u64>,
    first_col: usize,
}

#[derive(Clone, Debug)]
struct FactorBase {
    primes: Vec<FbPrime>,
    ncols: usize,
}

impl FactorBase {
    fn new(k: &QuadField, p: u64, bound: u64) -> Self {
        let mut fb = FactorBase { primes: Vec::new(), ncols: 0 };
        for q in primes_up_to(bound) {
            if q != p && kronecker(k.disc, q) != -1 {
                fb.push(k, q);
            }
        }
        fb
    }

    fn push(&mut self, k: &QuadField, q: u64) {
        let roots = k.omega_roots_mod(q);
        let n = roots.len();
        self.primes.push(FbPrime { q, roots, first_col: self.ncols });
        self.ncols += n;
    }

    fn contains(&self, q: u64) -> bool {
        self.primes.iter().any(|f| f.q == q)
    }

    fn ideals(&self) -> Vec<QuadIdeal> {
        self.primes
            .iter()
            .flat_map(|f| f.roots.iter().map(move |&r| QuadIdeal::primitive(f.q, -(r as i64))))
            .collect()
    }

    /// Exponent vector of `(u + v w)`, if it is supported on the factor base.
    fn principal_row(&self, k: &QuadField, u: i128, v: i128) -> Option<Vec<i64>> {
        let g = u.gcd(&v);
        let (x, y) = (u / g, v / g);
        let mut row = self.factor(x, y, k.norm_i128(x, y))?;
        for (l, e) in factor(g.unsigned_abs() as u64) {
            match self.primes.iter().find(|f| f.q == l) {
                Some(f) => {
                    let e = e as i64;
                    if f.roots.len() == 2 {
                        row[f.first_col] += e;
                        row[f.first_col + 1] += e;
                    } else {
                        row[f.first_col] += 2 * e;
                    }
                }
                None if kronecker(k.disc, l) == -1 => {}
                None => return None,
            }
        }
        Some(row)
    }

    /// Exponent vector of `(x + y w)` for coprime `x, y`, if its norm is smooth.
    fn factor(&self, x: i128, y: i128, norm: i128) -> Option<Vec<i64>> {
        let mut n = norm.unsigned_abs();
        let mut row = vec![0i64; self.ncols];
        for f in &self.primes {
            let q = f.q as u128;
            if n % q != 0 {
                continue;
            }
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            let qi = f.q as i128;
            let col = f
                .roots
                .iter()
                .position(|&r| (x + y * r as i128).rem_euclid(qi) == 0)
                .expect("a primitive element divisible by q lies in a prime above q");
            row[f.first_col + col] = e;
            if n == 1 {
                break;
            }
        }
        (n == 1).then_some(row)
    }
}

/// The degree-one prime ideal `(q, w - r)`.
#[derive(Clone, Copy, Debug)]
struct PrimeIdeal {
    q: u64,
    r: u64,
}

fn prime_ideals_above(k: &QuadField, q: u64) -> impl Iterator<Item = PrimeIdeal> {
    k.omega_roots_mod(q).into_iter().map(move |r| PrimeIdeal { q, r })
}

/// Product of prime ideals above distinct rational primes, as `(a, b)` for
/// the ideal `aZ + (b + w)Z`.
fn ideal_product(primes: &[PrimeIdeal]) -> (u128, i128) {
    let mut a: u128 = 1;
    let mut b: u128 = 0;
    for pr in primes {
        let q = pr.q as u128;
        let target = (q - pr.r as u128 % q) % q;
        let diff = (target + q - b % q) % q;
        let t = diff * inv_mod(a % q, q).expect("distinct primes") % q;
        b += t * a;
        a *= q;
    }
    let mut b = b as i128;
    if 2 * b > a as i128 {
        b -= a as i128;
    }
    (a, b)
}

/// Visits elements `alpha = x a + y (b + w)` of the ideal `(a, b + w)` near
/// the minima of `N(alpha) / a`, passing `(u, v, N(alpha) / a)` with
/// `alpha = u + v w`. Stops early once `visit` returns true.
fn short_elements(k: &QuadField, a: u128, b: i128, mut visit: impl FnMut(i128, i128, i128) -> bool) -> bool {
    let (t, s) = k.omega_relation();
    let (t, s) = (t as i128, s as i128);
    let ai = a as i128;
    let big_a = ai;
    let big_b = 2 * b + t;
    let big_c = (b * b + t * b - s) / ai;
    let root = (k.disc.unsigned_abs() as f64).sqrt();
    let (ymax, centers): (i128, Vec<f64>) = if k.is_real() {
        (6, vec![(-big_b as f64 + root) / (2.0 * big_a as f64), (-big_b as f64 - root) / (2.0 * big_a as f64)])
    } else {
        (3, vec![-big_b as f64 / (2.0 * big_a as f64)])
    };
    for y in 1..=ymax {
        let width = if k.is_real() { 2 } else { ((y as f64 * root / (2.0 * a as f64)).ceil() as i128 + 1).min(40) };
        for &c in &centers {
            let mid = (c * y as f64).round() as i128;
            for x in mid - width..=mid + width {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let f = big_a * x * x + big_b * x * y + big_c * y * y;
                if f != 0 && visit(x * ai + y * b, y, f) {
                    return true;
                }
            }
        }
    }
    false
}

fn rng_for(k: &QuadField, p: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64((k.d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ p)
}

/// `start` times random ideals from `pool` over other rational primes, until
/// the norm reaches `target`.
fn random_ideal(start: Option<PrimeIdeal>, pool: &[PrimeIdeal], target: f64, rng: &mut ChaCha8Rng) -> (u128, i128) {
    let mut chosen: Vec<PrimeIdeal> = start.into_iter().collect();
    let mut norm: f64 = chosen.iter().map(|i| i.q as f64).product();
    let mut tries = 0;
    while norm < target && !pool.is_empty() && tries < 16 {
        tries += 1;
        let pick = pool[rng.gen_range(0..pool.len())];
        if chosen.iter().any(|c| c.q == pick.q) {
            continue;
        }
        norm *= pick.q as f64;
        chosen.push(pick);
    }
    ideal_product(&chosen)
}

/// Shows that every prime ideal of norm at most `minkowski` lies in the span of
/// the factor base. Primes that resist are added to the factor base, except
/// those above `p`, for which failure is reported.
fn verify_generation(k: &QuadField, p: u64, minkowski: u64, fb: &mut FactorBase) -> bool {
    let mut allowed: HashSet<u64> = fb.primes.iter().map(|f| f.q).collect();
    let mut pool: Vec<PrimeIdeal> = fb.primes.iter().flat_map(|f| f.roots.iter().map(|&r| PrimeIdeal { q: f.q, r })).collect();
    let mut pending: Vec<u64> = primes_up_to(minkowski)
        .into_iter()
        .filter(|&q| kronecker(k.disc, q) != -1 && !fb.contains(q))
        .collect();
    // primes above p first, using only the factor base
    if let Some(pos) = pending.iter().position(|&q| q == p) {
        pending.remove(pos);
        pending.insert(0, p);
    }
    let mut rng = rng_for(k, p);
    for q in pending {
        let ok = prime_ideals_above(k, q).all(|pr| find_reduction(k, pr, &allowed, &pool, &mut rng));
        if !ok && q == p {
            return false;
        }
        if !ok {
            fb.push(k, q);
        }
        allowed.insert(q);
        pool.extend(prime_ideals_above(k, q));
    }
    true
}

/// Looks for `alpha` in `P * I`, with `I` a product of allowed primes, such
/// that `(alpha) / (P * I)` is supported on allowed and inert primes.
fn find_reduction(k: &QuadField, pr: PrimeIdeal, allowed: &HashSet<u64>, pool: &[PrimeIdeal], rng: &mut ChaCha8Rng) -> bool {
    let target = (k.disc.unsigned_abs() as f64).sqrt();
    for _ in 0..VERIFY_ATTEMPTS {
        let (a, b) = random_ideal(Some(pr), pool, target, rng);
        let found = short_elements(k, a, b, |_, _, f| {
            let f = f.unsigned_abs();
            f % pr.q as u128 != 0
                && factor(f as u64).into_iter().all(|(l, _)| allowed.contains(&l) || kronecker(k.disc, l) == -1)
        });
        if found {
            return true;
        }
    }
    false
}

const VERIFY_ATTEMPTS: usize = 40;
const RELATION_ROUNDS: usize = 40;

/// Relations collected so far, kept only when they enlarge the lattice.
struct RelationSet {
    lattice: HermiteLattice,
    rows: Vec<Vec<i64>>,
    witnesses: Vec<RingElement>,
    seen: HashSet<Vec<i64>>,
    target: BigInt,
}

impl RelationSet {
    fn accept(&mut self, row: Vec<i64>, w: RingElement) {
        if !self.seen.insert(row.clone()) {
            return;
        }
        let big: Vec<BigInt> = row.iter().map(|&e| BigInt::from(e)).collect();
        if self.lattice.insert(&big) {
            self.rows.push(row);
            self.witnesses.push(w);
        }
    }

    fn done(&self) -> bool {
        self.lattice.dim() == 0 || self.lattice.determinant().as_ref() == Some(&self.target)
    }
}

/// Collects relations until the lattice they span has index `h`.
fn search_relations(k: &QuadField, p: u64, h: u64, fb: &FactorBase) -> Option<ClassGroupData> {
    let dim = fb.ncols;
    let mut set = RelationSet {
        lattice: HermiteLattice::new(dim),
        rows: Vec::new(),
        witnesses: Vec::new(),
        seen: HashSet::new(),
        target: BigInt::from(h),
    };
    // (q) is the product of the primes above q
    for f in &fb.primes {
        let mut row = vec![0i64; dim];
        if f.roots.len() == 2 {
            row[f.first_col] = 1;
            row[f.first_col + 1] = 1;
        } else {
            row[f.first_col] = 2;
        }
        set.accept(row, RingElement::new(f.q, 0));
    }
    let pool: Vec<PrimeIdeal> = fb.primes.iter().flat_map(|f| f.roots.iter().map(|&r| PrimeIdeal { q: f.q, r })).collect();
    let target = (k.disc.unsigned_abs() as f64).sqrt();
    let mut rng = rng_for(k, p);
    let pi = p as i128;
    for _ in 0..RELATION_ROUNDS {
        for start in pool.iter().map(|&i| Some(i)).chain([None]) {
            if set.done() {
                return Some(finish(set, fb, h));
            }
            let (a, b) = random_ideal(start, &pool, target, &mut rng);
            short_elements(k, a, b, |u, v, f| {
                if f % pi != 0 {
                    if let Some(row) = fb.principal_row(k, u, v) {
                        set.accept(row, RingElement::new(u, v));
                    }
                }
                set.done()
            });
        }
    }
    set.done().then(|| finish(set, fb, h))
}

fn finish(set: RelationSet, fb: &FactorBase, h: u64) -> ClassGroupData {
    let dim = fb.ncols;
    let relations = IntMatrix::from_rows(dim, &set.rows);
    ClassGroupData {
        presentation: AbelianPresentation::new(dim, relations).expect("rows have the factor base width"),
        generator_ideals: fb.ideals(),
        principal_witnesses: set.witnesses,
        class_number: h,
    }
}
