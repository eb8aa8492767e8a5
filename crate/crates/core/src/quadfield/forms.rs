// SPDX-License-Identifier: Apache-2.0

//! Binary quadratic forms `a x^2 + b xy + c y^2` of fundamental discriminant
//! `D`: reduction, composition and class numbers.
//!
//! The class number of `K` (wide sense) is read off from reduced forms:
//! for `D < 0` it is the number of reduced primitive forms, for `D > 0` it is
//! the number of cycles of reduced forms, halved when the fundamental unit
//! has norm `+1`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;

use crate::arith::{divisors, factor, isqrt};
use crate::linalg::InvariantFactors;

/// The form `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// The identity form of discriminant `disc`.
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Form { a: 1, b, c: (b * b - disc) / 4 }
    }
}

/// Reduces a positive definite form: `|b| <= a <= c`, `b >= 0` if `|b| = a` or `a = c`.
pub fn reduce_definite(f: Form) -> Form {
    let Form { mut a, mut b, mut c } = f;
    debug_assert!(a > 0 && f.discriminant() < 0);
    loop {
        if b > a || b <= -a {
            // normalize b into (-a, a]
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            let k = (r - b) / two_a;
            c += k * k * a + k * b;
            b = r;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    Form { a, b, c }
}

/// Composition of two primitive positive definite forms of equal discriminant.
pub fn compose(f1: Form, f2: Form) -> Form {
    let disc = f1.discriminant();
    debug_assert_eq!(disc, f2.discriminant());
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let s = (f1.b + f2.b) / 2;
    let n = f2.b - s;
    let (y1, d) = if f2.a % f1.a == 0 {
        (0, f1.a)
    } else {
        let e = f2.a.extended_gcd(&f1.a);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };
    let v1 = f1.a / d1;
    let v2 = f2.a / d1;
    let r = ((y1 as i128 * y2 as i128 * n as i128 - x2 as i128 * f2.c as i128).rem_euclid(v1 as i128)) as i64;
    let b3 = f2.b + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 as i128 * b3 as i128 - disc as i128) / (4 * a3 as i128);
    reduce_definite(Form { a: a3, b: b3, c: c3 as i64 })
}

pub fn inverse(f: Form) -> Form {
    reduce_definite(Form { a: f.a, b: -f.b, c: f.c })
}

/// All reduced primitive positive definite forms of discriminant `disc < 0`.
pub fn reduced_definite_forms(disc: i64) -> Vec<Form> {
    assert!(disc < 0);
    let abs = disc.unsigned_abs();
    let bmax = isqrt((abs / 3) as u128) as i64;
    let mut out = Vec::new();
    let mut b = disc.rem_euclid(2);
    while b <= bmax {
        let n = (b * b - disc) / 4;
        let mut ds = divisors(&factor(n as u64));
        ds.sort_unstable();
        for a in ds.into_iter().map(|x| x as i64) {
            let c = n / a;
            if a < b.max(1) || a > c {
                continue;
            }
            let f = Form { a, b, c };
            if !f.is_primitive() {
                continue;
            }
            out.push(f);
            if b != 0 && a != b && a != c {
                out.push(Form { a, b: -b, c });
            }
        }
        b += 2;
    }
    out.sort_unstable();
    out
}

/// Reduced indefinite forms: `0 < b < sqrt(D)`, `sqrt(D) - b < 2|a| < sqrt(D) + b`.
pub fn reduced_indefinite_forms(disc: i64) -> Vec<Form> {
    assert!(disc > 0);
    let root = isqrt(disc as u128) as i64;
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= root {
        let n = (disc - b * b) / 4;
        for a in divisors(&factor(n as u64)).into_iter().map(|x| x as i64) {
            let (lo, hi) = (2 * a + b, 2 * a - b);
            // sqrt(D) < 2a + b  and  2a - b < sqrt(D)
            if (lo as i128).pow(2) <= disc as i128 {
                continue;
            }
            if hi > 0 && (hi as i128).pow(2) >= disc as i128 {
                continue;
            }
            let f = Form { a, b, c: -n / a };
            if !f.is_primitive() {
                continue;
            }
            out.push(f);
            out.push(Form { a: -a, b, c: n / a });
        }
        b += 2;
    }
    out.sort_unstable();
    out
}

/// The reduction step `rho` on reduced indefinite forms.
pub fn rho(f: Form, disc: i64) -> Form {
    let root = isqrt(disc as u128) as i64;
    let c = f.c;
    let two_c = 2 * c.abs();
    // b' = -b mod 2|c| with sqrt(D) - 2|c| < b' < sqrt(D)
    let mut b = (-f.b).rem_euclid(two_c);
    // largest representative below sqrt(D)
    let k = Integer::div_floor(&(root - b), &two_c);
    b += k * two_c;
    let a_next = (b as i128 * b as i128 - disc as i128) / (4 * c as i128);
    Form { a: c, b, c: a_next as i64 }
}

/// Cycles of reduced indefinite forms; each cycle is one narrow class.
pub fn indefinite_cycles(disc: i64) -> Vec<Vec<Form>> {
    let forms = reduced_indefinite_forms(disc);
    let mut seen: HashSet<Form> = HashSet::with_capacity(forms.len());
    let mut cycles = Vec::new();
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        let mut cycle = vec![f];
        seen.insert(f);
        let mut g = rho(f, disc);
        while g != f {
            debug_assert!(!seen.contains(&g), "rho left the reduced set");
            seen.insert(g);
            cycle.push(g);
            g = rho(g, disc);
        }
        cycles.push(cycle);
    }
    cycles
}

/// Narrow class number and norm sign of the fundamental unit for `D > 0`.
pub fn narrow_class_number(disc: i64) -> (u64, i8) {
    let cycles = indefinite_cycles(disc);
    let principal = cycles
        .iter()
        .find(|c| c.iter().any(|f| f.a == 1))
        .expect("principal cycle");
    let norm = if principal.iter().any(|f| f.a == -1) { -1 } else { 1 };
    (cycles.len() as u64, norm)
}

/// Wide class number `h(D)`.
pub fn class_number(disc: i64) -> u64 {
    if disc < 0 {
        reduced_definite_forms(disc).len() as u64
    } else {
        let (h_plus, norm) = narrow_class_number(disc);
        if norm == -1 {
            h_plus
        } else {
            h_plus / 2
        }
    }
}

/// Structure of the class group for `D < 0`, by enumerating the composition
/// table and counting element orders.
pub fn definite_class_group(disc: i64) -> InvariantFactors {
    let forms = reduced_definite_forms(disc);
    let id = Form::principal(disc);
    let mut order_of: HashMap<Form, u64> = HashMap::new();
    for &f in &forms {
        let mut g = f;
        let mut k = 1;
        while g != id {
            g = compose(g, f);
            k += 1;
        }
        order_of.insert(f, k);
    }
    invariants_from_orders(order_of.values().copied().collect())
}

/// Invariant factors of a finite abelian group from the multiset of its element orders.
pub fn invariants_from_orders(orders: Vec<u64>) -> InvariantFactors {
    let n = orders.len() as u64;
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for (q, e) in factor(n) {
        // #{x : x^(q^j) = 1} = q^(sum_i min(j, lambda_i)) determines the partition
        let mut counts = Vec::new();
        for j in 0..=e {
            let qj = q.pow(j);
            counts.push(orders.iter().filter(|&&o| qj % o == 0).count() as u64);
        }
        let logs: Vec<u32> = counts.iter().map(|&c| c.ilog(q)).collect();
        // number of parts >= j is logs[j] - logs[j-1]
        let mut parts = Vec::new();
        for j in 1..=e as usize {
            let ge_j = logs[j] - logs[j - 1];
            let ge_next = if j < e as usize { logs[j + 1] - logs[j] } else { 0 };
            for _ in 0..(ge_j - ge_next) {
                parts.push(j as u32);
            }
        }
        per_prime.push((q, parts));
    }
    let width = per_prime.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let mut factors = vec![1u64; width];
    for (q, mut parts) in per_prime {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in parts.into_iter().enumerate() {
            factors[width - 1 - i] *= q.pow(e);
        }
    }
    InvariantFactors::from_u64(&factors)
}

/// BFS closure of the subgroup generated by `gens` (test helper for orders).
pub fn definite_subgroup(disc: i64, gens: &[Form]) -> HashSet<Form> {
    let id = Form::principal(disc);
    let mut seen = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(f) = queue.pop_front() {
        for &g in gens {
            let h = compose(f, g);
            if seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_class_numbers() {
        assert_eq!(class_number(-4), 1);
        assert_eq!(class_number(-23), 3);
        assert_eq!(class_number(-516), 12);
        assert_eq!(class_number(40), 2);
        assert_eq!(class_number(5), 1);
        assert_eq!(class_number(12), 1);
        // Q(sqrt(79)): h = 3
        assert_eq!(class_number(316), 3);
    }

    #[test]
    fn narrow_vs_wide() {
        // Q(sqrt(3)): eps = 2 + sqrt(3) has norm +1, narrow class number 2
        assert_eq!(narrow_class_number(12), (2, 1));
        assert_eq!(narrow_class_number(40), (2, -1));
    }

    #[test]
    fn structure_by_composition() {
        assert_eq!(definite_class_group(-23), InvariantFactors::from_u64(&[3]));
        assert_eq!(definite_class_group(-4), InvariantFactors::trivial());
        // D = -420: (Z/2)^3
        assert_eq!(definite_class_group(-420), InvariantFactors::from_u64(&[2, 2, 2]));
        // D = -516: Z/2 x Z/6
        assert_eq!(definite_class_group(-516), InvariantFactors::from_u64(&[2, 6]));
    }

    #[test]
    fn composition_is_a_group_law() {
        let disc = -516;
        let forms = reduced_definite_forms(disc);
        let id = Form::principal(disc);
        for &f in &forms {
            assert_eq!(compose(f, id), f);
            assert_eq!(compose(f, inverse(f)), id);
            for &g in &forms {
                assert_eq!(compose(f, g), compose(g, f));
            }
        }
    }

    #[test]
    fn brute_force_reduced_form_count() {
        for disc in (-400i64..-2).filter(|d| d.rem_euclid(4) <= 1) {
            let mut count = 0;
            let amax = isqrt((disc.unsigned_abs() / 3) as u128) as i64 + 1;
            for a in 1..=amax {
                for b in -a + 1..=a {
                    if (b * b - disc) % (4 * a) != 0 {
                        continue;
                    }
                    let c = (b * b - disc) / (4 * a);
                    let f = Form { a, b, c };
                    if c < a || (c == a && b < 0) || !f.is_primitive() {
                        continue;
                    }
                    count += 1;
                }
            }
            assert_eq!(reduced_definite_forms(disc).len(), count, "D = {disc}");
        }
    }
}
