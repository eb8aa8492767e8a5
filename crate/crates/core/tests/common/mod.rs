// SPDX-License-Identifier: Apache-2.0

//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's algorithms; fields, ideals and groups are rebuilt from
//! scratch with exhaustive search.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

/// `Q(sqrt(d))` with `O = Z[w]`, `w^2 = t w + s`.
#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub d: i64,
    pub t: i128,
    pub s: i128,
    pub disc: i128,
}

pub type Elt = (i128, i128);

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    Some(r)
}

pub fn is_squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    (2..).take_while(|q| q * q <= n).all(|q| n % (q * q) != 0)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|q| q * q <= n).all(|q| n % q != 0)
}

impl Field {
    pub fn new(d: i64) -> Self {
        let d128 = d as i128;
        if d.rem_euclid(4) == 1 {
            Field { d, t: 1, s: (d128 - 1) / 4, disc: d128 }
        } else {
            Field { d, t: 0, s: d128, disc: 4 * d128 }
        }
    }

    pub fn real(&self) -> bool {
        self.d > 0
    }

    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        (a.0 * b.0 + self.s * a.1 * b.1, a.0 * b.1 + a.1 * b.0 + self.t * a.1 * b.1)
    }

    pub fn norm(&self, a: Elt) -> i128 {
        a.0 * a.0 + self.t * a.0 * a.1 - self.s * a.1 * a.1
    }

    pub fn conj(&self, a: Elt) -> Elt {
        (a.0 + self.t * a.1, -a.1)
    }

    /// Every `x` with `N(x + y w) = target` for this `y`.
    fn solve_x(&self, y: i128, target: i128) -> Vec<i128> {
        let disc = self.t * self.t * y * y + 4 * (self.s * y * y + target);
        let Some(r) = isqrt(disc) else { return Vec::new() };
        if r * r != disc {
            return Vec::new();
        }
        let mut out = Vec::new();
        for num in [-self.t * y + r, -self.t * y - r] {
            if num % 2 == 0 && !out.contains(&(num / 2)) {
                out.push(num / 2);
            }
        }
        out
    }

    /// The fundamental unit `x + y w > 1` of a real field, by Pell search over `y`.
    pub fn fundamental_unit(&self) -> Elt {
        assert!(self.real());
        let sd = (self.d as f64).sqrt();
        let w = if self.t == 1 { (1.0 + sd) / 2.0 } else { sd };
        for y in 1i128.. {
            for target in [-1, 1] {
                for x in self.solve_x(y, target) {
                    if x as f64 + y as f64 * w > 1.0 {
                        return (x, y);
                    }
                }
            }
        }
        unreachable!()
    }

    /// Generators of the unit group modulo nothing: roots of unity and, for real fields, `eps`.
    pub fn unit_generators(&self) -> Vec<Elt> {
        if self.real() {
            vec![(-1, 0), self.fundamental_unit()]
        } else {
            // all roots of unity have norm 1 and |y| <= 2/sqrt(|D|) + 1
            let mut out = Vec::new();
            for y in -2i128..=2 {
                for x in self.solve_x(y, 1) {
                    out.push((x, y));
                }
            }
            out
        }
    }

    /// Bound on `|y|` for an element of norm `+-n` reachable by units.
    fn y_bound(&self, n: i128) -> i128 {
        let nf = n as f64;
        let df = (self.disc.abs()) as f64;
        if self.real() {
            let (x, y) = self.fundamental_unit();
            let sd = (self.d as f64).sqrt();
            let w = if self.t == 1 { (1.0 + sd) / 2.0 } else { sd };
            let eps = x as f64 + y as f64 * w;
            (nf.sqrt() * (eps + 1.0) / df.sqrt()).ceil() as i128 + 2
        } else {
            (2.0 * (nf / df).sqrt()).ceil() as i128 + 1
        }
    }

    /// A generator of the ideal, if it is principal.
    pub fn principal_generator(&self, id: &Ideal) -> Option<Elt> {
        let n = id.norm();
        let signs: &[i128] = if self.real() { &[1, -1] } else { &[1] };
        for y in 0..=self.y_bound(n) {
            for &sg in signs {
                for x in self.solve_x(y, sg * n) {
                    if id.contains((x, y)) {
                        return Some((x, y));
                    }
                }
            }
        }
        None
    }
}

/// The lattice `Z (a, 0) + Z (b, c)` in coordinates `x + y w`, `0 <= b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Ideal {
    pub fn unit() -> Self {
        Ideal { a: 1, b: 0, c: 1 }
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn contains(&self, e: Elt) -> bool {
        e.1 % self.c == 0 && (e.0 - (e.1 / self.c) * self.b) % self.a == 0
    }

    fn from_vectors(mut v: Vec<Elt>) -> Self {
        // eliminate the y coordinate down to one pivot vector
        loop {
            v.retain(|e| *e != (0, 0));
            let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i].1 != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| v[i].1.abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let q = v[i].1 / v[piv].1;
                    v[i] = (v[i].0 - q * v[piv].0, v[i].1 - q * v[piv].1);
                }
            }
        }
        let piv = (0..v.len()).find(|&i| v[i].1 != 0).expect("full rank");
        let (mut b, mut c) = v[piv];
        let a = v.iter().enumerate().filter(|&(i, _)| i != piv).fold(0i128, |g, (_, e)| gcd(g, e.0)).abs();
        assert!(a > 0, "full rank");
        if c < 0 {
            b = -b;
            c = -c;
        }
        Ideal { a, b: b.rem_euclid(a), c }
    }

    pub fn mul(&self, other: &Ideal, k: &Field) -> Ideal {
        let g1 = [(self.a, 0), (self.b, self.c)];
        let g2 = [(other.a, 0), (other.b, other.c)];
        let mut v = Vec::new();
        for x in g1 {
            for y in g2 {
                v.push(k.mul(x, y));
            }
        }
        Ideal::from_vectors(v)
    }

    pub fn conj(&self, k: &Field) -> Ideal {
        Ideal::from_vectors(vec![k.conj((self.a, 0)), k.conj((self.b, self.c))])
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// All ideals of norm at most `bound` and prime to `p`.
pub fn small_ideals(k: &Field, bound: i128, p: i128) -> Vec<Ideal> {
    let mut out = Vec::new();
    for c in 1..=bound {
        for a in 1..=bound / c {
            if (a * c) % p == 0 || c * c * a > bound {
                continue;
            }
            for b in 0..a {
                // Z a + Z (b + w) is an ideal iff a | N(b + w)
                if k.norm((b, 1)) % a == 0 {
                    out.push(Ideal { a: a * c, b: b * c, c });
                }
            }
        }
    }
    out.sort_by_key(|i| (i.norm(), *i));
    out
}

/// Invariant factors of a finite abelian group from the order of each element.
pub fn invariants_from_element_orders(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    let mut primes = Vec::new();
    let mut m = n;
    let mut q = 2;
    while m > 1 {
        if m % q == 0 {
            primes.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    let mut by_prime: Vec<Vec<u64>> = Vec::new();
    for l in primes {
        let log = |x: u64| {
            let mut e = 0;
            let mut y = x;
            while y > 1 {
                y /= l;
                e += 1;
            }
            e
        };
        let mut e = 0u32;
        while n % l.pow(e + 1) == 0 {
            e += 1;
        }
        // s_j = log_l #{g : g^(l^j) = 1} = sum_i min(j, lambda_i)
        let s: Vec<i64> = (0..=e).map(|j| log(orders.iter().filter(|&&o| l.pow(j) % o == 0).count() as u64) as i64).collect();
        let mut parts = Vec::new();
        for j in 1..=e as usize {
            let at_least_j = s[j] - s[j - 1];
            let at_least_next = if j < e as usize { s[j + 1] - s[j] } else { 0 };
            for _ in 0..(at_least_j - at_least_next) {
                parts.push(l.pow(j as u32));
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        by_prime.push(parts);
    }
    let width = by_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; width];
    for parts in by_prime {
        for (i, q) in parts.into_iter().enumerate() {
            out[width - 1 - i] *= q;
        }
    }
    out
}

pub fn p_part(f: &[u64], p: u64) -> Vec<u64> {
    f.iter()
        .map(|&a| {
            let mut q = 1;
            let mut a = a;
            while a % p == 0 {
                a /= p;
                q *= p;
            }
            q
        })
        .filter(|&q| q > 1)
        .collect()
}

/// `Cl_{p^n}(K)` built as an explicit finite group: classes of ideals prime to
/// `p`, extended by `(O/p^n)^*` modulo the global units through the cocycle
/// of chosen class representatives. Returns full invariants and the p-part,
/// or `None` when the group has more than `limit` elements.
pub fn ray_class_oracle(d: i64, p: u64, n: u32, limit: usize) -> Option<(Vec<u64>, Vec<u64>)> {
    let k = Field::new(d);
    let m = (p as i128).pow(n);
    let pi = p as i128;
    let red = |e: Elt| (e.0.rem_euclid(m), e.1.rem_euclid(m));
    let rmul = |a: Elt, b: Elt| red(k.mul(a, b));

    // residue units and the subgroup of global units
    let units: Vec<Elt> = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).filter(|&e| k.norm(e).rem_euclid(pi) != 0).collect();
    let mut sub: HashSet<Elt> = HashSet::from([(1 % m, 0)]);
    let gens: Vec<Elt> = k.unit_generators().into_iter().map(red).collect();
    let mut frontier = vec![(1 % m, 0)];
    while let Some(e) = frontier.pop() {
        for &g in &gens {
            let f = rmul(e, g);
            if sub.insert(f) {
                frontier.push(f);
            }
        }
    }
    let sub: Vec<Elt> = sub.into_iter().collect();
    let coset_rep = |e: Elt| sub.iter().map(|&u| rmul(e, u)).min().unwrap();
    let mut coset_index: HashMap<Elt, usize> = HashMap::new();
    let mut coset_reps: Vec<Elt> = Vec::new();
    for &u in &units {
        let r = coset_rep(u);
        if !coset_index.contains_key(&r) {
            coset_index.insert(r, coset_reps.len());
            coset_reps.push(r);
        }
    }
    let q_size = coset_reps.len();

    // ideal classes with representatives prime to p
    let ideals = small_ideals(&k, 60, pi);
    let mut reps: Vec<Ideal> = Vec::new();
    for id in ideals {
        let new = reps.iter().all(|r| k.principal_generator(&id.mul(&r.conj(&k), &k)).is_none());
        if new {
            reps.push(id);
        }
    }
    let inv_mod = |a: i128| -> i128 {
        let a = a.rem_euclid(m);
        (1..m).find(|&x| (a * x) % m == 1).expect("prime to p")
    };
    // r_i r_j = r_prod[i][j] * (gamma[i][j]); a product outside every known
    // class becomes a new representative until the set is closed
    let (h, prod, gamma) = loop {
        let h = reps.len();
        if h * q_size > limit {
            return None;
        }
        let mut prod = vec![vec![0usize; h]; h];
        let mut gamma = vec![vec![0usize; h]; h];
        let mut missing = None;
        'table: for i in 0..h {
            for j in 0..h {
                let ij = reps[i].mul(&reps[j], &k);
                match (0..h).find_map(|l| k.principal_generator(&ij.mul(&reps[l].conj(&k), &k)).map(|b| (l, b))) {
                    Some((l, beta)) => {
                        let ninv = inv_mod(reps[l].norm());
                        let g = red((beta.0 * ninv, beta.1 * ninv));
                        prod[i][j] = l;
                        gamma[i][j] = coset_index[&coset_rep(g)];
                    }
                    None => {
                        missing = Some(ij);
                        break 'table;
                    }
                }
            }
        }
        match missing {
            Some(ij) => reps.push(ij),
            None => break (h, prod, gamma),
        }
    };
    let qmul = |a: usize, b: usize| coset_index[&coset_rep(rmul(coset_reps[a], coset_reps[b]))];
    let gmul = |x: (usize, usize), y: (usize, usize)| (prod[x.0][y.0], qmul(qmul(x.1, y.1), gamma[x.0][y.0]));

    let elements: Vec<(usize, usize)> = (0..h).flat_map(|c| (0..q_size).map(move |q| (c, q))).collect();
    let identity = *elements.iter().find(|&&e| gmul(e, e) == e).unwrap();
    let orders: Vec<u64> = elements
        .iter()
        .map(|&e| {
            let mut x = e;
            let mut o = 1;
            while x != identity {
                x = gmul(x, e);
                o += 1;
            }
            o
        })
        .collect();
    let full = invariants_from_element_orders(&orders);
    let pp = p_part(&full, p);
    Some((full, pp))
}

/// `#Aut(prod Z/p^(e_i))` by exhaustive search over images of the standard
/// generators, memoized on the subgroup generated so far.
pub fn aut_order_brute(p: u64, exps: &[u32]) -> u64 {
    let mods: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
    let size: usize = mods.iter().product::<u64>() as usize;
    let encode = |v: &[u64]| v.iter().zip(&mods).fold(0usize, |acc, (x, m)| acc * *m as usize + *x as usize);
    let elements: Vec<Vec<u64>> = (0..size)
        .map(|mut i| {
            let mut v = vec![0u64; mods.len()];
            for j in (0..mods.len()).rev() {
                v[j] = (i % mods[j] as usize) as u64;
                i /= mods[j] as usize;
            }
            v
        })
        .collect();
    let add: Vec<Vec<usize>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    let s: Vec<u64> = elements[a].iter().zip(&elements[b]).zip(&mods).map(|((x, y), m)| (x + y) % m).collect();
                    encode(&s)
                })
                .collect()
        })
        .collect();
    let order = |x: usize| {
        let mut y = x;
        let mut o = 1u64;
        while y != 0 {
            y = add[y][x];
            o += 1;
        }
        o
    };
    let orders: Vec<u64> = (0..size).map(order).collect();

    fn go(
        i: usize,
        h: &BTreeMap<usize, ()>,
        mods: &[u64],
        add: &[Vec<usize>],
        orders: &[u64],
        memo: &mut HashMap<(usize, Vec<usize>), u64>,
    ) -> u64 {
        if i == mods.len() {
            return 1;
        }
        let key = (i, h.keys().copied().collect::<Vec<_>>());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut total = 0;
        for x in 0..add.len() {
            if orders[x] != mods[i] {
                continue;
            }
            // <H, x> = union of H + k x
            let mut span: BTreeMap<usize, ()> = BTreeMap::new();
            let mut kx = 0usize;
            for _ in 0..mods[i] {
                for &e in h.keys() {
                    span.insert(add[e][kx], ());
                }
                kx = add[kx][x];
            }
            if span.len() as u64 == h.len() as u64 * mods[i] {
                total += go(i + 1, &span, mods, add, orders, memo);
            }
        }
        memo.insert(key, total);
        total
    }
    let mut memo = HashMap::new();
    let start: BTreeMap<usize, ()> = BTreeMap::from([(0, ())]);
    go(0, &start, &mods, &add, &orders, &mut memo)
}

/// Partitions of `n` into non-increasing parts.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            cur.push(part);
            go(n - part, part, cur, out);
            cur.pop();
        }
    }
    go(n, n, &mut Vec::new(), &mut out);
    out
}
