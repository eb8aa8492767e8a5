// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use padic_torsion::linalg::{quotient_presentation, HermiteLattice};
use padic_torsion::{invariant_factors, p_part, smith_normal_form, AbelianPresentation, IntMatrix, InvariantFactors};
use proptest::prelude::*;

fn matrix(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
    IntMatrix::from_rows(cols, rows)
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    // cofactor expansion, fine for the sizes used here
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn is_power_of(a: &BigUint, p: u64) -> bool {
    let mut a = a.clone();
    while (&a % p).is_zero() {
        a /= p;
    }
    a.is_one()
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Subgroup of `prod Z/a_i` generated by `gens`, by closure.
fn subgroup(orders: &[u64], gens: &[Vec<i64>]) -> HashSet<Vec<u64>> {
    let zero = vec![0u64; orders.len()];
    let mut seen: HashSet<Vec<u64>> = [zero.clone()].into();
    let mut stack = vec![zero];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).zip(orders).map(|((&a, &b), &m)| (a as i64 + b).rem_euclid(m as i64) as u64).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

fn all_elements(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &m in orders {
        out = out.into_iter().flat_map(|v| (0..m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Invariant factors of `prod Z/a_i` modulo the subgroup generated by `gens`, by enumeration.
fn brute_quotient(orders: &[u64], gens: &[Vec<i64>]) -> Vec<u64> {
    let h = subgroup(orders, gens);
    let elts = all_elements(orders);
    // one representative per coset is enough; element orders are class functions
    let mut covered: HashSet<Vec<u64>> = HashSet::new();
    let mut elem_orders = Vec::new();
    for x in &elts {
        if covered.contains(x) {
            continue;
        }
        for y in &h {
            covered.insert(x.iter().zip(y).zip(orders).map(|((&a, &b), &m)| (a + b) % m).collect());
        }
        let mut k = 1u64;
        loop {
            let kx: Vec<u64> = x.iter().zip(orders).map(|(&a, &m)| (a * k) % m).collect();
            if h.contains(&kx) {
                break;
            }
            k += 1;
        }
        elem_orders.push(k);
    }
    common::invariants_from_element_orders(&elem_orders)
}

fn small_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        (Just(c), prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_valid_decomposition((cols, rows) in small_matrix(5, 30)) {
        let m = matrix(&rows, cols);
        let s = smith_normal_form(&m);
        let d = s.u.mul(&m).mul(&s.v);
        prop_assert!(d.is_diagonal());
        for i in 0..d.rows().min(d.cols()) {
            prop_assert_eq!(&d[(i, i)], &s.diagonal[i]);
        }
        // divisor chain, nonnegative entries
        for w in s.diagonal.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        // V and its recorded inverse multiply to the identity
        prop_assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(cols));
        if rows.len() == cols {
            let prod: BigInt = s.diagonal.iter().product();
            prop_assert_eq!(prod.abs(), det(&to_rows(&m)).abs());
        }
    }

    #[test]
    fn chain_presentation_is_its_own_invariant_factors(exps in prop::collection::vec(1u64..6, 0..5), base in 2u64..6) {
        // a_1 | a_2 | ... built as cumulative products
        let mut chain = Vec::new();
        let mut acc = 1u64;
        for e in exps {
            acc *= base.pow((e % 2) as u32 + 1);
            chain.push(acc);
        }
        let g = AbelianPresentation::from_orders(&chain);
        prop_assert_eq!(invariant_factors(&g).unwrap(), InvariantFactors::from_u64(&chain));
    }

    #[test]
    fn quotient_order_matches_enumeration(
        orders in prop::collection::vec(2u64..8, 1..4),
        gens in prop::collection::vec(prop::collection::vec(-7i64..8, 3), 0..3),
    ) {
        prop_assume!(orders.iter().product::<u64>() <= 200);
        let n = orders.len();
        let gens: Vec<Vec<i64>> = gens.into_iter().map(|g| g[..n].to_vec()).collect();
        let g = AbelianPresentation::from_orders(&orders);
        let big: Vec<Vec<BigInt>> = gens.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let q = quotient_presentation(&g, &big).unwrap();
        let inv = invariant_factors(&q).unwrap();
        prop_assert_eq!(inv.to_u64().unwrap(), brute_quotient(&orders, &gens));
    }

    #[test]
    fn p_parts_reassemble(orders in prop::collection::vec(1u64..200, 0..5)) {
        let f = invariant_factors(&AbelianPresentation::from_orders(&orders)).unwrap();
        let mut total = BigUint::one();
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199] {
            let pp = p_part(&f, p);
            prop_assert!(pp.factors().iter().all(|a| is_power_of(a, p)));
            total *= pp.order();
        }
        prop_assert_eq!(total, f.order());
        prop_assert_eq!(f.order(), BigUint::from(orders.iter().product::<u64>()));
    }

    #[test]
    fn hermite_lattice_determinant((_, rows) in small_matrix(4, 20)) {
        let dim = rows[0].len();
        let mut lat = HermiteLattice::new(dim);
        for r in &rows {
            lat.insert(&r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        }
        for r in &rows {
            prop_assert!(lat.contains(&r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()));
        }
        if let Some(d) = lat.determinant() {
            // full rank: the index equals the gcd of maximal minors, which the SNF also gives
            let s = smith_normal_form(&matrix(&rows, dim));
            let prod: BigInt = s.diagonal.iter().product();
            prop_assert_eq!(d.abs(), prod.abs());
        }
    }
}

#[test]
fn quotient_examples() {
    // Z/4 x Z/6 modulo (2, 3) is Z/12; modulo (1, 0) it is Z/6
    let g = AbelianPresentation::from_orders(&[4, 6]);
    let q = quotient_presentation(&g, &[vec![BigInt::from(2), BigInt::from(3)]]).unwrap();
    assert_eq!(invariant_factors(&q).unwrap(), InvariantFactors::from_u64(&[12]));
    assert_eq!(brute_quotient(&[4, 6], &[vec![2, 3]]), vec![12]);
    let q = quotient_presentation(&g, &[vec![BigInt::from(1), BigInt::from(0)]]).unwrap();
    assert_eq!(invariant_factors(&q).unwrap(), InvariantFactors::from_u64(&[6]));
}
