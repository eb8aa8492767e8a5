// SPDX-License-Identifier: Apache-2.0

//! p-parts of ray class groups modulo `p^n` and the stabilization loop that
//! reads off the torsion of the Galois group of the maximal abelian
//! p-extension unramified outside `p`.
//!
//! `Cl_{p^n}` is presented by generators of `(O/p^n)^*` together with the
//! class group generators. Relations are the residue unit orders, the images
//! of the global units, and one row `d_i g_i = (beta_i)` per class group
//! generator, where `beta_i` is prime to `p` and enters with negative sign in
//! the residue block.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, p_part, AbelianPresentation, IntMatrix, InvariantFactors};
use crate::quadfield::{
    class_group, fundamental_unit_mod, ramification_valuation, torsion_units, QuadField, ReducedClassGroup, RingElement,
};
use crate::resunits::residue_unit_group;

/// Default level cutoff for [`torsion_structure`].
pub const DEFAULT_N_MAX: u32 = 30;

/// `Cl_{p^n}(K)` and its p-part `A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayClassLevel {
    pub n: u32,
    pub full_invariants: InvariantFactors,
    pub p_invariants: InvariantFactors,
    #[serde(with = "big_decimal")]
    pub order_p_part: BigUint,
}

/// Outcome of the stabilization loop for one `(K, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub field: QuadField,
    pub p: u64,
    pub start_level: u32,
    pub stabilization_level: u32,
    pub leopoldt_certified: bool,
    /// Level at which `#Y_n = p^(r2+1)` was first observed.
    pub leopoldt_level: Option<u32>,
    /// `#Y_n` for `n = start_level, start_level + 1, ...`.
    #[serde(with = "big_decimal_vec")]
    pub kernel_orders: Vec<BigUint>,
    pub torsion: InvariantFactors,
    pub trace: Vec<RayClassLevel>,
}

impl TorsionReport {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Level-independent data for one `(K, p)`: the class group with witnesses
/// prime to `p`, reduced to diagonal form.
#[derive(Clone, Debug)]
pub struct RayClassTower {
    field: QuadField,
    p: u64,
    class_group: ReducedClassGroup,
    witnesses: Vec<RingElement>,
}

impl RayClassTower {
    pub fn new(k: &QuadField, p: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let cl = class_group(k, p)?;
        let reduced = cl.reduce();
        Ok(RayClassTower { field: *k, p, class_group: reduced, witnesses: cl.principal_witnesses })
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn presentation(&self, n: u32) -> Result<AbelianPresentation> {
        let k = &self.field;
        let units = residue_unit_group(k, self.p, n)?;
        let ring = units.ring();
        let m = units.generators.len();
        let c = self.class_group.orders.len();
        let cols = m + c;
        let mut rel = IntMatrix::zeros(0, cols);

        for (i, &o) in units.orders.iter().enumerate() {
            let mut row = vec![BigInt::zero(); cols];
            row[i] = BigInt::from(o);
            rel.push_row(row);
        }

        let mut global = Vec::new();
        for (zeta, _) in torsion_units(k) {
            global.push(ring.reduce(&zeta));
        }
        if k.is_real() {
            global.push(fundamental_unit_mod(k, ring)?.residue);
        }
        for u in global {
            let mut row = vec![BigInt::zero(); cols];
            for (slot, e) in row.iter_mut().zip(units.discrete_log(&u)?) {
                *slot = BigInt::from(e);
            }
            rel.push_row(row);
        }

        if c > 0 {
            let mut witness_logs: Vec<Option<Vec<u128>>> = vec![None; self.witnesses.len()];
            let orders: Vec<BigInt> = units.orders.iter().map(|&o| BigInt::from(o)).collect();
            for (i, (d, combo)) in self.class_group.orders.iter().zip(&self.class_group.generator_witnesses).enumerate() {
                let mut acc = vec![BigInt::zero(); m];
                for (j, coeff) in combo.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    if witness_logs[j].is_none() {
                        let r = ring.reduce(&self.witnesses[j]);
                        witness_logs[j] = Some(units.discrete_log(&r)?);
                    }
                    for (a, &e) in acc.iter_mut().zip(witness_logs[j].as_ref().unwrap()) {
                        *a += coeff * BigInt::from(e);
                    }
                }
                let mut row = vec![BigInt::zero(); cols];
                for (slot, (a, o)) in row.iter_mut().zip(acc.iter().zip(&orders)) {
                    *slot = -a.mod_floor(o);
                }
                row[m + i] = d.clone();
                rel.push_row(row);
            }
        }
        AbelianPresentation::new(cols, rel)
    }

    pub fn level(&self, n: u32) -> Result<RayClassLevel> {
        let full = invariant_factors(&self.presentation(n)?)?;
        let pp = p_part(&full, self.p);
        let order_p_part = pp.order();
        Ok(RayClassLevel { n, full_invariants: full, p_invariants: pp, order_p_part })
    }
}

/// `Cl_{p^n}(K)` and its p-part.
pub fn ray_class_p_part(k: &QuadField, p: u64, n: u32) -> Result<RayClassLevel> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    RayClassTower::new(k, p)?.level(n)
}

/// `#Y_n = #A_(n+1) / #A_n`.
pub fn kernel_order(level_n: &RayClassLevel, level_n1: &RayClassLevel) -> Result<BigUint> {
    let (q, r) = level_n1.order_p_part.div_rem(&level_n.order_p_part);
    if !r.is_zero() {
        return Err(Error::NonDivisible {
            lower: level_n.order_p_part.to_string(),
            upper: level_n1.order_p_part.to_string(),
        });
    }
    Ok(q)
}

/// The `b`-part of `f_n = [b_1..b_t, a_1..a_r]` when `f_n1 = [b_1..b_t, p a_1..p a_r]`
/// and `min v_p(a) > max v_p(b) + 1`.
pub fn match_stabilization_pattern(
    f_n: &InvariantFactors,
    f_n1: &InvariantFactors,
    p: u64,
    r: usize,
) -> Option<InvariantFactors> {
    if f_n.len() < r || f_n1.len() != f_n.len() {
        return None;
    }
    let t = f_n.len() - r;
    let (b, a) = f_n.factors().split_at(t);
    let (b1, a1) = f_n1.factors().split_at(t);
    if b != b1 {
        return None;
    }
    let pb = BigUint::from(p);
    if a.iter().zip(a1).any(|(x, y)| &(x * &pb) != y) {
        return None;
    }
    let v = f_n.valuations(p);
    let min_a = v[t..].iter().copied().min().unwrap_or(u32::MAX);
    if let Some(max_b) = v[..t].iter().copied().max() {
        if min_a <= max_b + 1 {
            return None;
        }
    }
    InvariantFactors::new(b.to_vec())
}

/// Runs levels `n = s + 2, s + 3, ...` until the invariant factors settle
/// into the stable pattern with kernel `(Z/p)^(r2+1)`.
pub fn torsion_structure(k: &QuadField, p: u64, n_max: u32) -> Result<TorsionReport> {
    let tower = RayClassTower::new(k, p)?;
    torsion_structure_with(&tower, n_max)
}

pub fn torsion_structure_with(tower: &RayClassTower, n_max: u32) -> Result<TorsionReport> {
    let k = *tower.field();
    let p = tower.p();
    let start = ramification_valuation(&k, p) + 2;
    let r = k.leopoldt_rank() as usize;
    let stable_kernel = BigUint::from(p).pow(r as u32);

    let mut trace: Vec<RayClassLevel> = Vec::new();
    let mut kernel_orders: Vec<BigUint> = Vec::new();
    let mut leopoldt_level = None;
    let mut n = start;
    while n <= n_max {
        let level = tower.level(n)?;
        if let Some(prev) = trace.last() {
            let q = kernel_order(prev, &level)?;
            if let Some(last) = kernel_orders.last() {
                if &q > last {
                    return Err(Error::Internal(format!("#Y_{} = {q} exceeds #Y_{} = {last}", n - 1, n - 2)));
                }
            }
            let stable = q == stable_kernel;
            if stable && leopoldt_level.is_none() {
                leopoldt_level = Some(n - 1);
            }
            kernel_orders.push(q);
            let matched = if stable { match_stabilization_pattern(&prev.p_invariants, &level.p_invariants, p, r) } else { None };
            trace.push(level);
            if let Some(torsion) = matched {
                return Ok(TorsionReport {
                    field: k,
                    p,
                    start_level: start,
                    stabilization_level: n - 1,
                    leopoldt_certified: leopoldt_level.is_some(),
                    leopoldt_level,
                    kernel_orders,
                    torsion,
                    trace,
                });
            }
        } else {
            trace.push(level);
        }
        n += 1;
    }
    Err(Error::NoStabilization { n_max, trace: Box::new(trace) })
}

/// Big integers as JSON numbers when they fit in `u64`, decimal strings otherwise.
mod big_decimal {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Raw {
        Num(u64),
        Str(String),
    }

    impl Raw {
        pub(super) fn into_big<E: de::Error>(self) -> Result<BigUint, E> {
            match self {
                Raw::Num(x) => Ok(BigUint::from(x)),
                Raw::Str(s) => s.parse().map_err(E::custom),
            }
        }
    }

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match x.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        Raw::deserialize(d)?.into_big()
    }
}

mod big_decimal_vec {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::big_decimal::Raw;

    pub fn serialize<S: Serializer>(xs: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        struct Wrap<'a>(&'a BigUint);
        impl serde::Serialize for Wrap<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::big_decimal::serialize(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Wrap(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<Raw>::deserialize(d)?.into_iter().map(Raw::into_big).collect()
    }
}

impl RayClassLevel {
    /// `v_p(#A_n)`.
    pub fn p_exponent(&self, p: u64) -> u32 {
        self.p_invariants.valuations(p).iter().sum()
    }
}
