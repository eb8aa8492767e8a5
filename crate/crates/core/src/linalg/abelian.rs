// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^num_generators / rowspace(relations)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianPresentation {
    num_generators: usize,
    relations: IntMatrix,
}

impl AbelianPresentation {
    pub fn new(num_generators: usize, relations: IntMatrix) -> Result<Self> {
        if relations.cols() != num_generators {
            return Err(Error::DimensionMismatch { expected: num_generators, got: relations.cols() });
        }
        Ok(Self { num_generators, relations })
    }

    /// `Z/orders[0] x Z/orders[1] x ...` with one generator per factor.
    pub fn from_orders<T: Into<BigInt> + Clone>(orders: &[T]) -> Self {
        let n = orders.len();
        let mut rel = IntMatrix::zeros(n, n);
        for (i, o) in orders.iter().enumerate() {
            rel[(i, i)] = o.clone().into();
        }
        Self { num_generators: n, relations: rel }
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn push_relation(&mut self, row: Vec<BigInt>) -> Result<()> {
        if row.len() != self.num_generators {
            return Err(Error::DimensionMismatch { expected: self.num_generators, got: row.len() });
        }
        self.relations.push_row(row);
        Ok(())
    }
}

/// Ascending divisor chain `a_1 | a_2 | ... | a_t` with every `a_i >= 2`.
/// The trivial group is the empty chain.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct InvariantFactors(Vec<BigUint>);

impl InvariantFactors {
    pub fn trivial() -> Self {
        Self(Vec::new())
    }

    /// Validates the divisor-chain condition.
    pub fn new(factors: Vec<BigUint>) -> Option<Self> {
        let two = BigUint::from(2u32);
        if factors.iter().any(|a| a < &two) {
            return None;
        }
        if factors.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return None;
        }
        Some(Self(factors))
    }

    /// Convenience constructor; panics on an invalid chain.
    pub fn from_u64(factors: &[u64]) -> Self {
        Self::new(factors.iter().map(|&a| BigUint::from(a)).collect()).expect("not a divisor chain")
    }

    pub fn factors(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.0.iter().product()
    }

    /// Factors as `u64`, if they all fit.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|a| a.to_u64()).collect()
    }

    /// `v_p` of every factor.
    pub fn valuations(&self, p: u64) -> Vec<u32> {
        self.0.iter().map(|a| valuation_big(a, p)).collect()
    }
}

pub(crate) fn valuation_big(a: &BigUint, p: u64) -> u32 {
    let p = BigUint::from(p);
    let mut a = a.clone();
    let mut v = 0;
    while !a.is_zero() && a.is_multiple_of(&p) {
        a /= &p;
        v += 1;
    }
    v
}

impl fmt::Debug for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

// Factors serialize as JSON numbers when they fit in u64, as decimal strings otherwise.
impl Serialize for InvariantFactors {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for a in &self.0 {
            match a.to_u64() {
                Some(x) => seq.serialize_element(&x)?,
                None => seq.serialize_element(&a.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for InvariantFactors {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Factor {
            Num(u64),
            Str(String),
        }
        let raw: Vec<Factor> = Vec::deserialize(d)?;
        let mut out = Vec::with_capacity(raw.len());
        for f in raw {
            out.push(match f {
                Factor::Num(x) => BigUint::from(x),
                Factor::Str(s) => s.parse().map_err(de::Error::custom)?,
            });
        }
        InvariantFactors::new(out).ok_or_else(|| de::Error::custom("not a divisor chain"))
    }
}

/// Invariant factors of a finite abelian group given by a presentation.
pub fn invariant_factors(g: &AbelianPresentation) -> Result<InvariantFactors> {
    if g.num_generators == 0 {
        return Ok(InvariantFactors::trivial());
    }
    if g.relations.rows() < g.num_generators {
        return Err(Error::InfiniteGroup);
    }
    let snf = smith_normal_form(&g.relations);
    let mut out = Vec::new();
    for d in snf.diagonal {
        if d.is_zero() {
            return Err(Error::InfiniteGroup);
        }
        let (_, mag) = d.into_parts();
        if !mag.is_one() {
            out.push(mag);
        }
    }
    Ok(InvariantFactors(out))
}

/// The p-primary part: each factor replaced by its p-power part, units dropped.
pub fn p_part(f: &InvariantFactors, p: u64) -> InvariantFactors {
    let pb = BigUint::from(p);
    let out = f
        .0
        .iter()
        .map(|a| pb.pow(valuation_big(a, p)))
        .filter(|a| !a.is_one())
        .collect();
    InvariantFactors(out)
}

/// `g` modulo the subgroup generated by the given exponent vectors.
pub fn quotient_presentation(g: &AbelianPresentation, subgroup_gens: &[Vec<BigInt>]) -> Result<AbelianPresentation> {
    let mut out = g.clone();
    for row in subgroup_gens {
        out.push_relation(row.clone())?;
    }
    Ok(out)
}
