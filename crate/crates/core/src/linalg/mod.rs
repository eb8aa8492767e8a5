// SPDX-License-Identifier: Apache-2.0

//! Exact integer linear algebra: Smith normal form with transforms, an
//! incremental Hermite basis for relation lattices, and finite abelian
//! group presentations.

mod abelian;
mod hnf;
mod lattice;
mod matrix;
mod snf;

pub use abelian::{invariant_factors, p_part, quotient_presentation, AbelianPresentation, InvariantFactors};
pub use hnf::{hermite_normal_form, HermiteForm};
pub use lattice::HermiteLattice;
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SmithForm};
