// SPDX-License-Identifier: Apache-2.0

//! Torsion of the Galois group of the maximal abelian p-extension unramified
//! outside `p` of a quadratic field, computed from ray class groups modulo
//! `p^n` once their p-parts stabilize.

pub mod arith;
pub mod error;
pub mod heuristics;
pub mod linalg;
pub mod quadfield;
pub mod rayclass;
pub mod resunits;
pub mod survey;

pub use error::{Error, Result};
pub use heuristics::{
    adjusted_average_p3, aut_order_abelian_p_group, cl_average, w_ideal, PGroupShape, SplittingProfile,
};
pub use linalg::{invariant_factors, p_part, smith_normal_form, AbelianPresentation, IntMatrix, InvariantFactors};
pub use quadfield::{class_group, make_field, prime_splitting, QuadField, QuadIdeal, Residue, RingElement, Splitting};
pub use rayclass::{
    kernel_order, match_stabilization_pattern, ray_class_p_part, torsion_structure, RayClassLevel, TorsionReport,
    DEFAULT_N_MAX,
};
pub use resunits::{residue_unit_group, LocalFactor, ResidueUnitGroup};
pub use survey::{run_survey, squarefree_stream, FrequencyRow, Signature, SurveyConfig};
