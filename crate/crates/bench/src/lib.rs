// SPDX-License-Identifier: Apache-2.0

//! Shared inputs for the criterion benchmarks.

/// Fields covering every splitting type of 3 and 5, both signatures.
pub const SAMPLE_FIELDS: &[i64] = &[-129, -23, -1, 2, 5, 10, 79, 229, -3299, 3299];
