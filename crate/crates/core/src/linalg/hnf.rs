// SPDX-License-Identifier: Apache-2.0

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Row Hermite normal form `T * M = H` with `T` unimodular.
///
/// The first `rank` rows of `H` are in echelon form with positive pivots and
/// every entry above a pivot reduced into `[0, pivot)`; the remaining rows
/// are zero, so the matching rows of `T` span the left kernel of `M`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub t: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn hermite_normal_form(m: &IntMatrix) -> HermiteForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut t = IntMatrix::identity(rows);
    let mut r = 0;
    let mut pivots = Vec::new();
    for j in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // smallest nonzero entry of column j at or below row r
            let best = (r..rows).filter(|&i| !h[(i, j)].is_zero()).min_by(|&a, &b| h[(a, j)].abs().cmp(&h[(b, j)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            t.swap_rows(r, best);
            let mut clean = true;
            for i in r + 1..rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = h[(i, j)].div_floor(&h[(r, j)]);
                let neg = -q;
                h.add_row_multiple(i, r, &neg);
                t.add_row_multiple(i, r, &neg);
                if !h[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            t.negate_row(r);
        }
        let pivot = h[(r, j)].clone();
        for i in 0..r {
            let q = h[(i, j)].div_floor(&pivot);
            if !q.is_zero() {
                let neg = -q;
                h.add_row_multiple(i, r, &neg);
                t.add_row_multiple(i, r, &neg);
            }
        }
        pivots.push(j);
        r += 1;
    }
    HermiteForm { h, t, rank: r, pivots }
}
