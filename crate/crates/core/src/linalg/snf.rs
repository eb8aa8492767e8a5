// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `U * M * V = diag(diagonal)` with unimodular `U`, `V`.
///
/// `v_inv` is kept alongside `V`: its rows express the new generators of
/// `Z^cols / rowspace(M)` in terms of the old ones.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

/// Quotient of `a / b` rounded to nearest, so remainders stay at most |b|/2.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // a floored remainder has the sign of b, so rounding up always shrinks it
    let (q, r) = a.div_mod_floor(b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[dst] += k * row[src]
    fn row_op(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
    }

    /// col[dst] += k * col[src]; the inverse transform adds -k * row[dst] to row[src].
    fn col_op(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
        let neg = -k;
        self.v_inv.add_row_multiple(src, dst, &neg);
    }

    /// Position of the nonzero entry of least absolute value in the trailing block.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

impl Work {
    fn get(&self, i: usize, j: usize, cols_mode: bool) -> &BigInt {
        if cols_mode {
            &self.a[(j, i)]
        } else {
            &self.a[(i, j)]
        }
    }

    fn swap_lines(&mut self, i: usize, j: usize, cols_mode: bool) {
        if cols_mode {
            self.swap_cols(i, j)
        } else {
            self.swap_rows(i, j)
        }
    }

    fn line_op(&mut self, dst: usize, src: usize, k: &BigInt, cols_mode: bool) {
        if cols_mode {
            self.col_op(dst, src, k)
        } else {
            self.row_op(dst, src, k)
        }
    }

    /// Hermite form of the rows (or of the columns), with every entry above a
    /// pivot reduced modulo it.
    fn hermite_pass(&mut self, cols_mode: bool) {
        let (lines, width) = if cols_mode { (self.a.cols(), self.a.rows()) } else { (self.a.rows(), self.a.cols()) };
        let mut r = 0;
        for j in 0..width {
            if r == lines {
                break;
            }
            loop {
                let best = (r..lines)
                    .filter(|&i| !self.get(i, j, cols_mode).is_zero())
                    .min_by(|&a, &b| self.get(a, j, cols_mode).abs().cmp(&self.get(b, j, cols_mode).abs()));
                let Some(best) = best else { break };
                self.swap_lines(r, best, cols_mode);
                let mut clean = true;
                for i in r + 1..lines {
                    if self.get(i, j, cols_mode).is_zero() {
                        continue;
                    }
                    let q = -self.get(i, j, cols_mode).div_floor(self.get(r, j, cols_mode));
                    self.line_op(i, r, &q, cols_mode);
                    if !self.get(i, j, cols_mode).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if self.get(r, j, cols_mode).is_zero() {
                continue;
            }
            if self.get(r, j, cols_mode).is_negative() {
                self.negate_line(r, cols_mode);
            }
            let pivot = self.get(r, j, cols_mode).clone();
            for i in 0..r {
                let q = -self.get(i, j, cols_mode).div_floor(&pivot);
                if !q.is_zero() {
                    self.line_op(i, r, &q, cols_mode);
                }
            }
            r += 1;
        }
    }

    fn negate_line(&mut self, i: usize, cols_mode: bool) {
        if cols_mode {
            self.a.negate_col(i);
            self.v.negate_col(i);
            self.v_inv.negate_row(i);
        } else {
            self.a.negate_row(i);
            self.u.negate_row(i);
        }
    }
}

/// Smith normal form by alternating row and column Hermite reductions, which
/// keep entries bounded by the pivots, then a divisibility clean-up on the
/// diagonal.
///
/// The diagonal is non-negative, satisfies `d[i] | d[i+1]`, and places any
/// zeros last.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut cols_mode = false;
    while !w.a.is_diagonal() {
        w.hermite_pass(cols_mode);
        cols_mode = !cols_mode;
    }
    let steps = rows.min(cols);
    for t in 0..steps {
        let Some((pi, pj)) = w.min_entry(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..rows {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let q = round_div(&w.a[(i, t)], &w.a[(t, t)]);
                w.row_op(i, t, &-q);
                if !w.a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let q = round_div(&w.a[(t, j)], &w.a[(t, t)]);
                w.col_op(j, t, &-q);
                if !w.a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder exists in row or column t; move it to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    let x = &w.a[(i, t)];
                    if !x.is_zero() && x.abs() < w.a[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let x = &w.a[(t, j)];
                    if !x.is_zero() && x.abs() < w.a[best].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // pivot must divide the rest of the block
            let pivot = w.a[(t, t)].clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !w.a[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    w.row_op(t, i, &BigInt::from(1));
                }
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.a.negate_row(t);
            w.u.negate_row(t);
        }
    }
    let diagonal = (0..steps).map(|i| w.a[(i, i)].clone()).collect();
    SmithForm { diagonal, u: w.u, v: w.v, v_inv: w.v_inv }
}
