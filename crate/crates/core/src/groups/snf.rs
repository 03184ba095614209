//! Integer Smith normal form with replayable transform logs.
//!
//! `L · A · R = D` with `L`, `R` unimodular and `D` diagonal, `d₀ | d₁ | …`.
//! `L` and `R` are never materialized; the elementary operations are logged
//! and replayed on vectors on demand.

use crate::{Error, Result};

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] += v;
    }

    pub fn mul_vec(&self, x: &[i128]) -> Result<Vec<i128>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).try_fold(0i128, |acc, j| {
                    self.get(i, j)
                        .checked_mul(x[j])
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow)
                })
            })
            .collect()
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<i128>]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Swap(usize, usize),
    /// `dst += c · src`
    Add { dst: usize, src: usize, c: i128 },
    Neg(usize),
}

/// Result of [`Smith::compute`].
#[derive(Debug, Clone)]
pub struct Smith {
    rows: usize,
    cols: usize,
    diag: Vec<i128>,
    rank: usize,
    row_ops: Vec<Op>,
    col_ops: Vec<Op>,
}

fn checked_axpy(dst: i128, c: i128, src: i128) -> Result<i128> {
    c.checked_mul(src)
        .and_then(|p| dst.checked_add(p))
        .ok_or(Error::Overflow)
}

struct Work {
    a: IntMatrix,
    row_ops: Vec<Op>,
    col_ops: Vec<Op>,
}

impl Work {
    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.a.cols {
            self.a.data.swap(i * self.a.cols + k, j * self.a.cols + k);
        }
        self.row_ops.push(Op::Swap(i, j));
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.a.rows {
            self.a.data.swap(k * self.a.cols + i, k * self.a.cols + j);
        }
        self.col_ops.push(Op::Swap(i, j));
    }

    fn row_add(&mut self, dst: usize, src: usize, c: i128) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        for k in 0..self.a.cols {
            let s = self.a.get(src, k);
            if s != 0 {
                let v = checked_axpy(self.a.get(dst, k), c, s)?;
                self.a.set(dst, k, v);
            }
        }
        self.row_ops.push(Op::Add { dst, src, c });
        Ok(())
    }

    fn col_add(&mut self, dst: usize, src: usize, c: i128) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        for k in 0..self.a.rows {
            let s = self.a.get(k, src);
            if s != 0 {
                let v = checked_axpy(self.a.get(k, dst), c, s)?;
                self.a.set(k, dst, v);
            }
        }
        self.col_ops.push(Op::Add { dst, src, c });
        Ok(())
    }

    fn row_neg(&mut self, i: usize) {
        for k in 0..self.a.cols {
            let v = self.a.get(i, k);
            self.a.set(i, k, -v);
        }
        self.row_ops.push(Op::Neg(i));
    }
}

impl Smith {
    pub fn compute(a: &IntMatrix) -> Result<Smith> {
        let (rows, cols) = (a.rows, a.cols);
        let mut w = Work {
            a: a.clone(),
            row_ops: Vec::new(),
            col_ops: Vec::new(),
        };
        let mut t = 0;
        while t < rows.min(cols) {
            let mut best: Option<(usize, usize, i128)> = None;
            'scan: for i in t..rows {
                for j in t..cols {
                    let v = w.a.get(i, j).abs();
                    if v != 0 && best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                        if v == 1 {
                            break 'scan;
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else { break };
            w.row_swap(t, pi);
            w.col_swap(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if w.a.get(i, t) != 0 {
                        let q = w.a.get(i, t) / w.a.get(t, t);
                        w.row_add(i, t, -q)?;
                        if w.a.get(i, t) != 0 {
                            w.row_swap(t, i);
                            clean = false;
                        }
                    }
                }
                for j in t + 1..cols {
                    if w.a.get(t, j) != 0 {
                        let q = w.a.get(t, j) / w.a.get(t, t);
                        w.col_add(j, t, -q)?;
                        if w.a.get(t, j) != 0 {
                            w.col_swap(t, j);
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue;
                }
                let p = w.a.get(t, t);
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| w.a.get(i, j) % p != 0));
                match bad {
                    Some(i) => w.row_add(t, i, 1)?,
                    None => break,
                }
            }
            if w.a.get(t, t) < 0 {
                w.row_neg(t);
            }
            t += 1;
        }
        let diag: Vec<i128> = (0..rows.min(cols)).map(|i| w.a.get(i, i)).collect();
        let rank = diag.iter().take_while(|&&d| d != 0).count();
        Ok(Smith {
            rows,
            cols,
            diag,
            rank,
            row_ops: w.row_ops,
            col_ops: w.col_ops,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Diagonal entries `d_i` for `i < rank`.
    pub fn invariants(&self) -> &[i128] {
        &self.diag[..self.rank]
    }

    /// `L · v`.
    pub fn left(&self, v: &mut [i128]) -> Result<()> {
        for op in &self.row_ops {
            match *op {
                Op::Swap(i, j) => v.swap(i, j),
                Op::Add { dst, src, c } => v[dst] = checked_axpy(v[dst], c, v[src])?,
                Op::Neg(i) => v[i] = -v[i],
            }
        }
        Ok(())
    }

    /// `L · v` over the reals reduced mod 1 after every step.
    pub fn left_mod_one(&self, v: &mut [f64]) {
        for op in &self.row_ops {
            match *op {
                Op::Swap(i, j) => v.swap(i, j),
                Op::Add { dst, src, c } => v[dst] = (v[dst] + c as f64 * v[src]).rem_euclid(1.0),
                Op::Neg(i) => v[i] = (-v[i]).rem_euclid(1.0),
            }
        }
    }

    /// `L · v` reduced mod `m`.
    pub fn left_mod(&self, v: &mut [i128], m: i128) {
        replay_mod(self.row_ops.iter(), v, m, false, false);
    }

    /// `L⁻¹ · v`.
    pub fn left_inv(&self, v: &mut [i128]) -> Result<()> {
        for op in self.row_ops.iter().rev() {
            match *op {
                Op::Swap(i, j) => v.swap(i, j),
                Op::Add { dst, src, c } => v[dst] = checked_axpy(v[dst], -c, v[src])?,
                Op::Neg(i) => v[i] = -v[i],
            }
        }
        Ok(())
    }

    /// `R · y`.
    pub fn right(&self, y: &mut [i128]) -> Result<()> {
        for op in self.col_ops.iter().rev() {
            match *op {
                Op::Swap(i, j) => y.swap(i, j),
                Op::Add { dst, src, c } => y[src] = checked_axpy(y[src], c, y[dst])?,
                Op::Neg(i) => y[i] = -y[i],
            }
        }
        Ok(())
    }

    /// `R · y` over the reals reduced mod 1.
    pub fn right_mod_one(&self, y: &mut [f64]) {
        for op in self.col_ops.iter().rev() {
            match *op {
                Op::Swap(i, j) => y.swap(i, j),
                Op::Add { dst, src, c } => y[src] = (y[src] + c as f64 * y[dst]).rem_euclid(1.0),
                Op::Neg(i) => y[i] = (-y[i]).rem_euclid(1.0),
            }
        }
    }

    /// `R · y` reduced mod `m`.
    pub fn right_mod(&self, y: &mut [i128], m: i128) {
        replay_mod(self.col_ops.iter().rev(), y, m, true, false);
    }

    /// `R⁻¹ · x` reduced mod `m`.
    pub fn right_inv_mod(&self, x: &mut [i128], m: i128) {
        replay_mod(self.col_ops.iter(), x, m, true, true);
    }

    /// `R⁻¹ · x`.
    pub fn right_inv(&self, x: &mut [i128]) -> Result<()> {
        for op in &self.col_ops {
            match *op {
                Op::Swap(i, j) => x.swap(i, j),
                Op::Add { dst, src, c } => x[src] = checked_axpy(x[src], -c, x[dst])?,
                Op::Neg(i) => x[i] = -x[i],
            }
        }
        Ok(())
    }

    /// Integer kernel basis: `R e_i` for `i ≥ rank`.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<i128>>> {
        (self.rank..self.cols)
            .map(|i| {
                let mut e = vec![0i128; self.cols];
                e[i] = 1;
                self.right(&mut e)?;
                Ok(e)
            })
            .collect()
    }

    /// An integer solution of `A x = b`, or `None`. Free coordinates are 0.
    pub fn solve(&self, b: &[i128]) -> Result<Option<Vec<i128>>> {
        let mut w = b.to_vec();
        self.left(&mut w)?;
        let mut y = vec![0i128; self.cols];
        for i in 0..self.rows {
            if i < self.rank {
                if w[i] % self.diag[i] != 0 {
                    return Ok(None);
                }
                y[i] = w[i] / self.diag[i];
            } else if w[i] != 0 {
                return Ok(None);
            }
        }
        self.right(&mut y)?;
        Ok(Some(y))
    }

    /// A real solution of `A x ≡ b (mod 1)`, or `None` when some reduced
    /// row is farther than `tol` from an integer. Free coordinates are 0.
    pub fn solve_mod_one(&self, b: &[f64], tol: f64) -> Option<Vec<f64>> {
        let mut w: Vec<f64> = b.iter().map(|x| x.rem_euclid(1.0)).collect();
        self.left_mod_one(&mut w);
        if w[self.rank..].iter().any(|&x| x.min(1.0 - x) > tol) {
            return None;
        }
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rank {
            y[i] = w[i] / self.diag[i] as f64;
        }
        self.right_mod_one(&mut y);
        Some(y)
    }
}

/// Replays operations mod `m`. `transpose` swaps the roles of `dst` and
/// `src` (column logs act on coordinates transposed); `negate` flips the
/// sign of each addition.
fn replay_mod<'a>(
    ops: impl Iterator<Item = &'a Op>,
    v: &mut [i128],
    m: i128,
    transpose: bool,
    negate: bool,
) {
    for x in v.iter_mut() {
        *x = x.rem_euclid(m);
    }
    for op in ops {
        match *op {
            Op::Swap(i, j) => v.swap(i, j),
            Op::Add { dst, src, c } => {
                let (to, from) = if transpose { (src, dst) } else { (dst, src) };
                let c = if negate { -c } else { c }.rem_euclid(m);
                v[to] = (v[to] + mulmod(c, v[from], m)).rem_euclid(m);
            }
            Op::Neg(i) => v[i] = (-v[i]).rem_euclid(m),
        }
    }
}

fn mulmod(a: i128, b: i128, m: i128) -> i128 {
    match a.checked_mul(b) {
        Some(p) => p.rem_euclid(m),
        None => {
            // Double-and-add for moduli beyond 2^63.
            let (mut a, mut b, mut acc) = (a.rem_euclid(m), b.rem_euclid(m), 0i128);
            while b > 0 {
                if b & 1 == 1 {
                    acc = (acc + a) % m;
                }
                a = (a + a) % m;
                b >>= 1;
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i128]]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn mod_one_solve() {
        // 2x = 0.5, x + y = 0.25 (mod 1).
        let a = mat(&[&[2, 0], &[1, 1]]);
        let s = Smith::compute(&a).unwrap();
        let x = s.solve_mod_one(&[0.5, 0.25], 1e-12).unwrap();
        let r = [(2.0 * x[0] - 0.5).rem_euclid(1.0), (x[0] + x[1] - 0.25).rem_euclid(1.0)];
        assert!(r.iter().all(|v| v.min(1.0 - v) < 1e-12));
        // x = 0.1 and x = 0.2 together are infeasible.
        let s = Smith::compute(&mat(&[&[1], &[1]])).unwrap();
        assert!(s.solve_mod_one(&[0.1, 0.2], 1e-9).is_none());
    }

    #[test]
    fn known_invariants() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = Smith::compute(&a).unwrap();
        assert_eq!(s.invariants(), &[2, 6, 12]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = Smith::compute(&IntMatrix::zeros(3, 2)).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.kernel_basis().unwrap().len(), 2);
    }

    proptest! {
        #[test]
        fn transforms_reproduce_diagonal(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-4i128..5, 36)) {
            let mut a = IntMatrix::zeros(rows, cols);
            for i in 0..rows { for j in 0..cols { a.set(i, j, seed[i * 6 + j]); } }
            let s = Smith::compute(&a).unwrap();
            // Check L A R e_j = d_j e_j column by column.
            for j in 0..cols {
                let mut e = vec![0i128; cols];
                e[j] = 1;
                s.right(&mut e).unwrap();
                let mut col = a.mul_vec(&e).unwrap();
                s.left(&mut col).unwrap();
                for i in 0..rows {
                    let want = if i == j && j < s.rank() { s.invariants()[j] } else { 0 };
                    prop_assert_eq!(col[i], want);
                }
            }
            for w in s.invariants().windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            // Inverse replays undo forward replays.
            let mut v: Vec<i128> = (0..rows as i128).collect();
            let orig = v.clone();
            s.left(&mut v).unwrap();
            s.left_inv(&mut v).unwrap();
            prop_assert_eq!(&v, &orig);
            let mut x: Vec<i128> = (0..cols as i128).map(|k| 3 * k - 1).collect();
            let origx = x.clone();
            s.right(&mut x).unwrap();
            s.right_inv(&mut x).unwrap();
            prop_assert_eq!(x, origx);
            // Kernel vectors are annihilated.
            for k in s.kernel_basis().unwrap() {
                prop_assert!(a.mul_vec(&k).unwrap().iter().all(|&v| v == 0));
            }
        }
    }
}
