//! Dense matrices over a tower ring, with the elimination kernel used by
//! every lattice computation: Smith reduction with minimal-valuation
//! pivoting and a canonical column-Hermite form.
//!
//! Pivots are chosen with minimal valuation (ties broken row-major), so
//! every in-place update subtracts a quotient times an entry of valuation
//! at least the pivot's: the working matrix stays exact at working
//! precision. Only the accumulated transforms consume guard digits.

use crate::error::{Error, Result};
use crate::localring::{Ring, RingElement};
use crate::modp::FqMat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>, // row-major
}

impl Mat {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> Mat {
        Mat {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Mat {
        let mut m = Mat::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, f: impl Fn(usize, usize) -> RingElement) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            ring: ring.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_i64(ring: &Ring, entries: &[&[i64]]) -> Mat {
        let rows = entries.len();
        let cols = entries[0].len();
        Mat::from_fn(ring, rows, cols, |i, j| ring.from_i64(entries[i][j]))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &RingElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.ring, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn conj(&self) -> Result<Mat> {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = v.conj()?;
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> Result<Mat> {
        Ok(self.conj()?.transpose())
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            *a = a.add(b);
        }
        out
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            *a = a.sub(b);
        }
        out
    }

    pub fn neg(&self) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.neg();
        }
        out
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zero(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &RingElement) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul(c);
        }
        out
    }

    pub fn scale_i64(&self, c: i64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul_i64(c);
        }
        out
    }

    pub fn mul_by_pi_pow(&self, k: u32) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul_by_pi_pow(k);
        }
        out
    }

    pub fn div_by_pi_pow(&self, k: u32) -> Result<Mat> {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.div_by_pi_pow(k)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_zero_cert(&self) -> bool {
        self.data.iter().all(|a| a.is_zero_cert())
    }

    pub fn eq_cert(&self, o: &Mat) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.sub(o).is_zero_cert()
    }

    pub fn cert_truncated(&self) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.cert_truncated();
        }
        out
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        Mat::from_fn(&self.ring, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                o.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn kron(&self, o: &Mat) -> Mat {
        Mat::from_fn(
            &self.ring,
            self.rows * o.rows,
            self.cols * o.cols,
            |i, j| {
                let (i1, i2) = (i / o.rows, i % o.rows);
                let (j1, j2) = (j / o.cols, j % o.cols);
                self.at(i1, j1).mul(o.at(i2, j2))
            },
        )
    }

    pub fn block_diag(ring: &Ring, blocks: &[Mat]) -> Mat {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zero(ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.at(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(&self.ring, rows, cols, |i, j| self.at(r0 + i, c0 + j).clone())
    }

    pub fn col(&self, j: usize) -> Vec<RingElement> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Minimal valuation over all entries; `None` when all entries are zero
    /// at working precision.
    pub fn min_valuation(&self) -> Option<u32> {
        self.data.iter().filter_map(|a| a.valuation()).min()
    }

    /// Matrix trace.
    pub fn trace(&self) -> RingElement {
        assert_eq!(self.rows, self.cols);
        let mut acc = self.ring.zero();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    /// Entry-wise reduction to the residue field.
    pub fn to_residue(&self) -> FqMat {
        let field = self.ring.residue_field();
        let mut out = FqMat::zero(&field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).residue());
            }
        }
        out
    }

    /// Characteristic polynomial by the division-free Berkowitz scheme;
    /// ascending coefficients, monic of degree n.
    pub fn charpoly(&self) -> Vec<RingElement> {
        assert_eq!(self.rows, self.cols);
        let ring = &self.ring;
        let n = self.rows;
        if n == 0 {
            return vec![ring.one()];
        }
        let mut p = vec![ring.one(), self.at(0, 0).neg()];
        for k in 1..n {
            let a = self.at(k, k).clone();
            let row: Vec<RingElement> = (0..k).map(|j| self.at(k, j).clone()).collect();
            let col: Vec<RingElement> = (0..k).map(|i| self.at(i, k).clone()).collect();
            let mut t = vec![ring.one(), a.neg()];
            let mut cur = col.clone();
            for _ in 0..k {
                let mut dot = ring.zero();
                for (x, y) in row.iter().zip(cur.iter()) {
                    dot = dot.add(&x.mul(y));
                }
                t.push(dot.neg());
                let mut next = vec![ring.zero(); k];
                for (i, item) in next.iter_mut().enumerate() {
                    for (j, c) in cur.iter().enumerate() {
                        *item = item.add(&self.at(i, j).mul(c));
                    }
                }
                cur = next;
            }
            let mut newp = vec![ring.zero(); k + 2];
            for (i, ti) in t.iter().enumerate().take(k + 2) {
                for (j, pj) in p.iter().enumerate() {
                    if i + j < k + 2 {
                        newp[i + j] = newp[i + j].add(&ti.mul(pj));
                    }
                }
            }
            p = newp;
        }
        p.reverse();
        p
    }
}

/// Result of Smith reduction: left·m·right = diag(π^{d_1}, ..., π^{d_r}, 0...)
/// with d_1 ≤ d_2 ≤ ... The transforms are unimodular; they are accurate to
/// working precision minus the pivot-exponent budget.
#[derive(Debug, Clone)]
pub struct Snf {
    pub exponents: Vec<u32>,
    pub rank: usize,
    pub left: Mat,
    pub right: Mat,
    pub reduced: Mat,
}

impl Snf {
    pub fn exponent_sum(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Smith reduction over the valuation ring. A remaining all-zero block ends
/// the pivot list (rank < min(rows, cols)); a pivot whose valuation reaches
/// certificate precision is reported as precision exhaustion.
pub fn snf(m: &Mat) -> Result<Snf> {
    let ring = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut work = m.clone();
    let mut left = Mat::identity(&ring, rows);
    let mut right = Mat::identity(&ring, cols);
    let steps = rows.min(cols);
    let mut exponents = vec![];
    for k in 0..steps {
        // minimal-valuation pivot in the remaining block, row-major ties
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(v) = work.at(i, j).valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            break; // all-zero remainder
        };
        if v >= ring.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "pivot valuation {} at certificate precision",
                v
            )));
        }
        swap_rows(&mut work, k, pi);
        swap_rows(&mut left, k, pi);
        swap_cols(&mut work, k, pj);
        swap_cols(&mut right, k, pj);
        // normalize the pivot to exactly π^v
        let unit = work.at(k, k).div_by_pi_pow(v)?;
        let unit_inv = unit.invert()?;
        scale_row(&mut work, k, &unit_inv);
        scale_row(&mut left, k, &unit_inv);
        work.set(k, k, ring.one().mul_by_pi_pow(v));
        // clear the column below/above with row operations
        for i in 0..rows {
            if i == k || work.at(i, k).is_zero() {
                continue;
            }
            let q = work.at(i, k).div_by_pi_pow(v)?;
            row_sub(&mut work, i, k, &q);
            row_sub(&mut left, i, k, &q);
            work.set(i, k, ring.zero());
        }
        // clear the row with column operations
        for j in 0..cols {
            if j == k || work.at(k, j).is_zero() {
                continue;
            }
            let q = work.at(k, j).div_by_pi_pow(v)?;
            col_sub(&mut work, j, k, &q);
            col_sub(&mut right, j, k, &q);
            work.set(k, j, ring.zero());
        }
        exponents.push(v);
    }
    debug_assert!(exponents.windows(2).all(|w| w[0] <= w[1]));
    let rank = exponents.len();
    Ok(Snf {
        exponents,
        rank,
        left,
        right,
        reduced: work,
    })
}

/// Inverse of a square nonsingular matrix, as (integral matrix, d) with
/// m^{-1} = π^{-d} · integral.
pub fn inverse_with_denom(m: &Mat) -> Result<(Mat, u32)> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let s = snf(m)?;
    if s.rank < n {
        return Err(Error::DegenerateForm(
            "matrix is singular at working precision".into(),
        ));
    }
    let dmax = *s.exponents.last().unwrap();
    let ring = m.ring().clone();
    let mut mid = Mat::zero(&ring, n, n);
    for (i, d) in s.exponents.iter().enumerate() {
        mid.set(i, i, ring.one().mul_by_pi_pow(dmax - d));
    }
    Ok((s.right.mul(&mid).mul(&s.left), dmax))
}

/// Canonical column Hermite form of a full-row-rank matrix: returns the
/// lower-triangular n×n basis with diagonal π^{a_i}, zeros to the right of
/// each pivot, and canonically reduced entries to the left. Output entries
/// are truncated to certificate precision, making the form bit-canonical.
pub fn hnf(m: &Mat) -> Result<Mat> {
    let ring = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    assert!(cols >= rows, "need at least as many generators as rank");
    let mut work = m.clone();
    for r in 0..rows {
        let mut best: Option<(u32, usize)> = None;
        for j in r..cols {
            if let Some(v) = work.at(r, j).valuation() {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, j));
                }
            }
        }
        let Some((v, pj)) = best else {
            return Err(Error::PrecisionExhausted(format!(
                "no pivot in row {}: generators do not span",
                r
            )));
        };
        if v >= ring.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "pivot valuation {} at certificate precision",
                v
            )));
        }
        swap_cols(&mut work, r, pj);
        let unit = work.at(r, r).div_by_pi_pow(v)?;
        let unit_inv = unit.invert()?;
        scale_col(&mut work, r, &unit_inv);
        work.set(r, r, ring.one().mul_by_pi_pow(v));
        for j in 0..cols {
            if j == r {
                continue;
            }
            let entry = work.at(r, j).clone();
            if entry.is_zero() {
                continue;
            }
            if j > r {
                // eliminate completely
                let q = entry.div_by_pi_pow(v)?;
                col_sub(&mut work, j, r, &q);
                work.set(r, j, ring.zero());
            } else {
                // reduce canonically mod π^v
                let rem = entry.canonical_mod_pi_pow(v);
                let q = entry.sub(&rem).div_by_pi_pow(v)?;
                col_sub(&mut work, j, r, &q);
                work.set(r, j, rem);
            }
        }
    }
    for j in rows..cols {
        for i in 0..rows {
            if !work.at(i, j).is_zero_cert() {
                return Err(Error::PrecisionExhausted(
                    "leftover generator column is not zero".into(),
                ));
            }
        }
    }
    Ok(work.submatrix(0, 0, rows, rows).cert_truncated())
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let x = m.at(a, j).clone();
        let y = m.at(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn scale_row(m: &mut Mat, r: usize, c: &RingElement) {
    for j in 0..m.cols() {
        let v = m.at(r, j).mul(c);
        m.set(r, j, v);
    }
}

fn scale_col(m: &mut Mat, col: usize, c: &RingElement) {
    for i in 0..m.rows() {
        let v = m.at(i, col).mul(c);
        m.set(i, col, v);
    }
}

/// row_a -= q · row_b
fn row_sub(m: &mut Mat, a: usize, b: usize, q: &RingElement) {
    for j in 0..m.cols() {
        let v = m.at(a, j).sub(&q.mul(m.at(b, j)));
        m.set(a, j, v);
    }
}

/// col_a -= q · col_b
fn col_sub(m: &mut Mat, a: usize, b: usize, q: &RingElement) {
    for i in 0..m.rows() {
        let v = m.at(i, a).sub(&q.mul(m.at(i, b)));
        m.set(i, a, v);
    }
}
