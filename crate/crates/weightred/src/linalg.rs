//! Dense exact linear algebra over any tower level.
//!
//! Everything is exact: there are no tolerances, and subspaces carry a
//! canonical reduced-echelon basis so that equality of subspaces is plain
//! data equality.

use crate::error::{Error, Result};
use crate::gf::{FieldTower, Level};

/// Row-major dense matrix with entries stored as field codes at `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub level: Level,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Mat {
    pub fn zeros(level: Level, rows: usize, cols: usize) -> Mat {
        Mat {
            level,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(level: Level, n: usize) -> Mat {
        let mut m = Mat::zeros(level, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(level: Level, cols: usize, rows: Vec<Vec<u32>>) -> Mat {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        Mat {
            level,
            rows: r,
            cols,
            data,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Retag to a higher tower level; the code embedding is the identity.
    pub fn lifted(&self, to: Level) -> Mat {
        Mat {
            level: to,
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.level, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn mul(&self, t: &FieldTower, other: &Mat) -> Result<Mat> {
        if self.level != other.level {
            return Err(Error::LevelMismatch);
        }
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.level, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b == 0 {
                        continue;
                    }
                    let prod = t.mul_at(self.level, a, b);
                    let cur = out.at(i, j);
                    out.set(i, j, t.add_at(self.level, cur, prod));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, t: &FieldTower, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0u32; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u32;
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a == 0 || v[j] == 0 {
                    continue;
                }
                acc = t.add_at(self.level, acc, t.mul_at(self.level, a, v[j]));
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, t: &FieldTower, other: &Mat) -> Result<Mat> {
        if self.level != other.level {
            return Err(Error::LevelMismatch);
        }
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| t.add_at(self.level, a, b))
            .collect();
        Ok(Mat {
            level: self.level,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, t: &FieldTower, other: &Mat) -> Result<Mat> {
        if self.level != other.level {
            return Err(Error::LevelMismatch);
        }
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| t.sub_at(self.level, a, b))
            .collect();
        Ok(Mat {
            level: self.level,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, t: &FieldTower, c: u32) -> Mat {
        let data = self
            .data
            .iter()
            .map(|&a| t.mul_at(self.level, a, c))
            .collect();
        Mat {
            level: self.level,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.level != other.level {
            return Err(Error::LevelMismatch);
        }
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            level: self.level,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }
}

/// In-place Gauss-Jordan. Returns the pivot columns.
fn rref_in_place(t: &FieldTower, m: &mut Mat) -> Vec<usize> {
    let lv = m.level;
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m.at(i, c) != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                let a = m.at(r, j);
                let b = m.at(pr, j);
                m.set(r, j, b);
                m.set(pr, j, a);
            }
        }
        let inv = t.inv_at(lv, m.at(r, c));
        for j in c..cols {
            m.set(r, j, t.mul_at(lv, m.at(r, j), inv));
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.at(i, c);
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let v = t.sub_at(lv, m.at(i, j), t.mul_at(lv, f, m.at(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduced row echelon form with leading ones; rank = number of pivots.
pub fn rref(t: &FieldTower, m: &Mat) -> (Mat, usize) {
    let mut w = m.clone();
    let pivots = rref_in_place(t, &mut w);
    (w, pivots.len())
}

pub fn rank(t: &FieldTower, m: &Mat) -> usize {
    rref(t, m).1
}

/// A subspace of F^n, canonically represented by a reduced-echelon basis
/// (zero rows trimmed). Two equal subspaces compare equal as data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    /// rref basis, one vector per row; `basis.rows` is the dimension.
    pub basis: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(level: Level, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: Mat::zeros(level, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(level: Level, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: Mat::identity(level, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_spanning(t: &FieldTower, m: &Mat) -> Subspace {
        let mut w = m.clone();
        let pivots = rref_in_place(t, &mut w);
        let dim = pivots.len();
        w.data.truncate(dim * w.cols);
        w.rows = dim;
        Subspace {
            ambient: m.cols,
            basis: w,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn level(&self) -> Level {
        self.basis.level
    }

    /// Membership test against the echelon basis.
    pub fn contains(&self, t: &FieldTower, v: &[u32]) -> bool {
        self.reduce(t, v).iter().all(|&x| x == 0)
    }

    /// Residual of v after subtracting its projection onto the basis.
    pub fn reduce(&self, t: &FieldTower, v: &[u32]) -> Vec<u32> {
        let lv = self.basis.level;
        let mut w = v.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let f = w[pc];
            if f == 0 {
                continue;
            }
            for j in 0..self.ambient {
                let b = self.basis.at(r, j);
                if b == 0 {
                    continue;
                }
                w[j] = t.sub_at(lv, w[j], t.mul_at(lv, f, b));
            }
        }
        w
    }

    /// Coordinates of a member vector in the echelon basis (pivot reads).
    pub fn coords(&self, t: &FieldTower, v: &[u32]) -> Option<Vec<u32>> {
        if !self.contains(t, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }
}

/// Basis of the right kernel {v : M v = 0}.
pub fn kernel_basis(t: &FieldTower, m: &Mat) -> Subspace {
    let lv = m.level;
    let (r, rank_) = rref(t, m);
    let mut pivots = Vec::new();
    {
        let mut row = 0usize;
        for c in 0..m.cols {
            if row < rank_ && r.at(row, c) != 0 && (0..c).all(|_| true) {
                // leading one detection: first nonzero in this row
                if (0..c).all(|jc| r.at(row, jc) == 0) {
                    pivots.push(c);
                    row += 1;
                }
            }
        }
    }
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0u32; m.cols];
        v[fc] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = t.neg_at(lv, r.at(ri, fc));
        }
        rows.push(v);
    }
    Subspace::from_spanning(t, &Mat::from_rows(lv, m.cols, rows))
}

/// dim ker(M - lambda I), computed at the quartic level.
pub fn eigenspace_dim(t: &FieldTower, m: &Mat, lambda: u32) -> Result<usize> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let mut w = m.lifted(Level::Quartic);
    for i in 0..w.rows {
        let v = t.sub_at(Level::Quartic, w.at(i, i), lambda);
        w.set(i, i, v);
    }
    Ok(w.cols - rank(t, &w))
}

/// Solve M x = b; None when inconsistent.
pub fn solve(t: &FieldTower, m: &Mat, b: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(m.rows, b.len());
    let lv = m.level;
    let mut aug = Mat::zeros(lv, m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.at(i, j));
        }
        aug.set(i, m.cols, b[i]);
    }
    let pivots = rref_in_place(t, &mut aug);
    if pivots.contains(&m.cols) {
        return None;
    }
    let mut x = vec![0u32; m.cols];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.at(ri, m.cols);
    }
    Some(x)
}

pub fn intersect(t: &FieldTower, a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    let lv = a.basis.level;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(lv, a.ambient));
    }
    // Left null space of [A; B]: u A + v B = 0 gives u A in the
    // intersection, and all of it arises this way.
    let stacked = a.basis.vstack(&b.basis)?;
    let null = kernel_basis(t, &stacked.transpose());
    let mut rows = Vec::new();
    for i in 0..null.dim() {
        let coef = &null.basis.row(i)[..a.dim()];
        let mut v = vec![0u32; a.ambient];
        for (k, &c) in coef.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for j in 0..a.ambient {
                let bv = a.basis.at(k, j);
                if bv == 0 {
                    continue;
                }
                v[j] = t.add_at(lv, v[j], t.mul_at(lv, c, bv));
            }
        }
        rows.push(v);
    }
    Ok(Subspace::from_spanning(
        t,
        &Mat::from_rows(lv, a.ambient, rows),
    ))
}

pub fn sum(t: &FieldTower, a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    Ok(Subspace::from_spanning(t, &a.basis.vstack(&b.basis)?))
}

/// The canonical projection F^ambient -> F^ambient/S as an explicit
/// (ambient - dim S) x ambient matrix, together with a section (a right
/// inverse; it is linear but not equivariant for any module structure).
pub struct QuotientMap {
    pub proj: Mat,
    pub section: Mat,
    pub free_cols: Vec<usize>,
}

pub fn quotient_map(t: &FieldTower, s: &Subspace) -> QuotientMap {
    let lv = s.basis.level;
    let n = s.ambient;
    let free: Vec<usize> = (0..n).filter(|c| !s.pivots.contains(c)).collect();
    let k = free.len();
    let mut proj = Mat::zeros(lv, k, n);
    // pi(e_i): reduce e_i mod S, then read the free coordinates.
    for (a, &fc) in free.iter().enumerate() {
        proj.set(a, fc, 1);
    }
    for (ri, &pc) in s.pivots.iter().enumerate() {
        // e_pc reduces to e_pc - basis_row(ri); pivot coords vanish.
        for (a, &fc) in free.iter().enumerate() {
            let v = t.neg_at(lv, s.basis.at(ri, fc));
            proj.set(a, pc, v);
        }
    }
    let mut section = Mat::zeros(lv, n, k);
    for (a, &fc) in free.iter().enumerate() {
        section.set(fc, a, 1);
    }
    QuotientMap {
        proj,
        section,
        free_cols: free,
    }
}
