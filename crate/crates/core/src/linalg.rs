//! Dense matrices over a [`Scalar`] with deterministic elimination.
//!
//! Exact scalars pivot on the first nonzero entry in column order; floats use
//! scaled partial pivoting and treat pivots below `rel_tol · max column norm`
//! as zero.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

/// Relative tolerance for float equality tests outside elimination.
pub const FLOAT_EQ_TOL: f64 = 1e-9;

/// Numerical rank policy for float elimination. Ignored for exact scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy {
    pub rel_tol: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy { rel_tol: 1e-8 }
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|v| v.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| S::from_i64(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn diag(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
    }

    /// Column matrix from a vector.
    pub fn column(v: &[S]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<S>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn try_mul(&self, other: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Matrix<S> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    fn zip_with(&self, other: &Matrix<S>, f: impl Fn(S, S) -> S) -> Matrix<S> {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a.clone(), b.clone())).collect(),
        }
    }

    /// Stacks matrices with equal column counts vertically.
    pub fn vstack(blocks: &[Matrix<S>]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        assert!(blocks.iter().all(|b| b.cols == cols), "vstack column mismatch");
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Matrix { rows, cols, data }
    }

    /// Concatenates matrices with equal row counts horizontally.
    pub fn hstack(blocks: &[Matrix<S>]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        assert!(blocks.iter().all(|b| b.rows == rows), "hstack row mismatch");
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<S>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    /// Equality: exact for exact scalars, otherwise entrywise within
    /// [`FLOAT_EQ_TOL`]·max(1, largest entry).
    pub fn same(&self, other: &Matrix<S>) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        if S::EXACT {
            return self == other;
        }
        let scale = self.data.iter().chain(&other.data).map(|x| x.to_f64().abs()).fold(1.0, f64::max);
        self.max_abs_diff(other) <= FLOAT_EQ_TOL * scale
    }

    /// Largest entrywise absolute difference, in floating point.
    pub fn max_abs_diff(&self, other: &Matrix<S>) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a.clone() - b.clone()).to_f64().abs()).fold(0.0, f64::max)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, S: Scalar> Mul for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a, S: Scalar> Add for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a, S: Scalar> Sub for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon<S> {
    pub rref: Matrix<S>,
    pub pivots: Vec<usize>,
}

fn col_norm_max(m: &Matrix<f64>, ncols: usize) -> f64 {
    (0..ncols).map(|j| (0..m.rows).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

/// Gauss–Jordan elimination. Only the first `pivot_cols` columns may hold pivots
/// (used for augmented systems); the float threshold is computed from those columns.
fn eliminate<S: Scalar>(m: &Matrix<S>, pivot_cols: usize, policy: RankPolicy) -> Echelon<S> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let (threshold, mut row_scale) = if S::EXACT {
        (0.0, Vec::new())
    } else {
        let f = m.to_f64();
        let thr = policy.rel_tol * col_norm_max(&f, pivot_cols);
        let scales: Vec<f64> =
            (0..rows).map(|i| (0..pivot_cols).map(|j| f[(i, j)].abs()).fold(0.0, f64::max)).collect();
        (thr, scales)
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let choice = if S::EXACT {
            (r..rows).find(|&i| !a[(i, c)].is_zero())
        } else {
            let mut best: Option<(usize, f64)> = None;
            for i in r..rows {
                let v = a[(i, c)].to_f64().abs();
                if v <= threshold {
                    continue;
                }
                let s = if row_scale[i] > 0.0 { v / row_scale[i] } else { v };
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            best.map(|(i, _)| i)
        };
        let Some(p) = choice else {
            if !S::EXACT {
                for i in r..rows {
                    a[(i, c)] = S::zero();
                }
            }
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
            if !S::EXACT {
                row_scale.swap(p, r);
            }
        }
        let inv = a[(r, c)].inv().expect("pivot is nonzero");
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                a[(i, j)] = a[(i, j)].clone() - factor.clone() * a[(r, j)].clone();
            }
            if !S::EXACT {
                a[(i, c)] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rref: a, pivots }
}

pub fn echelon<S: Scalar>(m: &Matrix<S>, policy: RankPolicy) -> Echelon<S> {
    eliminate(m, m.cols, policy)
}

pub fn rank_with<S: Scalar>(m: &Matrix<S>, policy: RankPolicy) -> usize {
    echelon(m, policy).pivots.len()
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    rank_with(m, RankPolicy::default())
}

pub fn kernel_basis_with<S: Scalar>(m: &Matrix<S>, policy: RankPolicy) -> Vec<Vec<S>> {
    let e = echelon(m, policy);
    let mut is_pivot = vec![false; m.cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..m.cols).filter(|&j| !is_pivot[j]) {
        let mut v = vec![S::zero(); m.cols];
        v[f] = S::one();
        for (i, &p) in e.pivots.iter().enumerate() {
            v[p] = -e.rref[(i, f)].clone();
        }
        out.push(v);
    }
    out
}

pub fn kernel_basis<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<S>> {
    kernel_basis_with(m, RankPolicy::default())
}

/// One solution of m·x = b with free variables set to zero, or `None` if inconsistent.
pub fn solve_with<S: Scalar>(m: &Matrix<S>, b: &[S], policy: RankPolicy) -> Result<Option<Vec<S>>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let aug = Matrix::hstack(&[m.clone(), Matrix::column(b)]);
    let e = eliminate(&aug, m.cols, policy);
    let rank = e.pivots.len();
    let tail_bad = if S::EXACT {
        (rank..m.rows).any(|i| !e.rref[(i, m.cols)].is_zero())
    } else {
        let bnorm = b.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        let scale = col_norm_max(&m.to_f64(), m.cols).max(bnorm).max(1e-300);
        (rank..m.rows).any(|i| e.rref[(i, m.cols)].to_f64().abs() > policy.rel_tol * scale)
    };
    if tail_bad {
        return Ok(None);
    }
    let mut x = vec![S::zero(); m.cols];
    for (i, &p) in e.pivots.iter().enumerate() {
        x[p] = e.rref[(i, m.cols)].clone();
    }
    Ok(Some(x))
}

pub fn solve<S: Scalar>(m: &Matrix<S>, b: &[S]) -> Result<Option<Vec<S>>, LinalgError> {
    solve_with(m, b, RankPolicy::default())
}

pub fn det<S: Scalar>(m: &Matrix<S>) -> Result<S, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut acc = S::one();
    for c in 0..n {
        let p = if S::EXACT {
            (c..n).find(|&i| !a[(i, c)].is_zero())
        } else {
            (c..n)
                .filter(|&i| !a[(i, c)].is_zero())
                .max_by(|&i, &j| a[(i, c)].to_f64().abs().total_cmp(&a[(j, c)].to_f64().abs()))
        };
        let Some(p) = p else { return Ok(S::zero()) };
        if p != c {
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
            }
            acc = -acc;
        }
        let piv = a[(c, c)].clone();
        let inv = piv.inv().expect("nonzero pivot");
        acc = acc * piv;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone() * inv.clone();
            for j in c..n {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
            }
        }
    }
    Ok(acc)
}

pub fn inverse<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    let n = m.rows;
    let aug = Matrix::hstack(&[m.clone(), Matrix::identity(n)]);
    let e = eliminate(&aug, n, RankPolicy { rel_tol: 0.0 });
    if e.pivots.len() < n {
        return Err(LinalgError::Singular);
    }
    Ok(Matrix::from_fn(n, n, |i, j| e.rref[(i, n + j)].clone()))
}

/// Rank of the span of a list of vectors of common length.
pub fn span_rank<S: Scalar>(vectors: &[Vec<S>], len: usize, policy: RankPolicy) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank_with(&Matrix::from_columns(len, vectors), policy)
}
