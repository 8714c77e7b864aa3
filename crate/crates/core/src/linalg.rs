//! Exact rational matrices and the elimination kernel.
//!
//! Rank, solve and inverse go through fraction-free (Bareiss) elimination:
//! each row of the rational input is scaled to integers by the lcm of its
//! denominators, eliminated with exact integer division, and divided out once
//! at the end. Every intermediate value is a minor of the scaled input, so the
//! integers stay small and no fraction is ever reduced mid-elimination.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::perm::Permutation;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("{0}")]
    NotBistochastic(#[from] BistochasticError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BistochasticError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: Rational },
    #[error("row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: Rational },
    #[error("column {col} sums to {sum}, not 1")]
    ColumnSum { col: usize, sum: Rational },
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        RationalMatrix { rows, cols, entries }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RationalMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| Rational::from(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.row_iter().map(<[Rational]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: rhs.shape() });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: (v.len(), 1) });
        }
        Ok(self
            .row_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    pub fn add(&self, rhs: &RationalMatrix) -> Result<Self, LinalgError> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: rhs.shape() });
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(A Bᵀ)`: the entrywise dot product.
    pub fn frobenius_inner(&self, rhs: &RationalMatrix) -> Result<Rational, LinalgError> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: rhs.shape() });
        }
        Ok(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a * b).sum())
    }

    pub fn rank(&self) -> usize {
        let mut rows = integer_rows(self, None);
        bareiss_rank(&mut rows)
    }

    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let scales: Vec<BigInt> = (0..self.rows).map(|i| row_lcm(self.row(i), &[])).collect();
        let mut rows = integer_rows(self, None);
        let det = match bareiss_forward(&mut rows, self.cols) {
            Ok(det) => det,
            Err(LinalgError::Singular) => return Ok(Rational::zero()),
            Err(e) => return Err(e),
        };
        let scale: BigInt = scales.iter().product();
        Ok(Rational::new(det, scale))
    }

    /// Exact solution of `self · x = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        if rhs.len() != self.rows {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: (rhs.len(), 1) });
        }
        let b = RationalMatrix::from_entries(rhs.len(), 1, rhs.to_vec());
        Ok(self.solve_many(&b)?.entries)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        self.solve_many(&RationalMatrix::identity(self.rows))
    }

    fn solve_many(&self, rhs: &RationalMatrix) -> Result<Self, LinalgError> {
        let n = self.rows;
        let k = rhs.cols;
        let mut rows = integer_rows(self, Some(rhs));
        let (det, numers) = bareiss_solve(&mut rows, n)?;
        let mut out = Self::zeros(n, k);
        for (i, row) in numers.into_iter().enumerate() {
            for (j, num) in row.into_iter().enumerate() {
                out.entries[i * k + j] = Rational::new(num, det.clone());
            }
        }
        Ok(out)
    }

    /// `n×n` 0/1 flattenings of `perms`, one per row.
    pub fn flattenings(perms: &[Permutation]) -> Self {
        let n = perms.first().map_or(0, Permutation::len);
        let mut m = Self::zeros(perms.len(), n * n);
        for (r, p) in perms.iter().enumerate() {
            for i in 0..n {
                m.entries[r * n * n + i * n + p.apply(i)] = Rational::one();
            }
        }
        m
    }
}

impl fmt::Display for RationalMatrix {
    /// The matrix text format: one row per line, whitespace separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_iter() {
            let cells: Vec<String> = row.iter().map(Rational::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .row_iter()
            .map(|r| r.iter().map(Rational::to_string).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.row_iter())
    }
}

/// A nonzero `v` with `m · v = 0`, or `None` when the columns are independent.
///
/// Gauss–Jordan on the columns; the first free column gets coefficient 1 and
/// later free columns 0, so the result is deterministic.
pub fn kernel_vector(m: &RationalMatrix) -> Option<Vec<Rational>> {
    let (rows, cols) = m.shape();
    let mut a = m.to_rows();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    let mut free = None;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            free.get_or_insert(c);
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip().expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let delta = &f * &a[r][j];
                    a[i][j] -= &delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = free?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (k, &pc) in pivot_cols.iter().enumerate() {
        if pc < free {
            v[pc] = -&a[k][free];
        }
    }
    Some(v)
}

/// The flattenings of a set of permutation matrices are linearly independent.
pub fn linear_independent(perms: &[Permutation]) -> bool {
    if perms.is_empty() {
        return true;
    }
    let mut basis = IncrementalBasis::<i128>::new(perms[0].len().pow(2));
    perms.iter().all(|p| basis.push(&perm_vector(p, false)))
}

/// No nonzero coefficient vector summing to zero annihilates the set.
/// Checked as linear independence of the flattenings augmented by a 1.
pub fn affine_independent(perms: &[Permutation]) -> bool {
    if perms.is_empty() {
        return true;
    }
    let mut basis = IncrementalBasis::<i128>::new(perms[0].len().pow(2) + 1);
    perms.iter().all(|p| basis.push(&perm_vector(p, true)))
}

pub(crate) fn perm_vector<T: ExactInt>(p: &Permutation, augmented: bool) -> Vec<T> {
    let n = p.len();
    let mut v = vec![T::zero(); n * n + usize::from(augmented)];
    for i in 0..n {
        v[i * n + p.apply(i)] = T::one();
    }
    if augmented {
        v[n * n] = T::one();
    }
    v
}

/// A square rational matrix with nonnegative entries and unit row and column sums.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BistochasticMatrix {
    inner: RationalMatrix,
}

impl BistochasticMatrix {
    /// Validates exactly; errors carry 1-indexed row/column positions.
    pub fn new(m: RationalMatrix) -> Result<Self, BistochasticError> {
        if !m.is_square() {
            return Err(BistochasticError::NotSquare { rows: m.rows, cols: m.cols });
        }
        if m.rows == 0 {
            return Err(BistochasticError::Empty);
        }
        let n = m.rows;
        for i in 0..n {
            for j in 0..n {
                if m.get(i, j).is_negative() {
                    return Err(BistochasticError::NegativeEntry {
                        row: i + 1,
                        col: j + 1,
                        value: m.get(i, j).clone(),
                    });
                }
            }
        }
        for i in 0..n {
            let sum: Rational = m.row(i).iter().sum();
            if !sum.is_one() {
                return Err(BistochasticError::RowSum { row: i + 1, sum });
            }
        }
        for j in 0..n {
            let sum: Rational = (0..n).map(|i| m.get(i, j)).sum();
            if !sum.is_one() {
                return Err(BistochasticError::ColumnSum { col: j + 1, sum });
            }
        }
        Ok(BistochasticMatrix { inner: m })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, BistochasticError> {
        Self::new(RationalMatrix::from_rows(rows))
    }

    /// `scale · rows`, e.g. `(1/6)·[[3,3,0,0],…]`.
    pub fn from_scaled_integers<R: AsRef<[i64]>>(
        scale: Rational,
        rows: &[R],
    ) -> Result<Self, BistochasticError> {
        Self::new(RationalMatrix::from_integers(rows).scale(&scale))
    }

    pub fn identity(n: usize) -> Self {
        BistochasticMatrix { inner: RationalMatrix::identity(n) }
    }

    /// `J_n`, every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        let v = Rational::new(1, n as i64);
        BistochasticMatrix { inner: RationalMatrix::from_entries(n, n, vec![v; n * n]) }
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        let n = p.len();
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, p.apply(i), Rational::one());
        }
        BistochasticMatrix { inner: m }
    }

    /// `Σ wᵢ·P_{πᵢ}`; the weights must be nonnegative and sum to one.
    pub fn convex_combination<'a>(
        terms: impl IntoIterator<Item = (&'a Rational, &'a Permutation)>,
    ) -> Result<Self, BistochasticError> {
        let mut terms = terms.into_iter().peekable();
        let n = terms.peek().map_or(0, |(_, p)| p.len());
        let mut m = RationalMatrix::zeros(n, n);
        for (w, p) in terms {
            for i in 0..n {
                let j = p.apply(i);
                let v = m.get(i, j) + w;
                m.set(i, j, v);
            }
        }
        Self::new(m)
    }

    /// Skips validation; callers guarantee the invariant by construction.
    pub(crate) fn new_unchecked(m: RationalMatrix) -> Self {
        debug_assert!(Self::new(m.clone()).is_ok());
        BistochasticMatrix { inner: m }
    }

    pub fn n(&self) -> usize {
        self.inner.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &RationalMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> RationalMatrix {
        self.inner
    }

    pub fn trace(&self) -> Rational {
        self.inner.trace()
    }

    /// `⟨A, P_σ⟩ = Σᵢ A[i][σ(i)]`.
    pub fn diagonal_sum(&self, sigma: &Permutation) -> Rational {
        (0..self.n()).map(|i| self.get(i, sigma.apply(i))).sum()
    }

    /// `P A Q` written as `A[row_perm(i)][col_perm(j)]` at `(i, j)`.
    pub fn permute(&self, row_perm: &Permutation, col_perm: &Permutation) -> Self {
        let n = self.n();
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.get(row_perm.apply(i), col_perm.apply(j)).clone());
            }
        }
        BistochasticMatrix { inner: m }
    }

    pub fn transpose(&self) -> Self {
        BistochasticMatrix { inner: self.inner.transpose() }
    }
}

impl fmt::Display for BistochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.inner, f)
    }
}

impl fmt::Debug for BistochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.inner, f)
    }
}

impl Serialize for BistochasticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.inner.serialize(s)
    }
}

impl TryFrom<RationalMatrix> for BistochasticMatrix {
    type Error = BistochasticError;
    fn try_from(m: RationalMatrix) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

// ---------------------------------------------------------------------------
// Fraction-free elimination
// ---------------------------------------------------------------------------

/// Integer type usable by the Bareiss kernel. Fixed-width implementations
/// report overflow with `None` so callers can retry on `BigInt`.
pub trait ExactInt: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// `(a·b − c·d) / e`, where the division is known to be exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self>;
    fn checked_mul(&self, rhs: &Self) -> Option<Self>;
    fn checked_add(&self, rhs: &Self) -> Option<Self>;
    fn checked_sub(&self, rhs: &Self) -> Option<Self>;
    fn exact_div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl ExactInt for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    #[inline]
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        let v = i128::checked_mul(*a, *b)?.checked_sub(i128::checked_mul(*c, *d)?)?;
        debug_assert_eq!(v % e, 0);
        Some(v / e)
    }
    fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        i128::checked_mul(*self, *rhs)
    }
    fn checked_add(&self, rhs: &Self) -> Option<Self> {
        i128::checked_add(*self, *rhs)
    }
    fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        i128::checked_sub(*self, *rhs)
    }
    fn exact_div(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self % rhs, 0);
        self / rhs
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        let v = a * b - c * d;
        debug_assert!(Zero::is_zero(&(&v % e)));
        Some(v / e)
    }
    fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn checked_add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn row_lcm(row: &[Rational], extra: &[Rational]) -> BigInt {
    row.iter()
        .chain(extra)
        .fold(<BigInt as One>::one(), |acc, v| acc.lcm(v.denom()))
}

/// Each row (with the matching `rhs` row appended) scaled by the lcm of its
/// denominators.
fn integer_rows(m: &RationalMatrix, rhs: Option<&RationalMatrix>) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let extra = rhs.map_or(&[][..], |r| r.row(i));
            let scale = row_lcm(m.row(i), extra);
            m.row(i)
                .iter()
                .chain(extra)
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect()
        })
        .collect()
}

fn bareiss_rank<T: ExactInt>(rows: &mut [Vec<T>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                row[j] = T::cross_div(&pivot_row[c], &row[j], &factor, &pivot_row[j], &prev)
                    .expect("BigInt elimination cannot overflow");
            }
            row[c] = T::zero();
        }
        prev = rows[r][c].clone();
        r += 1;
    }
    r
}

/// Forward Bareiss on the leading `n` columns of `rows` (extra columns are
/// carried along). Returns the determinant, sign-corrected for row swaps.
fn bareiss_forward<T: ExactInt>(rows: &mut [Vec<T>], n: usize) -> Result<T, LinalgError> {
    try_bareiss_forward(rows, n).expect("BigInt elimination cannot overflow")
}

fn try_bareiss_forward<T: ExactInt>(
    rows: &mut [Vec<T>],
    n: usize,
) -> Option<Result<T, LinalgError>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut prev = T::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !rows[i][k].is_zero()) else {
            return Some(Err(LinalgError::Singular));
        };
        if p != k {
            rows.swap(k, p);
            negate = !negate;
        }
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail[..n - k - 1].iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..width {
                row[j] = T::cross_div(&pivot_row[k], &row[j], &factor, &pivot_row[j], &prev)?;
            }
            row[k] = T::zero();
        }
        prev = rows[k][k].clone();
    }
    let det = if n == 0 { T::one() } else { rows[n - 1][n - 1].clone() };
    Some(Ok(if negate { det.neg()? } else { det }))
}

/// Solves the augmented system `rows = [A | B]` (A is `n×n`). Returns
/// `(d, X)` with `A⁻¹B = X / d`; `d` is `±det A` after row scaling and `X`
/// is integral by Cramer's rule.
fn bareiss_solve<T: ExactInt>(
    rows: &mut [Vec<T>],
    n: usize,
) -> Result<(T, Vec<Vec<T>>), LinalgError> {
    try_bareiss_solve(rows, n).expect("BigInt elimination cannot overflow")
}

#[allow(clippy::type_complexity)]
pub(crate) fn try_bareiss_solve<T: ExactInt>(
    rows: &mut [Vec<T>],
    n: usize,
) -> Option<Result<(T, Vec<Vec<T>>), LinalgError>> {
    if let Err(e) = try_bareiss_forward(rows, n)? {
        return Some(Err(e));
    }
    let width = rows.first().map_or(n, Vec::len);
    let k = width - n;
    if n == 0 {
        return Some(Ok((T::one(), Vec::new())));
    }
    // Unsigned by row swaps: the pivot of the triangular system itself.
    let d = rows[n - 1][n - 1].clone();
    let mut x = vec![vec![T::zero(); k]; n];
    for c in 0..k {
        for i in (0..n).rev() {
            let mut acc = d.checked_mul(&rows[i][n + c])?;
            for j in i + 1..n {
                acc = acc.checked_sub(&rows[i][j].checked_mul(&x[j][c])?)?;
            }
            x[i][c] = acc.exact_div(&rows[i][i]);
        }
    }
    Some(Ok((d, x)))
}

/// Solves `M y = 1` for a square integer matrix, returning `(d, u)` with
/// `y = u / d` and `d > 0`. Tries `i128` first and falls back to `BigInt`.
pub fn solve_integer_ones(m: &[Vec<i64>]) -> Result<(BigInt, Vec<BigInt>), LinalgError> {
    let n = m.len();
    if let Some(r) = m.iter().find(|r| r.len() != n) {
        return Err(LinalgError::NotSquare(n, r.len()));
    }
    let mut small: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).chain([1]).collect())
        .collect();
    let solved = match try_bareiss_solve(&mut small, n) {
        Some(res) => {
            let (d, x) = res?;
            (d.to_big(), x.into_iter().map(|r| r[0].to_big()).collect::<Vec<_>>())
        }
        None => {
            let mut big: Vec<Vec<BigInt>> = m
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).chain([<BigInt as One>::one()]).collect())
                .collect();
            let (d, x) = bareiss_solve(&mut big, n)?;
            (d, x.into_iter().map(|mut r| r.swap_remove(0)).collect())
        }
    };
    let (d, u) = solved;
    if Signed::is_negative(&d) {
        Ok((-d, u.into_iter().map(|v| -v).collect()))
    } else {
        Ok((d, u))
    }
}

/// Echelon basis grown one vector at a time, using the Bareiss recurrence so
/// that row `k` is stored exactly as it stands after `k` elimination stages.
/// Every stored entry is a minor of the input vectors.
#[derive(Debug, Clone)]
pub struct IncrementalBasis<T> {
    dim: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    scratch: Vec<T>,
}

impl<T: ExactInt> IncrementalBasis<T> {
    pub fn new(dim: usize) -> Self {
        IncrementalBasis { dim, rows: Vec::new(), pivots: Vec::new(), scratch: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eliminates `v` against the basis into the scratch buffer; true if a
    /// nonzero residual remains (i.e. `v` is outside the span).
    fn reduce(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        self.scratch.clear();
        self.scratch.extend_from_slice(v);
        let mut prev = T::one();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let factor = self.scratch[c].clone();
            let pivot = &row[c];
            for j in 0..self.dim {
                self.scratch[j] = T::cross_div(pivot, &self.scratch[j], &factor, &row[j], &prev)
                    .expect("basis entries are bounded minors");
            }
            prev = pivot.clone();
        }
        self.scratch.iter().any(|x| !x.is_zero())
    }

    pub fn is_independent_of(&mut self, v: &[T]) -> bool {
        self.reduce(v)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was added.
    pub fn push(&mut self, v: &[T]) -> bool {
        if !self.reduce(v) {
            return false;
        }
        let c = self.scratch.iter().position(|x| !x.is_zero()).unwrap();
        self.rows.push(self.scratch.clone());
        self.pivots.push(c);
        true
    }

    pub fn truncate(&mut self, rank: usize) {
        self.rows.truncate(rank);
        self.pivots.truncate(rank);
    }
}
