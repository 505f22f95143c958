use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, Neg};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A fixed-length vector of arbitrary-precision integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn unit(len: usize, j: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[j] = BigInt::from(1);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [BigInt] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|e| !e.is_negative())
    }

    pub fn norm1(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn max_norm(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    pub fn dot(&self, other: &IntVector) -> Result<BigInt> {
        Error::check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn checked_add(&self, other: &IntVector) -> Result<IntVector> {
        Error::check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &IntVector) -> Result<IntVector> {
        Error::check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + factor * other`; lengths must agree.
    pub fn add_scaled(&self, factor: &BigInt, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len(), "add_scaled length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a + factor * b)
            .collect()
    }

    pub fn concat(parts: &[&IntVector]) -> IntVector {
        parts.iter().flat_map(|p| p.0.iter().cloned()).collect()
    }

    pub fn slice(&self, start: usize, len: usize) -> IntVector {
        IntVector(self.0[start..start + len].to_vec())
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn within(&self, lower: &IntVector, upper: &IntVector) -> bool {
        self.len() == lower.len()
            && self.len() == upper.len()
            && self
                .0
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(x, (l, u))| l <= x && x <= u)
    }
}

/// Canonical ordering of emitted vector sets: lexicographically decreasing.
pub fn canonical_cmp(a: &IntVector, b: &IntVector) -> Ordering {
    b.cmp(a)
}

pub fn sort_canonical(vectors: &mut [IntVector]) {
    vectors.sort_by(canonical_cmp);
}

impl FromIterator<BigInt> for IntVector {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        IntVector(iter.into_iter().collect())
    }
}

impl From<Vec<BigInt>> for IntVector {
    fn from(v: Vec<BigInt>) -> Self {
        IntVector(v)
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;

    fn index(&self, j: usize) -> &BigInt {
        &self.0[j]
    }
}

impl Neg for &IntVector {
    type Output = IntVector;

    fn neg(self) -> IntVector {
        self.0.iter().map(|e| -e).collect()
    }
}

impl<'a> IntoIterator for &'a IntVector {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, e) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        m
    }

    /// Builds from nested rows; all rows must have the same length.
    /// `cols` is only consulted when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let ncols = rows.first().map_or(cols, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Convenience for literals; panics on ragged input.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let nested = rows
            .iter()
            .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
            .collect();
        Self::from_rows(nested, cols).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> IntVector {
        IntVector(self.row(r).to_vec())
    }

    pub fn column(&self, c: usize) -> IntVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, x: &IntVector) -> Result<IntVector> {
        Error::check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn scaled(&self, factor: i64) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, columns.len());
        for r in 0..self.rows {
            for (k, &c) in columns.iter().enumerate() {
                m.set(r, k, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        IntMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stacks blocks vertically; column counts must agree.
    pub fn vstack(blocks: &[&IntMatrix]) -> Result<IntMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch(format!(
                    "vstack: {} columns vs {cols}",
                    b.cols
                )));
            }
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        IntMatrix::new(rows, cols, data)
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: IntVector = self.row(r).iter().cloned().collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
