use std::fmt;

use super::bitvec::keep_map;
use super::BitVec;
use crate::error::{check_dim, Error, Result};

/// Immutable sparse matrix over GF(2) holding both row and column adjacency.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseBinMatrix {
    rows: usize,
    cols: usize,
    row_supports: Vec<Vec<usize>>,
    col_supports: Vec<Vec<usize>>,
}

impl SparseBinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseBinMatrix {
            rows,
            cols,
            row_supports: vec![Vec::new(); rows],
            col_supports: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_row_supports_unchecked(n, (0..n).map(|i| vec![i]).collect())
    }

    /// Builds a matrix from `(row, col)` entries. Entries are summed over
    /// GF(2), so a position listed twice ends up zero.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut row_supports = vec![Vec::new(); rows];
        for (i, j) in entries {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            row_supports[i].push(j);
        }
        for row in row_supports.iter_mut() {
            cancel_pairs(row);
        }
        Ok(Self::from_row_supports_unchecked(cols, row_supports))
    }

    /// Builds a matrix from per-row column lists (each strictly increasing after sorting).
    pub fn from_row_supports(cols: usize, mut row_supports: Vec<Vec<usize>>) -> Result<Self> {
        for (i, row) in row_supports.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("row {i} repeats a column")));
            }
            if row.last().is_some_and(|&j| j >= cols) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has a column outside 0..{cols}"
                )));
            }
        }
        Ok(Self::from_row_supports_unchecked(cols, row_supports))
    }

    pub(crate) fn from_row_supports_unchecked(cols: usize, row_supports: Vec<Vec<usize>>) -> Self {
        let rows = row_supports.len();
        let mut col_supports = vec![Vec::new(); cols];
        for (i, row) in row_supports.iter().enumerate() {
            debug_assert!(row.windows(2).all(|w| w[0] < w[1]));
            for &j in row {
                col_supports[j].push(i);
            }
        }
        SparseBinMatrix {
            rows,
            cols,
            row_supports,
            col_supports,
        }
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self> {
        for r in rows {
            check_dim("matrix row length", cols, r.len())?;
        }
        Ok(Self::from_row_supports_unchecked(
            cols,
            rows.iter().map(|r| r.support().to_vec()).collect(),
        ))
    }

    /// Dense 0/1 rows, mostly useful in tests and small examples.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut supports = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            check_dim("dense row length", cols, r.len())?;
            if r.iter().any(|&b| b > 1) {
                return Err(Error::InvalidArgument(format!("row {i} has a non-binary entry")));
            }
            supports.push(r.iter().enumerate().filter(|(_, &b)| b == 1).map(|(j, _)| j).collect());
        }
        Ok(Self::from_row_supports_unchecked(cols, supports))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_supports.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_supports[i]
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.col_supports[j]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_supports
    }

    pub fn col_supports(&self) -> &[Vec<usize>] {
        &self.col_supports
    }

    pub fn row_vec(&self, i: usize) -> BitVec {
        BitVec::from_sorted_unchecked(self.cols, self.row_supports[i].clone())
    }

    pub fn col_vec(&self, j: usize) -> BitVec {
        BitVec::from_sorted_unchecked(self.rows, self.col_supports[j].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row_supports[i].binary_search(&j).is_ok()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_supports
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&j| (i, j)))
    }

    pub fn is_zero(&self) -> bool {
        self.row_supports.iter().all(Vec::is_empty)
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_supports.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        self.col_supports.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_supports.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.col_supports.iter().map(Vec::len).collect()
    }

    pub fn transpose(&self) -> SparseBinMatrix {
        SparseBinMatrix {
            rows: self.cols,
            cols: self.rows,
            row_supports: self.col_supports.clone(),
            col_supports: self.row_supports.clone(),
        }
    }

    pub fn add(&self, other: &SparseBinMatrix) -> Result<SparseBinMatrix> {
        check_dim("matrix sum rows", self.rows, other.rows)?;
        check_dim("matrix sum cols", self.cols, other.cols)?;
        let rows = self
            .row_supports
            .iter()
            .zip(&other.row_supports)
            .map(|(a, b)| {
                let mut r: Vec<usize> = a.iter().chain(b).copied().collect();
                cancel_pairs(&mut r);
                r
            })
            .collect();
        Ok(Self::from_row_supports_unchecked(self.cols, rows))
    }

    /// Ordinary product `self · other` over GF(2).
    pub fn mul(&self, other: &SparseBinMatrix) -> Result<SparseBinMatrix> {
        check_dim("matrix product inner dimension", self.cols, other.rows)?;
        let rows = self
            .row_supports
            .iter()
            .map(|r| {
                let mut out: Vec<usize> = r
                    .iter()
                    .flat_map(|&k| other.row_supports[k].iter().copied())
                    .collect();
                cancel_pairs(&mut out);
                out
            })
            .collect();
        Ok(Self::from_row_supports_unchecked(other.cols, rows))
    }

    pub fn hstack(blocks: &[&SparseBinMatrix]) -> Result<SparseBinMatrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut supports = vec![Vec::new(); rows];
        let mut offset = 0;
        for b in blocks {
            check_dim("hstack row count", rows, b.rows)?;
            for (i, r) in b.row_supports.iter().enumerate() {
                supports[i].extend(r.iter().map(|&j| j + offset));
            }
            offset += b.cols;
        }
        Ok(Self::from_row_supports_unchecked(offset, supports))
    }

    pub fn vstack(blocks: &[&SparseBinMatrix]) -> Result<SparseBinMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut supports = Vec::new();
        for b in blocks {
            check_dim("vstack column count", cols, b.cols)?;
            supports.extend(b.row_supports.iter().cloned());
        }
        Ok(Self::from_row_supports_unchecked(cols, supports))
    }

    /// Removes the listed columns (sorted, distinct) and renumbers the rest.
    pub fn delete_columns(&self, removed: &[usize]) -> SparseBinMatrix {
        let keep = keep_map(self.cols, removed);
        let rows = self
            .row_supports
            .iter()
            .map(|r| r.iter().filter_map(|&j| keep[j]).collect())
            .collect();
        Self::from_row_supports_unchecked(self.cols - removed.len(), rows)
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseBinMatrix {
        Self::from_row_supports_unchecked(
            self.cols,
            rows.iter().map(|&i| self.row_supports[i].clone()).collect(),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (i, j) in self.entries() {
            out[i][j] = 1;
        }
        out
    }
}

impl fmt::Debug for SparseBinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseBinMatrix {}x{} nnz={}", self.rows, self.cols, self.nnz())?;
        if self.rows <= 16 && self.cols <= 64 {
            for row in self.to_dense() {
                let s: String = row.iter().map(|&b| if b == 1 { '1' } else { '.' }).collect();
                writeln!(f, "  {s}")?;
            }
        }
        Ok(())
    }
}

/// Accumulates entries block by block; overlapping entries sum over GF(2).
#[derive(Clone, Debug)]
pub struct MatrixBuilder {
    rows: usize,
    cols: usize,
    row_supports: Vec<Vec<usize>>,
}

impl MatrixBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        MatrixBuilder {
            rows,
            cols,
            row_supports: vec![Vec::new(); rows],
        }
    }

    /// Adds `block` with its top-left corner at `(row0, col0)`.
    pub fn add_block(&mut self, row0: usize, col0: usize, block: &SparseBinMatrix) -> Result<()> {
        if row0 + block.rows > self.rows || col0 + block.cols > self.cols {
            return Err(Error::InvalidArgument(format!(
                "{}x{} block at ({row0}, {col0}) does not fit a {}x{} matrix",
                block.rows, block.cols, self.rows, self.cols
            )));
        }
        for (i, r) in block.row_supports.iter().enumerate() {
            self.row_supports[row0 + i].extend(r.iter().map(|&j| j + col0));
        }
        Ok(())
    }

    pub fn add_entry(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::InvalidArgument(format!("entry ({i}, {j}) out of range")));
        }
        self.row_supports[i].push(j);
        Ok(())
    }

    pub fn build(mut self) -> SparseBinMatrix {
        for r in self.row_supports.iter_mut() {
            cancel_pairs(r);
        }
        SparseBinMatrix::from_row_supports_unchecked(self.cols, self.row_supports)
    }
}

/// Sorts and removes indices that appear an even number of times.
fn cancel_pairs(v: &mut Vec<usize>) {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    *v = out;
}
