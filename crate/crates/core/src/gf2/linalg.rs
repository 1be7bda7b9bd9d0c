use super::dense::{DenseRow, EchelonBasis};
use super::{BitVec, SparseBinMatrix};
use crate::error::{check_dim, Error, Result};

/// Computes `v · Mᵀ`: bit `i` of the result is the parity of `v` over row `i` of `M`.
pub fn mat_vec_t(v: &BitVec, m: &SparseBinMatrix) -> Result<BitVec> {
    check_dim("mat_vec_t vector length", m.cols(), v.len())?;
    let mut parity = vec![false; m.rows()];
    for &j in v.support() {
        for &i in m.col(j) {
            parity[i] ^= true;
        }
    }
    let support = parity
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect();
    Ok(BitVec::from_sorted_unchecked(m.rows(), support))
}

/// Computes `A · Bᵀ` over GF(2).
pub fn mat_mat_t(a: &SparseBinMatrix, b: &SparseBinMatrix) -> Result<SparseBinMatrix> {
    check_dim("mat_mat_t column count", a.cols(), b.cols())?;
    a.mul(&b.transpose())
}

fn dense_rows(m: &SparseBinMatrix, width: usize) -> Vec<DenseRow> {
    m.row_supports()
        .iter()
        .map(|r| DenseRow::from_support(width, r))
        .collect()
}

pub fn rank(m: &SparseBinMatrix) -> usize {
    row_basis(m).rank()
}

pub(crate) fn row_basis(m: &SparseBinMatrix) -> EchelonBasis {
    let mut basis = EchelonBasis::new(m.cols());
    for row in dense_rows(m, m.cols()) {
        basis.insert(row);
    }
    basis
}

/// Solves `x · Mᵀ = s`, choosing pivot columns greedily in `pivot_order`.
///
/// The returned solution is supported on the chosen pivot columns. `None`
/// means the system is inconsistent.
pub fn solve(m: &SparseBinMatrix, s: &BitVec, pivot_order: &[usize]) -> Result<Option<BitVec>> {
    check_dim("solve syndrome length", m.rows(), s.len())?;
    check_dim("solve pivot order length", m.cols(), pivot_order.len())?;
    let mut seen = vec![false; m.cols()];
    for &c in pivot_order {
        if c >= m.cols() || std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidArgument(
                "pivot order is not a permutation of the columns".into(),
            ));
        }
    }

    // augmented rows: columns 0..cols, then the syndrome bit
    let aug = m.cols();
    let mut rows = dense_rows(m, aug + 1);
    for &i in s.support() {
        rows[i].flip(aug);
    }
    let mut used = vec![false; m.rows()];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for &c in pivot_order {
        if pivots.len() == m.rows() {
            break;
        }
        let Some(p) = (0..rows.len()).find(|&r| !used[r] && rows[r].get(c)) else {
            continue;
        };
        used[p] = true;
        let pivot_row = rows[p].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != p && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push((p, c));
    }
    if (0..rows.len()).any(|r| !used[r] && rows[r].get(aug)) {
        return Ok(None);
    }
    let mut support: Vec<usize> = pivots
        .iter()
        .filter(|&&(r, _)| rows[r].get(aug))
        .map(|&(_, c)| c)
        .collect();
    support.sort_unstable();
    Ok(Some(BitVec::from_sorted_unchecked(m.cols(), support)))
}

/// Whether `v` lies in the row space of `m`.
pub fn in_rowspace(v: &BitVec, m: &SparseBinMatrix) -> Result<bool> {
    check_dim("in_rowspace vector length", m.cols(), v.len())?;
    let basis = row_basis(m);
    Ok(basis.contains(&DenseRow::from_support(m.cols(), v.support())))
}

/// Reusable row-space membership test for repeated queries against one matrix.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    basis: EchelonBasis,
}

impl RowSpace {
    pub fn new(m: &SparseBinMatrix) -> Self {
        RowSpace {
            cols: m.cols(),
            basis: row_basis(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        check_dim("row space membership", self.cols, v.len())?;
        Ok(self
            .basis
            .contains(&DenseRow::from_support(self.cols, v.support())))
    }

    /// Adds `v` to the spanning set; returns whether the dimension grew.
    pub fn extend(&mut self, v: &BitVec) -> Result<bool> {
        check_dim("row space extension", self.cols, v.len())?;
        Ok(self
            .basis
            .insert(DenseRow::from_support(self.cols, v.support())))
    }
}

/// Basis of `{x : x · Mᵀ = 0}`.
pub fn nullspace(m: &SparseBinMatrix) -> Vec<BitVec> {
    let cols = m.cols();
    let mut rows = dense_rows(m, cols);
    let mut pivot_cols = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(p, next);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivot_cols.push(c);
        next += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut support = vec![f];
            for (r, &c) in pivot_cols.iter().enumerate() {
                if rows[r].get(f) {
                    support.push(c);
                }
            }
            support.sort_unstable();
            BitVec::from_sorted_unchecked(cols, support)
        })
        .collect()
}

/// Inverse of a square matrix, or `None` when it is singular.
pub fn inverse(m: &SparseBinMatrix) -> Result<Option<SparseBinMatrix>> {
    check_dim("inverse of square matrix", m.rows(), m.cols())?;
    let n = m.rows();
    let mut rows: Vec<DenseRow> = m
        .row_supports()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = DenseRow::from_support(2 * n, r);
            row.flip(n + i);
            row
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| rows[r].get(c)) else {
            return Ok(None);
        };
        rows.swap(p, c);
        let pivot_row = rows[c].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != c && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
    }
    let supports = rows
        .iter()
        .map(|r| r.ones().filter(|&j| j >= n).map(|j| j - n).collect())
        .collect();
    Ok(Some(SparseBinMatrix::from_row_supports_unchecked(n, supports)))
}
