use std::fmt;

use crate::error::{check_dim, Error, Result};

/// Sparse binary vector: a length and the sorted positions of its ones.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    support: Vec<usize>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            support: Vec::new(),
        }
    }

    /// Builds a vector from a list of set positions. Order does not matter;
    /// repeated or out-of-range positions are rejected.
    pub fn from_support(len: usize, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        for w in support.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!(
                    "duplicate index {} in bit vector support",
                    w[0]
                )));
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::InvalidArgument(format!(
                    "index {last} out of range for bit vector of length {len}"
                )));
            }
        }
        Ok(BitVec { len, support })
    }

    /// Caller guarantees `support` is strictly increasing and in range.
    pub(crate) fn from_sorted_unchecked(len: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(support.last().is_none_or(|&i| i < len));
        BitVec { len, support }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let support = bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        BitVec {
            len: bits.len(),
            support,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        let mut out = vec![false; self.len];
        for &i in &self.support {
            out[i] = true;
        }
        out
    }

    /// Sum over GF(2).
    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        check_dim("bit vector xor", self.len, other.len)?;
        let (a, b) = (&self.support, &other.support);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(BitVec {
            len: self.len,
            support: out,
        })
    }

    /// Drops the positions listed in `removed` (sorted) and renumbers the rest.
    pub fn delete_positions(&self, removed: &[usize]) -> BitVec {
        let keep = keep_map(self.len, removed);
        let support = self
            .support
            .iter()
            .filter_map(|&i| keep[i])
            .collect::<Vec<_>>();
        BitVec {
            len: self.len - removed.len(),
            support,
        }
    }

    /// Inverse of [`BitVec::delete_positions`]: re-inserts zeros at `removed`.
    pub fn expand_positions(&self, removed: &[usize]) -> BitVec {
        let full_len = self.len + removed.len();
        let kept: Vec<usize> = complement(full_len, removed);
        let support = self.support.iter().map(|&i| kept[i]).collect();
        BitVec {
            len: full_len,
            support,
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}]{:?}", self.len, self.support)
    }
}

/// For each index in `0..len`, its new position after deleting `removed`.
pub(crate) fn keep_map(len: usize, removed: &[usize]) -> Vec<Option<usize>> {
    let mut gone = vec![false; len];
    for &r in removed {
        gone[r] = true;
    }
    let mut next = 0;
    gone.iter()
        .map(|&g| {
            if g {
                None
            } else {
                next += 1;
                Some(next - 1)
            }
        })
        .collect()
}

pub(crate) fn complement(len: usize, removed: &[usize]) -> Vec<usize> {
    let mut gone = vec![false; len];
    for &r in removed {
        gone[r] = true;
    }
    (0..len).filter(|&i| !gone[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_support() {
        assert!(BitVec::from_support(4, vec![1, 1]).is_err());
        assert!(BitVec::from_support(4, vec![4]).is_err());
        let v = BitVec::from_support(4, vec![3, 0]).unwrap();
        assert_eq!(v.support(), &[0, 3]);
    }

    #[test]
    fn xor_cancels_shared_positions() {
        let a = BitVec::from_support(6, vec![0, 2, 5]).unwrap();
        let b = BitVec::from_support(6, vec![2, 3]).unwrap();
        assert_eq!(a.xor(&b).unwrap().support(), &[0, 3, 5]);
        assert!(a.xor(&a).unwrap().is_zero());
        assert!(a.xor(&BitVec::zeros(5)).is_err());
    }

    #[test]
    fn delete_then_expand_restores_vector() {
        let v = BitVec::from_support(8, vec![0, 3, 6]).unwrap();
        let removed = [1, 4, 7];
        let small = v.delete_positions(&removed);
        assert_eq!(small.len(), 5);
        assert_eq!(small.support(), &[0, 2, 4]);
        assert_eq!(small.expand_positions(&removed), v);
    }
}
