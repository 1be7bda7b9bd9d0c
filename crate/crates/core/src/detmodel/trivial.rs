//! Exhaustive search for low-weight errors that flip no detector and no
//! observable.

use std::collections::HashMap;

use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitVec, SparseBinMatrix};

/// Every `e` with `1 ≤ weight(e) ≤ w_max`, `e·Hᵀ = 0` and `e·Oᵀ = 0`, sorted by
/// weight and then lexicographically by support. `w_max` is at most 3.
pub fn find_low_weight_trivial(h: &SparseBinMatrix, o: &SparseBinMatrix, w_max: usize) -> Result<Vec<BitVec>> {
    check_dim("observable matrix columns", h.cols(), o.cols())?;
    if w_max > 3 {
        return Err(Error::InvalidArgument(format!("w_max = {w_max} exceeds 3")));
    }
    let n = h.cols();
    let off = h.rows() as u32;
    // column j of the stacked matrix [H; O]
    let keys: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            h.col(j)
                .iter()
                .map(|&i| i as u32)
                .chain(o.col(j).iter().map(|&i| i as u32 + off))
                .collect()
        })
        .collect();
    let mut by_key: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (j, k) in keys.iter().enumerate() {
        by_key.entry(k.as_slice()).or_default().push(j);
    }

    let mut found: Vec<Vec<usize>> = Vec::new();
    if w_max >= 1 {
        found.extend((0..n).filter(|&j| keys[j].is_empty()).map(|j| vec![j]));
    }
    if w_max >= 2 {
        let mut pairs = Vec::new();
        for group in by_key.values().filter(|g| g.len() > 1) {
            for (x, &a) in group.iter().enumerate() {
                pairs.extend(group[x + 1..].iter().map(|&b| vec![a, b]));
            }
        }
        pairs.sort_unstable();
        found.extend(pairs);
    }
    if w_max >= 3 {
        let mut buf = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                xor_into(&keys[a], &keys[b], &mut buf);
                if let Some(cs) = by_key.get(buf.as_slice()) {
                    found.extend(cs.iter().filter(|&&c| c > b).map(|&c| vec![a, b, c]));
                }
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|s| BitVec::from_sorted_unchecked(n, s))
        .collect())
}

fn xor_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
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
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_columns_have_none() {
        let h = SparseBinMatrix::identity(5);
        let o = SparseBinMatrix::zeros(0, 5);
        assert!(find_low_weight_trivial(&h, &o, 3).unwrap().is_empty());
    }

    #[test]
    fn each_weight_class() {
        // col0 zero, col1 = col2 = col3, col3 + col4 = col5
        let h = SparseBinMatrix::from_dense(&[vec![0, 1, 1, 1, 0, 1], vec![0, 0, 0, 0, 1, 1]]).unwrap();
        let o = SparseBinMatrix::zeros(0, 6);
        let supports: Vec<Vec<usize>> = find_low_weight_trivial(&h, &o, 3)
            .unwrap()
            .iter()
            .map(|v| v.support().to_vec())
            .collect();
        assert_eq!(
            supports,
            vec![
                vec![0],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3],
                vec![0, 1, 2],
                vec![0, 1, 3],
                vec![0, 2, 3],
                vec![1, 4, 5],
                vec![2, 4, 5],
                vec![3, 4, 5]
            ]
        );
        // an observable row separates 1 from 2 and 3
        let o = SparseBinMatrix::from_dense(&[vec![0, 1, 0, 0, 0, 0]]).unwrap();
        let w2 = find_low_weight_trivial(&h, &o, 2).unwrap();
        assert_eq!(w2.len(), 2);
    }
}
