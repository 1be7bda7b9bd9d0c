//! Packed-word rows used by the elimination routines.


#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DenseRow {
    words: Vec<u64>,
}

impl DenseRow {
    pub fn zeros(bits: usize) -> Self {
        DenseRow {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn from_support(bits: usize, support: &[usize]) -> Self {
        let mut row = DenseRow::zeros(bits);
        for &i in support {
            row.flip(i);
        }
        row
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &DenseRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lowest set bit at or above `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        let mut wi = from >> 6;
        if wi >= self.words.len() {
            return None;
        }
        let mut w = self.words[wi] & (!0u64 << (from & 63));
        loop {
            if w != 0 {
                return Some((wi << 6) + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some((wi << 6) + b)
                }
            })
        })
    }
}

/// Incrementally built echelon basis. Every stored vector has a distinct
/// leading (lowest) bit, and no other stored vector has a one there.
#[derive(Clone, Debug)]
pub(crate) struct EchelonBasis {
    bits: usize,
    // indexed by leading bit
    pivot_of: Vec<Option<usize>>,
    rows: Vec<DenseRow>,
}

impl EchelonBasis {
    pub fn new(bits: usize) -> Self {
        EchelonBasis {
            bits,
            pivot_of: vec![None; bits],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place; the result has no ones at pivots.
    pub fn reduce(&self, v: &mut DenseRow) {
        let mut from = 0;
        while let Some(b) = v.next_one(from) {
            if let Some(r) = self.pivot_of[b] {
                v.xor_assign(&self.rows[r]);
            }
            from = b + 1;
        }
    }

    /// Inserts `v` if it is independent of the basis. Returns whether it was.
    pub fn insert(&mut self, mut v: DenseRow) -> bool {
        self.reduce(&mut v);
        let Some(lead) = v.next_one(0) else {
            return false;
        };
        debug_assert!(lead < self.bits);
        // keep the basis fully reduced at pivot columns
        for row in self.rows.iter_mut() {
            if row.get(lead) {
                row.xor_assign(&v);
            }
        }
        self.pivot_of[lead] = Some(self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: &DenseRow) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_one_crosses_word_boundaries() {
        let row = DenseRow::from_support(200, &[3, 64, 130, 199]);
        assert_eq!(row.next_one(0), Some(3));
        assert_eq!(row.next_one(4), Some(64));
        assert_eq!(row.next_one(65), Some(130));
        assert_eq!(row.next_one(131), Some(199));
        assert_eq!(row.next_one(200), None);
        assert_eq!(row.ones().collect::<Vec<_>>(), vec![3, 64, 130, 199]);
    }

    #[test]
    fn basis_detects_dependence() {
        let mut basis = EchelonBasis::new(5);
        assert!(basis.insert(DenseRow::from_support(5, &[0, 1])));
        assert!(basis.insert(DenseRow::from_support(5, &[1, 2])));
        assert!(!basis.insert(DenseRow::from_support(5, &[0, 2])));
        assert!(basis.contains(&DenseRow::from_support(5, &[0, 2])));
        assert!(!basis.contains(&DenseRow::from_support(5, &[3])));
        assert_eq!(basis.rank(), 2);
    }
}
