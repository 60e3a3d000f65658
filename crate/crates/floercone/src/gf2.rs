//! Dense GF(2) linear algebra on u64-packed bit vectors.
//!
//! All homology computations in this crate reduce to ranks and kernels of
//! boundary matrices over the two-element field, computed by exact Gaussian
//! elimination on packed words.

/// A vector over GF(2), packed 64 bits per word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// GF(2) addition.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit, if any.
    pub fn first_set(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = k * 64 + w.trailing_zeros() as usize;
                if i < self.len {
                    return Some(i);
                }
            }
        }
        None
    }

    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// Rank of the row span, by destructive elimination.
pub fn rank(rows: &[BitVec]) -> usize {
    let mut basis: Vec<BitVec> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for b in &basis {
            let pivot = b.first_set().expect("basis rows are nonzero");
            if r.get(pivot) {
                r.xor_assign(b);
            }
        }
        if !r.is_zero() {
            basis.push(r);
        }
    }
    basis.len()
}

/// Basis of the kernel of the map sending source basis vector `i` to `rows[i]`.
///
/// Returned vectors live in the source space (length `rows.len()`).
pub fn kernel_basis(rows: &[BitVec]) -> Vec<BitVec> {
    let n = rows.len();
    // (reduced row, tag of source combination)
    let mut basis: Vec<(BitVec, BitVec)> = Vec::new();
    let mut kernel = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        let mut tag = BitVec::zeros(n);
        tag.set(i, true);
        for (b, t) in &basis {
            let pivot = b.first_set().expect("basis rows are nonzero");
            if r.get(pivot) {
                r.xor_assign(b);
                tag.xor_assign(t);
            }
        }
        if r.is_zero() {
            kernel.push(tag);
        } else {
            basis.push((r, tag));
        }
    }
    kernel
}

/// dim(span(extra ∪ base)) − dim(span(base)): how much `extra` adds modulo `base`.
pub fn rank_increment(base: &[BitVec], extra: &[BitVec]) -> usize {
    let mut basis: Vec<BitVec> = Vec::new();
    let reduce = |row: &BitVec, basis: &mut Vec<BitVec>| -> bool {
        let mut r = row.clone();
        for b in basis.iter() {
            let pivot = b.first_set().expect("nonzero");
            if r.get(pivot) {
                r.xor_assign(b);
            }
        }
        if r.is_zero() {
            false
        } else {
            basis.push(r);
            true
        }
    };
    for row in base {
        reduce(row, &mut basis);
    }
    let mut added = 0;
    for row in extra {
        if reduce(row, &mut basis) {
            added += 1;
        }
    }
    added
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[usize], len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for &b in bits {
            v.set(b, true);
        }
        v
    }

    #[test]
    fn rank_of_small_matrices() {
        let rows = vec![bv(&[0, 1], 3), bv(&[1, 2], 3), bv(&[0, 2], 3)];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[BitVec::zeros(4)]), 0);
    }

    #[test]
    fn kernel_of_dependent_rows() {
        // rows 0 + 1 + 2 = 0
        let rows = vec![bv(&[0, 1], 3), bv(&[1, 2], 3), bv(&[0, 2], 3)];
        let k = kernel_basis(&rows);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].iter_set().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn rank_increment_counts_new_directions() {
        let base = vec![bv(&[0], 3)];
        let extra = vec![bv(&[0, 1], 3), bv(&[1], 3), bv(&[2], 3)];
        assert_eq!(rank_increment(&base, &extra), 2);
    }
}
