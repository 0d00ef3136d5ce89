//! Sparse binary linear algebra over GF(2).
//!
//! [`SparseBinaryMatrix`] stores both row and column supports so that
//! decoders can walk the Tanner graph in either direction without
//! transposing. Rank, rowspace membership and kernel computations use
//! dense bit-packed elimination ([`RowSpace`]); elimination runs offline
//! while the sparse adjacency serves the decoding hot path.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: column index {index} out of range for {n_cols} columns")]
    IndexOutOfRange {
        row: usize,
        index: usize,
        n_cols: usize,
    },
    #[error("row {row}: duplicate column index {index}")]
    DuplicateIndex { row: usize, index: usize },
    #[error("vector length {got} does not match {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("circulant support is empty")]
    EmptySupport,
    #[error("circulant exponent {exponent} must be below length {length}")]
    ExponentOutOfRange { exponent: usize, length: usize },
}

/// A sparse matrix over GF(2), stored as sorted row and column supports.
///
/// Both orientations describe the same set of nonzero cells; the column
/// supports are rebuilt from the row supports at construction time.
/// Instances are immutable after construction and safe to share across
/// concurrent decoders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    row_supports: Vec<Vec<usize>>,
    col_supports: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from per-row column supports.
    ///
    /// Supports are sorted internally; out-of-range or duplicate column
    /// indices are rejected.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self, Error> {
        let n_rows = rows.len();
        let mut row_supports = rows;
        for (r, support) in row_supports.iter_mut().enumerate() {
            support.sort_unstable();
            for pair in support.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::DuplicateIndex {
                        row: r,
                        index: pair[0],
                    });
                }
            }
            if let Some(&last) = support.last() {
                if last >= n_cols {
                    return Err(Error::IndexOutOfRange {
                        row: r,
                        index: last,
                        n_cols,
                    });
                }
            }
        }
        let mut col_supports = vec![Vec::new(); n_cols];
        for (r, support) in row_supports.iter().enumerate() {
            for &c in support {
                col_supports[c].push(r);
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_supports,
            col_supports,
        })
    }

    /// The `n`-by-`n` identity matrix.
    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![i]).collect()).expect("identity is always valid")
    }

    /// Builds the `l`-by-`l` circulant matrix whose row `r` has ones at
    /// columns `(e + r) mod l` for every exponent `e` in `support`.
    pub fn circulant(support: &[usize], l: usize) -> Result<Self, Error> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for &e in support {
            if e >= l {
                return Err(Error::ExponentOutOfRange {
                    exponent: e,
                    length: l,
                });
            }
        }
        let rows = (0..l)
            .map(|r| support.iter().map(|&e| (e + r) % l).collect())
            .collect();
        Self::from_rows(l, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Sorted column indices of the ones in row `r`.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_supports[r]
    }

    /// Sorted row indices of the ones in column `c`.
    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_supports[c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.row_supports.iter().map(|s| s.as_slice())
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_supports[r].len()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        self.col_supports[c].len()
    }

    /// Total number of ones.
    pub fn num_ones(&self) -> usize {
        self.row_supports.iter().map(Vec::len).sum()
    }

    /// The transposed matrix.
    pub fn transposed(&self) -> Self {
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_supports: self.col_supports.clone(),
            col_supports: self.row_supports.clone(),
        }
    }

    /// GF(2) matrix-vector product `M v`, with bits given as 0/1 bytes.
    pub fn mat_vec(&self, v: &[u8]) -> Result<Vec<u8>, Error> {
        if v.len() != self.n_cols {
            return Err(Error::LengthMismatch {
                got: v.len(),
                expected: self.n_cols,
            });
        }
        Ok(self
            .row_supports
            .iter()
            .map(|support| support.iter().fold(0u8, |acc, &c| acc ^ (v[c] & 1)))
            .collect())
    }

    /// Rank over GF(2), via bit-packed Gaussian elimination.
    pub fn rank(&self) -> usize {
        RowSpace::new(self).rank()
    }

    /// Whether `v` lies in the GF(2) span of the rows of this matrix.
    pub fn in_rowspace(&self, v: &[u8]) -> Result<bool, Error> {
        if v.len() != self.n_cols {
            return Err(Error::LengthMismatch {
                got: v.len(),
                expected: self.n_cols,
            });
        }
        Ok(RowSpace::new(self).contains(v))
    }

    /// A basis of the right kernel `{x : Mx = 0}`, one 0/1 vector per
    /// basis element.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        // Reduced row echelon form with pivot bookkeeping, then one basis
        // vector per free column.
        let mut echelon: Vec<BitVec> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for support in &self.row_supports {
            let mut row = BitVec::from_support(self.n_cols, support);
            while let Some(p) = row.first_set() {
                match pivots.iter().position(|&q| q == p) {
                    Some(i) => row.xor_assign(&echelon[i]),
                    None => {
                        echelon.push(row);
                        pivots.push(p);
                        break;
                    }
                }
            }
        }
        // Back-substitution in descending pivot order: a row only ever
        // contains pivot bits larger than its own, and those owners are
        // already fully reduced by the time we reach it, so one pass per
        // row clears everything.
        let mut order: Vec<usize> = (0..echelon.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(pivots[i]));
        for &i in &order {
            for j in 0..echelon.len() {
                if i != j && echelon[i].get(pivots[j]) {
                    let (a, b) = if i < j {
                        let (lo, hi) = echelon.split_at_mut(j);
                        (&mut lo[i], &hi[0])
                    } else {
                        let (lo, hi) = echelon.split_at_mut(i);
                        (&mut hi[0], &lo[j])
                    };
                    a.xor_assign(b);
                }
            }
        }
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut x = vec![0u8; self.n_cols];
            x[f] = 1;
            for (row, &p) in echelon.iter().zip(&pivots) {
                if row.get(f) {
                    x[p] = 1;
                }
            }
            basis.push(x);
        }
        basis
    }
}

/// Bit-packed echelon basis of the rowspace of a matrix.
///
/// Build once, then test membership of many vectors against it.
#[derive(Debug, Clone)]
pub struct RowSpace {
    n_cols: usize,
    rows: Vec<BitVec>,
    // pivot_owner[c] = index into `rows` of the row whose leading one is c.
    pivot_owner: Vec<Option<u32>>,
}

impl RowSpace {
    pub fn new(matrix: &SparseBinaryMatrix) -> Self {
        let mut space = Self {
            n_cols: matrix.n_cols(),
            rows: Vec::new(),
            pivot_owner: vec![None; matrix.n_cols()],
        };
        for support in &matrix.row_supports {
            space.insert(BitVec::from_support(matrix.n_cols(), support));
        }
        space
    }

    /// Number of independent rows absorbed so far.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Whether the 0/1 vector `v` lies in the span.
    pub fn contains(&self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.n_cols, "vector length mismatch");
        let mut row = BitVec::from_bits(v);
        self.reduce(&mut row);
        row.is_zero()
    }

    fn insert(&mut self, mut row: BitVec) -> bool {
        self.reduce(&mut row);
        match row.first_set() {
            None => false,
            Some(p) => {
                self.pivot_owner[p] = Some(self.rows.len() as u32);
                self.rows.push(row);
                true
            }
        }
    }

    fn reduce(&self, row: &mut BitVec) {
        while let Some(p) = row.first_set() {
            match self.pivot_owner[p] {
                Some(i) => row.xor_assign(&self.rows[i as usize]),
                None => break,
            }
        }
    }
}

/// Dense bit vector backing the elimination routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub(crate) fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub(crate) fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i);
        }
        v
    }

    pub(crate) fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i);
            }
        }
        v
    }

    pub(crate) fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub(crate) fn first_set(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| i * 64 + self.words[i].trailing_zeros() as usize)
    }

    pub(crate) fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }
}
