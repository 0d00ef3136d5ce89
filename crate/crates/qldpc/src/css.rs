//! CSS code assembly.
//!
//! A CSS code pairs two parity-check matrices `H_X`, `H_Z` over the same
//! variable set, with every X-row orthogonal to every Z-row over GF(2).
//! The hypergraph product construction builds such a pair from two
//! classical matrices `A` and `B` as `H_X = [A ⊗ I, I ⊗ Bᵗ]` and
//! `H_Z = [I ⊗ B, Aᵗ ⊗ I]`.

use crate::alist;
use crate::gf2::SparseBinaryMatrix;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("H_X has {x_cols} columns but H_Z has {z_cols}")]
    ColumnMismatch { x_cols: usize, z_cols: usize },
    #[error("rows are not orthogonal: H_X row {x_row} and H_Z row {z_row} overlap oddly")]
    NotOrthogonal { x_row: usize, z_row: usize },
    #[error("failed to read {which} matrix: {source}")]
    Alist {
        which: &'static str,
        #[source]
        source: alist::Error,
    },
}

/// A CSS code: a named pair of parity-check matrices over a common set
/// of variables.
///
/// Construction only enforces the shape constraint (equal column
/// counts); orthogonality is checked by [`css_validate`], and by
/// [`load_css`] for file-ingested codes.
#[derive(Debug, Clone)]
pub struct CssCode {
    name: String,
    h_x: SparseBinaryMatrix,
    h_z: SparseBinaryMatrix,
}

impl CssCode {
    pub fn new(
        name: impl Into<String>,
        h_x: SparseBinaryMatrix,
        h_z: SparseBinaryMatrix,
    ) -> Result<Self, Error> {
        if h_x.n_cols() != h_z.n_cols() {
            return Err(Error::ColumnMismatch {
                x_cols: h_x.n_cols(),
                z_cols: h_z.n_cols(),
            });
        }
        Ok(Self {
            name: name.into(),
            h_x,
            h_z,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn h_x(&self) -> &SparseBinaryMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &SparseBinaryMatrix {
        &self.h_z
    }

    /// Number of variables (physical qubits).
    pub fn n(&self) -> usize {
        self.h_x.n_cols()
    }

    pub fn validate(&self) -> bool {
        css_validate(self)
    }

    pub fn dimension(&self) -> usize {
        css_dimension(self)
    }
}

/// Position of an `H_X` row in the hypergraph product: the pair of a row
/// of `A` and a row of `Bᵗ` (that is, a column of `B`).
///
/// Rows are ordered `a_row`-major: `index = a_row * m_bt + b_row` where
/// `m_bt` is the number of rows of `Bᵗ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HgpRowLabel {
    pub a_row: usize,
    pub b_row: usize,
}

impl HgpRowLabel {
    pub fn to_index(self, m_bt: usize) -> usize {
        self.a_row * m_bt + self.b_row
    }

    pub fn from_index(index: usize, m_bt: usize) -> Self {
        Self {
            a_row: index / m_bt,
            b_row: index % m_bt,
        }
    }
}

/// Builds the hypergraph product code of two classical matrices.
///
/// With `A` of size `m_A × n_A` and `B` of size `m_B × n_B`, the result
/// has `n = n_A·n_B + m_A·m_B` variables, `m_A·n_B` X-checks and
/// `n_A·m_B` Z-checks. `H_X` rows follow the [`HgpRowLabel`] ordering.
pub fn hypergraph_product(a: &SparseBinaryMatrix, b: &SparseBinaryMatrix) -> CssCode {
    let (m_a, n_a) = (a.n_rows(), a.n_cols());
    let (m_b, n_b) = (b.n_rows(), b.n_cols());
    let n = n_a * n_b + m_a * m_b;
    let offset = n_a * n_b;

    // H_X = [A ⊗ I_{n_B} | I_{m_A} ⊗ Bᵗ], row (a_row, b_col) = a_row·n_B + b_col.
    let mut x_rows = Vec::with_capacity(m_a * n_b);
    for a_row in 0..m_a {
        for b_col in 0..n_b {
            let mut support: Vec<usize> =
                a.row(a_row).iter().map(|&j| j * n_b + b_col).collect();
            support.extend(b.col(b_col).iter().map(|&r| offset + a_row * m_b + r));
            x_rows.push(support);
        }
    }

    // H_Z = [I_{n_A} ⊗ B | Aᵗ ⊗ I_{m_B}], row (a_col, b_row) = a_col·m_B + b_row.
    let mut z_rows = Vec::with_capacity(n_a * m_b);
    for a_col in 0..n_a {
        for b_row in 0..m_b {
            let mut support: Vec<usize> =
                b.row(b_row).iter().map(|&c| a_col * n_b + c).collect();
            support.extend(a.col(a_col).iter().map(|&r| offset + r * m_b + b_row));
            z_rows.push(support);
        }
    }

    let h_x = SparseBinaryMatrix::from_rows(n, x_rows).expect("product rows are in range");
    let h_z = SparseBinaryMatrix::from_rows(n, z_rows).expect("product rows are in range");
    CssCode::new("hgp", h_x, h_z).expect("product matrices share the variable set")
}

/// Checks the CSS invariant: every X-row has even overlap with every
/// Z-row.
pub fn css_validate(code: &CssCode) -> bool {
    find_odd_overlap(code).is_none()
}

fn find_odd_overlap(code: &CssCode) -> Option<(usize, usize)> {
    let mut dense = vec![0u8; code.n()];
    for z_row in 0..code.h_z.n_rows() {
        for &c in code.h_z.row(z_row) {
            dense[c] = 1;
        }
        let parities = code.h_x.mat_vec(&dense).expect("row vector has length n");
        if let Some(x_row) = parities.iter().position(|&p| p == 1) {
            return Some((x_row, z_row));
        }
        for &c in code.h_z.row(z_row) {
            dense[c] = 0;
        }
    }
    None
}

/// Dimension of a valid CSS code: `n − rank(H_X) − rank(H_Z)`.
///
/// Requires the CSS invariant to hold; an invalid pair may make the
/// subtraction meaningless, which panics rather than wrapping.
pub fn css_dimension(code: &CssCode) -> usize {
    let rank_x = code.h_x.rank();
    let rank_z = code.h_z.rank();
    code.n()
        .checked_sub(rank_x + rank_z)
        .expect("rank sum exceeds n; CSS invariant violated")
}

/// The C2 code: hypergraph product of the length-31 circulant with
/// generator exponents {0, 2, 5} with itself. Parameters n = 1922,
/// dimension 50.
pub fn build_c2() -> CssCode {
    let a = SparseBinaryMatrix::circulant(&[0, 2, 5], 31).expect("support below length");
    hypergraph_product(&a, &a).with_name("c2")
}

/// Loads a CSS code from two alist files and validates it.
pub fn load_css<P: AsRef<Path>, Q: AsRef<Path>>(
    path_x: P,
    path_z: Q,
    name: impl Into<String>,
) -> Result<CssCode, Error> {
    let h_x = alist::read_alist(path_x).map_err(|source| Error::Alist {
        which: "H_X",
        source,
    })?;
    let h_z = alist::read_alist(path_z).map_err(|source| Error::Alist {
        which: "H_Z",
        source,
    })?;
    let code = CssCode::new(name, h_x, h_z)?;
    if let Some((x_row, z_row)) = find_odd_overlap(&code) {
        return Err(Error::NotOrthogonal { x_row, z_row });
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::Lcg;

    #[test]
    fn c2_shape() {
        let c2 = build_c2();
        assert_eq!(c2.n(), 1922);
        assert_eq!(c2.h_x().n_rows(), 961);
        assert_eq!(c2.h_z().n_rows(), 961);
    }

    #[test]
    fn c2_row_weight_is_six() {
        let c2 = build_c2();
        for r in 0..c2.h_x().n_rows() {
            assert_eq!(c2.h_x().row_weight(r), 6);
        }
        let zero = vec![0u8; c2.n()];
        assert!(c2.h_x().mat_vec(&zero).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn c2_rank_and_dimension() {
        let c2 = build_c2();
        assert_eq!(c2.h_x().rank(), 936);
        assert!(c2.validate());
        assert_eq!(c2.dimension(), 50);
    }

    #[test]
    fn smallest_product() {
        let one = SparseBinaryMatrix::from_rows(1, vec![vec![0]]).unwrap();
        let code = hypergraph_product(&one, &one);
        assert_eq!(code.n(), 2);
        assert_eq!(code.h_x().row(0), &[0, 1]);
        assert_eq!(code.h_z().row(0), &[0, 1]);
        assert_eq!(code.dimension(), 0);
    }

    #[test]
    fn random_products_are_valid() {
        let mut rng = Lcg::new(7);
        for _ in 0..10 {
            let (ma, na) = (1 + rng.next_index(8), 1 + rng.next_index(8));
            let a = random_matrix(&mut rng, ma, na);
            let (mb, nb) = (1 + rng.next_index(8), 1 + rng.next_index(8));
            let b = random_matrix(&mut rng, mb, nb);
            assert!(css_validate(&hypergraph_product(&a, &b)));
        }
    }

    #[test]
    fn validate_catches_odd_overlap() {
        let h_x = SparseBinaryMatrix::from_rows(3, vec![vec![0, 1]]).unwrap();
        let h_z = SparseBinaryMatrix::from_rows(3, vec![vec![0]]).unwrap();
        let code = CssCode::new("bad", h_x, h_z).unwrap();
        assert!(!code.validate());

        let h_x = SparseBinaryMatrix::from_rows(2, vec![vec![0, 1]]).unwrap();
        let h_z = SparseBinaryMatrix::from_rows(2, vec![vec![0, 1]]).unwrap();
        let code = CssCode::new("ok", h_x, h_z).unwrap();
        assert!(code.validate());
    }

    #[test]
    fn rejects_column_mismatch() {
        let h_x = SparseBinaryMatrix::identity(3);
        let h_z = SparseBinaryMatrix::identity(4);
        assert!(matches!(
            CssCode::new("bad", h_x, h_z),
            Err(Error::ColumnMismatch { .. })
        ));
    }

    #[test]
    fn alist_round_trip_matches_builder() {
        let c2 = build_c2();
        let dir = tempfile::tempdir().unwrap();
        let px = dir.path().join("hx.alist");
        let pz = dir.path().join("hz.alist");
        alist::write_alist(&px, c2.h_x()).unwrap();
        alist::write_alist(&pz, c2.h_z()).unwrap();
        let reloaded = load_css(&px, &pz, "c2").unwrap();
        assert_eq!(reloaded.h_x(), c2.h_x());
        assert_eq!(reloaded.h_z(), c2.h_z());
    }

    #[test]
    fn load_rejects_mismatched_n() {
        let dir = tempfile::tempdir().unwrap();
        let px = dir.path().join("hx.alist");
        let pz = dir.path().join("hz.alist");
        alist::write_alist(&px, &SparseBinaryMatrix::identity(3)).unwrap();
        alist::write_alist(&pz, &SparseBinaryMatrix::identity(4)).unwrap();
        assert!(matches!(
            load_css(&px, &pz, "bad"),
            Err(Error::ColumnMismatch { .. })
        ));
    }

    #[test]
    fn row_label_round_trip() {
        let label = HgpRowLabel { a_row: 3, b_row: 7 };
        assert_eq!(label.to_index(31), 100);
        assert_eq!(HgpRowLabel::from_index(100, 31), label);
    }

    fn random_matrix(rng: &mut Lcg, m: usize, n: usize) -> SparseBinaryMatrix {
        let rows = (0..m)
            .map(|_| {
                (0..n)
                    .filter(|_| rng.next_index(3) == 0)
                    .collect::<Vec<_>>()
            })
            .collect();
        SparseBinaryMatrix::from_rows(n, rows).unwrap()
    }
}
