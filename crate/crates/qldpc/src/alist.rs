//! Reader and writer for the alist sparse-matrix exchange format.
//!
//! Layout for an `m`-by-`n` matrix:
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices of each column, zero-padded>
//! <m lines: 1-based column indices of each row, zero-padded>
//! ```
//!
//! The writer emits the zero-padded form. The reader tolerates missing
//! padding and cross-checks the column and row sections against each
//! other.

use crate::gf2::SparseBinaryMatrix;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected integer, got {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("column and row sections disagree (row {row}, column {col})")]
    Inconsistent { row: usize, col: usize },
    #[error("matrix construction failed: {0}")]
    Matrix(#[from] crate::gf2::Error),
}

/// Parses an alist document from a string.
pub fn parse_alist(text: &str) -> Result<SparseBinaryMatrix, Error> {
    let mut lines = text.lines().enumerate();

    let mut next_ints = |expected: &str| -> Result<(usize, Vec<usize>), Error> {
        for (idx, raw) in lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut values = Vec::new();
            for token in line.split_whitespace() {
                values.push(token.parse::<usize>().map_err(|_| Error::BadToken {
                    line: idx + 1,
                    token: token.to_string(),
                })?);
            }
            return Ok((idx + 1, values));
        }
        Err(Error::Malformed {
            line: text.lines().count(),
            message: format!("unexpected end of file, expected {expected}"),
        })
    };

    let (line_no, header) = next_ints("the size header \"n m\"")?;
    if header.len() != 2 {
        return Err(Error::Malformed {
            line: line_no,
            message: format!("expected \"n m\", got {} values", header.len()),
        });
    }
    let (n, m) = (header[0], header[1]);
    let (_, _max_degrees) = next_ints("the maximum-degree line")?;

    let (line_no, col_degrees) = next_ints("the column degree list")?;
    if col_degrees.len() != n {
        return Err(Error::Malformed {
            line: line_no,
            message: format!("expected {n} column degrees, got {}", col_degrees.len()),
        });
    }
    let (line_no, row_degrees) = next_ints("the row degree list")?;
    if row_degrees.len() != m {
        return Err(Error::Malformed {
            line: line_no,
            message: format!("expected {m} row degrees, got {}", row_degrees.len()),
        });
    }

    // Support lines: 1-based indices, trailing zeros are padding. Degree-0
    // entries may appear as blank lines, so stop skipping blanks here.
    let mut support_lines = lines;
    let mut read_support = |degree: usize, what: &str| -> Result<Vec<usize>, Error> {
        let (idx, raw) = support_lines.next().ok_or(Error::Malformed {
            line: text.lines().count(),
            message: format!("unexpected end of file in {what} supports"),
        })?;
        let mut values = Vec::new();
        for token in raw.split_whitespace() {
            let value = token.parse::<usize>().map_err(|_| Error::BadToken {
                line: idx + 1,
                token: token.to_string(),
            })?;
            if value == 0 {
                continue; // padding
            }
            values.push(value - 1);
        }
        if values.len() != degree {
            return Err(Error::Malformed {
                line: idx + 1,
                message: format!(
                    "{what} support has {} entries, degree list says {degree}",
                    values.len()
                ),
            });
        }
        Ok(values)
    };

    let mut col_supports = Vec::with_capacity(n);
    for (c, &degree) in col_degrees.iter().enumerate() {
        let support = read_support(degree, "column")?;
        for &r in &support {
            if r >= m {
                return Err(Error::Malformed {
                    line: 0,
                    message: format!("column {c} references row {} of {m}", r + 1),
                });
            }
        }
        col_supports.push(support);
    }
    let mut row_supports = Vec::with_capacity(m);
    for &degree in &row_degrees {
        row_supports.push(read_support(degree, "row")?);
    }

    let matrix = SparseBinaryMatrix::from_rows(n, row_supports)?;
    for (c, support) in col_supports.iter_mut().enumerate() {
        support.sort_unstable();
        if support != matrix.col(c) {
            let row = support
                .iter()
                .find(|r| !matrix.col(c).contains(r))
                .or_else(|| matrix.col(c).iter().find(|r| !support.contains(r)))
                .copied()
                .unwrap_or(0);
            return Err(Error::Inconsistent { row, col: c });
        }
    }
    Ok(matrix)
}

/// Renders a matrix as a zero-padded alist document.
pub fn format_alist(matrix: &SparseBinaryMatrix) -> String {
    let n = matrix.n_cols();
    let m = matrix.n_rows();
    let max_col = (0..n).map(|c| matrix.col_weight(c)).max().unwrap_or(0);
    let max_row = (0..m).map(|r| matrix.row_weight(r)).max().unwrap_or(0);

    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n"));
    out.push_str(&format!("{max_col} {max_row}\n"));
    let join = |values: Vec<String>| values.join(" ");
    out.push_str(&join(
        (0..n).map(|c| matrix.col_weight(c).to_string()).collect(),
    ));
    out.push('\n');
    out.push_str(&join(
        (0..m).map(|r| matrix.row_weight(r).to_string()).collect(),
    ));
    out.push('\n');
    let padded = |support: &[usize], width: usize| {
        let mut entries: Vec<String> = support.iter().map(|&i| (i + 1).to_string()).collect();
        entries.resize(width, "0".to_string());
        entries.join(" ")
    };
    for c in 0..n {
        out.push_str(&padded(matrix.col(c), max_col));
        out.push('\n');
    }
    for r in 0..m {
        out.push_str(&padded(matrix.row(r), max_row));
        out.push('\n');
    }
    out
}

/// Reads a matrix from an alist file.
pub fn read_alist<P: AsRef<Path>>(path: P) -> Result<SparseBinaryMatrix, Error> {
    parse_alist(&fs::read_to_string(path)?)
}

/// Writes a matrix to an alist file in padded form.
pub fn write_alist<P: AsRef<Path>>(path: P, matrix: &SparseBinaryMatrix) -> Result<(), Error> {
    fs::write(path, format_alist(matrix))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = SparseBinaryMatrix::from_rows(5, vec![vec![0, 2, 4], vec![1, 2], vec![3]]).unwrap();
        let text = format_alist(&m);
        assert_eq!(parse_alist(&text).unwrap(), m);
    }

    #[test]
    fn reads_unpadded_form() {
        // Same matrix as `round_trip` but without padding zeros.
        let text = "5 3\n2 3\n1 1 2 1 1\n3 2 1\n1\n2\n1 2\n3\n1\n1 3 5\n2 3\n4\n";
        let m = parse_alist(text).unwrap();
        assert_eq!(m.row(0), &[0, 2, 4]);
        assert_eq!(m.row(1), &[1, 2]);
        assert_eq!(m.row(2), &[3]);
    }

    #[test]
    fn rejects_inconsistent_sections() {
        // Row section says row 0 = {1, 3}; column section claims the one
        // goes through columns 0 and 3 instead.
        let text = "4 1\n1 2\n1 0 0 1\n2\n1\n0\n0\n1\n2 4\n";
        assert!(matches!(parse_alist(text), Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn rejects_truncated_file() {
        assert!(matches!(
            parse_alist("4 2\n1 1\n1 1 0 0\n"),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn rejects_non_integer() {
        assert!(matches!(
            parse_alist("x 2\n"),
            Err(Error::BadToken { .. })
        ));
    }
}
