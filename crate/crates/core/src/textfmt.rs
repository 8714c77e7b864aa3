//! Plain-text matrix files.
//!
//! One row per line, entries are rational literals (`3`, `-2/5`) separated by
//! whitespace. Lines whose first non-blank character is `#` are comments;
//! blank lines are ignored.

use thiserror::Error;

use crate::linalg::{BistochasticError, BistochasticMatrix, RationalMatrix};
use crate::rational::{Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextFormatError {
    #[error("line {line}, entry {entry}: {source}")]
    BadEntry { line: usize, entry: usize, source: RationalError },
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("no matrix rows found")]
    Empty,
    #[error("{0}")]
    NotBistochastic(#[from] BistochasticError),
}

pub fn parse_matrix(text: &str) -> Result<RationalMatrix, TextFormatError> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .enumerate()
            .map(|(k, tok)| {
                tok.parse::<Rational>().map_err(|source| TextFormatError::BadEntry {
                    line: idx + 1,
                    entry: k + 1,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(TextFormatError::RaggedRow {
                    line: idx + 1,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(TextFormatError::Empty);
    }
    Ok(RationalMatrix::from_rows(rows))
}

pub fn parse_bistochastic(text: &str) -> Result<BistochasticMatrix, TextFormatError> {
    Ok(BistochasticMatrix::new(parse_matrix(text)?)?)
}

/// Renders in the same format [`parse_matrix`] reads.
pub fn render_matrix(m: &RationalMatrix) -> String {
    m.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parses_comments_and_blanks() {
        let text = "# matrix R\n\n3/5 0 2/5\n  0 3/5 2/5 \n# trailing\n2/5 2/5 1/5\n";
        let m = parse_bistochastic(text).unwrap();
        assert_eq!(m.get(2, 2), &rat(1, 5));
        assert_eq!(parse_bistochastic(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn errors_carry_locations() {
        assert!(matches!(
            parse_matrix("1 0\n0 x\n"),
            Err(TextFormatError::BadEntry { line: 2, entry: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("1 0\n0 1/0\n"),
            Err(TextFormatError::BadEntry { line: 2, entry: 2, source: RationalError::ZeroDenominator(_) })
        ));
        assert_eq!(
            parse_matrix("1 0\n# c\n0 1 0\n"),
            Err(TextFormatError::RaggedRow { line: 3, expected: 2, found: 3 })
        );
        assert_eq!(parse_matrix("# only comments\n"), Err(TextFormatError::Empty));
        assert_eq!(
            parse_bistochastic("1/2 2/5\n1/2 3/5\n"),
            Err(TextFormatError::NotBistochastic(BistochasticError::RowSum { row: 1, sum: rat(9, 10) }))
        );
    }
}
