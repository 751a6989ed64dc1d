//! Sparse signature matrices.
//!
//! A signature matrix stores, for every equation `i` and variable `j`, the
//! highest derivative order `σ_ij` to which the variable occurs in the
//! equation. Most entries are `-∞` (the variable does not occur at all); those
//! are represented by *absence* of a key, never by a sentinel value. The set of
//! stored keys is the sparsity pattern `S`.
//!
//! All indices in the Rust API are 0-based. The text formats (see [`format`])
//! are 1-based.

pub mod format;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use format::{read_sigma_file, read_sigma_file_with_sentinel, write_sigma_file, write_sigma_file_dense};

/// A finite derivative order.
pub type Order = u32;

/// Largest order accepted by [`SignatureMatrix::from_triplets`]. Keeps every
/// offset computation comfortably inside `i64`.
pub const MAX_ORDER: i64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigmaError {
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("index ({row}, {col}) out of range for n = {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("negative order {order} at ({row}, {col})")]
    NegativeOrder { row: usize, col: usize, order: i64 },
    #[error("order {order} at ({row}, {col}) exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge { row: usize, col: usize, order: i64 },
    #[error("expected {expected} {side} labels, found {found}")]
    LabelCount { side: Side, expected: usize, found: usize },
    #[error("duplicate {side} label `{label}`")]
    DuplicateLabel { side: Side, label: String },
    #[error("invalid {side} label `{label}`: labels must be non-empty, contain no whitespace and not start with `#`")]
    InvalidLabel { side: Side, label: String },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("{side} permutation is not a bijection on 0..{n}")]
    InvalidPermutation { side: Side, n: usize },
    #[error("rectangular {rows}x{cols} signature matrices are not supported")]
    Rectangular { rows: usize, cols: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<SigmaError>,
    },
}

impl SigmaError {
    /// The line number, for errors raised while reading a text file.
    pub fn line(&self) -> Option<usize> {
        match self {
            SigmaError::Parse { line, .. } | SigmaError::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Rows (equations) or columns (variables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Row,
    Col,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Row => "row",
            Side::Col => "column",
        })
    }
}

/// An immutable square signature matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatrix {
    n: usize,
    // Per row, finite entries sorted by column.
    rows: Vec<Vec<(usize, Order)>>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl SignatureMatrix {
    /// Builds an `n x n` matrix from `(row, col, order)` triplets.
    ///
    /// Duplicate keys are rejected rather than merged.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self, SigmaError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        if n == 0 {
            return Err(SigmaError::EmptyMatrix);
        }
        let mut rows: Vec<Vec<(usize, Order)>> = vec![Vec::new(); n];
        for (row, col, order) in triplets {
            if row >= n || col >= n {
                return Err(SigmaError::IndexOutOfRange { row, col, n });
            }
            if order < 0 {
                return Err(SigmaError::NegativeOrder { row, col, order });
            }
            if order > MAX_ORDER {
                return Err(SigmaError::OrderTooLarge { row, col, order });
            }
            rows[row].push((col, order as Order));
        }
        for (row, entries) in rows.iter_mut().enumerate() {
            entries.sort_unstable_by_key(|&(col, _)| col);
            if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(SigmaError::DuplicateEntry { row, col: w[0].0 });
            }
        }
        Ok(SignatureMatrix {
            n,
            rows,
            row_labels: None,
            col_labels: None,
        })
    }

    /// Attaches equation names.
    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self, SigmaError> {
        validate_labels(Side::Row, self.n, &labels)?;
        self.row_labels = Some(labels);
        Ok(self)
    }

    /// Attaches variable names.
    pub fn with_col_labels(mut self, labels: Vec<String>) -> Result<Self, SigmaError> {
        validate_labels(Side::Col, self.n, &labels)?;
        self.col_labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of finite entries, `|S|`.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `σ_ij`, or `None` for `-∞`.
    pub fn get(&self, row: usize, col: usize) -> Option<Order> {
        let entries = self.rows.get(row)?;
        entries
            .binary_search_by_key(&col, |&(c, _)| c)
            .ok()
            .map(|k| entries[k].1)
    }

    /// Finite entries of one row, sorted by column.
    pub fn row(&self, row: usize) -> &[(usize, Order)] {
        &self.rows[row]
    }

    /// All finite entries as `(row, col, order)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Order)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, s)| (i, j, s)))
    }

    /// Column-wise view: for every column, its finite entries as `(row, order)`
    /// sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, Order)>> {
        let mut cols = vec![Vec::new(); self.n];
        for (i, j, s) in self.entries() {
            cols[j].push((i, s));
        }
        cols
    }

    /// Largest finite order, or `None` for an empty pattern.
    pub fn max_order(&self) -> Option<Order> {
        self.entries().map(|(_, _, s)| s).max()
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// Display name of an equation: its label, or `f<i+1>`.
    pub fn row_name(&self, row: usize) -> String {
        match &self.row_labels {
            Some(l) => l[row].clone(),
            None => format!("f{}", row + 1),
        }
    }

    /// Display name of a variable: its label, or `x<j+1>`.
    pub fn col_name(&self, col: usize) -> String {
        match &self.col_labels {
            Some(l) => l[col].clone(),
            None => format!("x{}", col + 1),
        }
    }

    /// Finds a row index by label.
    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Finds a column index by label.
    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Reorders rows and columns: entry `(i', j')` of the result is entry
    /// `(row_perm[i'], col_perm[j'])` of `self`. Labels travel with their rows
    /// and columns.
    pub fn permute(&self, p: &Permutation) -> Result<SignatureMatrix, SigmaError> {
        if p.n() != self.n {
            return Err(SigmaError::SizeMismatch {
                expected: self.n,
                found: p.n(),
            });
        }
        let col_inv = p.col_inverse();
        let rows = p
            .row_perm()
            .iter()
            .map(|&old| {
                let mut r: Vec<_> = self.rows[old].iter().map(|&(j, s)| (col_inv[j], s)).collect();
                r.sort_unstable_by_key(|&(j, _)| j);
                r
            })
            .collect();
        let pick = |labels: &Option<Vec<String>>, perm: &[usize]| {
            labels.as_ref().map(|l| perm.iter().map(|&k| l[k].clone()).collect())
        };
        Ok(SignatureMatrix {
            n: self.n,
            rows,
            row_labels: pick(&self.row_labels, p.row_perm()),
            col_labels: pick(&self.col_labels, p.col_perm()),
        })
    }

    /// The square submatrix on the given rows and columns (in the given order),
    /// with labels restricted accordingly.
    ///
    /// # Panics
    ///
    /// If the index lists differ in length, are empty, or contain an index
    /// out of range.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SignatureMatrix {
        assert_eq!(rows.len(), cols.len(), "submatrix must be square");
        assert!(!rows.is_empty(), "submatrix must be non-empty");
        let mut local_col = vec![usize::MAX; self.n];
        for (k, &j) in cols.iter().enumerate() {
            local_col[j] = k;
        }
        let sub_rows = rows
            .iter()
            .map(|&i| {
                let mut r: Vec<_> = self.rows[i]
                    .iter()
                    .filter(|&&(j, _)| local_col[j] != usize::MAX)
                    .map(|&(j, s)| (local_col[j], s))
                    .collect();
                r.sort_unstable_by_key(|&(j, _)| j);
                r
            })
            .collect();
        SignatureMatrix {
            n: rows.len(),
            rows: sub_rows,
            row_labels: self
                .row_labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
            col_labels: self
                .col_labels
                .as_ref()
                .map(|l| cols.iter().map(|&j| l[j].clone()).collect()),
        }
    }
}

fn validate_labels(side: Side, n: usize, labels: &[String]) -> Result<(), SigmaError> {
    if labels.len() != n {
        return Err(SigmaError::LabelCount {
            side,
            expected: n,
            found: labels.len(),
        });
    }
    let mut seen = HashSet::with_capacity(n);
    for label in labels {
        if label.is_empty() || label.starts_with('#') || label.chars().any(char::is_whitespace) {
            return Err(SigmaError::InvalidLabel {
                side,
                label: label.clone(),
            });
        }
        if !seen.insert(label.as_str()) {
            return Err(SigmaError::DuplicateLabel {
                side,
                label: label.clone(),
            });
        }
    }
    Ok(())
}

/// A pair of bijections on `0..n`, one for rows and one for columns.
///
/// `row_perm[k]` is the original row placed at position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
}

impl Permutation {
    pub fn new(row_perm: Vec<usize>, col_perm: Vec<usize>) -> Result<Self, SigmaError> {
        if row_perm.len() != col_perm.len() {
            return Err(SigmaError::SizeMismatch {
                expected: row_perm.len(),
                found: col_perm.len(),
            });
        }
        let n = row_perm.len();
        if !is_bijection(&row_perm) {
            return Err(SigmaError::InvalidPermutation { side: Side::Row, n });
        }
        if !is_bijection(&col_perm) {
            return Err(SigmaError::InvalidPermutation { side: Side::Col, n });
        }
        Ok(Permutation { row_perm, col_perm })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            row_perm: (0..n).collect(),
            col_perm: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.row_perm.len()
    }

    pub fn row_perm(&self) -> &[usize] {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &[usize] {
        &self.col_perm
    }

    /// Position of each original row in the permuted order.
    pub fn row_inverse(&self) -> Vec<usize> {
        invert(&self.row_perm)
    }

    /// Position of each original column in the permuted order.
    pub fn col_inverse(&self) -> Vec<usize> {
        invert(&self.col_perm)
    }

    /// The permutation that undoes `self` under [`SignatureMatrix::permute`].
    pub fn inverse(&self) -> Permutation {
        Permutation {
            row_perm: self.row_inverse(),
            col_perm: self.col_inverse(),
        }
    }
}

fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&k| k < p.len() && !std::mem::replace(&mut seen[k], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (k, &orig) in p.iter().enumerate() {
        inv[orig] = k;
    }
    inv
}
