//! The Sigma Exchange Format.
//!
//! A line-oriented UTF-8 text format:
//!
//! ```text
//! n 3
//! # optional labels, exactly n names each
//! rows f1 f2 f3
//! cols x y z
//! s 1 1 2
//! s 2 3 0
//! ```
//!
//! `s <i> <j> <order>` lines carry 1-based indices and a nonnegative order.
//! Lines starting with `#` are comments, blank lines are ignored. The header
//! `n <R> <C>` is reserved for rectangular matrices and only accepted when
//! `R == C`. On write, entry lines are sorted by `(i, j)`.

use std::fmt::Write as _;

use super::{SigmaError, SignatureMatrix};

/// Parses a matrix in the exchange format.
pub fn read_sigma_file(text: &str) -> Result<SignatureMatrix, SigmaError> {
    read_sigma_file_with_sentinel(text, None)
}

/// Like [`read_sigma_file`], but entries whose order equals `sentinel` are
/// treated as `-∞` and dropped. This reads files written by
/// [`write_sigma_file_dense`].
pub fn read_sigma_file_with_sentinel(text: &str, sentinel: Option<i64>) -> Result<SignatureMatrix, SigmaError> {
    let mut n: Option<usize> = None;
    let mut row_labels: Option<(usize, Vec<String>)> = None;
    let mut col_labels: Option<(usize, Vec<String>)> = None;
    let mut triplets = Vec::new();
    let mut entry_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or_default();
        let parse_err = |message: String| SigmaError::Parse { line: line_no, message };

        let Some(size) = n else {
            if keyword != "n" {
                return Err(parse_err(format!("expected header `n <N>`, found `{line}`")));
            }
            let dims: Vec<usize> = tokens
                .map(|t| t.parse::<usize>().map_err(|_| parse_err(format!("invalid size `{t}`"))))
                .collect::<Result<_, _>>()?;
            let size = match dims[..] {
                [size] => size,
                [r, c] if r == c => r,
                [r, c] => {
                    return Err(SigmaError::AtLine {
                        line: line_no,
                        source: Box::new(SigmaError::Rectangular { rows: r, cols: c }),
                    })
                }
                _ => return Err(parse_err("header must be `n <N>`".into())),
            };
            if size == 0 {
                return Err(SigmaError::AtLine {
                    line: line_no,
                    source: Box::new(SigmaError::EmptyMatrix),
                });
            }
            n = Some(size);
            continue;
        };

        match keyword {
            "n" => return Err(parse_err("duplicate header".into())),
            "rows" | "cols" => {
                let names: Vec<String> = tokens.map(str::to_owned).collect();
                if names.len() != size {
                    return Err(parse_err(format!(
                        "`{keyword}` needs exactly {size} names, found {}",
                        names.len()
                    )));
                }
                let slot = if keyword == "rows" {
                    &mut row_labels
                } else {
                    &mut col_labels
                };
                if slot.is_some() {
                    return Err(parse_err(format!("duplicate `{keyword}` line")));
                }
                *slot = Some((line_no, names));
            }
            "s" => {
                let fields: Vec<&str> = tokens.collect();
                if fields.len() != 3 {
                    return Err(parse_err("entry must be `s <i> <j> <order>`".into()));
                }
                let index = |t: &str| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(format!("invalid index `{t}`")))
                };
                let i = index(fields[0])?;
                let j = index(fields[1])?;
                let order = fields[2]
                    .parse::<i64>()
                    .map_err(|_| parse_err(format!("invalid order `{}`", fields[2])))?;
                if i == 0 || j == 0 || i > size || j > size {
                    return Err(SigmaError::AtLine {
                        line: line_no,
                        source: Box::new(SigmaError::IndexOutOfRange {
                            row: i,
                            col: j,
                            n: size,
                        }),
                    });
                }
                if sentinel == Some(order) {
                    continue;
                }
                triplets.push((i - 1, j - 1, order));
                entry_lines.push(line_no);
            }
            other => return Err(parse_err(format!("unknown record `{other}`"))),
        }
    }

    let Some(size) = n else {
        return Err(SigmaError::Parse {
            line: text.lines().count().max(1),
            message: "missing header `n <N>`".into(),
        });
    };

    let matrix = SignatureMatrix::from_triplets(size, triplets.iter().copied()).map_err(|e| {
        // Report the offending entry in file coordinates.
        let (key, line) = match &e {
            SigmaError::NegativeOrder { row, col, .. }
            | SigmaError::OrderTooLarge { row, col, .. }
            | SigmaError::DuplicateEntry { row, col } => {
                let pos = triplets
                    .iter()
                    .rposition(|&(i, j, _)| i == *row && j == *col)
                    .unwrap_or(0);
                ((row + 1, col + 1), entry_lines.get(pos).copied().unwrap_or(0))
            }
            _ => ((0, 0), 0),
        };
        let source = match e {
            SigmaError::NegativeOrder { order, .. } => SigmaError::NegativeOrder {
                row: key.0,
                col: key.1,
                order,
            },
            SigmaError::OrderTooLarge { order, .. } => SigmaError::OrderTooLarge {
                row: key.0,
                col: key.1,
                order,
            },
            SigmaError::DuplicateEntry { .. } => SigmaError::DuplicateEntry { row: key.0, col: key.1 },
            other => other,
        };
        SigmaError::AtLine {
            line,
            source: Box::new(source),
        }
    })?;

    let label_err = |line: usize| {
        move |e: SigmaError| SigmaError::AtLine {
            line,
            source: Box::new(e),
        }
    };
    let matrix = match row_labels {
        Some((line, l)) => matrix.with_row_labels(l).map_err(label_err(line))?,
        None => matrix,
    };
    let matrix = match col_labels {
        Some((line, l)) => matrix.with_col_labels(l).map_err(label_err(line))?,
        None => matrix,
    };
    Ok(matrix)
}

fn write_header(m: &SignatureMatrix, out: &mut String) {
    let _ = writeln!(out, "n {}", m.n());
    if let Some(labels) = m.row_labels() {
        let _ = writeln!(out, "rows {}", labels.join(" "));
    }
    if let Some(labels) = m.col_labels() {
        let _ = writeln!(out, "cols {}", labels.join(" "));
    }
}

/// Serializes a matrix; `read_sigma_file(&write_sigma_file(m)) == m`.
pub fn write_sigma_file(m: &SignatureMatrix) -> String {
    let mut out = String::with_capacity(16 * (m.nnz() + 2));
    write_header(m, &mut out);
    for (i, j, s) in m.entries() {
        let _ = writeln!(out, "s {} {} {}", i + 1, j + 1, s);
    }
    out
}

/// Dense export: every position is written, with `sentinel` standing in for
/// `-∞`. Only for interop with tools that expect a sentinel; read it back
/// with [`read_sigma_file_with_sentinel`].
pub fn write_sigma_file_dense(m: &SignatureMatrix, sentinel: i64) -> String {
    let n = m.n();
    let mut out = String::with_capacity(12 * n * n + 32);
    write_header(m, &mut out);
    for i in 0..n {
        let row = m.row(i);
        let mut next = row.iter().peekable();
        for j in 0..n {
            let value = match next.peek() {
                Some(&&(c, s)) if c == j => {
                    next.next();
                    i64::from(s)
                }
                _ => sentinel,
            };
            let _ = writeln!(out, "s {} {} {}", i + 1, j + 1, value);
        }
    }
    out
}
