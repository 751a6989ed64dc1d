use super::{DmError, IncidenceGraph, Matching};

/// Coarse Dulmage–Mendelsohn partition.
///
/// With rows ordered `(HF, SF, VF)` and columns `(HX, SX, VX)` the pattern
/// has the form
///
/// ```text
///        HX   SX   VX
///   HF [ Ah   *    *  ]
///   SF [ 0    As   *  ]
///   VF [ 0    0    Av ]
/// ```
///
/// where `Ah` is under-determined, `As` square and perfectly matched, and
/// `Av` over-determined. All six lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoarseDecomposition {
    /// Rows reachable by an alternating path from an unmatched column.
    pub hf: Vec<usize>,
    pub sf: Vec<usize>,
    /// Rows reachable by an alternating path from an unmatched row.
    pub vf: Vec<usize>,
    /// Columns reachable by an alternating path from an unmatched column.
    pub hx: Vec<usize>,
    pub sx: Vec<usize>,
    /// Columns reachable by an alternating path from an unmatched row.
    pub vx: Vec<usize>,
}

impl CoarseDecomposition {
    pub fn is_square_only(&self) -> bool {
        self.hf.is_empty() && self.hx.is_empty() && self.vf.is_empty() && self.vx.is_empty()
    }
}

/// Partitions rows and columns by alternating-path reachability with respect
/// to a maximum matching. A path of length zero counts, so unmatched vertices
/// belong to their own reachable set.
pub fn coarse_decompose(g: &IncidenceGraph, m: &Matching) -> Result<CoarseDecomposition, DmError> {
    m.validate(g)?;
    let col_adj = g.transpose_adjacency();

    // From unmatched rows: row -> any column via a non-matching edge,
    // column -> its mate via the matching edge.
    let mut v_row = vec![false; g.n_rows()];
    let mut v_col = vec![false; g.n_cols()];
    let mut stack: Vec<usize> = (0..g.n_rows()).filter(|&i| m.row_mate[i].is_none()).collect();
    for &i in &stack {
        v_row[i] = true;
    }
    while let Some(i) = stack.pop() {
        for &j in g.row(i) {
            if v_col[j] || m.row_mate[i] == Some(j) {
                continue;
            }
            v_col[j] = true;
            match m.col_mate[j] {
                Some(k) if !v_row[k] => {
                    v_row[k] = true;
                    stack.push(k);
                }
                Some(_) => {}
                None => return Err(DmError::NotMaximumMatching),
            }
        }
    }

    // From unmatched columns, symmetrically.
    let mut h_row = vec![false; g.n_rows()];
    let mut h_col = vec![false; g.n_cols()];
    let mut stack: Vec<usize> = (0..g.n_cols()).filter(|&j| m.col_mate[j].is_none()).collect();
    for &j in &stack {
        h_col[j] = true;
    }
    while let Some(j) = stack.pop() {
        for &i in &col_adj[j] {
            if h_row[i] || m.col_mate[j] == Some(i) {
                continue;
            }
            h_row[i] = true;
            match m.row_mate[i] {
                Some(k) if !h_col[k] => {
                    h_col[k] = true;
                    stack.push(k);
                }
                Some(_) => {}
                None => return Err(DmError::NotMaximumMatching),
            }
        }
    }

    let mut d = CoarseDecomposition::default();
    for i in 0..g.n_rows() {
        match (h_row[i], v_row[i]) {
            (true, false) => d.hf.push(i),
            (false, true) => d.vf.push(i),
            (false, false) => d.sf.push(i),
            (true, true) => return Err(DmError::NotMaximumMatching),
        }
    }
    for j in 0..g.n_cols() {
        match (h_col[j], v_col[j]) {
            (true, false) => d.hx.push(j),
            (false, true) => d.vx.push(j),
            (false, false) => d.sx.push(j),
            (true, true) => return Err(DmError::NotMaximumMatching),
        }
    }
    Ok(d)
}
