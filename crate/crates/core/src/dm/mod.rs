//! Block triangularization of a sparsity pattern.
//!
//! The pipeline follows the Dulmage–Mendelsohn route:
//!
//! 1. split the bipartite graph into connected components,
//! 2. find a maximum matching per component,
//! 3. partition rows and columns into under-determined (`H`), square (`S`)
//!    and over-determined (`V`) parts by alternating-path reachability,
//! 4. split the square part into strongly connected components (Tarjan) and
//!    order them so the permuted matrix is block *upper* triangular.
//!
//! Steps 2–4 are independent per component.

mod coarse;
mod fine;
mod matching;

use std::collections::BinaryHeap;
use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::lap::IllPosedWitness;
use crate::sigma::{Permutation, SignatureMatrix};

pub use coarse::{coarse_decompose, CoarseDecomposition};
pub use fine::fine_decompose;
pub use matching::{brute_force_matching_size, maximum_matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DmError {
    #[error("adjacency index {index} out of range ({bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("fine decomposition needs a square graph with a perfect matching")]
    NotPerfectlyMatched,
    #[error("matching is not maximum: an augmenting path exists")]
    NotMaximumMatching,
    #[error("matching is inconsistent with the graph")]
    InvalidMatching,
    #[error("instance of size {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("structurally ill-posed: {0}")]
    StructurallyIllPosed(IllPosedWitness),
}

/// The 0/1 incidence pattern of a (possibly rectangular) matrix as a
/// bipartite graph between rows (equations) and columns (variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    n_rows: usize,
    n_cols: usize,
    adj: Vec<Vec<usize>>,
}

impl IncidenceGraph {
    /// Per-row column lists; duplicates are removed and lists sorted.
    pub fn new(n_rows: usize, n_cols: usize, mut adj: Vec<Vec<usize>>) -> Result<Self, DmError> {
        if adj.len() != n_rows {
            return Err(DmError::IndexOutOfRange {
                index: adj.len(),
                bound: n_rows,
            });
        }
        for row in &mut adj {
            if let Some(&bad) = row.iter().find(|&&j| j >= n_cols) {
                return Err(DmError::IndexOutOfRange {
                    index: bad,
                    bound: n_cols,
                });
            }
            row.sort_unstable();
            row.dedup();
        }
        Ok(IncidenceGraph { n_rows, n_cols, adj })
    }

    pub fn from_matrix(m: &SignatureMatrix) -> Self {
        let adj = (0..m.n()).map(|i| m.row(i).iter().map(|&(j, _)| j).collect()).collect();
        IncidenceGraph {
            n_rows: m.n(),
            n_cols: m.n(),
            adj,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Per-column row lists, sorted.
    pub fn transpose_adjacency(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (i, row) in self.adj.iter().enumerate() {
            for &j in row {
                cols[j].push(i);
            }
        }
        cols
    }

    /// The subgraph on the given rows and columns, reindexed locally in the
    /// given order.
    pub fn subgraph(&self, rows: &[usize], cols: &[usize]) -> IncidenceGraph {
        let mut local = vec![usize::MAX; self.n_cols];
        for (k, &j) in cols.iter().enumerate() {
            local[j] = k;
        }
        let adj = rows
            .iter()
            .map(|&i| {
                let mut r: Vec<usize> = self.adj[i]
                    .iter()
                    .filter_map(|&j| (local[j] != usize::MAX).then_some(local[j]))
                    .collect();
                r.sort_unstable();
                r
            })
            .collect();
        IncidenceGraph {
            n_rows: rows.len(),
            n_cols: cols.len(),
            adj,
        }
    }
}

/// A matching between rows and columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub row_mate: Vec<Option<usize>>,
    pub col_mate: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Matching {
            row_mate: vec![None; n_rows],
            col_mate: vec![None; n_cols],
            size: 0,
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.size == self.row_mate.len() && self.size == self.col_mate.len()
    }

    /// Checks mutual consistency and that every pair is an edge of `g`.
    pub fn validate(&self, g: &IncidenceGraph) -> Result<(), DmError> {
        if self.row_mate.len() != g.n_rows() || self.col_mate.len() != g.n_cols() {
            return Err(DmError::InvalidMatching);
        }
        let mut count = 0;
        for (i, mate) in self.row_mate.iter().enumerate() {
            if let Some(j) = *mate {
                if j >= g.n_cols() || self.col_mate[j] != Some(i) || !g.has_edge(i, j) {
                    return Err(DmError::InvalidMatching);
                }
                count += 1;
            }
        }
        let col_count = self.col_mate.iter().flatten().count();
        if count != self.size || col_count != self.size {
            return Err(DmError::InvalidMatching);
        }
        Ok(())
    }
}

/// A connected component of the bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Connected components, ordered by smallest row index. Isolated columns
/// form row-less components and come last, ordered by column index.
pub fn connected_components(g: &IncidenceGraph) -> Vec<Component> {
    let col_adj = g.transpose_adjacency();
    let mut row_seen = vec![false; g.n_rows()];
    let mut col_seen = vec![false; g.n_cols()];
    let mut comps = Vec::new();
    let mut stack = Vec::new();

    for start in 0..g.n_rows() {
        if row_seen[start] {
            continue;
        }
        row_seen[start] = true;
        let mut comp = Component {
            rows: vec![start],
            cols: Vec::new(),
        };
        stack.push(start);
        while let Some(i) = stack.pop() {
            for &j in g.row(i) {
                if col_seen[j] {
                    continue;
                }
                col_seen[j] = true;
                comp.cols.push(j);
                for &k in &col_adj[j] {
                    if !row_seen[k] {
                        row_seen[k] = true;
                        comp.rows.push(k);
                        stack.push(k);
                    }
                }
            }
        }
        comp.rows.sort_unstable();
        comp.cols.sort_unstable();
        comps.push(comp);
    }
    for (j, seen) in col_seen.iter().enumerate() {
        if !seen {
            comps.push(Component {
                rows: Vec::new(),
                cols: vec![j],
            });
        }
    }
    comps
}

/// One diagonal block, as ranges in permuted coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A block upper triangular form with square irreducible diagonal blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineBtf {
    permutation: Permutation,
    blocks: Vec<Block>,
    row_block: Vec<usize>,
    col_block: Vec<usize>,
    col_pos: Vec<usize>,
}

impl FineBtf {
    /// Builds the form from the ordered blocks, each a list of original rows
    /// and the list of original columns matched to them.
    pub(crate) fn from_blocks(n: usize, blocks: Vec<(Vec<usize>, Vec<usize>)>) -> FineBtf {
        let mut row_perm = Vec::with_capacity(n);
        let mut col_perm = Vec::with_capacity(n);
        let mut ranges = Vec::with_capacity(blocks.len());
        let mut row_block = vec![0; n];
        let mut col_block = vec![0; n];
        for (k, (rows, cols)) in blocks.into_iter().enumerate() {
            debug_assert_eq!(rows.len(), cols.len());
            let start = row_perm.len();
            for &i in &rows {
                row_block[i] = k;
            }
            for &j in &cols {
                col_block[j] = k;
            }
            row_perm.extend(rows);
            col_perm.extend(cols);
            ranges.push(Block {
                rows: start..row_perm.len(),
                cols: start..col_perm.len(),
            });
        }
        let permutation = Permutation::new(row_perm, col_perm).expect("blocks partition 0..n");
        let col_pos = permutation.col_inverse();
        FineBtf {
            permutation,
            blocks: ranges,
            row_block,
            col_block,
            col_pos,
        }
    }

    /// The trivial form: one block, identity permutation.
    pub fn single_block(n: usize) -> FineBtf {
        FineBtf::from_blocks(n, vec![((0..n).collect(), (0..n).collect())])
    }

    pub fn n(&self) -> usize {
        self.row_block.len()
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Position of original column `j` inside its own block.
    pub fn col_offset_in_block(&self, j: usize) -> usize {
        self.col_pos[j] - self.blocks[self.col_block[j]].cols.start
    }

    /// Block containing an original row.
    pub fn block_of_row(&self, row: usize) -> usize {
        self.row_block[row]
    }

    /// Block containing an original column.
    pub fn block_of_col(&self, col: usize) -> usize {
        self.col_block[col]
    }

    /// Original row indices of block `k`, in permuted order.
    pub fn block_rows(&self, k: usize) -> &[usize] {
        &self.permutation.row_perm()[self.blocks[k].rows.clone()]
    }

    /// Original column indices of block `k`, in permuted order.
    pub fn block_cols(&self, k: usize) -> &[usize] {
        &self.permutation.col_perm()[self.blocks[k].cols.clone()]
    }

    /// True if no entry of `g` lies below-left of its diagonal block.
    pub fn is_upper_triangular_for(&self, g: &IncidenceGraph) -> bool {
        (0..g.n_rows()).all(|i| g.row(i).iter().all(|&j| self.row_block[i] <= self.col_block[j]))
    }
}

/// Full result of the decomposition pipeline, including the ill-posed case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmDecomposition {
    pub components: Vec<Component>,
    pub matching: Matching,
    pub coarse: CoarseDecomposition,
    /// Fine form of the square part `SF x SX`; blocks are in square-part
    /// coordinates mapped back to original indices through `square_rows` and
    /// `square_cols`.
    pub fine: FineBtf,
    pub square_rows: Vec<usize>,
    pub square_cols: Vec<usize>,
}

impl DmDecomposition {
    /// Original rows of fine block `k` of the square part.
    pub fn fine_block_rows(&self, k: usize) -> Vec<usize> {
        self.fine.block_rows(k).iter().map(|&i| self.square_rows[i]).collect()
    }

    /// Original columns of fine block `k` of the square part.
    pub fn fine_block_cols(&self, k: usize) -> Vec<usize> {
        self.fine.block_cols(k).iter().map(|&j| self.square_cols[j]).collect()
    }
}

struct ComponentResult {
    pairs: Vec<(usize, usize)>,
    blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

fn solve_component(g: &IncidenceGraph, comp: &Component, local_col: &[usize]) -> ComponentResult {
    let adj = comp
        .rows
        .iter()
        .map(|&i| {
            let mut r: Vec<usize> = g.row(i).iter().map(|&j| local_col[j]).collect();
            r.sort_unstable();
            r
        })
        .collect();
    let sub = IncidenceGraph {
        n_rows: comp.rows.len(),
        n_cols: comp.cols.len(),
        adj,
    };
    let local = maximum_matching(&sub);
    let pairs = local
        .row_mate
        .iter()
        .enumerate()
        .filter_map(|(li, mate)| mate.map(|lj| (comp.rows[li], comp.cols[lj])))
        .collect();
    let blocks = if local.is_perfect() && !comp.rows.is_empty() {
        let fine = fine_decompose(&sub, &local).expect("perfect matching on a square component");
        (0..fine.n_blocks())
            .map(|k| {
                (
                    fine.block_rows(k).iter().map(|&i| comp.rows[i]).collect(),
                    fine.block_cols(k).iter().map(|&j| comp.cols[j]).collect(),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    ComponentResult { pairs, blocks }
}

/// Merges per-component block sequences. Components share no edges, so the
/// global order is an interleaving of the local ones; each step takes the
/// head whose smallest row index is largest, which is the tie-break rule used
/// inside [`fine_decompose`].
fn merge_block_sequences(seqs: Vec<Vec<(Vec<usize>, Vec<usize>)>>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut iters: Vec<_> = seqs.into_iter().map(|s| s.into_iter().peekable()).collect();
    let mut heads: BinaryHeap<(usize, usize)> = iters
        .iter_mut()
        .enumerate()
        .filter_map(|(c, it)| it.peek().map(|b| (b.0[0], c)))
        .collect();
    let mut out = Vec::new();
    while let Some((_, c)) = heads.pop() {
        out.push(iters[c].next().expect("peeked"));
        if let Some(b) = iters[c].peek() {
            heads.push((b.0[0], c));
        }
    }
    out
}

/// Runs the whole pipeline on a square pattern and reports every stage,
/// whether or not a perfect matching exists.
pub fn decompose(m: &SignatureMatrix) -> DmDecomposition {
    let g = IncidenceGraph::from_matrix(m);
    let components = connected_components(&g);
    // Components partition the columns, so one array holds every local index.
    let mut local_col = vec![0; g.n_cols()];
    for c in &components {
        for (k, &j) in c.cols.iter().enumerate() {
            local_col[j] = k;
        }
    }
    let results: Vec<ComponentResult> = if components.len() > 1 {
        components
            .par_iter()
            .map(|c| solve_component(&g, c, &local_col))
            .collect()
    } else {
        components.iter().map(|c| solve_component(&g, c, &local_col)).collect()
    };

    let mut matching = Matching::empty(g.n_rows(), g.n_cols());
    for &(i, j) in results.iter().flat_map(|r| &r.pairs) {
        matching.row_mate[i] = Some(j);
        matching.col_mate[j] = Some(i);
        matching.size += 1;
    }
    let coarse = coarse_decompose(&g, &matching).expect("matching is maximum by construction");

    let (fine, square_rows, square_cols) = if matching.is_perfect() {
        let blocks = merge_block_sequences(results.into_iter().map(|r| r.blocks).collect());
        let n = g.n_rows();
        (FineBtf::from_blocks(n, blocks), (0..n).collect(), (0..n).collect())
    } else {
        let rows = coarse.sf.clone();
        let cols = coarse.sx.clone();
        let sub = g.subgraph(&rows, &cols);
        let mut local = Matching::empty(rows.len(), cols.len());
        let mut local_col = vec![usize::MAX; g.n_cols()];
        for (k, &j) in cols.iter().enumerate() {
            local_col[j] = k;
        }
        for (li, &i) in rows.iter().enumerate() {
            let lj = local_col[matching.row_mate[i].expect("SF rows are matched")];
            local.row_mate[li] = Some(lj);
            local.col_mate[lj] = Some(li);
            local.size += 1;
        }
        let fine = if rows.is_empty() {
            FineBtf::from_blocks(0, Vec::new())
        } else {
            fine_decompose(&sub, &local).expect("square part is perfectly matched")
        };
        (fine, rows, cols)
    };

    DmDecomposition {
        components,
        matching,
        coarse,
        fine,
        square_rows,
        square_cols,
    }
}

/// Block triangular form of a structurally nonsingular square matrix.
///
/// Fails with a Hall violator when no perfect matching exists: the rows
/// reachable by alternating paths from unmatched rows, together with their
/// neighbour columns.
pub fn btf(m: &SignatureMatrix) -> Result<FineBtf, DmError> {
    let d = decompose(m);
    if d.matching.is_perfect() {
        Ok(d.fine)
    } else {
        Err(DmError::StructurallyIllPosed(IllPosedWitness {
            rows: d.coarse.vf,
            cols: d.coarse.vx,
        }))
    }
}

/// Exhaustive strong-Hall test: `|Γ(f)| ≥ |f| + 1` for every proper
/// non-empty row subset `f`. A 1x1 pattern passes iff its entry exists.
/// Test oracle, limited to 15 rows.
pub fn check_strong_hall(g: &IncidenceGraph) -> Result<bool, DmError> {
    const LIMIT: usize = 15;
    let n = g.n_rows();
    if n > LIMIT || g.n_cols() > LIMIT {
        return Err(DmError::TooLarge {
            n: n.max(g.n_cols()),
            limit: LIMIT,
        });
    }
    if n != g.n_cols() || n == 0 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(g.has_edge(0, 0));
    }
    let masks: Vec<u32> = (0..n)
        .map(|i| g.row(i).iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();
    let full = (1u32 << n) - 1;
    for subset in 1..full {
        let mut gamma = 0u32;
        let mut bits = subset;
        while bits != 0 {
            gamma |= masks[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        if gamma.count_ones() < subset.count_ones() + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> IncidenceGraph {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in edges {
            adj[i].push(j);
        }
        IncidenceGraph::new(n, n, adj).unwrap()
    }

    #[test]
    fn components_of_block_diagonal() {
        let g = graph(3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]);
        let c = connected_components(&g);
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].rows.len(), c[0].cols.len()), (2, 2));
        assert_eq!((c[1].rows.len(), c[1].cols.len()), (1, 1));
    }

    #[test]
    fn components_of_empty_pattern() {
        let c = connected_components(&graph(2, &[]));
        assert_eq!(c.len(), 4);
        assert_eq!(
            c[0],
            Component {
                rows: vec![0],
                cols: vec![]
            }
        );
        assert_eq!(
            c[3],
            Component {
                rows: vec![],
                cols: vec![1]
            }
        );
    }

    #[test]
    fn strong_hall_small_cases() {
        assert!(check_strong_hall(&graph(2, &[(0, 0), (0, 1), (1, 0), (1, 1)])).unwrap());
        assert!(!check_strong_hall(&graph(2, &[(0, 0), (1, 1)])).unwrap());
        assert!(check_strong_hall(&graph(1, &[(0, 0)])).unwrap());
        assert!(!check_strong_hall(&graph(1, &[])).unwrap());
        assert!(matches!(
            check_strong_hall(&graph(16, &[])),
            Err(DmError::TooLarge { .. })
        ));
    }

    #[test]
    fn identity_gives_singletons() {
        let m = SignatureMatrix::from_triplets(3, (0..3).map(|i| (i, i, 0))).unwrap();
        let f = btf(&m).unwrap();
        assert_eq!(f.n_blocks(), 3);
        assert!(f.blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn dense_is_one_block() {
        let m = SignatureMatrix::from_triplets(3, (0..9).map(|k| (k / 3, k % 3, 1))).unwrap();
        let f = btf(&m).unwrap();
        assert_eq!(f.n_blocks(), 1);
        assert_eq!(f.blocks()[0].len(), 3);
    }

    #[test]
    fn empty_column_is_ill_posed() {
        let m = SignatureMatrix::from_triplets(2, [(0, 0, 0), (1, 0, 1)]).unwrap();
        match btf(&m) {
            Err(DmError::StructurallyIllPosed(w)) => {
                assert_eq!(w.rows, vec![0, 1]);
                assert_eq!(w.cols, vec![0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triangular_order_respects_dependencies() {
        // Row 0 couples into column 1; column order must put block {0} first.
        let m = SignatureMatrix::from_triplets(2, [(0, 0, 0), (0, 1, 0), (1, 1, 0)]).unwrap();
        let f = btf(&m).unwrap();
        assert_eq!(f.n_blocks(), 2);
        assert!(f.is_upper_triangular_for(&IncidenceGraph::from_matrix(&m)));
        assert_eq!(f.permutation().row_perm(), &[0, 1]);
    }
}
