//! Canonical offsets, structural index and the system Jacobian pattern.
//!
//! Given a maximum-value transversal `T`, the canonical offsets are the
//! elementwise smallest nonnegative integers `c` (equations) and `d`
//! (variables) with
//!
//! ```text
//! d_j - c_i >= σ_ij   for every finite entry,
//! d_j - c_i  = σ_ij   on T.
//! ```
//!
//! They are the least fixed point of the sweep
//!
//! ```text
//! d_j := max_i (σ_ij + c_i)
//! c_i := d_T(i) - σ_i,T(i)
//! ```
//!
//! started from `c = 0`. On a block upper triangular matrix the same fixed
//! point is reached block by block from top to bottom: the rows of earlier
//! blocks are final by the time a block is visited, so their contributions
//! enter as fixed lower bounds ("floors") on that block's `d`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::dm::{self, DmError, FineBtf};
use crate::lap::{self, Assignment, IllPosedWitness, LapError};
use crate::sigma::SignatureMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OffsetError {
    #[error("structurally ill-posed: {0}")]
    StructurallyIllPosed(IllPosedWitness),
    #[error("offset iteration diverges: the transversal is not of maximum value")]
    NotOptimalTransversal { block: Option<usize> },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("transversal of block {block} is invalid")]
    InvalidBlockTransversal { block: usize },
}

impl From<LapError> for OffsetError {
    fn from(e: LapError) -> Self {
        match e {
            LapError::StructurallyIllPosed(w) => OffsetError::StructurallyIllPosed(w),
            LapError::TooLarge { n, .. } => OffsetError::SizeMismatch { expected: 0, found: n },
            LapError::InvalidAssignment => OffsetError::InvalidBlockTransversal { block: 0 },
        }
    }
}

impl From<DmError> for OffsetError {
    fn from(e: DmError) -> Self {
        match e {
            DmError::StructurallyIllPosed(w) => OffsetError::StructurallyIllPosed(w),
            other => unreachable!("btf only fails on ill-posed input, got {other}"),
        }
    }
}

/// Equation offsets `c` and variable offsets `d`, in original order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OffsetVectors {
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

impl OffsetVectors {
    /// `Σ d - Σ c`, the dual objective.
    pub fn dual_value(&self) -> i64 {
        self.d.iter().sum::<i64>() - self.c.iter().sum::<i64>()
    }

    /// Nonnegativity and `d_j - c_i >= σ_ij` on the whole pattern.
    pub fn is_feasible_for(&self, m: &SignatureMatrix) -> bool {
        self.c.len() == m.n()
            && self.d.len() == m.n()
            && self.c.iter().all(|&c| c >= 0)
            && m.entries().all(|(i, j, s)| self.d[j] - self.c[i] >= i64::from(s))
    }
}

fn divergence_bound(m: &SignatureMatrix) -> i64 {
    m.n() as i64 * (i64::from(m.max_order().unwrap_or(0)) + 1)
}

fn check_transversal(m: &SignatureMatrix, t: &Assignment) -> Result<(), OffsetError> {
    if t.n() != m.n() {
        return Err(OffsetError::SizeMismatch {
            expected: m.n(),
            found: t.n(),
        });
    }
    Ok(())
}

/// Sweeps the global fixed point from `c = 0`; `on_sweep` sees the state
/// after every sweep. Returns the offsets and the sweep count `q`.
fn global_fixed_point(
    m: &SignatureMatrix,
    t: &Assignment,
    mut on_sweep: impl FnMut(&OffsetVectors),
) -> Result<(OffsetVectors, usize), OffsetError> {
    check_transversal(m, t)?;
    let n = m.n();
    let diag: Vec<i64> = (0..n)
        .map(|i| i64::from(m.get(i, t.row_to_col()[i]).expect("transversal inside pattern")))
        .collect();
    let bound = divergence_bound(m);
    let mut o = OffsetVectors {
        c: vec![0; n],
        d: vec![0; n],
    };
    let mut q = 0;
    loop {
        q += 1;
        o.d.iter_mut().for_each(|d| *d = 0);
        for (i, j, s) in m.entries() {
            o.d[j] = o.d[j].max(i64::from(s) + o.c[i]);
        }
        let mut changed = false;
        for (i, &s) in diag.iter().enumerate() {
            let c = o.d[t.row_to_col()[i]] - s;
            if c != o.c[i] {
                o.c[i] = c;
                changed = true;
            }
        }
        on_sweep(&o);
        if !changed {
            return Ok((o, q));
        }
        if q > n || o.c.iter().any(|&c| c > bound) {
            return Err(OffsetError::NotOptimalTransversal { block: None });
        }
    }
}

/// Canonical offsets by the global fixed point iteration, with the number of
/// sweeps `q` (the last sweep is the one that changes nothing).
pub fn global_offsets_fixed_point(m: &SignatureMatrix, t: &Assignment) -> Result<(OffsetVectors, usize), OffsetError> {
    global_fixed_point(m, t, |_| ())
}

/// The state after every sweep of [`global_offsets_fixed_point`].
pub fn global_offsets_trace(m: &SignatureMatrix, t: &Assignment) -> Result<Vec<OffsetVectors>, OffsetError> {
    let mut trace = Vec::new();
    global_fixed_point(m, t, |o| trace.push(o.clone()))?;
    Ok(trace)
}

/// Square submatrix of diagonal block `k`, in block-local coordinates.
pub fn block_matrix(m: &SignatureMatrix, btf: &FineBtf, k: usize) -> SignatureMatrix {
    let rows = btf.block_rows(k);
    let cols = btf.block_cols(k);
    let mut triplets = Vec::new();
    for (li, &i) in rows.iter().enumerate() {
        for &(j, s) in m.row(i) {
            if btf.block_of_col(j) == k {
                triplets.push((li, btf.col_offset_in_block(j), i64::from(s)));
            }
        }
    }
    let mut sub = SignatureMatrix::from_triplets(rows.len(), triplets).expect("block entries are valid");
    if let Some(labels) = m.row_labels() {
        sub = sub
            .with_row_labels(rows.iter().map(|&i| labels[i].clone()).collect())
            .expect("labels restrict");
    }
    if let Some(labels) = m.col_labels() {
        sub = sub
            .with_col_labels(cols.iter().map(|&j| labels[j].clone()).collect())
            .expect("labels restrict");
    }
    sub
}

/// Canonical offsets of diagonal block `k` taken on its own, in block-local
/// order. `local` is a transversal of [`block_matrix`]`(m, btf, k)`.
pub fn local_offsets(
    m: &SignatureMatrix,
    btf: &FineBtf,
    k: usize,
    local: &Assignment,
) -> Result<OffsetVectors, OffsetError> {
    global_offsets_fixed_point(&block_matrix(m, btf, k), local)
        .map(|(o, _)| o)
        .map_err(|e| match e {
            OffsetError::NotOptimalTransversal { .. } => OffsetError::NotOptimalTransversal { block: Some(k) },
            other => other,
        })
}

/// Canonical offsets computed block by block, top to bottom.
///
/// `block_transversals[k]` is a maximum-value transversal of diagonal block
/// `k` in block-local coordinates (see [`block_matrix`]). The result equals
/// [`global_offsets_fixed_point`] on the assembled transversal. The returned
/// `q` is the largest number of sweeps any single block needed.
pub fn block_offsets(
    m: &SignatureMatrix,
    btf: &FineBtf,
    block_transversals: &[Assignment],
) -> Result<(OffsetVectors, usize), OffsetError> {
    let n = m.n();
    if btf.n() != n {
        return Err(OffsetError::SizeMismatch {
            expected: n,
            found: btf.n(),
        });
    }
    if block_transversals.len() != btf.n_blocks() {
        return Err(OffsetError::SizeMismatch {
            expected: btf.n_blocks(),
            found: block_transversals.len(),
        });
    }

    // Global column for every row under the assembled transversal, and its order.
    let mut t_col = vec![0usize; n];
    let mut t_order = vec![0i64; n];
    for (k, local) in block_transversals.iter().enumerate() {
        let rows = btf.block_rows(k);
        let cols = btf.block_cols(k);
        if local.n() != rows.len() {
            return Err(OffsetError::InvalidBlockTransversal { block: k });
        }
        for (li, lj) in local.pairs() {
            let (i, j) = (rows[li], cols[lj]);
            t_col[i] = j;
            t_order[i] = i64::from(m.get(i, j).ok_or(OffsetError::InvalidBlockTransversal { block: k })?);
        }
    }

    let bound = divergence_bound(m);
    let mut c = vec![0i64; n];
    let mut d = vec![0i64; n];
    // Contributions of finished rows to columns of later blocks.
    let mut floor = vec![0i64; n];
    let mut q = 0;

    for k in 0..btf.n_blocks() {
        let rows = btf.block_rows(k);
        let cols = btf.block_cols(k);
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            for &j in cols {
                d[j] = floor[j];
            }
            for &i in rows {
                for &(j, s) in m.row(i) {
                    if btf.block_of_col(j) == k {
                        d[j] = d[j].max(i64::from(s) + c[i]);
                    }
                }
            }
            let mut changed = false;
            for &i in rows {
                let ci = d[t_col[i]] - t_order[i];
                if ci != c[i] {
                    c[i] = ci;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            if sweeps > rows.len() || rows.iter().any(|&i| c[i] > bound) {
                return Err(OffsetError::NotOptimalTransversal { block: Some(k) });
            }
        }
        q = q.max(sweeps);
        for &i in rows {
            for &(j, s) in m.row(i) {
                if btf.block_of_col(j) > k {
                    floor[j] = floor[j].max(i64::from(s) + c[i]);
                }
            }
        }
    }

    let offsets = OffsetVectors { c, d };
    // Rows of later blocks never reach earlier columns, so one pass is final.
    debug_assert!(offsets.is_feasible_for(m));
    Ok((offsets, q))
}

/// `max c + 1` if some `d_j = 0`, else `max c`.
pub fn structural_index(o: &OffsetVectors) -> u64 {
    let max_c = o.c.iter().copied().max().unwrap_or(0).max(0) as u64;
    max_c + u64::from(o.d.contains(&0))
}

/// Positions where `∂f_i / ∂x_j^(d_j - c_i)` is structurally nonzero: the
/// finite entries with `d_j - c_i = σ_ij`. Sorted row-major.
pub fn jacobian_pattern(m: &SignatureMatrix, o: &OffsetVectors) -> Vec<(usize, usize)> {
    m.entries()
        .filter(|&(i, j, s)| o.d[j] - o.c[i] == i64::from(s))
        .map(|(i, j, _)| (i, j))
        .collect()
}

/// Wall-clock time spent in each phase of an analysis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub btf: Duration,
    pub transversal: Duration,
    pub offsets: Duration,
    pub jacobian: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.btf + self.transversal + self.offsets + self.jacobian
    }
}

/// Everything the structural analysis produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    /// Block form used; a single identity block for the unblocked method.
    pub btf: FineBtf,
    /// Global maximum-value transversal.
    pub transversal: Assignment,
    pub offsets: OffsetVectors,
    pub structural_index: u64,
    pub jacobian_pattern: Vec<(usize, usize)>,
    /// Fixed point sweep count.
    pub iterations_q: usize,
    /// Whether the block triangular route was taken.
    pub blocked: bool,
    pub timings: PhaseTimings,
}

impl AnalysisReport {
    /// Offsets listed in the permuted (block) order.
    pub fn permuted_offsets(&self) -> OffsetVectors {
        let p = self.btf.permutation();
        OffsetVectors {
            c: p.row_perm().iter().map(|&i| self.offsets.c[i]).collect(),
            d: p.col_perm().iter().map(|&j| self.offsets.d[j]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Solve the diagonal blocks' assignment problems on the rayon pool.
    pub parallel: bool,
}

/// Block triangular route: BTF, per-block transversals, block offsets.
pub fn analyze(m: &SignatureMatrix) -> Result<AnalysisReport, OffsetError> {
    analyze_with(m, AnalyzeOptions::default())
}

pub fn analyze_with(m: &SignatureMatrix, opts: AnalyzeOptions) -> Result<AnalysisReport, OffsetError> {
    let mut timings = PhaseTimings::default();

    let start = Instant::now();
    let btf = dm::btf(m)?;
    timings.btf = start.elapsed();

    let start = Instant::now();
    let solve = |k: usize| lap::max_value_transversal(&block_matrix(m, &btf, k));
    let locals: Vec<Assignment> = if opts.parallel {
        (0..btf.n_blocks())
            .into_par_iter()
            .map(solve)
            .collect::<Result<_, _>>()?
    } else {
        (0..btf.n_blocks()).map(solve).collect::<Result<_, _>>()?
    };
    let mut row_to_col = vec![0; m.n()];
    for (k, local) in locals.iter().enumerate() {
        let rows = btf.block_rows(k);
        let cols = btf.block_cols(k);
        for (li, lj) in local.pairs() {
            row_to_col[rows[li]] = cols[lj];
        }
    }
    let transversal = Assignment::new(m, row_to_col).expect("union of block transversals");
    timings.transversal = start.elapsed();

    let start = Instant::now();
    let (offsets, q) = block_offsets(m, &btf, &locals)?;
    timings.offsets = start.elapsed();

    Ok(finish(m, btf, transversal, offsets, q, true, timings))
}

/// Plain route without block triangularization: one global transversal and
/// the global fixed point.
pub fn analyze_unblocked(m: &SignatureMatrix) -> Result<AnalysisReport, OffsetError> {
    let mut timings = PhaseTimings::default();
    let start = Instant::now();
    let transversal = lap::max_value_transversal(m)?;
    timings.transversal = start.elapsed();

    let start = Instant::now();
    let (offsets, q) = global_offsets_fixed_point(m, &transversal)?;
    timings.offsets = start.elapsed();

    Ok(finish(
        m,
        FineBtf::single_block(m.n()),
        transversal,
        offsets,
        q,
        false,
        timings,
    ))
}

fn finish(
    m: &SignatureMatrix,
    btf: FineBtf,
    transversal: Assignment,
    offsets: OffsetVectors,
    iterations_q: usize,
    blocked: bool,
    mut timings: PhaseTimings,
) -> AnalysisReport {
    let start = Instant::now();
    let jacobian_pattern = jacobian_pattern(m, &offsets);
    timings.jacobian = start.elapsed();
    AnalysisReport {
        btf,
        structural_index: structural_index(&offsets),
        transversal,
        offsets,
        jacobian_pattern,
        iterations_q,
        blocked,
        timings,
    }
}
