//! Maximum-value transversals.
//!
//! A transversal picks one finite entry in every row and every column; its
//! value is the sum of the picked orders. The maximum-value transversal is
//! found with a sparse shortest augmenting path assignment solver in the
//! Jonker–Volgenant style:
//!
//! 1. *column reduction*: every column takes its cheapest row, if still free;
//! 2. *reduction transfer*: rows that won exactly one column push their slack
//!    onto that column's potential;
//! 3. *augmenting row reduction*: free rows grab their best column, evicting
//!    the owner when the second-best alternative is strictly worse;
//! 4. *augmentation*: each remaining free row is routed to a free column along
//!    a shortest alternating path (Dijkstra with a binary heap over reduced
//!    costs), after which column potentials are updated.
//!
//! The solver minimizes, so orders are negated and shifted to nonnegative
//! costs: `cost_ij = σ_max - σ_ij`. All arithmetic is exact `i64`.
//!
//! Ties are broken towards the lowest column index.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

use crate::sigma::SignatureMatrix;

const NONE: usize = usize::MAX;
const INF: i64 = i64::MAX / 4;

/// A Hall violator: the rows `rows` have finite entries only in the columns
/// `cols`, and `cols.len() < rows.len()`. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IllPosedWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IllPosedWitness {
    /// Checks the Hall violation against `m`.
    pub fn certifies(&self, m: &SignatureMatrix) -> bool {
        if self.cols.len() >= self.rows.len() {
            return false;
        }
        self.rows
            .iter()
            .all(|&i| m.row(i).iter().all(|&(j, _)| self.cols.binary_search(&j).is_ok()))
    }
}

impl fmt::Display for IllPosedWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "{} rows {{{}}} only reach {} columns {{{}}}",
            self.rows.len(),
            one_based(&self.rows),
            self.cols.len(),
            one_based(&self.cols)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LapError {
    #[error("structurally ill-posed: {0}")]
    StructurallyIllPosed(IllPosedWitness),
    #[error("n = {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("not a transversal of the matrix")]
    InvalidAssignment,
}

/// A transversal: a bijection between rows and columns inside the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    row_to_col: Vec<usize>,
    col_to_row: Vec<usize>,
    value: i64,
}

impl Assignment {
    /// Validates `row_to_col` against `m` and computes the value.
    pub fn new(m: &SignatureMatrix, row_to_col: Vec<usize>) -> Result<Self, LapError> {
        let n = m.n();
        if row_to_col.len() != n {
            return Err(LapError::InvalidAssignment);
        }
        let mut col_to_row = vec![NONE; n];
        let mut value = 0i64;
        for (i, &j) in row_to_col.iter().enumerate() {
            if j >= n || col_to_row[j] != NONE {
                return Err(LapError::InvalidAssignment);
            }
            col_to_row[j] = i;
            value += i64::from(m.get(i, j).ok_or(LapError::InvalidAssignment)?);
        }
        Ok(Assignment {
            row_to_col,
            col_to_row,
            value,
        })
    }

    pub fn n(&self) -> usize {
        self.row_to_col.len()
    }

    pub fn row_to_col(&self) -> &[usize] {
        &self.row_to_col
    }

    pub fn col_to_row(&self) -> &[usize] {
        &self.col_to_row
    }

    /// `‖T‖`, the sum of the assigned orders.
    pub fn value(&self) -> i64 {
        self.value
    }

    /// Assigned `(row, col)` pairs in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_to_col.iter().copied().enumerate()
    }
}

/// Final potentials of the solver, in cost space (`cost_ij = shift - σ_ij`).
///
/// At optimality every pattern entry satisfies
/// `cost_ij - row_ij - col_j >= 0`, with equality on assigned pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentDuals {
    pub row: Vec<i64>,
    pub col: Vec<i64>,
    pub shift: i64,
}

impl AssignmentDuals {
    /// Reduced cost of a finite entry.
    pub fn reduced_cost(&self, i: usize, j: usize, order: u32) -> i64 {
        self.shift - i64::from(order) - self.row[i] - self.col[j]
    }
}

/// Maximum-value transversal of a square signature matrix.
pub fn max_value_transversal(m: &SignatureMatrix) -> Result<Assignment, LapError> {
    max_value_transversal_with_duals(m).map(|(a, _)| a)
}

/// Like [`max_value_transversal`], also returning the optimal potentials.
pub fn max_value_transversal_with_duals(m: &SignatureMatrix) -> Result<(Assignment, AssignmentDuals), LapError> {
    let shift = i64::from(m.max_order().unwrap_or(0));
    let rows: Vec<Vec<(usize, i64)>> = (0..m.n())
        .map(|i| m.row(i).iter().map(|&(j, s)| (j, shift - i64::from(s))).collect())
        .collect();
    let mut solver = Solver::new(&rows);
    solver.solve()?;

    let assignment = Assignment::new(m, solver.x.clone()).expect("solver output is a transversal");
    let row = (0..m.n())
        .map(|i| solver.cost(i, solver.x[i]) - solver.v[solver.x[i]])
        .collect();
    Ok((
        assignment,
        AssignmentDuals {
            row,
            col: solver.v,
            shift,
        },
    ))
}

struct Solver<'a> {
    n: usize,
    rows: &'a [Vec<(usize, i64)>],
    v: Vec<i64>,
    x: Vec<usize>,
    y: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(rows: &'a [Vec<(usize, i64)>]) -> Self {
        let n = rows.len();
        Solver {
            n,
            rows,
            v: vec![0; n],
            x: vec![NONE; n],
            y: vec![NONE; n],
        }
    }

    fn cost(&self, i: usize, j: usize) -> i64 {
        let r = &self.rows[i];
        r[r.binary_search_by_key(&j, |&(c, _)| c).expect("entry in pattern")].1
    }

    fn solve(&mut self) -> Result<(), LapError> {
        let matches = self.column_reduction();
        let mut free = self.reduction_transfer(&matches);
        for _ in 0..2 {
            if free.is_empty() {
                break;
            }
            free = self.augmenting_row_reduction(free);
        }
        self.augment(&free)
    }

    /// Returns, per row, how many columns chose it as their minimum.
    fn column_reduction(&mut self) -> Vec<u32> {
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, c) in r {
                cols[j].push((i, c));
            }
        }
        let mut matches = vec![0u32; self.n];
        for j in (0..self.n).rev() {
            // Lowest row wins ties: rows are pushed in ascending order.
            let Some(&(imin, cmin)) = cols[j].iter().min_by_key(|&&(i, c)| (c, i)) else {
                continue;
            };
            self.v[j] = cmin;
            matches[imin] += 1;
            if self.x[imin] == NONE {
                self.x[imin] = j;
                self.y[j] = imin;
            }
        }
        matches
    }

    fn reduction_transfer(&mut self, matches: &[u32]) -> Vec<usize> {
        let mut free = Vec::new();
        for (i, &count) in matches.iter().enumerate() {
            match count {
                0 => free.push(i),
                1 => {
                    let j1 = self.x[i];
                    let slack = self.rows[i]
                        .iter()
                        .filter(|&&(j, _)| j != j1)
                        .map(|&(j, c)| c - self.v[j])
                        .min();
                    if let Some(slack) = slack {
                        // Row i's reduced cost on j1 is zero here, so j1 stays
                        // a minimizer after the shift.
                        self.v[j1] -= slack;
                    }
                }
                _ => {}
            }
        }
        free
    }

    /// Best and second-best reduced cost of row `i` (lowest column on ties).
    fn two_best(&self, i: usize) -> Option<(i64, usize, i64, usize)> {
        let mut best = (INF, NONE);
        let mut second = (INF, NONE);
        for &(j, c) in &self.rows[i] {
            let h = c - self.v[j];
            if h < best.0 {
                second = best;
                best = (h, j);
            } else if h < second.0 {
                second = (h, j);
            }
        }
        (best.1 != NONE).then_some((best.0, best.1, second.0, second.1))
    }

    fn augmenting_row_reduction(&mut self, mut current: Vec<usize>) -> Vec<usize> {
        let mut next = Vec::new();
        let limit = 4 * self.n + 16;
        let mut steps = 0;
        let mut k = 0;
        while k < current.len() {
            let i = current[k];
            k += 1;
            steps += 1;
            if steps > limit {
                next.push(i);
                continue;
            }
            let Some((u1, mut j1, u2, j2)) = self.two_best(i) else {
                next.push(i);
                continue;
            };
            let mut i0 = self.y[j1];
            if u1 < u2 {
                if u2 < INF {
                    self.v[j1] -= u2 - u1;
                } else if i0 != NONE {
                    // Single-entry row whose column is taken: leave it to the
                    // shortest path phase.
                    next.push(i);
                    continue;
                }
            } else if i0 != NONE {
                j1 = j2;
                i0 = self.y[j2];
            }
            if i0 != NONE {
                self.x[i0] = NONE;
            }
            self.x[i] = j1;
            self.y[j1] = i;
            if i0 != NONE {
                if u1 < u2 {
                    // The evicted row sees a strictly worse column now; retry
                    // it right away.
                    k -= 1;
                    current[k] = i0;
                } else {
                    next.push(i0);
                }
            }
        }
        next
    }

    fn augment(&mut self, free: &[usize]) -> Result<(), LapError> {
        let n = self.n;
        let mut dist = vec![INF; n];
        let mut pred = vec![NONE; n];
        let mut done = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut popped: Vec<usize> = Vec::new();
        let mut heap = BinaryHeap::new();

        for &f in free {
            for &j in &touched {
                dist[j] = INF;
                done[j] = false;
            }
            touched.clear();
            popped.clear();
            heap.clear();

            let Some(u_f) = self.rows[f].iter().map(|&(j, c)| c - self.v[j]).min() else {
                return Err(LapError::StructurallyIllPosed(IllPosedWitness {
                    rows: vec![f],
                    cols: Vec::new(),
                }));
            };
            for &(j, c) in &self.rows[f] {
                let d = c - self.v[j] - u_f;
                if d < dist[j] {
                    if dist[j] == INF {
                        touched.push(j);
                    }
                    dist[j] = d;
                    pred[j] = f;
                    heap.push(Reverse((d, j)));
                }
            }

            let mut sink = NONE;
            while let Some(Reverse((d, j))) = heap.pop() {
                if done[j] || d > dist[j] {
                    continue;
                }
                done[j] = true;
                popped.push(j);
                let i = self.y[j];
                if i == NONE {
                    sink = j;
                    break;
                }
                let u_i = self.cost(i, j) - self.v[j];
                for &(k, c) in &self.rows[i] {
                    if done[k] {
                        continue;
                    }
                    let reduced = c - self.v[k] - u_i;
                    debug_assert!(reduced >= 0, "negative reduced cost");
                    let nd = d + reduced;
                    if nd < dist[k] {
                        if dist[k] == INF {
                            touched.push(k);
                        }
                        dist[k] = nd;
                        pred[k] = i;
                        heap.push(Reverse((nd, k)));
                    }
                }
            }

            if sink == NONE {
                let mut rows: Vec<usize> = popped.iter().map(|&j| self.y[j]).collect();
                rows.push(f);
                rows.sort_unstable();
                let mut cols = popped.clone();
                cols.sort_unstable();
                return Err(LapError::StructurallyIllPosed(IllPosedWitness { rows, cols }));
            }

            let delta = dist[sink];
            for &j in &popped {
                self.v[j] += dist[j] - delta;
            }
            let mut j = sink;
            loop {
                let i = pred[j];
                let prev = self.x[i];
                self.y[j] = i;
                self.x[i] = j;
                if i == f {
                    break;
                }
                j = prev;
            }
        }
        Ok(())
    }
}

/// Exhaustive maximum-value transversal over all permutations inside the
/// pattern. Among optimal transversals the lexicographically smallest
/// `row_to_col` is returned. Test oracle, limited to `n <= 10`.
pub fn brute_force_mvt(m: &SignatureMatrix) -> Result<Assignment, LapError> {
    const LIMIT: usize = 10;
    let n = m.n();
    if n > LIMIT {
        return Err(LapError::TooLarge { n, limit: LIMIT });
    }

    struct Search<'a> {
        m: &'a SignatureMatrix,
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(i64, Vec<usize>)>,
    }
    impl Search<'_> {
        fn go(&mut self, row: usize, value: i64) {
            if row == self.m.n() {
                if self.best.as_ref().map_or(true, |(b, _)| value > *b) {
                    self.best = Some((value, self.current.clone()));
                }
                return;
            }
            for &(j, s) in self.m.row(row) {
                if !self.used[j] {
                    self.used[j] = true;
                    self.current.push(j);
                    self.go(row + 1, value + i64::from(s));
                    self.current.pop();
                    self.used[j] = false;
                }
            }
        }
    }

    let mut search = Search {
        m,
        used: vec![false; n],
        current: Vec::with_capacity(n),
        best: None,
    };
    search.go(0, 0);
    match search.best {
        Some((_, row_to_col)) => Ok(Assignment::new(m, row_to_col).expect("enumerated transversal")),
        None => Err(LapError::StructurallyIllPosed(brute_force_hall_violator(m))),
    }
}

/// Smallest Hall violator by subset enumeration.
fn brute_force_hall_violator(m: &SignatureMatrix) -> IllPosedWitness {
    let n = m.n();
    let masks: Vec<u32> = (0..n)
        .map(|i| m.row(i).iter().fold(0u32, |acc, &(j, _)| acc | (1 << j)))
        .collect();
    let mut subsets: Vec<u32> = (1..(1u32 << n)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let gamma = (0..n)
            .filter(|&i| s & (1 << i) != 0)
            .fold(0u32, |acc, i| acc | masks[i]);
        if gamma.count_ones() < s.count_ones() {
            return IllPosedWitness {
                rows: (0..n).filter(|&i| s & (1 << i) != 0).collect(),
                cols: (0..n).filter(|&j| gamma & (1 << j) != 0).collect(),
            };
        }
    }
    unreachable!("no transversal implies a Hall violator")
}
