use std::collections::BinaryHeap;

use super::{DmError, FineBtf, IncidenceGraph, Matching};

const UNVISITED: usize = usize::MAX;

/// Strongly connected components by Tarjan's algorithm (iterative).
/// Returns the component id of every node and the component count.
fn tarjan(succ: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut n_comp = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*edge) {
                *edge += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}

/// Fine decomposition of a square, perfectly matched pattern.
///
/// Every row is merged with its matched column into one node. Row `i` must
/// precede row `k` whenever `i` has an entry in the column matched to `k`;
/// the strongly connected components of that relation are the irreducible
/// diagonal blocks. Blocks are emitted in topological order; among blocks
/// that are ready at the same time the one whose smallest row index is
/// largest goes first. Inside a block rows are ascending and each column sits
/// opposite its matched row.
pub fn fine_decompose(g: &IncidenceGraph, m: &Matching) -> Result<FineBtf, DmError> {
    let n = g.n_rows();
    if g.n_cols() != n || !m.is_perfect() || m.validate(g).is_err() {
        return Err(DmError::NotPerfectlyMatched);
    }
    let col_mate: Vec<usize> = m.col_mate.iter().map(|c| c.expect("perfect")).collect();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| g.row(i).iter().map(|&j| col_mate[j]).filter(|&k| k != i).collect())
        .collect();

    let (comp, n_comp) = tarjan(&succ);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for i in 0..n {
        members[comp[i]].push(i);
    }
    let mut indegree = vec![0usize; n_comp];
    let mut dag: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for i in 0..n {
        for &k in &succ[i] {
            if comp[i] != comp[k] {
                dag[comp[i]].push(comp[k]);
                indegree[comp[k]] += 1;
            }
        }
    }

    let mut ready: BinaryHeap<(usize, usize)> = (0..n_comp)
        .filter(|&c| indegree[c] == 0)
        .map(|c| (members[c][0], c))
        .collect();
    let mut blocks = Vec::with_capacity(n_comp);
    while let Some((_, c)) = ready.pop() {
        for &d in &dag[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push((members[d][0], d));
            }
        }
        let rows = std::mem::take(&mut members[c]);
        let cols = rows.iter().map(|&i| m.row_mate[i].expect("perfect")).collect();
        blocks.push((rows, cols));
    }
    debug_assert_eq!(blocks.len(), n_comp, "condensation is acyclic");
    Ok(FineBtf::from_blocks(n, blocks))
}
