use std::collections::{HashMap, VecDeque};

use super::{DmError, IncidenceGraph, Matching};

const UNREACHED: usize = usize::MAX;

/// Maximum cardinality matching by Hopcroft–Karp: breadth-first layering
/// from all free rows, then vertex-disjoint shortest augmenting paths found
/// by depth-first search, until no augmenting path remains.
pub fn maximum_matching(g: &IncidenceGraph) -> Matching {
    let mut m = Matching::empty(g.n_rows(), g.n_cols());

    // Cheap greedy start.
    for i in 0..g.n_rows() {
        if let Some(&j) = g.row(i).iter().find(|&&j| m.col_mate[j].is_none()) {
            m.row_mate[i] = Some(j);
            m.col_mate[j] = Some(i);
            m.size += 1;
        }
    }

    let mut dist = vec![UNREACHED; g.n_rows()];
    let mut queue = VecDeque::new();
    let mut cursor = vec![0usize; g.n_rows()];
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // Layer rows by alternating distance from the free rows.
        queue.clear();
        for (i, di) in dist.iter_mut().enumerate() {
            if m.row_mate[i].is_none() {
                *di = 0;
                queue.push_back(i);
            } else {
                *di = UNREACHED;
            }
        }
        let mut free_col_depth = UNREACHED;
        while let Some(i) = queue.pop_front() {
            if dist[i] >= free_col_depth {
                continue;
            }
            for &j in g.row(i) {
                match m.col_mate[j] {
                    None => free_col_depth = free_col_depth.min(dist[i] + 1),
                    Some(k) if dist[k] == UNREACHED => {
                        dist[k] = dist[i] + 1;
                        queue.push_back(k);
                    }
                    Some(_) => {}
                }
            }
        }
        if free_col_depth == UNREACHED {
            return m;
        }

        cursor.iter_mut().for_each(|c| *c = 0);
        let mut augmented = false;
        for root in 0..g.n_rows() {
            if m.row_mate[root].is_some() {
                continue;
            }
            // Iterative DFS along the layers; `stack` holds rows on the path.
            stack.clear();
            stack.push(root);
            while let Some(&i) = stack.last() {
                let adj = g.row(i);
                let mut advanced = false;
                while cursor[i] < adj.len() {
                    let j = adj[cursor[i]];
                    cursor[i] += 1;
                    match m.col_mate[j] {
                        None if dist[i] + 1 == free_col_depth => {
                            // Flip the path root .. i, j.
                            let mut col = j;
                            for &r in stack.iter().rev() {
                                let prev = m.row_mate[r];
                                m.row_mate[r] = Some(col);
                                m.col_mate[col] = Some(r);
                                match prev {
                                    Some(p) => col = p,
                                    None => break,
                                }
                            }
                            m.size += 1;
                            augmented = true;
                            stack.clear();
                            advanced = true;
                            break;
                        }
                        Some(k) if dist[k] == dist[i] + 1 => {
                            stack.push(k);
                            advanced = true;
                            break;
                        }
                        _ => {}
                    }
                }
                if !advanced {
                    dist[i] = UNREACHED;
                    stack.pop();
                }
            }
        }
        if !augmented {
            return m;
        }
    }
}

/// Exhaustive maximum matching size, memoized over (row, used-column set).
/// Test oracle for graphs with at most 16 rows and columns.
pub fn brute_force_matching_size(g: &IncidenceGraph) -> Result<usize, DmError> {
    const LIMIT: usize = 16;
    let n = g.n_rows().max(g.n_cols());
    if n > LIMIT {
        return Err(DmError::TooLarge { n, limit: LIMIT });
    }
    fn go(g: &IncidenceGraph, row: usize, used: u32, memo: &mut HashMap<(usize, u32), usize>) -> usize {
        if row == g.n_rows() {
            return 0;
        }
        if let Some(&v) = memo.get(&(row, used)) {
            return v;
        }
        let mut best = go(g, row + 1, used, memo);
        for &j in g.row(row) {
            if used & (1 << j) == 0 {
                best = best.max(1 + go(g, row + 1, used | (1 << j), memo));
            }
        }
        memo.insert((row, used), best);
        best
    }
    Ok(go(g, 0, 0, &mut HashMap::new()))
}
