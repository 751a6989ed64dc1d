//! Exhaustive reference computations shared by the integration tests.
//! Nothing here calls into the solver code it is used to check.

#![allow(dead_code)]

use daestruct::sigma::SignatureMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, k: u64) -> u64 {
    rng.next_u64() % k
}

pub fn chance(rng: &mut ChaCha8Rng, p: f64) -> bool {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 <= p
}

/// Random pattern with the given density and orders in `0..=max_order`.
/// With `diagonal` every `(i, i)` is present, so the matrix is well-posed.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, density: f64, max_order: u64, diagonal: bool) -> SignatureMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (diagonal && i == j) || chance(rng, density) {
                t.push((i, j, below(rng, max_order + 1) as i64));
            }
        }
    }
    SignatureMatrix::from_triplets(n, t).unwrap()
}

/// Dense `n×n` order table with `None` for absent entries.
pub fn dense(m: &SignatureMatrix) -> Vec<Vec<Option<i64>>> {
    let mut a = vec![vec![None; m.n()]; m.n()];
    for (i, j, s) in m.entries() {
        a[i][j] = Some(i64::from(s));
    }
    a
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(n, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Largest transversal value and every transversal attaining it, or `None`
/// when no permutation stays inside the pattern.
pub fn optimal_transversals(m: &SignatureMatrix) -> Option<(i64, Vec<Vec<usize>>)> {
    let a = dense(m);
    let mut best: Option<(i64, Vec<Vec<usize>>)> = None;
    for p in permutations(m.n()) {
        let v: Option<i64> = p.iter().enumerate().map(|(i, &j)| a[i][j]).sum();
        if let Some(v) = v {
            match &mut best {
                Some((b, list)) if *b == v => list.push(p),
                Some((b, _)) if *b > v => {}
                _ => best = Some((v, vec![p])),
            }
        }
    }
    best
}

fn row_masks(m: &SignatureMatrix) -> Vec<u32> {
    (0..m.n())
        .map(|i| m.row(i).iter().fold(0u32, |acc, &(j, _)| acc | 1 << j))
        .collect()
}

/// Maximum matching size by the deficiency form of Hall's theorem:
/// `n - max over row sets F of (|F| - |Γ(F)|)`.
pub fn matching_size_by_deficiency(m: &SignatureMatrix) -> usize {
    let n = m.n();
    assert!(n <= 20);
    let masks = row_masks(m);
    let mut deficiency = 0i64;
    for f in 0u32..(1 << n) {
        let gamma = (0..n).filter(|&i| f >> i & 1 == 1).fold(0u32, |acc, i| acc | masks[i]);
        deficiency = deficiency.max(f.count_ones() as i64 - gamma.count_ones() as i64);
    }
    n - deficiency as usize
}

/// Strong Hall on a square pattern given by row bitmasks: every proper
/// non-empty row set reaches strictly more columns than it has rows. A 1x1
/// pattern qualifies when its entry is present.
pub fn strong_hall(masks: &[u32]) -> bool {
    let n = masks.len();
    if n == 1 {
        return masks[0] == 1;
    }
    (1u32..(1 << n) - 1).all(|f| {
        let gamma = (0..n).filter(|&i| f >> i & 1 == 1).fold(0u32, |acc, i| acc | masks[i]);
        gamma.count_ones() > f.count_ones()
    })
}

/// Row bitmasks of the square submatrix on `rows × cols`, locally indexed.
pub fn block_masks(m: &SignatureMatrix, rows: &[usize], cols: &[usize]) -> Vec<u32> {
    rows.iter()
        .map(|&i| {
            cols.iter()
                .enumerate()
                .filter(|&(_, &j)| m.get(i, j).is_some())
                .fold(0u32, |acc, (lj, _)| acc | 1 << lj)
        })
        .collect()
}

/// Elementwise minimum over every optimal dual pair with entries in
/// `0..=n·max σ`.
///
/// An optimal pair is tight on every maximum-value transversal
/// (complementary slackness), so fixing one such `T` determines `d` from
/// `c`: `d_T(i) = c_i + σ_i,T(i)`. Enumerating all bounded `c` therefore
/// enumerates all bounded optimal pairs. The enumeration assigns rows one at
/// a time and drops a prefix as soon as an entry between two assigned rows
/// is violated. Returns `(c, d, number of pairs)`.
pub fn canonical_offsets(m: &SignatureMatrix) -> (Vec<i64>, Vec<i64>, usize) {
    struct Search<'a> {
        a: Vec<Vec<Option<i64>>>,
        t: &'a [usize],
        bound: i64,
        c: Vec<i64>,
        min_c: Vec<i64>,
        min_d: Vec<i64>,
        count: usize,
    }
    impl Search<'_> {
        fn d(&self, i: usize) -> i64 {
            self.c[i] + self.a[i][self.t[i]].unwrap()
        }
        fn go(&mut self, k: usize) {
            let n = self.c.len();
            if k == n {
                self.count += 1;
                for i in 0..n {
                    self.min_c[i] = self.min_c[i].min(self.c[i]);
                    let j = self.t[i];
                    self.min_d[j] = self.min_d[j].min(self.d(i));
                }
                return;
            }
            for v in 0..=self.bound {
                self.c[k] = v;
                if self.d(k) > self.bound {
                    break;
                }
                let ok = (0..=k).all(|i| {
                    let col_k = self.t[k];
                    let col_i = self.t[i];
                    self.a[k][col_i].map_or(true, |s| self.d(i) - self.c[k] >= s)
                        && self.a[i][col_k].map_or(true, |s| self.d(k) - self.c[i] >= s)
                });
                if ok {
                    self.go(k + 1);
                }
            }
        }
    }
    let n = m.n();
    let (_, ts) = optimal_transversals(m).expect("well-posed");
    let t = &ts[0];
    let mut s = Search {
        a: dense(m),
        t,
        bound: n as i64 * i64::from(m.max_order().unwrap_or(0)),
        c: vec![0; n],
        min_c: vec![i64::MAX; n],
        min_d: vec![i64::MAX; n],
        count: 0,
    };
    s.go(0);
    (s.min_c, s.min_d, s.count)
}

/// Dual feasibility, nonnegativity and optimality of `(c, d)` for `m`.
pub fn is_optimal_dual(m: &SignatureMatrix, c: &[i64], d: &[i64]) -> bool {
    let Some((value, _)) = optimal_transversals(m) else {
        return false;
    };
    c.iter().all(|&x| x >= 0)
        && m.entries().all(|(i, j, s)| d[j] - c[i] >= i64::from(s))
        && d.iter().sum::<i64>() - c.iter().sum::<i64>() == value
}

/// The crane signature matrix typed in by hand, rows f1..f8 and columns
/// x, z, d, r, theta, tau, u1, u2 (0-based here).
pub fn crane_by_hand() -> SignatureMatrix {
    #[rustfmt::skip]
    let t = [
        (0, 0, 2), (0, 4, 0), (0, 5, 0),
        (1, 1, 2), (1, 4, 0), (1, 5, 0),
        (2, 2, 2), (2, 4, 0), (2, 5, 0), (2, 6, 0),
        (3, 3, 2), (3, 5, 0), (3, 7, 0),
        (4, 0, 0), (4, 2, 0), (4, 3, 0), (4, 4, 0),
        (5, 1, 0), (5, 3, 0), (5, 4, 0),
        (6, 0, 0),
        (7, 1, 0),
    ];
    SignatureMatrix::from_triplets(8, t).unwrap()
}

pub const CRANE_ROWS: [&str; 8] = ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"];
pub const CRANE_COLS: [&str; 8] = ["x", "z", "d", "r", "theta", "tau", "u1", "u2"];

pub fn crane_source() -> &'static str {
    include_str!("../../../../fixtures/crane.dae")
}
