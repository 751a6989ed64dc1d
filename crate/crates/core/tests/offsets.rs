mod oracles;

use daestruct::gen::{generate_sigma, GenConfig};
use daestruct::lap::{max_value_transversal, Assignment};
use daestruct::offsets::{
    analyze, analyze_unblocked, block_matrix, block_offsets, global_offsets_fixed_point, global_offsets_trace,
    jacobian_pattern, structural_index,
};
use daestruct::sigma::SignatureMatrix;

#[test]
fn fixed_point_is_the_least_optimal_dual() {
    let mut rng = oracles::rng(31);
    for case in 0..200 {
        let n = 1 + case % 5;
        let m = oracles::random_matrix(&mut rng, n, 0.45, 3, true);
        let t = max_value_transversal(&m).unwrap();
        let (o, _) = global_offsets_fixed_point(&m, &t).unwrap();
        let (c, d, count) = oracles::canonical_offsets(&m);
        assert!(count > 0);
        assert_eq!((o.c, o.d), (c.clone(), d.clone()), "case {case}");
        assert!(oracles::is_optimal_dual(&m, &c, &d));
    }
}

#[test]
fn two_by_two_with_one_transversal() {
    let m = SignatureMatrix::from_triplets(2, [(0, 0, 1), (0, 1, 0), (1, 0, 0)]).unwrap();
    let t = Assignment::new(&m, vec![1, 0]).unwrap();
    let (o, q) = global_offsets_fixed_point(&m, &t).unwrap();
    let (c, d, _) = oracles::canonical_offsets(&m);
    assert_eq!(o.c, c);
    assert_eq!(o.d, d);
    assert_eq!((c, d), (vec![0, 1], vec![1, 0]));
    assert_eq!(q, 2);
}

#[test]
fn every_optimal_transversal_gives_the_same_offsets() {
    let mut rng = oracles::rng(32);
    for case in 0..150 {
        let m = oracles::random_matrix(&mut rng, 1 + case % 6, 0.6, 2, true);
        let (_, all) = oracles::optimal_transversals(&m).unwrap();
        let first = global_offsets_fixed_point(&m, &Assignment::new(&m, all[0].clone()).unwrap())
            .unwrap()
            .0;
        for p in &all[1..] {
            let o = global_offsets_fixed_point(&m, &Assignment::new(&m, p.clone()).unwrap())
                .unwrap()
                .0;
            assert_eq!(o, first, "case {case}");
        }
    }
}

#[test]
fn sweeps_never_decrease() {
    let mut rng = oracles::rng(33);
    for case in 0..200 {
        let m = oracles::random_matrix(&mut rng, 1 + case % 10, 0.35, 4, true);
        let t = max_value_transversal(&m).unwrap();
        let trace = global_offsets_trace(&m, &t).unwrap();
        for w in trace.windows(2) {
            assert!(w[0].c.iter().zip(&w[1].c).all(|(a, b)| a <= b), "case {case}");
            assert!(w[0].d.iter().zip(&w[1].d).all(|(a, b)| a <= b), "case {case}");
        }
    }
}

#[test]
fn shifting_a_row_keeps_offsets_feasible() {
    let mut rng = oracles::rng(34);
    for case in 0..200 {
        let n = 1 + case % 8;
        let m = oracles::random_matrix(&mut rng, n, 0.4, 3, true);
        let row = case % n;
        let k = (case % 3) as i64;
        let shifted = SignatureMatrix::from_triplets(
            n,
            m.entries()
                .map(|(i, j, s)| (i, j, i64::from(s) + if i == row { k } else { 0 })),
        )
        .unwrap();
        let r = analyze(&shifted).unwrap();
        assert!(r.offsets.is_feasible_for(&shifted), "case {case}");
        assert_eq!(r.offsets.dual_value(), r.transversal.value());
    }
}

#[test]
fn block_route_equals_global_route() {
    for seed in 0..200u64 {
        let cfg = GenConfig::new(1 + (seed % 10) as usize, 1 + (seed / 10 % 5) as usize, seed);
        let m = generate_sigma(&cfg).unwrap();
        let blocked = analyze(&m).unwrap();
        let plain = analyze_unblocked(&m).unwrap();
        let (global, _) = global_offsets_fixed_point(&m, &blocked.transversal).unwrap();
        assert_eq!(blocked.offsets, global, "seed {seed}");
        assert_eq!(blocked.offsets, plain.offsets, "seed {seed}");
        assert_eq!(blocked.structural_index, plain.structural_index);
        assert_eq!(blocked.jacobian_pattern, plain.jacobian_pattern);
        assert_eq!(blocked.offsets.dual_value(), blocked.transversal.value());
        assert_eq!(blocked.transversal.value(), plain.transversal.value());
    }
}

#[test]
fn block_offsets_accept_any_block_optimal_transversals() {
    let mut rng = oracles::rng(35);
    for case in 0..150 {
        let m = oracles::random_matrix(&mut rng, 2 + case % 7, 0.3, 3, true);
        let r = analyze(&m).unwrap();
        // Use the exhaustive optimum of each diagonal block instead of the solver's.
        let locals: Vec<Assignment> = (0..r.btf.n_blocks())
            .map(|k| {
                let sub = block_matrix(&m, &r.btf, k);
                let (_, all) = oracles::optimal_transversals(&sub).unwrap();
                Assignment::new(&sub, all.last().unwrap().clone()).unwrap()
            })
            .collect();
        let (o, _) = block_offsets(&m, &r.btf, &locals).unwrap();
        let (c, d, _) = if m.n() <= 5 {
            oracles::canonical_offsets(&m)
        } else {
            (o.c.clone(), o.d.clone(), 1)
        };
        assert_eq!(o, r.offsets, "case {case}");
        assert_eq!((o.c, o.d), (c, d), "case {case}");
    }
}

#[test]
fn irreducible_input_blocked_and_plain_agree_on_q() {
    let m = SignatureMatrix::from_triplets(2, [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 0)]).unwrap();
    let (a, b) = (analyze(&m).unwrap(), analyze_unblocked(&m).unwrap());
    assert_eq!(a.btf.n_blocks(), 1);
    assert_eq!(a.offsets, b.offsets);
    assert_eq!(a.iterations_q, b.iterations_q);
}

#[test]
fn crane_offsets_index_and_jacobian() {
    let m = oracles::crane_by_hand();
    let r = analyze(&m).unwrap();
    assert_eq!(r.transversal.value(), 0);
    assert_eq!(r.offsets.c, vec![2, 2, 0, 0, 2, 2, 4, 4]);
    assert_eq!(r.offsets.d, vec![4, 4, 2, 2, 2, 2, 0, 0]);
    assert_eq!(r.structural_index, 5);
    assert_eq!(structural_index(&r.offsets), 5);
    let mut per_row = [0; 8];
    for &(i, _) in &r.jacobian_pattern {
        per_row[i] += 1;
    }
    assert_eq!(per_row, [3, 3, 2, 2, 3, 2, 1, 1]);
    assert_eq!(jacobian_pattern(&m, &r.offsets).len(), 17);
    assert_eq!(analyze_unblocked(&m).unwrap().iterations_q, 5);
    let (c, d, _) = oracles::canonical_offsets(&m);
    assert_eq!((r.offsets.c.clone(), r.offsets.d.clone()), (c, d));
}

#[test]
fn crane_final_sweep_in_block_order() {
    let m = oracles::crane_by_hand();
    let r = analyze(&m).unwrap();
    // Rows f4 f3 f5 f6 f1 f2 f8 f7, columns u2 u1 d r tau theta z x.
    let rows = [3, 2, 4, 5, 0, 1, 7, 6];
    let cols = [7, 6, 2, 3, 5, 4, 1, 0];
    let c: Vec<i64> = rows.iter().map(|&i| r.offsets.c[i]).collect();
    let d: Vec<i64> = cols.iter().map(|&j| r.offsets.d[j]).collect();
    assert_eq!(c, [0, 0, 2, 2, 2, 2, 4, 4]);
    assert_eq!(d, [0, 0, 2, 2, 2, 2, 4, 4]);
    assert_eq!(r.btf.permutation().row_perm(), rows);
}

#[test]
fn small_cases() {
    let diag = SignatureMatrix::from_triplets(4, (0..4).map(|i| (i, i, 0))).unwrap();
    let t = max_value_transversal(&diag).unwrap();
    let (o, q) = global_offsets_fixed_point(&diag, &t).unwrap();
    assert_eq!((o.c, o.d, q), (vec![0; 4], vec![0; 4], 1));
    let r = analyze(&SignatureMatrix::from_triplets(1, [(0, 0, 0)]).unwrap()).unwrap();
    assert_eq!(r.structural_index, 1);
    assert_eq!(r.jacobian_pattern, vec![(0, 0)]);
}

#[test]
fn transversal_pairs_are_in_the_pattern() {
    let mut rng = oracles::rng(36);
    for case in 0..200 {
        let m = oracles::random_matrix(&mut rng, 1 + case % 15, 0.3, 4, true);
        let r = analyze(&m).unwrap();
        for pair in r.transversal.pairs() {
            assert!(r.jacobian_pattern.binary_search(&pair).is_ok(), "case {case}");
        }
    }
}
