mod oracles;

use daestruct::dm::{btf, check_strong_hall, decompose, maximum_matching, IncidenceGraph};
use daestruct::sigma::SignatureMatrix;
use proptest::prelude::*;

#[test]
fn matching_size_matches_hall_deficiency() {
    let mut rng = oracles::rng(21);
    for case in 0..300 {
        let m = oracles::random_matrix(&mut rng, 1 + case % 12, [0.1, 0.2, 0.35][case % 3], 0, false);
        let g = IncidenceGraph::from_matrix(&m);
        let mm = maximum_matching(&g);
        mm.validate(&g).unwrap();
        assert_eq!(mm.size, oracles::matching_size_by_deficiency(&m), "case {case}");
    }
}

#[test]
fn coarse_parts_have_the_staircase_shape() {
    let mut rng = oracles::rng(22);
    for case in 0..300 {
        let m = oracles::random_matrix(&mut rng, 1 + case % 12, 0.15, 0, false);
        let d = decompose(&m);
        let c = &d.coarse;
        assert_eq!(c.sf.len(), c.sx.len());
        assert_eq!(c.hf.len() + c.sf.len() + c.vf.len(), m.n());
        assert_eq!(c.hx.len() + c.sx.len() + c.vx.len(), m.n());
        // Rows of SF and VF never touch HX; rows of VF never touch SX.
        for (i, j, _) in m.entries() {
            if c.hx.contains(&j) {
                assert!(c.hf.contains(&i), "case {case}: ({i}, {j})");
            }
            if c.sx.contains(&j) {
                assert!(!c.vf.contains(&i), "case {case}: ({i}, {j})");
            }
        }
        let perfect = d.matching.is_perfect();
        assert_eq!(perfect, c.hf.is_empty() && c.hx.is_empty());
        assert_eq!(perfect, c.vf.is_empty() && c.vx.is_empty());
        assert!(c.hx.len() > c.hf.len() || c.hx.is_empty());
        assert!(c.vf.len() > c.vx.len() || c.vf.is_empty());
    }
}

#[test]
fn blocks_are_triangular_and_irreducible() {
    let mut rng = oracles::rng(23);
    for case in 0..300 {
        let n = 1 + case % 12;
        let m = oracles::random_matrix(&mut rng, n, [0.1, 0.2, 0.3][case % 3], 0, case % 2 == 0);
        let d = decompose(&m);
        let f = &d.fine;
        for k in 0..f.n_blocks() {
            let rows = d.fine_block_rows(k);
            let cols = d.fine_block_cols(k);
            assert!(
                oracles::strong_hall(&oracles::block_masks(&m, &rows, &cols)),
                "case {case} block {k}"
            );
        }
        for (i, j, _) in m.entries() {
            if let (Some(bi), Some(bj)) = (
                d.square_rows.iter().position(|&r| r == i),
                d.square_cols.iter().position(|&c| c == j),
            ) {
                assert!(
                    f.block_of_row(bi) <= f.block_of_col(bj),
                    "case {case}: ({i}, {j}) below the diagonal"
                );
            }
        }
        if let Ok(full) = btf(&m) {
            let p = m.permute(full.permutation()).unwrap();
            let g = IncidenceGraph::from_matrix(&m);
            assert!(full.is_upper_triangular_for(&g));
            for (i, j, _) in p.entries() {
                let bi = full.blocks().iter().position(|b| b.rows.contains(&i)).unwrap();
                let bj = full.blocks().iter().position(|b| b.cols.contains(&j)).unwrap();
                assert!(bi <= bj);
            }
        }
    }
}

#[test]
fn library_strong_hall_agrees_with_oracle() {
    let mut rng = oracles::rng(24);
    for case in 0..400 {
        let n = 1 + case % 8;
        let m = oracles::random_matrix(&mut rng, n, 0.4, 0, false);
        let g = IncidenceGraph::from_matrix(&m);
        let all: Vec<usize> = (0..n).collect();
        assert_eq!(
            check_strong_hall(&g).unwrap(),
            oracles::strong_hall(&oracles::block_masks(&m, &all, &all)),
            "case {case}"
        );
    }
}

#[test]
fn identity_gives_singletons() {
    let m = SignatureMatrix::from_triplets(5, (0..5).map(|i| (i, i, 0))).unwrap();
    let f = btf(&m).unwrap();
    assert_eq!(f.n_blocks(), 5);
    assert!(f.blocks().iter().all(|b| b.len() == 1));
}

#[test]
fn empty_column_lands_in_hx() {
    let m = SignatureMatrix::from_triplets(3, [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0)]).unwrap();
    let d = decompose(&m);
    assert!(d.coarse.hx.contains(&2));
    assert!(btf(&m).is_err());
}

proptest! {
    #[test]
    fn btf_exists_iff_perfect_matching(
        entries in proptest::collection::btree_set((0usize..9, 0usize..9), 0..40)
    ) {
        let m = SignatureMatrix::from_triplets(9, entries.into_iter().map(|(i, j)| (i, j, 0))).unwrap();
        let perfect = oracles::matching_size_by_deficiency(&m) == 9;
        prop_assert_eq!(btf(&m).is_ok(), perfect);
        if let Ok(f) = btf(&m) {
            let sizes: usize = f.blocks().iter().map(|b| b.len()).sum();
            prop_assert_eq!(sizes, 9);
        }
    }
}
