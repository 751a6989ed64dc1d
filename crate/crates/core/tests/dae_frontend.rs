mod oracles;

use daestruct::dae::{build_signature, parse_model, DaeModel, Equation};
use proptest::prelude::*;

#[test]
fn crane_source_gives_crane_matrix() {
    let m = daestruct::signature_from_source(oracles::crane_source()).unwrap();
    let by_hand = oracles::crane_by_hand();
    assert_eq!(m.nnz(), 22);
    assert_eq!(m.entries().collect::<Vec<_>>(), by_hand.entries().collect::<Vec<_>>());
    assert_eq!(m.row_labels().unwrap(), oracles::CRANE_ROWS);
    assert_eq!(m.col_labels().unwrap(), oracles::CRANE_COLS);
}

#[test]
fn crane_inputs_are_opaque() {
    let model = parse_model(oracles::crane_source()).unwrap();
    assert_eq!(model.inputs, ["p1", "p2"]);
    assert!(model.equations[6].occurrences.iter().all(|&(j, _)| j == 0));
}

fn arb_model() -> impl Strategy<Value = DaeModel> {
    (1usize..6).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec((0..n, 0u32..5), 0..8), n).prop_map(move |occ| DaeModel {
            variables: (0..n).map(|j| format!("x{j}")).collect(),
            inputs: Vec::new(),
            params: Vec::new(),
            equations: occ
                .into_iter()
                .enumerate()
                .map(|(i, occurrences)| Equation {
                    name: format!("f{i}"),
                    occurrences,
                })
                .collect(),
        })
    })
}

proptest! {
    #[test]
    fn order_of_occurrences_is_irrelevant(model in arb_model(), seed in any::<u64>()) {
        let mut shuffled = model.clone();
        let mut rng = oracles::rng(seed);
        for eq in &mut shuffled.equations {
            for k in (1..eq.occurrences.len()).rev() {
                eq.occurrences.swap(k, oracles::below(&mut rng, k as u64 + 1) as usize);
            }
        }
        prop_assert_eq!(build_signature(&model).unwrap(), build_signature(&shuffled).unwrap());
    }

    #[test]
    fn every_entry_is_a_maximum_occurrence(model in arb_model()) {
        let m = build_signature(&model).unwrap();
        for (i, eq) in model.equations.iter().enumerate() {
            for j in 0..model.variables.len() {
                let best = eq.occurrences.iter().filter(|o| o.0 == j).map(|o| o.1).max();
                prop_assert_eq!(m.get(i, j), best);
            }
        }
    }

    #[test]
    fn printed_models_parse_back(model in arb_model()) {
        let mut src = format!("var {};\n", model.variables.join(", "));
        for eq in &model.equations {
            let terms: Vec<String> = eq
                .occurrences
                .iter()
                .map(|&(j, k)| match k {
                    0 => format!("sin({})", model.variables[j]),
                    1 => format!("der({})", model.variables[j]),
                    k => format!("c*der({}, {k})", model.variables[j]),
                })
                .collect();
            let body = if terms.is_empty() { "1".to_string() } else { terms.join(" + ") };
            src.push_str(&format!("eq {}: {body} = 0;\n", eq.name));
        }
        prop_assert_eq!(parse_model(&src).unwrap().equations, model.equations.clone());
    }
}
