//! JSON documents printed by the commands. Indices are 1-based.

use daestruct::dm::DmDecomposition;
use daestruct::lap::IllPosedWitness;
use daestruct::offsets::AnalysisReport;
use daestruct::sigma::SignatureMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub cols: Vec<usize>,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDoc {
    pub btf: f64,
    pub jacobian: f64,
    pub offsets: f64,
    pub total: f64,
    pub transversal: f64,
}

/// Result of `analyze`. Fields are declared in key order so the output has
/// sorted keys without any post-processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub blocks: Vec<BlockDoc>,
    pub c: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_labels: Option<Vec<String>>,
    pub col_order: Vec<usize>,
    pub d: Vec<i64>,
    pub iterations_q: usize,
    pub jacobian_pattern: Vec<[usize; 2]>,
    pub method: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_labels: Option<Vec<String>>,
    pub row_order: Vec<usize>,
    pub structural_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingDoc>,
    pub transversal: Vec<[usize; 2]>,
    pub transversal_value: i64,
    pub wellposed: bool,
}

fn one_based(xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|&x| x + 1).collect()
}

fn sorted_one_based(xs: &[usize]) -> Vec<usize> {
    let mut v = one_based(xs);
    v.sort_unstable();
    v
}

impl ReportDocument {
    pub fn new(m: &SignatureMatrix, r: &AnalysisReport, timing: bool) -> Self {
        let btf = &r.btf;
        let blocks = (0..btf.n_blocks())
            .map(|k| BlockDoc {
                rows: sorted_one_based(btf.block_rows(k)),
                cols: sorted_one_based(btf.block_cols(k)),
            })
            .collect();
        let mut transversal: Vec<[usize; 2]> = r.transversal.pairs().map(|(i, j)| [i + 1, j + 1]).collect();
        transversal.sort_unstable();
        let t = &r.timings;
        ReportDocument {
            blocks,
            c: r.offsets.c.clone(),
            col_labels: m.col_labels().map(<[String]>::to_vec),
            col_order: one_based(btf.permutation().col_perm()),
            d: r.offsets.d.clone(),
            iterations_q: r.iterations_q,
            jacobian_pattern: r.jacobian_pattern.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            method: if r.blocked { "esmm" } else { "smm" }.to_string(),
            n: m.n(),
            row_labels: m.row_labels().map(<[String]>::to_vec),
            row_order: one_based(btf.permutation().row_perm()),
            structural_index: r.structural_index,
            timing: timing.then(|| TimingDoc {
                btf: t.btf.as_secs_f64(),
                jacobian: t.jacobian.as_secs_f64(),
                offsets: t.offsets.as_secs_f64(),
                total: t.total().as_secs_f64(),
                transversal: t.transversal.as_secs_f64(),
            }),
            transversal,
            transversal_value: r.transversal.value(),
            wellposed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub cols: Vec<usize>,
    pub rows: Vec<usize>,
}

/// Printed instead of a report when no finite transversal exists: the
/// witness rows have too few columns between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllPosedDocument {
    pub n: usize,
    pub wellposed: bool,
    pub witness: WitnessDoc,
}

impl IllPosedDocument {
    pub fn new(m: &SignatureMatrix, w: &IllPosedWitness) -> Self {
        IllPosedDocument {
            n: m.n(),
            wellposed: false,
            witness: WitnessDoc {
                cols: sorted_one_based(&w.cols),
                rows: sorted_one_based(&w.rows),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseDoc {
    pub hf: Vec<usize>,
    pub hx: Vec<usize>,
    pub sf: Vec<usize>,
    pub sx: Vec<usize>,
    pub vf: Vec<usize>,
    pub vx: Vec<usize>,
}

/// Result of `dm`. Fine blocks cover the square part only; the permutation
/// fields are present when that part is the whole matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmDocument {
    pub blocks: Vec<BlockDoc>,
    pub coarse: CoarseDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_order: Option<Vec<usize>>,
    pub components: Vec<BlockDoc>,
    pub matching_size: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_order: Option<Vec<usize>>,
}

impl DmDocument {
    pub fn new(m: &SignatureMatrix, dm: &DmDecomposition) -> Self {
        let c = &dm.coarse;
        let square = c.is_square_only();
        let order = |xs: &[usize], map: &[usize]| xs.iter().map(|&x| map[x] + 1).collect::<Vec<_>>();
        DmDocument {
            blocks: (0..dm.fine.n_blocks())
                .map(|k| BlockDoc {
                    rows: sorted_one_based(&dm.fine_block_rows(k)),
                    cols: sorted_one_based(&dm.fine_block_cols(k)),
                })
                .collect(),
            coarse: CoarseDoc {
                hf: sorted_one_based(&c.hf),
                hx: sorted_one_based(&c.hx),
                sf: sorted_one_based(&c.sf),
                sx: sorted_one_based(&c.sx),
                vf: sorted_one_based(&c.vf),
                vx: sorted_one_based(&c.vx),
            },
            col_order: square.then(|| order(dm.fine.permutation().col_perm(), &dm.square_cols)),
            components: dm
                .components
                .iter()
                .map(|comp| BlockDoc {
                    rows: sorted_one_based(&comp.rows),
                    cols: sorted_one_based(&comp.cols),
                })
                .collect(),
            matching_size: dm.matching.size,
            n: m.n(),
            row_order: square.then(|| order(dm.fine.permutation().row_perm(), &dm.square_rows)),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
