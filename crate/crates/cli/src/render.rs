//! Plain-text output.

use std::fmt::Write as _;

use daestruct::dm::Block;
use daestruct::offsets::AnalysisReport;
use daestruct::sigma::{Permutation, SignatureMatrix};

use crate::report::DmDocument;

/// Larger matrices are summarized instead of drawn.
pub const MAX_DRAWN: usize = 60;

/// Draws `m` in the order of `perm`, with a vertical rule after the last
/// column of every block and a horizontal rule after its last row. Blank
/// cells are absent entries.
pub fn draw_blocks(m: &SignatureMatrix, perm: &Permutation, blocks: &[Block]) -> String {
    let n = m.n();
    let mut out = String::new();
    if n > MAX_DRAWN {
        writeln!(out, "(matrix of size {n} not drawn; the limit is {MAX_DRAWN})").unwrap();
        return out;
    }
    let rows = perm.row_perm();
    let cols = perm.col_perm();
    let col_names: Vec<String> = cols.iter().map(|&j| m.col_name(j)).collect();
    let label_w = rows.iter().map(|&i| m.row_name(i).len()).max().unwrap_or(0);
    let cell_w = col_names
        .iter()
        .map(String::len)
        .chain(m.max_order().map(|s| s.to_string().len()))
        .max()
        .unwrap_or(1);
    let col_ends: Vec<usize> = blocks.iter().map(|b| b.cols.end).collect();
    let row_ends: Vec<usize> = blocks.iter().map(|b| b.rows.end).collect();

    let line = |cells: &[String], label: &str| {
        let mut s = format!("{label:<label_w$} ");
        for (k, c) in cells.iter().enumerate() {
            write!(s, " {c:>cell_w$}").unwrap();
            if col_ends.contains(&(k + 1)) && k + 1 < n {
                s.push_str(" |");
            }
        }
        s.trim_end().to_string()
    };
    writeln!(out, "{}", line(&col_names, "")).unwrap();
    let width = line(&col_names, "").len();
    for (r, &i) in rows.iter().enumerate() {
        let cells: Vec<String> = cols
            .iter()
            .map(|&j| m.get(i, j).map_or(String::new(), |s| s.to_string()))
            .collect();
        writeln!(out, "{}", line(&cells, &m.row_name(i))).unwrap();
        if row_ends.contains(&(r + 1)) && r + 1 < n {
            writeln!(out, "{}", "-".repeat(width)).unwrap();
        }
    }
    out
}

fn names(m: &SignatureMatrix, xs: &[usize], col: bool) -> String {
    let v: Vec<String> = xs
        .iter()
        .map(|&x| if col { m.col_name(x) } else { m.row_name(x) })
        .collect();
    v.join(" ")
}

pub fn analysis(m: &SignatureMatrix, r: &AnalysisReport, timing: bool) -> String {
    let mut out = String::new();
    let method = if r.blocked { "block triangular" } else { "unblocked" };
    writeln!(out, "n = {}, {method}, {} block(s)", m.n(), r.btf.n_blocks()).unwrap();
    out.push('\n');
    out.push_str(&draw_blocks(m, r.btf.permutation(), r.btf.blocks()));
    out.push('\n');
    let pairs: Vec<String> = r
        .transversal
        .pairs()
        .map(|(i, j)| format!("({}, {})", m.row_name(i), m.col_name(j)))
        .collect();
    writeln!(out, "transversal: {}", pairs.join(" ")).unwrap();
    writeln!(out, "value: {}", r.transversal.value()).unwrap();
    let c: Vec<String> = (0..m.n())
        .map(|i| format!("{}={}", m.row_name(i), r.offsets.c[i]))
        .collect();
    let d: Vec<String> = (0..m.n())
        .map(|j| format!("{}={}", m.col_name(j), r.offsets.d[j]))
        .collect();
    writeln!(out, "c: {}", c.join(" ")).unwrap();
    writeln!(out, "d: {}", d.join(" ")).unwrap();
    writeln!(out, "structural index: {}", r.structural_index).unwrap();
    writeln!(out, "jacobian entries: {}", r.jacobian_pattern.len()).unwrap();
    writeln!(out, "sweeps: {}", r.iterations_q).unwrap();
    if timing {
        let t = &r.timings;
        writeln!(
            out,
            "time: btf {:?}, transversal {:?}, offsets {:?}, jacobian {:?}, total {:?}",
            t.btf,
            t.transversal,
            t.offsets,
            t.jacobian,
            t.total()
        )
        .unwrap();
    }
    out
}

pub fn dm(m: &SignatureMatrix, doc: &DmDocument) -> String {
    let mut out = String::new();
    let back = |xs: &[usize]| xs.iter().map(|&x| x - 1).collect::<Vec<_>>();
    writeln!(out, "n = {}, matching size {}", doc.n, doc.matching_size).unwrap();
    writeln!(out, "components: {}", doc.components.len()).unwrap();
    let c = &doc.coarse;
    for (name, xs, col) in [
        ("HF", &c.hf, false),
        ("SF", &c.sf, false),
        ("VF", &c.vf, false),
        ("HX", &c.hx, true),
        ("SX", &c.sx, true),
        ("VX", &c.vx, true),
    ] {
        writeln!(out, "{name}: {}", names(m, &back(xs), col)).unwrap();
    }
    writeln!(out, "fine blocks: {}", doc.blocks.len()).unwrap();
    for (k, b) in doc.blocks.iter().enumerate() {
        writeln!(
            out,
            "  {}: {{{}}} x {{{}}}",
            k + 1,
            names(m, &back(&b.rows), false),
            names(m, &back(&b.cols), true)
        )
        .unwrap();
    }
    out
}
