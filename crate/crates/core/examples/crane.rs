//! Structural analysis of the planar crane model.

use daestruct::dae::signature_from_source;
use daestruct::offsets::analyze;
use daestruct::sigma::write_sigma_file;

fn main() {
    let src = include_str!("../../../fixtures/crane.dae");
    let sigma = signature_from_source(src).expect("crane model parses");
    let report = analyze(&sigma).expect("crane is well-posed");
    println!("{}", write_sigma_file(&sigma));
    println!("c = {:?}", report.offsets.c);
    println!("d = {:?}", report.offsets.d);
    println!("index = {}", report.structural_index);
    for (k, b) in report.btf.blocks().iter().enumerate() {
        let rows: Vec<_> = report.btf.block_rows(k).iter().map(|&i| sigma.row_name(i)).collect();
        let cols: Vec<_> = report.btf.block_cols(k).iter().map(|&j| sigma.col_name(j)).collect();
        println!("block {k} ({} rows): {rows:?} x {cols:?}", b.rows.len());
    }
}
