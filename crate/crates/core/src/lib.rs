//! Structural analysis of differential-algebraic equation systems.
//!
//! The pipeline goes from a signature matrix `Σ` (the highest derivative
//! order of each variable in each equation) to block triangular form, a
//! maximum-value transversal per diagonal block, the canonical offsets
//! `(c, d)`, the structural index and the pattern of the system Jacobian.
//!
//! ```
//! use daestruct::{analyze, signature_from_source};
//!
//! let sigma = signature_from_source(
//!     "var x, y, lam;
//!      param g, L;
//!      eq f1: der(x, 2) + x*lam;
//!      eq f2: der(y, 2) + y*lam - g;
//!      eq f3: x^2 + y^2 - L^2;",
//! )?;
//! let report = analyze(&sigma)?;
//! assert_eq!(report.offsets.c, vec![0, 0, 2]);
//! assert_eq!(report.offsets.d, vec![2, 2, 0]);
//! assert_eq!(report.structural_index, 3);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! Indices are 0-based throughout the library. The text formats and the
//! command line use 1-based indices.

pub mod dae;
pub mod dm;
pub mod gen;
pub mod lap;
pub mod offsets;
pub mod sigma;

pub use dae::{build_signature, parse_model, signature_from_source, DaeError, DaeModel};
pub use dm::{btf, decompose, DmDecomposition, DmError, FineBtf};
pub use gen::{fit_power_law, generate_sigma, run_bench, BenchResult, GenConfig, GenError, Method};
pub use lap::{max_value_transversal, Assignment, IllPosedWitness, LapError};
pub use offsets::{
    analyze, analyze_unblocked, block_offsets, global_offsets_fixed_point, jacobian_pattern, structural_index,
    AnalysisReport, OffsetError, OffsetVectors,
};
pub use sigma::{read_sigma_file, write_sigma_file, Permutation, SigmaError, SignatureMatrix};

#[cfg(doctest)]
mod book {
    macro_rules! chapters {
        ($($name:ident => $path:literal),* $(,)?) => {
            $(
                #[doc = include_str!(concat!("../../../book/src/", $path))]
                mod $name {}
            )*
        };
    }
    chapters! {
        intro => "introduction.md",
        signature => "signature.md",
        btf => "btf.md",
        transversal => "transversal.md",
        offsets => "offsets.md",
        benchmark => "benchmark.md",
        cli => "cli.md",
    }
}
