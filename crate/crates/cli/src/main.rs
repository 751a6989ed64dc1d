//! `daestruct` command-line tool.
//!
//! Exit codes: 0 success, 1 structurally ill-posed input, 2 input or usage
//! error, 3 internal error.

mod render;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use daestruct::dae::{signature_from_source, DaeError};
use daestruct::dm::decompose;
use daestruct::gen::{generate_sigma, run_bench, GenConfig, GenError, Method, RNG_ALGORITHM};
use daestruct::offsets::{analyze, analyze_unblocked, OffsetError};
use daestruct::sigma::{
    read_sigma_file, write_sigma_file, write_sigma_file_dense, Permutation, SigmaError, SignatureMatrix,
};

use report::{DmDocument, IllPosedDocument, ReportDocument};

#[derive(Parser)]
#[command(
    name = "daestruct",
    version,
    about = "Structural analysis of DAE systems by the signature matrix method"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Offsets, structural index and Jacobian pattern of a system.
    Analyze {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        /// Skip block triangularization and solve the whole matrix at once.
        #[arg(long)]
        no_btf: bool,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
        /// Include wall-clock times per phase. Off by default so that the
        /// output depends on the input only.
        #[arg(long)]
        timing: bool,
    },
    /// Dulmage-Mendelsohn decomposition of the sparsity pattern.
    Dm {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Write a random block-structured signature matrix.
    Gen {
        /// Number of diagonal blocks.
        #[arg(long)]
        p: usize,
        /// Block size.
        #[arg(long = "N")]
        block_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every position, with this negative value for absent entries.
        #[arg(long, allow_negative_numbers = true)]
        sentinel: Option<i64>,
    },
    /// Time the analysis on generated instances and fit `t = mu * n^nu`.
    Bench {
        #[arg(long, value_enum, default_value_t = MethodArg::Esmm)]
        method: MethodArg,
        #[arg(long = "N", default_value_t = 10)]
        block_size: usize,
        /// Matrix sizes, each a multiple of N.
        #[arg(long, value_delimiter = ',', default_values_t = [400, 800, 1200, 1600])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-trial times as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// `.dae` files are models, anything else is a sigma file.
    Auto,
    Sigma,
    Dae,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Esmm,
    Smm,
}

enum Failure {
    IllPosed(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::IllPosed(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

fn read_input(path: &Path, format: Format) -> Result<SignatureMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let dae = match format {
        Format::Dae => true,
        Format::Sigma => false,
        Format::Auto => path.extension().is_some_and(|e| e == "dae"),
    };
    let parsed = if dae {
        signature_from_source(&text).map_err(|e: DaeError| e.to_string())
    } else {
        read_sigma_file(&text).map_err(|e: SigmaError| e.to_string())
    };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_analyze(path: &Path, format: Format, no_btf: bool, output: Output, timing: bool) -> Result<String, Failure> {
    let m = read_input(path, format)?;
    let result = if no_btf { analyze_unblocked(&m) } else { analyze(&m) };
    match result {
        Ok(r) => Ok(match output {
            Output::Json => report::to_json(&ReportDocument::new(&m, &r, timing)),
            Output::Text => render::analysis(&m, &r, timing),
        }),
        Err(OffsetError::StructurallyIllPosed(w)) => {
            Err(Failure::IllPosed(report::to_json(&IllPosedDocument::new(&m, &w))))
        }
        Err(e) => Err(Failure::Internal(e.to_string())),
    }
}

fn cmd_dm(path: &Path, format: Format, output: Output) -> Result<String, Failure> {
    let m = read_input(path, format)?;
    let dm = decompose(&m);
    let doc = DmDocument::new(&m, &dm);
    Ok(match output {
        Output::Json => report::to_json(&doc),
        Output::Text => {
            let mut s = render::dm(&m, &doc);
            if let (Some(rows), Some(cols)) = (&doc.row_order, &doc.col_order) {
                let back = |xs: &[usize]| xs.iter().map(|&x| x - 1).collect();
                let perm = Permutation::new(back(rows), back(cols)).map_err(|e| Failure::Internal(e.to_string()))?;
                s.push('\n');
                s.push_str(&render::draw_blocks(&m, &perm, dm.fine.blocks()));
            }
            s
        }
    })
}

fn cmd_gen(
    p: usize,
    block_size: usize,
    seed: u64,
    out: Option<&Path>,
    sentinel: Option<i64>,
) -> Result<String, Failure> {
    let m = generate_sigma(&GenConfig::new(block_size, p, seed)).map_err(|e| Failure::Input(e.to_string()))?;
    let body = match sentinel {
        Some(s) if s >= 0 => return Err(Failure::Input(format!("sentinel must be negative, got {s}"))),
        Some(s) => write_sigma_file_dense(&m, s),
        None => write_sigma_file(&m),
    };
    let text = format!("# p={p} N={block_size} seed={seed} rng: {RNG_ALGORITHM}\n{body}");
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_bench(
    method: MethodArg,
    block_size: usize,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    csv: Option<&Path>,
) -> Result<String, Failure> {
    if trials == 0 {
        return Err(Failure::Input("at least one trial is needed".into()));
    }
    let method = match method {
        MethodArg::Esmm => Method::Esmm,
        MethodArg::Smm => Method::Smm,
    };
    let result = run_bench(method, block_size, sizes, trials, seed).map_err(|e| match e {
        GenError::Analysis(e) => Failure::Internal(e.to_string()),
        e => Failure::Input(e.to_string()),
    })?;
    if let Some(path) = csv {
        fs::write(path, result.to_csv()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    let mut s = String::from("n,median_seconds\n");
    for (n, t) in &result.points {
        s.push_str(&format!("{n},{t:.9}\n"));
    }
    s.push_str(&format!(
        "method={} N={} mu={:e} nu={:.4}\n",
        method.label(),
        block_size,
        result.mu,
        result.nu
    ));
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze {
            path,
            format,
            no_btf,
            output,
            timing,
        } => cmd_analyze(path, *format, *no_btf, *output, *timing),
        Command::Dm { path, format, output } => cmd_dm(path, *format, *output),
        Command::Gen {
            p,
            block_size,
            seed,
            out,
            sentinel,
        } => cmd_gen(*p, *block_size, *seed, out.as_deref(), *sentinel),
        Command::Bench {
            method,
            block_size,
            sizes,
            trials,
            seed,
            csv,
        } => cmd_bench(*method, *block_size, sizes, *trials, *seed, csv.as_deref()),
    };
    match result {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::IllPosed(doc) => {
                    print!("{doc}");
                    eprintln!("error: structurally ill-posed, no finite transversal");
                }
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Internal(msg) => eprintln!("internal error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
