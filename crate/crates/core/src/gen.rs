//! Random block-structured signature matrices and a scaling benchmark.
//!
//! A generated matrix of size `n = p·N` repeats one dense `N×N` template on
//! every diagonal block and one sparse `N×N` template on every block just
//! above the diagonal; everything else is absent:
//!
//! ```text
//! [ A  B          ]
//! [    A  B       ]
//! [       A  B    ]
//! [          A  B ]
//! [             A ]
//! ```
//!
//! Since `A` is dense, the identity is always a finite transversal.

use std::fmt::Write as _;
use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::offsets::{self, OffsetError};
use crate::sigma::{Order, SignatureMatrix};

/// Name of the random source, recorded next to generated instances.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.3, seed_from_u64); u = (next_u64 >> 11) * 2^-53";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("block size and block count must be positive")]
    ZeroSize,
    #[error("{which} probabilities sum to {sum}, not 1")]
    BadProbabilities { which: &'static str, sum: f64 },
    #[error("{which} probability {p} is not in [0, 1]")]
    ProbabilityOutOfRange { which: &'static str, p: f64 },
    #[error("{which} values are empty")]
    NoValues { which: &'static str },
    #[error("size {n} is not a multiple of the block size {block_size}")]
    Indivisible { n: usize, block_size: usize },
    #[error("at least 3 points are needed for a fit, got {0}")]
    InsufficientPoints(usize),
    #[error("time {0} is not positive")]
    NonPositiveTime(f64),
    #[error(transparent)]
    Analysis(#[from] OffsetError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// `N`, the size of each diagonal block.
    pub block_size: usize,
    /// `p`, the number of diagonal blocks.
    pub block_count: usize,
    pub seed: u64,
    pub diag_values: Vec<(Order, f64)>,
    /// `None` is an absent entry.
    pub offdiag_values: Vec<(Option<Order>, f64)>,
}

impl GenConfig {
    pub fn new(block_size: usize, block_count: usize, seed: u64) -> GenConfig {
        GenConfig {
            block_size,
            block_count,
            seed,
            diag_values: vec![(0, 0.7), (1, 0.1), (2, 0.1), (3, 0.1)],
            offdiag_values: vec![(None, 0.925), (Some(0), 0.025), (Some(1), 0.025), (Some(2), 0.025)],
        }
    }

    pub fn n(&self) -> usize {
        self.block_size * self.block_count
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.block_size == 0 || self.block_count == 0 {
            return Err(GenError::ZeroSize);
        }
        check_probabilities("diagonal", self.diag_values.iter().map(|v| v.1))?;
        check_probabilities("off-diagonal", self.offdiag_values.iter().map(|v| v.1))
    }
}

fn check_probabilities(which: &'static str, ps: impl Iterator<Item = f64> + Clone) -> Result<(), GenError> {
    if ps.clone().next().is_none() {
        return Err(GenError::NoValues { which });
    }
    if let Some(p) = ps.clone().find(|p| !(0.0..=1.0).contains(p)) {
        return Err(GenError::ProbabilityOutOfRange { which, p });
    }
    let sum: f64 = ps.sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(GenError::BadProbabilities { which, sum });
    }
    Ok(())
}

/// Uniform in `[0, 1)` from the top 53 bits of one 64-bit draw.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse CDF over `values` in listed order.
fn sample<T: Copy>(rng: &mut ChaCha8Rng, values: &[(T, f64)]) -> T {
    let u = uniform(rng);
    let mut acc = 0.0;
    for &(v, p) in values {
        acc += p;
        if u < acc {
            return v;
        }
    }
    values.last().expect("validated nonempty").0
}

/// Draws the two templates (diagonal first, each row-major, one draw per
/// cell) and tiles them.
pub fn generate_sigma(cfg: &GenConfig) -> Result<SignatureMatrix, GenError> {
    cfg.validate()?;
    let nb = cfg.block_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let diag: Vec<Order> = (0..nb * nb).map(|_| sample(&mut rng, &cfg.diag_values)).collect();
    let upper: Vec<Option<Order>> = (0..nb * nb).map(|_| sample(&mut rng, &cfg.offdiag_values)).collect();

    let mut triplets = Vec::new();
    for b in 0..cfg.block_count {
        let base = b * nb;
        for r in 0..nb {
            for c in 0..nb {
                triplets.push((base + r, base + c, i64::from(diag[r * nb + c])));
            }
            if b + 1 < cfg.block_count {
                for c in 0..nb {
                    if let Some(s) = upper[r * nb + c] {
                        triplets.push((base + r, base + nb + c, i64::from(s)));
                    }
                }
            }
        }
    }
    Ok(SignatureMatrix::from_triplets(cfg.n(), triplets).expect("generated entries are in range"))
}

/// Least squares fit of `t = μ·n^ν` on `(ln n, ln t)`. Returns `(μ, ν)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64), GenError> {
    if points.len() < 3 {
        return Err(GenError::InsufficientPoints(points.len()));
    }
    if let Some(&(_, t)) = points
        .iter()
        .find(|&&(_, t)| t.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater))
    {
        return Err(GenError::NonPositiveTime(t));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let nu = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    Ok(((my - nu * mx).exp(), nu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Block triangular route, [`offsets::analyze`].
    Esmm,
    /// Global route, [`offsets::analyze_unblocked`].
    Smm,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Esmm => "esmm",
            Method::Smm => "smm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub n: usize,
    pub trial: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub method: Method,
    pub block_size: usize,
    pub samples: Vec<Sample>,
    /// `(n, median seconds)`, sorted by `n`.
    pub points: Vec<(usize, f64)>,
    pub mu: f64,
    pub nu: f64,
}

impl BenchResult {
    /// `method,N,n,trial,seconds` rows followed by `# fit` and `# rng` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,N,n,trial,seconds\n");
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{:.9}",
                self.method.label(),
                self.block_size,
                s.n,
                s.trial,
                s.seconds
            )
            .unwrap();
        }
        writeln!(
            out,
            "# fit method={} mu={:e} nu={:.6}",
            self.method.label(),
            self.mu,
            self.nu
        )
        .unwrap();
        writeln!(out, "# rng {RNG_ALGORITHM}").unwrap();
        out
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Seed of the instances of trial `trial`. It does not depend on the size, so
/// one trial tiles the same two templates at every size and its times differ
/// only through the number of blocks.
pub fn instance_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Times `method` on fresh instances, sequentially. Generation is not timed.
pub fn run_bench(
    method: Method,
    block_size: usize,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<BenchResult, GenError> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if let Some(&n) = sizes
        .iter()
        .find(|&&n| block_size == 0 || n == 0 || n % block_size != 0)
    {
        return Err(GenError::Indivisible { n, block_size });
    }
    let mut samples = Vec::new();
    let mut points = Vec::new();
    for &n in &sizes {
        let mut times = Vec::with_capacity(trials);
        for trial in 0..trials {
            let cfg = GenConfig::new(block_size, n / block_size, instance_seed(seed, trial));
            let m = generate_sigma(&cfg)?;
            let start = Instant::now();
            let report = match method {
                Method::Esmm => offsets::analyze(&m)?,
                Method::Smm => offsets::analyze_unblocked(&m)?,
            };
            let seconds = start.elapsed().as_secs_f64();
            std::hint::black_box(report);
            samples.push(Sample { n, trial, seconds });
            times.push(seconds);
        }
        if !times.is_empty() {
            points.push((n, median(&mut times)));
        }
    }
    let fit_points: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n as f64, t)).collect();
    let (mu, nu) = fit_power_law(&fit_points)?;
    Ok(BenchResult {
        method,
        block_size,
        samples,
        points,
        mu,
        nu,
    })
}
