//! Reproducible Monte Carlo estimates in the continuous setting.
//!
//! Trials are split into `chunks` contiguous blocks. Block `c` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `c`, so a result
//! depends only on `(seed, chunks, trials, mode, k, n)` and never on how
//! rayon schedules the blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::prob::{prob_exists, prob_forall, prob_ngon, prob_none, ProblemSpec};
use crate::rational::ExactRational;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x9E37_79B9_7F4A_7C15;
pub const DEFAULT_CHUNKS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// No `k` pieces form a `k`-gon.
    None,
    /// Some `k` pieces form a `k`-gon.
    Exists,
    /// Every choice of `k` pieces forms a `k`-gon.
    Forall,
    /// All `n` pieces form an `n`-gon.
    Ngon,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mode::None),
            "exists" => Ok(Mode::Exists),
            "forall" => Ok(Mode::Forall),
            "ngon" => Ok(Mode::Ngon),
            other => domain(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub spec: ProblemSpec,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub chunks: u64,
}

impl SimConfig {
    /// For [`Mode::Ngon`] the spec is normalised to `k = n`.
    pub fn new(spec: ProblemSpec, mode: Mode, trials: u64, seed: u64, chunks: u64) -> Result<Self> {
        if trials == 0 {
            return domain("trials must be positive");
        }
        if chunks == 0 {
            return domain("chunks must be positive");
        }
        let spec = match mode {
            Mode::Ngon => ProblemSpec::new(spec.n(), spec.n())?,
            _ => spec,
        };
        Ok(Self {
            spec,
            mode,
            trials,
            seed,
            chunks,
        })
    }

    pub fn ngon(n: usize, trials: u64, seed: u64, chunks: u64) -> Result<Self> {
        Self::new(ProblemSpec::new(n, n)?, Mode::Ngon, trials, seed, chunks)
    }

    /// Trials assigned to block `chunk`; the first `trials % chunks` blocks
    /// take one extra.
    pub fn chunk_trials(&self, chunk: u64) -> u64 {
        self.trials / self.chunks + u64::from(chunk < self.trials % self.chunks)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub mode: Mode,
    pub k: usize,
    pub n: usize,
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
    pub chunks: u64,
}

impl SimResult {
    /// `|estimate - exact|` measured in standard errors.
    pub fn z_score(&self, exact: &ExactRational) -> f64 {
        let diff = (self.estimate - exact.to_f64()).abs();
        if self.stderr == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.stderr
        }
    }
}

/// The generator for block `chunk`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Breaks the unit stick at `n - 1` uniform points; pieces come back in
/// descending order.
pub fn break_stick<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.random::<f64>())
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut pieces = Vec::with_capacity(n);
    let mut prev = 0.0;
    for c in cuts {
        pieces.push(c - prev);
        prev = c;
    }
    pieces.push(1.0 - prev);
    pieces.sort_by(|a, b| b.total_cmp(a));
    pieces
}

/// No `k`-subset forms a `k`-gon: each window `i` has
/// `pieces[i] ≥ pieces[i+1] + … + pieces[i+k-1]`. Pieces must be descending.
pub fn predicate_none(pieces: &[f64], k: usize) -> bool {
    pieces
        .windows(k)
        .all(|w| w[0] >= w[1..].iter().sum::<f64>())
}

/// Every `k`-subset forms a `k`-gon: the largest piece is below the sum of
/// the `k - 1` smallest. Pieces must be descending.
pub fn predicate_forall(pieces: &[f64], k: usize) -> bool {
    let n = pieces.len();
    pieces[0] < pieces[n - k + 1..].iter().sum::<f64>()
}

pub fn trial_hit(mode: Mode, pieces: &[f64], k: usize) -> bool {
    match mode {
        Mode::None => predicate_none(pieces, k),
        Mode::Exists => !predicate_none(pieces, k),
        Mode::Forall => predicate_forall(pieces, k),
        Mode::Ngon => predicate_forall(pieces, pieces.len()),
    }
}

fn run_chunk(config: &SimConfig, chunk: u64) -> u64 {
    let mut rng = chunk_rng(config.seed, chunk);
    let (k, n) = (config.spec.k(), config.spec.n());
    (0..config.chunk_trials(chunk))
        .filter(|_| trial_hit(config.mode, &break_stick(n, &mut rng), k))
        .count() as u64
}

pub fn estimate(config: &SimConfig) -> SimResult {
    let hits: u64 = (0..config.chunks)
        .into_par_iter()
        .map(|c| run_chunk(config, c))
        .sum();
    let p = hits as f64 / config.trials as f64;
    SimResult {
        mode: config.mode,
        k: config.spec.k(),
        n: config.spec.n(),
        hits,
        trials: config.trials,
        estimate: p,
        stderr: (p * (1.0 - p) / config.trials as f64).sqrt(),
        seed: config.seed,
        chunks: config.chunks,
    }
}

/// The closed-form value a simulation of `mode` estimates.
pub fn exact_value(mode: Mode, spec: ProblemSpec) -> Result<ExactRational> {
    match mode {
        Mode::None => prob_none(spec),
        Mode::Exists => prob_exists(spec),
        Mode::Forall => prob_forall(spec),
        Mode::Ngon => prob_ngon(spec.n()),
    }
}
