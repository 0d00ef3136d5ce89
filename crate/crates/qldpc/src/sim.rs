//! Monte Carlo Z-noise simulation.
//!
//! Each trial samples an iid Z-error, decodes its syndrome through
//! `H_X`, and classifies the outcome with degeneracy taken into
//! account: an estimate differing from the true error by a stabilizer
//! (a rowspace element of `H_Z`) still counts as success; a residual in
//! the kernel of `H_X` but outside that rowspace is a logical error.
//!
//! Trials are seeded independently by splitting the master seed through
//! the decoder's LCG, so statistics are reproducible bit-for-bit no
//! matter how many threads run them.

use crate::css::CssCode;
use crate::decoder::{self, decode, DecoderConfig, Lcg};
use crate::gf2::RowSpace;
use crate::layering::LayerCover;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("error probability {0} must lie in [0, 1)")]
    InvalidProbability(f64),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("decoder error: {0}")]
    Decoder(#[from] decoder::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Classification of a single decoding trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    LogicalError,
    NonConvergence,
}

/// One decoding trial: the sampled error, the decoder's estimate, and
/// the degeneracy-aware classification.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub error: Vec<u8>,
    pub estimate: Vec<u8>,
    pub outcome: Outcome,
    pub layer_iterations_used: usize,
}

/// Aggregated statistics of a simulation run.
#[derive(Debug, Clone)]
pub struct SimStats {
    pub code_name: String,
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    pub logical_errors: usize,
    pub nonconvergences: usize,
    /// (logical errors + non-convergences) / trials.
    pub frame_error_rate: f64,
    pub logical_error_rate: f64,
    pub nonconvergence_rate: f64,
    pub mean_layer_iterations: f64,
    pub seed: u32,
    pub config: DecoderConfig,
}

/// Samples `n` iid Bernoulli(p) bits from the LCG stream.
pub fn sample_z_error(n: usize, p: f64, rng: &mut Lcg) -> Vec<u8> {
    assert!((0.0..1.0).contains(&p), "p = {p} outside [0, 1)");
    let threshold = (p * 4_294_967_296.0) as u64;
    (0..n)
        .map(|_| u8::from(u64::from(rng.next_u32()) < threshold))
        .collect()
}

/// Classifies one trial against the code.
///
/// Builds the `H_Z` rowspace basis on every call; use [`Classifier`]
/// when classifying many trials of the same code.
pub fn classify(error: &[u8], estimate: &[u8], code: &CssCode) -> Outcome {
    Classifier::new(code).classify(error, estimate)
}

/// Reusable outcome classifier holding the eliminated `H_Z` rowspace.
pub struct Classifier<'c> {
    code: &'c CssCode,
    z_rowspace: RowSpace,
}

impl<'c> Classifier<'c> {
    pub fn new(code: &'c CssCode) -> Self {
        Self {
            code,
            z_rowspace: RowSpace::new(code.h_z()),
        }
    }

    /// Non-convergence when the estimate reproduces the wrong syndrome;
    /// success when the residual is a stabilizer; logical error
    /// otherwise.
    pub fn classify(&self, error: &[u8], estimate: &[u8]) -> Outcome {
        let residual: Vec<u8> = error
            .iter()
            .zip(estimate)
            .map(|(e, g)| (e ^ g) & 1)
            .collect();
        let unsatisfied = self
            .code
            .h_x()
            .mat_vec(&residual)
            .expect("residual has length n");
        if unsatisfied.iter().any(|&b| b != 0) {
            Outcome::NonConvergence
        } else if self.z_rowspace.contains(&residual) {
            Outcome::Success
        } else {
            Outcome::LogicalError
        }
    }
}

/// Runs one seeded trial: sample, decode, classify.
pub fn run_trial(
    code: &CssCode,
    cover: Option<&LayerCover>,
    config: &DecoderConfig,
    p: f64,
    classifier: &Classifier,
    noise_seed: u32,
    decoder_seed: u32,
) -> Result<TrialRecord, Error> {
    let mut noise_rng = Lcg::new(noise_seed);
    let error = sample_z_error(code.n(), p, &mut noise_rng);
    let syndrome = code.h_x().mat_vec(&error).expect("error has length n");
    let trial_config = DecoderConfig {
        rng_seed: decoder_seed,
        ..config.clone()
    };
    // p = 0 always yields the zero syndrome, which decode resolves before
    // touching the channel prior.
    let result = decode(code.h_x(), &syndrome, cover, p, &trial_config)?;
    let outcome = classifier.classify(&error, &result.estimate);
    debug_assert_eq!(
        outcome == Outcome::NonConvergence,
        !result.converged,
        "classifier and decoder disagree about convergence"
    );
    Ok(TrialRecord {
        error,
        estimate: result.estimate,
        outcome,
        layer_iterations_used: result.layer_iterations_used,
    })
}

// Avalanche mix splitting the master seed into per-trial seeds. Raw LCG
// outputs would not do here: the LCG state sequence is one long cycle,
// so seeding trial streams with consecutive outputs makes each trial's
// noise a two-step shift of the previous one. The mix scatters the
// seeds across the cycle instead.
fn split_seed(state: &mut u32) -> u32 {
    *state = state.wrapping_add(0x9e37_79b9);
    let mut z = *state;
    z = (z ^ (z >> 16)).wrapping_mul(0x21f0_aaad);
    z = (z ^ (z >> 15)).wrapping_mul(0x735a_2d97);
    z ^ (z >> 15)
}

/// Runs `n_trials` independent trials and aggregates them.
///
/// Per-trial noise and decoder seeds are split off the master seed
/// before any trial runs, so results are identical whether trials
/// execute serially or in parallel.
pub fn run_trials(
    code: &CssCode,
    cover: Option<&LayerCover>,
    config: &DecoderConfig,
    p: f64,
    n_trials: usize,
    seed: u32,
) -> Result<SimStats, Error> {
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    config.validate()?;

    let mut splitter = seed;
    let trial_seeds: Vec<(u32, u32)> = (0..n_trials)
        .map(|_| (split_seed(&mut splitter), split_seed(&mut splitter)))
        .collect();

    let classifier = Classifier::new(code);
    let outcomes: Result<Vec<(Outcome, usize)>, Error> = trial_seeds
        .par_iter()
        .map(|&(noise_seed, decoder_seed)| {
            run_trial(code, cover, config, p, &classifier, noise_seed, decoder_seed)
                .map(|r| (r.outcome, r.layer_iterations_used))
        })
        .collect();
    let outcomes = outcomes?;

    let mut successes = 0;
    let mut logical_errors = 0;
    let mut nonconvergences = 0;
    let mut layer_iteration_sum: u64 = 0;
    for &(outcome, layer_its) in &outcomes {
        match outcome {
            Outcome::Success => successes += 1,
            Outcome::LogicalError => logical_errors += 1,
            Outcome::NonConvergence => nonconvergences += 1,
        }
        layer_iteration_sum += layer_its as u64;
    }
    let trials_f = n_trials as f64;
    Ok(SimStats {
        code_name: code.name().to_string(),
        p,
        trials: n_trials,
        successes,
        logical_errors,
        nonconvergences,
        frame_error_rate: (logical_errors + nonconvergences) as f64 / trials_f,
        logical_error_rate: logical_errors as f64 / trials_f,
        nonconvergence_rate: nonconvergences as f64 / trials_f,
        mean_layer_iterations: layer_iteration_sum as f64 / trials_f,
        seed,
        config: config.clone(),
    })
}

/// Header of the CSV emitted by [`SimStats::csv_row`].
pub const CSV_HEADER: &str = "code,schedule,algo,random_order,p,trials,seed,frame_error_rate,logical_error_rate,nonconvergence_rate,mean_layer_iterations";

impl SimStats {
    pub fn csv_row(&self) -> String {
        let mut row = String::new();
        write!(
            row,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.code_name,
            self.config.schedule,
            self.config.algorithm,
            self.config.random_order,
            self.p,
            self.trials,
            self.seed,
            self.frame_error_rate,
            self.logical_error_rate,
            self.nonconvergence_rate,
            self.mean_layer_iterations,
        )
        .expect("writing to a String cannot fail");
        row
    }
}

/// Renders header plus one row per entry.
pub fn format_csv(stats: &[SimStats]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

/// Writes (or overwrites) a CSV file.
pub fn write_csv<P: AsRef<Path>>(path: P, stats: &[SimStats]) -> Result<(), Error> {
    std::fs::write(path, format_csv(stats))?;
    Ok(())
}
