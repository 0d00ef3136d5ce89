//! Syndrome message-passing decoders.
//!
//! Decoding runs on the Tanner graph of a parity-check matrix `H`,
//! looking for an estimate `ê` with `H·ê = s`. The syndrome enters the
//! check-node update as a `(−1)^s` sign. Three update rules are
//! provided: sum-product, normalized min-sum, and perturbed min-sum
//! (min-sum whose normalization factor is redrawn uniformly from a
//! small set per check-node message per iteration).
//!
//! Scheduling:
//!
//! - **flooded**: every check updates from the same message snapshot,
//!   then all posteriors update;
//! - **serial**: checks are processed one at a time with immediate
//!   posterior updates (equivalent to layered with singleton layers);
//! - **layered**: the layers of a cover are applied in order; the
//!   checks inside a valid layer touch disjoint variables, so the
//!   result does not depend on their processing order.
//!
//! With `random_order` a fresh permutation of the layer (or check)
//! order is drawn each sweep from a 32-bit linear congruential
//! generator; `constrain_successive` additionally rejects permutations
//! in which consecutive layers share a check, including across sweep
//! boundaries.

use crate::layering::{validate_cover, LayerCover};
use crate::gf2::SparseBinaryMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syndrome length {got} does not match {expected} checks")]
    SyndromeLength { got: usize, expected: usize },
    #[error("syndrome entries must be 0 or 1")]
    SyndromeBits,
    #[error("error probability {0} is outside (0, 1)")]
    InvalidProbability(f64),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("layered schedule requires a cover")]
    CoverRequired,
    #[error("cover is not valid for this matrix: {0}")]
    InvalidCover(String),
}

/// The multiplier/increment pair of the classic 32-bit linear
/// congruential generator `x ← 1664525·x + 1013904223 (mod 2³²)`.
///
/// Cheap enough for hardware, and all the randomness the random-order
/// schedule needs. The same generator drives noise sampling and seed
/// derivation in the simulation harness so that every run is
/// reproducible from one 32-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lcg {
    state: u32,
}

impl Lcg {
    pub const MULTIPLIER: u32 = 1_664_525;
    pub const INCREMENT: u32 = 1_013_904_223;

    pub fn new(seed: u32) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    /// Advances the state and returns it.
    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Draws an index in `[0, bound)` by multiply-shift on the next
    /// 32-bit output (the low LCG bits alternate, so avoid modulo).
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0 && bound <= u32::MAX as usize);
        ((u64::from(self.next_u32()) * bound as u64) >> 32) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    SumProduct,
    NormalizedMinSum,
    PerturbedMinSum,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::SumProduct => "sp",
            Algorithm::NormalizedMinSum => "nms",
            Algorithm::PerturbedMinSum => "pnms",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Flooded,
    Serial,
    Layered,
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Flooded => "flooded",
            Schedule::Serial => "serial",
            Schedule::Layered => "layered",
        })
    }
}

/// Decoder settings.
///
/// Budget semantics follow the schedule: `max_iterations` bounds full
/// flooded iterations, while `max_layer_iterations` bounds single layer
/// applications for the serial and layered schedules (`None` selects
/// `⌊64·k/t⌋`, which for serial means 64 full sweeps). The syndrome is
/// tested every `syndrome_check_period` layer applications (flooded:
/// iterations). `constrain_successive` only takes effect together with
/// `random_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub nms_factor: f64,
    pub perturbation_set: Vec<f64>,
    pub schedule: Schedule,
    pub random_order: bool,
    pub constrain_successive: bool,
    pub max_iterations: usize,
    pub max_layer_iterations: Option<usize>,
    pub syndrome_check_period: usize,
    pub message_clip: f64,
    pub rng_seed: u32,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::NormalizedMinSum,
            nms_factor: 0.875,
            perturbation_set: vec![0.875, 0.9275],
            schedule: Schedule::Flooded,
            random_order: false,
            constrain_successive: false,
            max_iterations: 128,
            max_layer_iterations: None,
            syndrome_check_period: 1,
            message_clip: 30.0,
            rng_seed: 0,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_iterations == 0 {
            return Err(Error::BadConfig("max_iterations must be positive".into()));
        }
        if self.max_layer_iterations == Some(0) {
            return Err(Error::BadConfig(
                "max_layer_iterations must be positive".into(),
            ));
        }
        if self.syndrome_check_period == 0 {
            return Err(Error::BadConfig(
                "syndrome_check_period must be positive".into(),
            ));
        }
        if !(self.message_clip > 0.0 && self.message_clip.is_finite()) {
            return Err(Error::BadConfig("message_clip must be positive".into()));
        }
        if self.perturbation_set.is_empty() {
            return Err(Error::BadConfig("perturbation_set must be nonempty".into()));
        }
        Ok(())
    }
}

/// Decoding outcome.
///
/// `converged` implies `H·estimate = s`. `layer_iterations_used` counts
/// layer applications; `iterations_used` counts full sweeps (flooded:
/// both count iterations). `constraint_fallbacks` counts sweeps where no
/// conflict-free permutation was found within the retry bound and an
/// unconstrained permutation was used instead.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub estimate: Vec<u8>,
    pub converged: bool,
    pub layer_iterations_used: usize,
    pub iterations_used: usize,
    pub constraint_fallbacks: usize,
}

/// Channel log-likelihood ratio `ln((1−p)/p)` for an iid error
/// probability `p`, clamped to `±clip`.
pub fn init_llr(p: f64, clip: f64) -> Result<f64, Error> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if !(clip > 0.0 && clip.is_finite()) {
        return Err(Error::BadConfig("clip must be positive".into()));
    }
    Ok(((1.0 - p) / p).ln().clamp(-clip, clip))
}

/// Sum-product check-node update: `out_v = (−1)^s · 2·atanh(∏_{v'≠v}
/// tanh(η_{v'}/2))`, clipped to `±clip`.
pub fn sum_product_update(eta: &[f64], syndrome_bit: u8, clip: f64) -> Vec<f64> {
    let mut out = Vec::new();
    sum_product_into(eta, syndrome_bit, clip, &mut out);
    out
}

/// Normalized min-sum check-node update: `out_v = (−1)^s · factor ·
/// (∏_{v'≠v} sign η_{v'}) · min_{v'≠v} |η_{v'}|`, clipped to `±clip`.
pub fn normalized_min_sum_update(eta: &[f64], syndrome_bit: u8, factor: f64, clip: f64) -> Vec<f64> {
    let mut out = Vec::new();
    min_sum_into(eta, syndrome_bit, || factor, clip, &mut out);
    out
}

/// Min-sum update whose normalization factor is drawn uniformly from
/// `factor_set`, independently for each outgoing message.
pub fn perturbed_min_sum_update(
    eta: &[f64],
    syndrome_bit: u8,
    factor_set: &[f64],
    rng: &mut Lcg,
    clip: f64,
) -> Vec<f64> {
    assert!(!factor_set.is_empty(), "factor set must be nonempty");
    let mut out = Vec::new();
    min_sum_into(
        eta,
        syndrome_bit,
        || factor_set[rng.next_index(factor_set.len())],
        clip,
        &mut out,
    );
    out
}

fn sum_product_into(eta: &[f64], syndrome_bit: u8, clip: f64, out: &mut Vec<f64>) {
    let d = eta.len();
    out.clear();
    out.resize(d, 1.0);
    let s_sign = if syndrome_bit == 0 { 1.0 } else { -1.0 };
    let mut prefix = 1.0;
    for i in 0..d {
        out[i] = prefix;
        prefix *= (eta[i] / 2.0).tanh();
    }
    let mut suffix = 1.0;
    for i in (0..d).rev() {
        let extrinsic = out[i] * suffix;
        out[i] = (s_sign * 2.0 * extrinsic.atanh()).clamp(-clip, clip);
        suffix *= (eta[i] / 2.0).tanh();
    }
}

fn min_sum_into<F: FnMut() -> f64>(
    eta: &[f64],
    syndrome_bit: u8,
    mut factor: F,
    clip: f64,
    out: &mut Vec<f64>,
) {
    let d = eta.len();
    out.clear();
    out.resize(d, 0.0);
    let mut sign_product = 1.0;
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut argmin = usize::MAX;
    for (i, &e) in eta.iter().enumerate() {
        if e < 0.0 {
            sign_product = -sign_product;
        }
        let a = e.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            argmin = i;
        } else if a < min2 {
            min2 = a;
        }
    }
    let s_sign = if syndrome_bit == 0 { 1.0 } else { -1.0 };
    for (i, &e) in eta.iter().enumerate() {
        // sign(0) counts as +1 so the rule stays deterministic.
        let self_sign = if e < 0.0 { -1.0 } else { 1.0 };
        let magnitude = if i == argmin { min2 } else { min1 };
        out[i] = (s_sign * factor() * sign_product * self_sign * magnitude).clamp(-clip, clip);
    }
}

/// Retry budget for constrained permutation sampling.
pub const ORDER_RETRY_BOUND: usize = 100;

/// Draws a uniform permutation of `0..k` by Fisher-Yates over LCG
/// draws. With a conflict predicate, resamples until no consecutive
/// pair conflicts (including `previous_last` against the first
/// element); after [`ORDER_RETRY_BOUND`] attempts the last, possibly
/// conflicting, permutation is returned with the flag set.
pub fn sample_layer_order(
    k: usize,
    rng: &mut Lcg,
    conflict: Option<&dyn Fn(usize, usize) -> bool>,
    previous_last: Option<usize>,
) -> (Vec<usize>, bool) {
    let draw = |rng: &mut Lcg| {
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = rng.next_index(i + 1);
            perm.swap(i, j);
        }
        perm
    };
    let Some(pred) = conflict else {
        return (draw(rng), false);
    };
    let acceptable = |perm: &[usize]| {
        if let (Some(prev), Some(&first)) = (previous_last, perm.first()) {
            if pred(prev, first) {
                return false;
            }
        }
        perm.windows(2).all(|w| !pred(w[0], w[1]))
    };
    let mut perm = draw(rng);
    for _ in 1..ORDER_RETRY_BOUND {
        if acceptable(&perm) {
            return (perm, false);
        }
        perm = draw(rng);
    }
    let ok = acceptable(&perm);
    (perm, !ok)
}

// Compressed Tanner-graph adjacency. Edges are indexed check-major, so
// `mu[e]` is the message of edge `e` and `check_ptr` delimits the edge
// range of each check.
struct Adjacency {
    check_ptr: Vec<usize>,
    check_vars: Vec<usize>,
}

impl Adjacency {
    fn new(h: &SparseBinaryMatrix) -> Self {
        let mut check_ptr = Vec::with_capacity(h.n_rows() + 1);
        let mut check_vars = Vec::with_capacity(h.num_ones());
        check_ptr.push(0);
        for r in 0..h.n_rows() {
            check_vars.extend_from_slice(h.row(r));
            check_ptr.push(check_vars.len());
        }
        Self {
            check_ptr,
            check_vars,
        }
    }
}

enum CheckRule<'a> {
    SumProduct,
    MinSum { factor: f64 },
    Perturbed { set: &'a [f64] },
}

// Shared decoder state. `acc` tracks the current H·ê and `unsat` the
// number of checks where it disagrees with the target syndrome, updated
// incrementally on every hard-decision flip so convergence tests are
// O(1).
struct Engine<'a> {
    h: &'a SparseBinaryMatrix,
    adj: Adjacency,
    syndrome: &'a [u8],
    lambda: f64,
    clip: f64,
    gamma: Vec<f64>,
    mu: Vec<f64>,
    mu_next: Vec<f64>,
    estimate: Vec<u8>,
    acc: Vec<u8>,
    unsat: usize,
    eta_buf: Vec<f64>,
    out_buf: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(h: &'a SparseBinaryMatrix, syndrome: &'a [u8], lambda: f64, clip: f64) -> Self {
        let adj = Adjacency::new(h);
        let n = h.n_cols();
        let edges = adj.check_vars.len();
        let estimate: Vec<u8> = vec![u8::from(lambda < 0.0); n];
        let acc = h.mat_vec(&estimate).expect("estimate has length n");
        let unsat = acc
            .iter()
            .zip(syndrome)
            .filter(|(a, s)| a != s)
            .count();
        Self {
            h,
            adj,
            syndrome,
            lambda,
            clip,
            gamma: vec![lambda; n],
            mu: vec![0.0; edges],
            mu_next: vec![0.0; edges],
            estimate,
            acc,
            unsat,
            eta_buf: Vec::new(),
            out_buf: Vec::new(),
        }
    }

    fn update_estimate(&mut self, v: usize) {
        let bit = u8::from(self.gamma[v] < 0.0);
        if bit != self.estimate[v] {
            self.estimate[v] = bit;
            for &c in self.h.col(v) {
                self.acc[c] ^= 1;
                if self.acc[c] == self.syndrome[c] {
                    self.unsat -= 1;
                } else {
                    self.unsat += 1;
                }
            }
        }
    }

    // One check under the serial/layered schedule: extrinsic inputs from
    // the live posterior, immediate posterior write-back.
    fn process_check(&mut self, c: usize, rule: &CheckRule, perturb_rng: &mut Lcg) {
        let lo = self.adj.check_ptr[c];
        let hi = self.adj.check_ptr[c + 1];
        if lo == hi {
            return;
        }
        self.eta_buf.clear();
        for e in lo..hi {
            self.eta_buf.push(self.gamma[self.adj.check_vars[e]] - self.mu[e]);
        }
        let s_bit = self.syndrome[c];
        match rule {
            CheckRule::SumProduct => {
                sum_product_into(&self.eta_buf, s_bit, self.clip, &mut self.out_buf)
            }
            CheckRule::MinSum { factor } => {
                let factor = *factor;
                min_sum_into(&self.eta_buf, s_bit, || factor, self.clip, &mut self.out_buf)
            }
            CheckRule::Perturbed { set } => min_sum_into(
                &self.eta_buf,
                s_bit,
                || set[perturb_rng.next_index(set.len())],
                self.clip,
                &mut self.out_buf,
            ),
        }
        for (i, e) in (lo..hi).enumerate() {
            let v = self.adj.check_vars[e];
            let new_mu = self.out_buf[i];
            self.gamma[v] = self.eta_buf[i] + new_mu;
            self.mu[e] = new_mu;
            self.update_estimate(v);
        }
    }

    // One flooded iteration: all check messages from the same snapshot,
    // then all posteriors.
    fn flooded_iteration(&mut self, rule: &CheckRule, perturb_rng: &mut Lcg) {
        for c in 0..self.h.n_rows() {
            let lo = self.adj.check_ptr[c];
            let hi = self.adj.check_ptr[c + 1];
            if lo == hi {
                continue;
            }
            self.eta_buf.clear();
            for e in lo..hi {
                self.eta_buf.push(self.gamma[self.adj.check_vars[e]] - self.mu[e]);
            }
            let s_bit = self.syndrome[c];
            match rule {
                CheckRule::SumProduct => {
                    sum_product_into(&self.eta_buf, s_bit, self.clip, &mut self.out_buf)
                }
                CheckRule::MinSum { factor } => {
                    let factor = *factor;
                    min_sum_into(&self.eta_buf, s_bit, || factor, self.clip, &mut self.out_buf)
                }
                CheckRule::Perturbed { set } => min_sum_into(
                    &self.eta_buf,
                    s_bit,
                    || set[perturb_rng.next_index(set.len())],
                    self.clip,
                    &mut self.out_buf,
                ),
            }
            self.mu_next[lo..hi].copy_from_slice(&self.out_buf);
        }
        std::mem::swap(&mut self.mu, &mut self.mu_next);
        self.gamma.fill(self.lambda);
        for (e, &v) in self.adj.check_vars.iter().enumerate() {
            self.gamma[v] += self.mu[e];
        }
        for v in 0..self.h.n_cols() {
            self.update_estimate(v);
        }
    }
}

/// Decodes a syndrome.
///
/// `p` is the iid channel error probability feeding the prior LLR. The
/// layered schedule requires a cover that is valid for `h`; the serial
/// and flooded schedules ignore `cover`. An all-zero syndrome returns
/// the zero estimate without iterating.
pub fn decode(
    h: &SparseBinaryMatrix,
    syndrome: &[u8],
    cover: Option<&LayerCover>,
    p: f64,
    config: &DecoderConfig,
) -> Result<DecodeResult, Error> {
    if syndrome.len() != h.n_rows() {
        return Err(Error::SyndromeLength {
            got: syndrome.len(),
            expected: h.n_rows(),
        });
    }
    if syndrome.iter().any(|&b| b > 1) {
        return Err(Error::SyndromeBits);
    }
    config.validate()?;

    if syndrome.iter().all(|&b| b == 0) {
        return Ok(DecodeResult {
            estimate: vec![0; h.n_cols()],
            converged: true,
            layer_iterations_used: 0,
            iterations_used: 0,
            constraint_fallbacks: 0,
        });
    }

    let lambda = init_llr(p, config.message_clip)?;
    // Independent streams for layer ordering and factor perturbation, so
    // that turning the perturbation on or off does not shift the
    // permutation sequence.
    let mut master = Lcg::new(config.rng_seed);
    let order_seed = master.next_u32();
    let perturb_seed = master.next_u32();
    let mut order_rng = Lcg::new(order_seed);
    let mut perturb_rng = Lcg::new(perturb_seed);

    let rule = match config.algorithm {
        Algorithm::SumProduct => CheckRule::SumProduct,
        Algorithm::NormalizedMinSum => CheckRule::MinSum {
            factor: config.nms_factor,
        },
        Algorithm::PerturbedMinSum => CheckRule::Perturbed {
            set: &config.perturbation_set,
        },
    };

    let mut engine = Engine::new(h, syndrome, lambda, config.message_clip);

    if config.schedule == Schedule::Flooded {
        let mut iterations = 0;
        let mut converged = engine.unsat == 0;
        while !converged && iterations < config.max_iterations {
            engine.flooded_iteration(&rule, &mut perturb_rng);
            iterations += 1;
            if iterations % config.syndrome_check_period == 0 && engine.unsat == 0 {
                converged = true;
            }
        }
        converged = converged || engine.unsat == 0;
        return Ok(DecodeResult {
            estimate: engine.estimate,
            converged,
            layer_iterations_used: iterations,
            iterations_used: iterations,
            constraint_fallbacks: 0,
        });
    }

    let singles;
    let (layers, t): (&[Vec<usize>], usize) = match config.schedule {
        Schedule::Serial => {
            singles = LayerCover::singletons(h.n_rows());
            (&singles.layers, 1)
        }
        Schedule::Layered => {
            let cover = cover.ok_or(Error::CoverRequired)?;
            let report = validate_cover(h, cover);
            if !report.valid {
                return Err(Error::InvalidCover(
                    report.violations.first().cloned().unwrap_or_default(),
                ));
            }
            (&cover.layers, cover.t)
        }
        Schedule::Flooded => unreachable!(),
    };
    let k = layers.len();
    let budget = config.max_layer_iterations.unwrap_or(64 * k / t);

    let conflicts = if config.random_order && config.constrain_successive {
        Some(layer_conflicts(layers, h.n_rows()))
    } else {
        None
    };
    let conflict_pred = conflicts
        .as_ref()
        .map(|m| move |i: usize, j: usize| m[i * k + j]);

    let mut order: Vec<usize> = (0..k).collect();
    let mut previous_last = None;
    let mut layer_iterations = 0;
    let mut fallbacks = 0;
    let mut converged = engine.unsat == 0;
    'sweeps: while !converged && layer_iterations < budget {
        if config.random_order {
            let (drawn, fell_back) = sample_layer_order(
                k,
                &mut order_rng,
                conflict_pred
                    .as_ref()
                    .map(|p| p as &dyn Fn(usize, usize) -> bool),
                previous_last,
            );
            order = drawn;
            fallbacks += usize::from(fell_back);
        }
        for &layer in &order {
            for &c in &layers[layer] {
                engine.process_check(c, &rule, &mut perturb_rng);
            }
            layer_iterations += 1;
            if layer_iterations % config.syndrome_check_period == 0 && engine.unsat == 0 {
                converged = true;
                break 'sweeps;
            }
            if layer_iterations >= budget {
                break 'sweeps;
            }
        }
        previous_last = order.last().copied();
    }
    converged = converged || engine.unsat == 0;

    Ok(DecodeResult {
        estimate: engine.estimate,
        converged,
        layer_iterations_used: layer_iterations,
        iterations_used: layer_iterations.checked_div(k).unwrap_or(0),
        constraint_fallbacks: fallbacks,
    })
}

// k×k table of which layer pairs share a check.
fn layer_conflicts(layers: &[Vec<usize>], m: usize) -> Vec<bool> {
    let k = layers.len();
    let mut membership = vec![usize::MAX; m];
    let mut table = vec![false; k * k];
    for (i, layer) in layers.iter().enumerate() {
        for &c in layer {
            membership[c] = i;
        }
        for (j, other) in layers.iter().enumerate().skip(i + 1) {
            if other.iter().any(|&c| membership[c] == i) {
                table[i * k + j] = true;
                table[j * k + i] = true;
            }
        }
        for &c in layer {
            membership[c] = usize::MAX;
        }
    }
    // A layer always conflicts with itself: repeating it is pointless.
    for i in 0..k {
        table[i * k + i] = true;
    }
    table
}
