//! Bit-level Monte Carlo simulation of the whole detection chain:
//! source bit, per-sensor binary symmetric channels, constellation
//! mapping, Gaussian channel noise, MAP detection, error counting.
//!
//! Four schemes are covered: the optimal skewed design on the shared
//! channel, a full-power symmetric design on the shared channel, and
//! symmetric/skewed BPSK over two orthogonal channels. Trials are split
//! into fixed-size blocks, each with its own RNG stream keyed by the block
//! index, and blocks reduce by integer summation, so a report depends
//! only on `(params, config)`, never on thread count or scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{find_boundaries, BoundarySet};
use crate::errors::{Error, Result};
use crate::model::{ModelParams, SYMBOLS};
use crate::rng::RngStream;

/// Trials per RNG block. Fixed so that results are reproducible across
/// thread counts; changing it changes simulated outputs.
pub const BLOCK_TRIALS: u64 = 16384;

/// Signaling schemes available to the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Skewed pairs on the shared channel at a chosen allocation, detected
    /// via precomputed decision regions.
    MacOptimalAsym,
    /// Symmetric pairs at full cap power on the shared channel, detected
    /// by direct posterior comparison.
    MacSymmetricMax,
    /// Symmetric BPSK at full cap power, one channel per sensor.
    OrthSymmetricBpsk,
    /// Skewed pairs at full cap power, one channel per sensor.
    OrthAsymmetricBpsk,
}

impl Scheme {
    pub fn is_mac(self) -> bool {
        matches!(self, Scheme::MacOptimalAsym | Scheme::MacSymmetricMax)
    }

    pub fn is_orthogonal(self) -> bool {
        !self.is_mac()
    }
}

/// Simulation request. `alloc` holds the amplitude scales for
/// [`Scheme::MacOptimalAsym`]; every other scheme transmits at full cap
/// power and ignores it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub alloc: (f64, f64),
}

/// Empirical error rate with a binomial confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub errors: u64,
    pub trials: u64,
    /// `errors / trials`.
    pub pe_hat: f64,
    /// `1.96 * sqrt(pe_hat * (1 - pe_hat) / trials)`, the normal
    /// approximation.
    pub ci95_halfwidth: f64,
    pub seed: u64,
    /// The normal approximation needs enough errors on both sides; false
    /// when either count is below 100.
    pub ci_reliable: bool,
}

impl SimReport {
    fn from_counts(errors: u64, trials: u64, seed: u64) -> Self {
        let pe_hat = errors as f64 / trials as f64;
        let ci95_halfwidth = 1.96 * (pe_hat * (1.0 - pe_hat) / trials as f64).sqrt();
        let ci_reliable = errors >= 100 && trials - errors >= 100;
        Self { errors, trials, pe_hat, ci95_halfwidth, seed, ci_reliable }
    }
}

/// Dispatches on the scheme family.
pub fn simulate(params: &ModelParams, config: &SimConfig) -> Result<SimReport> {
    if config.scheme.is_mac() {
        simulate_mac(params, config)
    } else {
        simulate_orthogonal(params, config)
    }
}

/// Simulates a shared-channel scheme: the receiver sees the amplitude sum
/// plus `N(0, n0/2)` noise and applies the exact MAP rule.
pub fn simulate_mac(params: &ModelParams, config: &SimConfig) -> Result<SimReport> {
    if !config.scheme.is_mac() {
        return Err(Error::Scheme("simulate_mac handles shared-channel schemes only"));
    }
    validate_trials(config.trials)?;
    let (amps, detector) = match config.scheme {
        Scheme::MacOptimalAsym => {
            check_cap(1, config.alloc.0, params.p1max())?;
            check_cap(2, config.alloc.1, params.p2max())?;
            let f = params.asym_factors();
            let amps = [
                [-f.beta * config.alloc.0, f.alpha * config.alloc.0],
                [-f.beta * config.alloc.1, f.alpha * config.alloc.1],
            ];
            let regions = find_boundaries(params, config.alloc.0, config.alloc.1)?;
            (amps, MacDetector::Regions(regions))
        }
        Scheme::MacSymmetricMax => {
            let (a1, a2) = (params.p1max().sqrt(), params.p2max().sqrt());
            let amps = [[-a1, a1], [-a2, a2]];
            let points = [
                amps[0][1] + amps[1][1],
                amps[0][1] + amps[1][0],
                amps[0][0] + amps[1][1],
                amps[0][0] + amps[1][0],
            ];
            let detector =
                MacDetector::Posterior { log_w: log_weights(params), points, n0: params.n0() };
            (amps, detector)
        }
        _ => unreachable!(),
    };
    let sigma = params.sigma();
    let (p1, e1, e2) = (params.p1(), params.eps1(), params.eps2());
    let errors = run_blocks(config, |rng| {
        let x = rng.bernoulli(p1) as u8;
        let x1 = x ^ rng.bernoulli(e1) as u8;
        let x2 = x ^ rng.bernoulli(e2) as u8;
        let r = amps[0][x1 as usize] + amps[1][x2 as usize] + rng.gaussian(sigma);
        detector.decide(r) != x
    });
    Ok(SimReport::from_counts(errors, config.trials, config.seed))
}

/// Simulates the orthogonal baseline: each sensor gets its own Gaussian
/// channel of variance `n0/2` and the receiver applies the
/// two-dimensional MAP rule to the pair of observations.
pub fn simulate_orthogonal(params: &ModelParams, config: &SimConfig) -> Result<SimReport> {
    if !config.scheme.is_orthogonal() {
        return Err(Error::Scheme("simulate_orthogonal handles orthogonal schemes only"));
    }
    validate_trials(config.trials)?;
    let (a1, a2) = (params.p1max().sqrt(), params.p2max().sqrt());
    let chan = match config.scheme {
        Scheme::OrthSymmetricBpsk => [[-a1, a1], [-a2, a2]],
        Scheme::OrthAsymmetricBpsk => {
            let f = params.asym_factors();
            [[-f.beta * a1, f.alpha * a1], [-f.beta * a2, f.alpha * a2]]
        }
        _ => unreachable!(),
    };
    let log_w = log_weights(params);
    let n0 = params.n0();
    let sigma = params.sigma();
    let (p1, e1, e2) = (params.p1(), params.eps1(), params.eps2());
    let errors = run_blocks(config, |rng| {
        let x = rng.bernoulli(p1) as u8;
        let x1 = x ^ rng.bernoulli(e1) as u8;
        let x2 = x ^ rng.bernoulli(e2) as u8;
        let r1 = chan[0][x1 as usize] + rng.gaussian(sigma);
        let r2 = chan[1][x2 as usize] + rng.gaussian(sigma);
        let mut score = [0.0f64; 2];
        for (i, s) in score.iter_mut().enumerate() {
            let mut terms = [0.0f64; 4];
            for (k, &(l, m)) in SYMBOLS.iter().enumerate() {
                let d1 = r1 - chan[0][l as usize];
                let d2 = r2 - chan[1][m as usize];
                terms[k] = log_w[i][k] - (d1 * d1 + d2 * d2) / n0;
            }
            *s = log_sum_exp(&terms);
        }
        u8::from(score[1] > score[0]) != x
    });
    Ok(SimReport::from_counts(errors, config.trials, config.seed))
}

fn validate_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1"));
    }
    Ok(())
}

fn check_cap(sensor: u8, amplitude: f64, cap: f64) -> Result<()> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::Domain("amplitudes must be finite and nonnegative"));
    }
    // Mean transmit power of the skewed pair is exactly amplitude^2; allow
    // a sliver for allocations computed as sqrt(cap).
    if amplitude * amplitude > cap * (1.0 + 1e-9) {
        return Err(Error::Cap { sensor, amplitude, cap });
    }
    Ok(())
}

/// Runs `trial` once per trial in fixed blocks, one RNG stream per block,
/// and counts errors. Block boundaries are independent of thread count.
fn run_blocks<F>(config: &SimConfig, trial: F) -> u64
where
    F: Fn(&mut RngStream) -> bool + Sync,
{
    let blocks = config.trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(config.seed, b);
            let len = BLOCK_TRIALS.min(config.trials - b * BLOCK_TRIALS);
            let mut errs = 0u64;
            for _ in 0..len {
                if trial(&mut rng) {
                    errs += 1;
                }
            }
            errs
        })
        .sum()
}

enum MacDetector {
    Regions(BoundarySet),
    Posterior { log_w: [[f64; 4]; 2], points: [f64; 4], n0: f64 },
}

impl MacDetector {
    fn decide(&self, r: f64) -> u8 {
        match self {
            MacDetector::Regions(b) => b.detect(r),
            MacDetector::Posterior { log_w, points, n0 } => {
                let mut score = [0.0f64; 2];
                for (i, s) in score.iter_mut().enumerate() {
                    let mut terms = [0.0f64; 4];
                    for k in 0..4 {
                        let d = r - points[k];
                        terms[k] = log_w[i][k] - d * d / n0;
                    }
                    *s = log_sum_exp(&terms);
                }
                // Ties decide 0, hence the strict comparison.
                u8::from(score[1] > score[0])
            }
        }
    }
}

/// `ln(p_i * p(l,m | i))` for both source values, symbol order 11, 10,
/// 01, 00.
fn log_weights(params: &ModelParams) -> [[f64; 4]; 2] {
    let probs = params.conditional_probs();
    let mut w = [[0.0f64; 4]; 2];
    for (k, &(l, m)) in SYMBOLS.iter().enumerate() {
        w[0][k] = (params.p0() * probs.p(l, m, 0)).ln();
        w[1][k] = (params.p1() * probs.p(l, m, 1)).ln();
    }
    w
}

fn log_sum_exp(terms: &[f64; 4]) -> f64 {
    let m = terms.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}
