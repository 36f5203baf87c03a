//! Deterministic random streams for the simulator.
//!
//! Reproducibility is part of the contract: every draw is fully determined
//! by `(seed, stream_id, index)`. Streams come from ChaCha8's independent
//! stream facility, so trial blocks can run concurrently without sharing
//! state, and the transforms from raw 64-bit words to uniforms, Bernoulli
//! draws, and Gaussians are fixed here rather than borrowed from a
//! distributions crate whose internals may change between releases.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// One independent draw stream. Cheap to construct; make one per trial
/// block rather than sharing across threads.
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`; safe to pass through `ln`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// `N(0, sigma^2)` via the Box-Muller cosine branch. Consumes exactly
    /// two words per call; nothing is cached, so the draw count per trial
    /// is fixed and the sequence is position-independent.
    pub fn gaussian(&mut self, sigma: f64) -> f64 {
        let r = (-2.0 * self.uniform_open().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        sigma * r * theta.cos()
    }
}

/// Derives an independent 64-bit seed for row `index` of a sweep from the
/// user-facing seed, via one SplitMix64 round. Keeps per-row simulations
/// decoupled no matter how the rows are ordered or parallelized.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_separated() {
        let mut a = RngStream::new(7, 0);
        let mut b = RngStream::new(7, 0);
        let mut c = RngStream::new(7, 1);
        let mut d = RngStream::new(8, 0);
        let mut same = true;
        let mut diff_stream = false;
        let mut diff_seed = false;
        for _ in 0..64 {
            let va = a.uniform();
            same &= va == b.uniform();
            diff_stream |= va != c.uniform();
            diff_seed |= va != d.uniform();
        }
        assert!(same && diff_stream && diff_seed);
    }

    #[test]
    fn uniform_ranges() {
        let mut r = RngStream::new(123, 5);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = r.uniform_open();
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut r = RngStream::new(42, 0);
        let n = 100_000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let g = r.gaussian(1.0);
            sum += g;
            sumsq += g * g;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        // Standard errors: ~3.2e-3 for the mean, ~4.5e-3 for the variance.
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn bernoulli_rate_tracks_p() {
        let mut r = RngStream::new(9, 3);
        let hits = (0..100_000).filter(|_| r.bernoulli(0.3)).count();
        let rate = hits as f64 / 1e5;
        assert!((rate - 0.3).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn mix_seed_spreads_indices() {
        // Stability pin: these values are part of the reproducibility
        // contract for saved sweep outputs.
        assert_eq!(mix_seed(0, 0), 16294208416658607535);
        assert_eq!(mix_seed(1, 0), 16490336266968443936);
        assert_eq!(mix_seed(0, 1), 7960286522194355700);
        assert_eq!(mix_seed(77, 3), 15376830920261701921);
        let mut seen = std::collections::HashSet::new();
        for i in 0..1000 {
            assert!(seen.insert(mix_seed(77, i)));
        }
    }
}
