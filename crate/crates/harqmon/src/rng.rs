//! Reproducible random streams for the simulator.
//!
//! Parallel Monte Carlo runs must produce bit-identical results no matter how
//! many workers execute them. Packets are therefore partitioned into fixed
//! chunks, and every chunk draws from its own ChaCha stream selected by
//! `(seed, chunk index)`. ChaCha8 is counter-based with a 64-bit stream
//! field, so streams never overlap and can be created in O(1) anywhere.
//!
//! Exponential variates use the inverse CDF, `-ln(1 - u) / lambda`, rather
//! than a ziggurat: inverse transform consumes exactly one uniform per draw
//! and evaluates identically on every platform, which keeps the determinism
//! contract simple.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator owned by one simulation chunk.
pub type ChunkRng = ChaCha8Rng;

/// Creates the generator for chunk `chunk` of a run keyed by `seed`.
///
/// Streams with different chunk indices are statistically independent; the
/// same `(seed, chunk)` pair always yields the same sequence.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChunkRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Uniform variate on `[0, 1)` with 53 random mantissa bits.
pub fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    // Take the top 53 bits so the low-entropy low bits of the word are unused.
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse exponential CDF: maps `u` in `[0, 1)` to `-ln(1 - u) / lambda`.
///
/// `u = 0` maps to a gain of exactly zero and `u -> 1` diverges, matching the
/// support of the distribution.
pub fn exp_inverse_cdf(u: f64, lambda: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    debug_assert!(lambda > 0.0);
    -(1.0 - u).ln() / lambda
}

/// Draws one exponential variate with rate parameter `lambda`.
pub fn sample_exp(rng: &mut impl RngCore, lambda: f64) -> f64 {
    exp_inverse_cdf(unit_uniform(rng), lambda)
}
