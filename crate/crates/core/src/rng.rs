//! Deterministic random-stream policy.
//!
//! A run has one 64-bit master seed. Every consumer derives its own ChaCha20
//! stream from `(master seed, purpose, index)`: the key comes from the master
//! seed and the 64-bit ChaCha stream id packs the purpose tag in the upper 24
//! bits and the index (trial number, user index, ...) in the lower 40. Draws in
//! one stream therefore never shift the draws of another, so trials can run in
//! any order or in parallel.

use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Random stream handed to every stochastic operation.
pub type RngStream = ChaCha20Rng;

const INDEX_BITS: u32 = 40;

/// Purpose tags for [`derive_stream`]. Values are part of the reproducibility contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Purpose {
    Channel = 1,
    Noise = 2,
    Fading = 3,
    Csi = 4,
    PhaseNoise = 5,
    Symbols = 6,
    Gateways = 7,
    Clustering = 8,
    Snapshot = 9,
    User = 0xFF_FFFF,
}

/// Derive the independent stream for `(master_seed, purpose, index)`.
pub fn derive_stream(master_seed: u64, purpose: Purpose, index: u64) -> RngStream {
    derive_stream_raw(master_seed, purpose as u32, index)
}

/// Same as [`derive_stream`] with an arbitrary 24-bit purpose tag.
pub fn derive_stream_raw(master_seed: u64, purpose: u32, index: u64) -> RngStream {
    assert!(purpose < (1 << 24), "purpose tag must fit in 24 bits");
    assert!(index < (1u64 << INDEX_BITS), "stream index must fit in 40 bits");
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(((purpose as u64) << INDEX_BITS) | index);
    rng
}

/// Standard normal draw.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Circularly-symmetric complex Gaussian with `E|z|^2 = variance`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    Complex64::new(s * normal(rng), s * normal(rng))
}

/// Uniform draw on `[0, 1)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
