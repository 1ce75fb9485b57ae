//! Models for next-generation multibeam high-throughput satellite systems.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO: every model takes
//! plain values and an explicit random stream. File formats and the command
//! line front end live in the companion `hts-sim` crate.
//!
//! - [`scenario`]: domain types, validation, orbit rate
//! - [`multibeam`]: frequency-reuse throughput, beamhopping, gateway diversity
//! - [`channel`]: Rician fading, beam gain, multibeam and multicarrier channels, delayed CSI
//! - [`impairments`]: HPA, memory polynomial, frequency offset, phase noise, Doppler, I/Q imbalance
//! - [`array`]: AFR response, MVDR beamforming, ZF/RZF precoding
//! - [`coverage`]: demand-balanced clustering, tessellation, beam assignment

#![no_std]
// When std is anywhere in the dependency graph its inherent float methods shadow
// `num_traits::Float`, leaving those imports unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod array;
pub mod channel;
pub mod consts;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod impairments;
pub mod math;
pub mod multibeam;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use math::linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use rng::RngStream;
