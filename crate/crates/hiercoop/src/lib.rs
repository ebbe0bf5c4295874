//! Capacity-scaling simulator for random wireless ad hoc networks.
//!
//! Implements the hierarchical cooperation scheme (local exchange, long-range
//! distributed MIMO, quantize-and-forward) as a rate/time-slot accounting
//! engine, together with the matching information-theoretic upper bounds:
//! the per-source SIMO bound for dense networks and the cutset bound driven
//! by total received power for extended networks.
//!
//! Organization:
//! - [`net`]: node placement, pairing, cluster grids, occupancy statistics
//! - [`channel`]: path-loss/phase fading model and interference accounting
//! - [`mimo`]: distributed MIMO mutual information and quantized variants
//! - [`hierarchy`]: the 3-phase cooperation scheme, bursty extended variant,
//!   TDMA and multihop baselines
//! - [`cutset`]: upper bounds, column-equalized cut matrices, spectral norms
//! - [`experiment`]: sweep harness, scaling-exponent fits, lemma suites
//!
//! The `examples/` directory has one runnable example per capability; the
//! `hiercoop` binary exposes the same entry points as subcommands.

pub mod channel;
pub mod cmatrix;
pub mod cutset;
pub mod error;
pub mod experiment;
pub mod hierarchy;
pub mod mimo;
pub mod net;

pub use error::{Error, Result};

/// Stable FNV-1a mix of a base seed with context tags; used everywhere a
/// derived RNG stream is needed so that adding one consumer never perturbs
/// another's randomness.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    };
    mix(base);
    for &t in tags {
        mix(t);
    }
    h
}

