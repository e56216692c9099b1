//! Deterministic random streams.
//!
//! All randomness flows from one declared seed per run. A stream is derived
//! as `seed XOR hash(tag)`, so concurrent purposes (solver restarts,
//! experiment replications) get independent, reproducible generators without
//! any global state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Generator for the purpose named by `tag`.
pub fn stream(seed: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(tag.as_bytes()))
}

/// Generator for the `index`-th member of a family of streams (replications,
/// restarts) under a common purpose tag.
pub fn substream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mixed = fnv1a(tag.as_bytes()) ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    ChaCha8Rng::seed_from_u64(seed ^ mixed)
}
