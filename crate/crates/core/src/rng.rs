//! Seeded randomness.
//!
//! Every random quantity in the crate is drawn from [`ChaCha8Rng`] seeded
//! with [`SeedableRng::seed_from_u64`], and permutations are produced by the
//! Fisher–Yates shuffle of `rand 0.8`. Both are platform independent, so a
//! seed reproduces the same output everywhere.
//!
//! Large sample budgets are cut into chunks of [`CHUNK`] draws. Chunk `c`
//! uses the generator seeded with [`chunk_seed`]`(seed, c)`, which makes the
//! merged result independent of how chunks are spread over workers.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Draws per chunk.
pub const CHUNK: u64 = 4096;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `seed + (chunk + 1) * golden`.
pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed.wrapping_add(chunk.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits `samples` into `(chunk index, draws)` pairs.
pub fn chunks(samples: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let full = samples / CHUNK;
    let rest = samples % CHUNK;
    let count = full + u64::from(rest > 0);
    (0..count).map(move |c| (c, if c < full { CHUNK } else { rest }))
}
