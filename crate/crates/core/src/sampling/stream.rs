//! Counter-based uniform substreams.
//!
//! A substream is addressed by `(seed, tag, replicate, cell)`: the ChaCha8 key
//! is derived from `(seed, tag)`, the ChaCha stream id is the replicate, and
//! the cell selects a fixed word offset. Every cell owns a window of
//! `dim + 1` 64-bit variates, so reading cells in index order from one
//! generator yields exactly the same values as seeking to each cell.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tag for cells shared by every member of the partition family.
pub const SHARED_TAG: u64 = 0;

/// SplitMix64 finalizer; a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key(seed: u64, tag: u64) -> [u8; 32] {
    let words = [
        mix64(seed),
        mix64(tag),
        mix64(seed ^ 0xA5A5_A5A5_A5A5_A5A5),
        mix64(tag ^ 0x5A5A_5A5A_5A5A_5A5A),
    ];
    let mut k = [0u8; 32];
    for (chunk, w) in k.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    k
}

/// Uniform variates for a run of consecutive cells.
#[derive(Clone, Debug)]
pub struct CellStream {
    rng: ChaCha8Rng,
}

impl CellStream {
    /// Positions the stream at the start of `cell`'s window; each window holds
    /// `variates_per_cell` values.
    pub fn new(seed: u64, tag: u64, replicate: u64, cell: usize, variates_per_cell: usize) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key(seed, tag));
        rng.set_stream(replicate);
        rng.set_word_pos(2 * cell as u128 * variates_per_cell as u128);
        CellStream { rng }
    }

    /// Next variate, uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
