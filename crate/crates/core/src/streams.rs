//! Counter-based random streams.
//!
//! A stream is keyed by `(seed, tag, point, replicate)`: the first three are
//! mixed through splitmix64 into a ChaCha8 key and the replicate index selects
//! the ChaCha stream. Replicate `i` therefore sees the same numbers no matter
//! which worker thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, 64-bit.
pub fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3)
    })
}

pub fn stream(seed: u64, tag: &str, point: u64, replicate: u64) -> StreamRng {
    let mut state = splitmix64(seed ^ splitmix64(tag_hash(tag)) ^ splitmix64(point.wrapping_add(0x51ED)));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}
