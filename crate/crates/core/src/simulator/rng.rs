//! Per-trial random streams.
//!
//! A 64-bit master seed is expanded by SplitMix64 into a 256-bit ChaCha8
//! key; trial `i` draws from stream `i` of that key. Streams never overlap,
//! so any trial can be replayed alone and trials can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The 32-byte ChaCha key derived from `master`.
pub fn expand_seed(master: u64) -> [u8; 32] {
    let mut state = master;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Random stream of trial `trial` under `master`.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(expand_seed(master));
    rng.set_stream(trial);
    rng
}
