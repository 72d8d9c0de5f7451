//! Seed lineage and counter-based random streams.
//!
//! Every random draw in the crate is a pure function of
//! `(stream id, purpose, sub-index, draw index)`. The generator is ChaCha12,
//! which is counter based: the 256-bit key is derived from the stream id, the
//! 64-bit ChaCha stream number selects the purpose and sub-index, and the
//! word position is the draw index. Adding a new purpose therefore never
//! perturbs the draws of an existing one.
//!
//! Replica splitting rule (fixed):
//!
//! ```text
//! stream_id = base_seed XOR (replica * 0x9E3779B97F4A7C15)   (wrapping u64 multiply)
//! ```
//!
//! Key layout: bytes 0..8 hold `stream_id` little-endian, bytes 8..16 the ASCII
//! tag `mixsch\0\0`, the rest are zero. ChaCha stream number is
//! `(purpose << 32) | sub_index`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha12Rng;

/// Multiplier of the replica splitting rule.
pub const REPLICA_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

const KEY_TAG: [u8; 8] = *b"mixsch\0\0";

pub fn stream_id(base_seed: u64, replica: u64) -> u64 {
    base_seed ^ replica.wrapping_mul(REPLICA_MIX)
}

/// Independent sub-streams of one replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u32)]
pub enum Purpose {
    Disorder = 1,
    Noise = 2,
    Phase = 3,
    Energy = 4,
    StartVector = 5,
    Choice = 6,
    ShapeNoise = 7,
    AlphaNoise = 8,
    Localization = 9,
    Bridge = 10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stream {
    pub id: u64,
    pub purpose: Purpose,
    pub sub: u32,
}

impl Stream {
    pub fn new(id: u64, purpose: Purpose) -> Self {
        Stream { id, purpose, sub: 0 }
    }

    pub fn for_replica(base_seed: u64, replica: u64, purpose: Purpose) -> Self {
        Stream::new(stream_id(base_seed, replica), purpose)
    }

    pub fn with_sub(self, sub: u32) -> Self {
        Stream { sub, ..self }
    }

    pub fn rng(&self) -> StreamRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.id.to_le_bytes());
        key[8..16].copy_from_slice(&KEY_TAG);
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(((self.purpose as u64) << 32) | self.sub as u64);
        rng
    }

    /// Generator positioned at the given 32-bit word offset.
    pub fn rng_at(&self, word: u128) -> StreamRng {
        let mut rng = self.rng();
        rng.set_word_pos(word);
        rng
    }
}
