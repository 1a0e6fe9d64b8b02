//! Counter-based random streams.
//!
//! A stream is addressed by `(seed, point, frame, tag)`. The seed, point and
//! tag select a ChaCha key and the frame index selects the ChaCha stream, so
//! any frame can be regenerated without replaying the frames before it.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// What a stream is used for inside one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum DrawTag {
    Channel = 1,
    Bits = 2,
    Noise = 3,
    Importance = 4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub point: u64,
    pub frame: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub const fn new(seed: u64) -> Self {
        Self { seed, point: 0, frame: 0 }
    }

    pub const fn with_point(self, point: u64) -> Self {
        Self { point, ..self }
    }

    pub const fn with_frame(self, frame: u64) -> Self {
        Self { frame, ..self }
    }

    /// Independent generator for one purpose within this frame.
    pub fn rng(&self, tag: DrawTag) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        let salt = splitmix64(&mut state)
            ^ self.point.wrapping_mul(0xD1B5_4A32_D192_ED03)
            ^ (tag as u64).wrapping_mul(0x8CB9_2BA7_2F3D_8DD7);
        let mut s = salt;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.frame);
        rng
    }
}
