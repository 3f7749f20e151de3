//! Reproducible random streams.
//!
//! Every replicate draws from its own ChaCha8 stream keyed by the master seed,
//! so replicate `r` yields the same numbers regardless of thread count or of
//! how many other replicates run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A counter-based random stream identified by `(master_seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_mut(8).enumerate() {
            let word = splitmix64(master_seed ^ (i as u64).wrapping_mul(0xA076_1D64_78BD_642F));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        RandomStream { rng, master_seed, stream_id }
    }

    /// Stream for replicate `r` of a run with the given master seed.
    pub fn for_replicate(master_seed: u64, replicate: u64) -> Self {
        Self::new(master_seed, replicate)
    }

    /// Independent child stream, e.g. for a sub-task of this replicate.
    pub fn derive(&self, tag: u64) -> Self {
        Self::new(splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(1))), self.stream_id)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
