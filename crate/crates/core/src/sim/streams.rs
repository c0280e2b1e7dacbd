//! Per-party randomness derived from one master seed.
//!
//! Every (role, index) pair gets its own ChaCha20 stream under a key fixed
//! by the master seed, so adding a party never shifts another party's draws
//! and the order parties run in cannot change what they sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::gf::Modulus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    UserMessage(usize),
    UserNoise(usize),
    CollectorCoefficients,
    CollectorNoise,
}

impl Stream {
    fn id(self) -> u64 {
        let (tag, index) = match self {
            Stream::UserMessage(k) => (1u64, k as u64),
            Stream::UserNoise(k) => (2, k as u64),
            Stream::CollectorCoefficients => (3, 0),
            Stream::CollectorNoise => (4, 0),
        };
        (tag << 56) | (index & ((1 << 56) - 1))
    }

    pub fn rng(self, master_seed: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(self.id());
        rng
    }
}

/// Draws `count` uniform field values.
pub fn sample_values<R: Rng>(rng: &mut R, modulus: Modulus, count: usize) -> Vec<u64> {
    (0..count)
        .map(|_| rng.random_range(0..modulus.get()))
        .collect()
}

/// Draws a `rows × cols` block of uniform field values.
pub fn sample_block<R: Rng>(
    rng: &mut R,
    modulus: Modulus,
    rows: usize,
    cols: usize,
) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|_| sample_values(rng, modulus, cols))
        .collect()
}
