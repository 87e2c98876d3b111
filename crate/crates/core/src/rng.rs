//! Counter-based seeding: one experiment seed fans out into independent,
//! addressable substreams so sample `i` draws the same numbers regardless of
//! which thread evaluates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seed plus a domain label, expanded into a ChaCha key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSequence {
    key: [u8; 32],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3))
}

impl SeedSequence {
    /// Distinct `domain` labels give unrelated streams for the same seed.
    pub fn new(seed: u64, domain: &str) -> Self {
        let mut state = seed ^ fnv1a(domain.as_bytes()).rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        SeedSequence { key }
    }

    /// Child sequence for a sub-experiment.
    pub fn child(&self, label: &str) -> Self {
        let mut state = u64::from_le_bytes(self.key[..8].try_into().expect("8 bytes")) ^ fnv1a(label.as_bytes());
        let mut key = self.key;
        for chunk in key.chunks_exact_mut(8) {
            let word = u64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            chunk.copy_from_slice(&(word ^ splitmix64(&mut state)).to_le_bytes());
        }
        SeedSequence { key }
    }

    /// Substream `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}
