use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Words of keystream reserved for each Monte Carlo chunk. Chunk `c` starts
/// at word `c · CHUNK_WORDS`, so chunks of one stream never overlap.
const CHUNK_SHIFT: u32 = 40;

/// A reproducible random stream: a ChaCha8 key derived from `seed` plus an
/// independent 64-bit nonce `stream_id`.
///
/// Two streams with the same seed and different ids share no keystream. Each
/// stream is further cut into disjoint chunks so that parallel workers can
/// start anywhere without coordination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Generator positioned at the start of chunk `chunk`.
    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        assert!(chunk < 1 << 24, "chunk index {chunk} exceeds the per-stream chunk budget");
        let mut rng = self.rng();
        rng.set_word_pos((chunk as u128) << CHUNK_SHIFT);
        rng
    }

    /// Sub-stream `k` (`k < 256`). Children of one stream are distinct from
    /// each other and from the children of any other stream with a
    /// different id (as long as ids stay below 2⁵⁶).
    pub fn child(&self, k: u64) -> Self {
        assert!(k < 256, "child index {k} out of range");
        Self { seed: self.seed, stream_id: (self.stream_id << 8) | k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_stream_same_sequence() {
        let a: Vec<u64> = (0..8).map({
            let mut r = RngStream::new(7, 3).rng();
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..8).map({
            let mut r = RngStream::new(7, 3).rng();
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_and_chunks_differ() {
        let first = |mut r: ChaCha8Rng| -> u64 { r.random() };
        let s = RngStream::new(7, 3);
        assert_ne!(first(s.rng()), first(RngStream::new(7, 4).rng()));
        assert_ne!(first(s.rng()), first(RngStream::new(8, 3).rng()));
        assert_ne!(first(s.chunk_rng(0)), first(s.chunk_rng(1)));
        assert_eq!(first(s.chunk_rng(0)), first(s.rng()));
        assert_ne!(s.child(0), s.child(1));
        assert_ne!(s.child(1), RngStream::new(7, 4).child(1));
    }
}
