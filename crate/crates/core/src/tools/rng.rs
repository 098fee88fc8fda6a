use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded randomness for one tool call.
///
/// Streams are ChaCha8 keyed by the seed (expanded with `seed_from_u64`) and
/// selected with `set_stream`, so independent parts of a tool draw from
/// non-overlapping sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for call `call` of turn `turn` in a session seeded with `session`.
pub fn derive_call_seed(session: u64, turn: u64, call: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(session) ^ turn) ^ call)
}
