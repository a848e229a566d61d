use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest as _, Sha256};

pub const GEOMETRY: &str = "geometry";
pub const MARKET: &str = "market";
pub const NETWORK: &str = "network";
pub const BEHAVIOR: &str = "behavior";

/// Independent generator for a named stream. Streams never share state, so
/// adding one leaves the others unchanged.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_be_bytes());
    h.update(name.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// 64-bit value derived from a stream, for components seeded by integer.
pub fn stream_u64(seed: u64, name: &str) -> u64 {
    use rand::RngCore;
    stream(seed, name).next_u64()
}
