//! Seed derivation.
//!
//! Every random stream in a run is addressed by a path of labels hanging off
//! the master seed, e.g. `(master, "cell", "KNN", "IV")` then
//! `(cell, "fold", 3)`. The derived value only depends on the path, so the
//! result of any unit of work is independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One component of a seed path.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    Label(&'a str),
    Index(u64),
}

impl<'a> From<&'a str> for SeedPart<'a> {
    fn from(s: &'a str) -> Self {
        SeedPart::Label(s)
    }
}

impl From<u64> for SeedPart<'_> {
    fn from(i: u64) -> Self {
        SeedPart::Index(i)
    }
}

impl From<usize> for SeedPart<'_> {
    fn from(i: usize) -> Self {
        SeedPart::Index(i as u64)
    }
}

/// Derive a child seed from `parent` and a path of labels/indices.
pub fn derive(parent: u64, path: &[SeedPart<'_>]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    for part in path {
        match part {
            SeedPart::Label(s) => {
                hasher.update([0u8]);
                hasher.update((s.len() as u64).to_le_bytes());
                hasher.update(s.as_bytes());
            }
            SeedPart::Index(i) => {
                hasher.update([1u8]);
                hasher.update(i.to_le_bytes());
            }
        }
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
