//! Splittable, counter-based randomness.
//!
//! An [`RngState`] is a *name* for a stream: a master seed plus a path of
//! `(label, index)` pairs. The stream key is the SHA-256 digest of that name,
//! and the stream itself is ChaCha20 keyed with it. ChaCha20 produces block
//! `n` as a pure function of `(key, n)`, so a stream never depends on which
//! other streams were consumed first or on which thread consumed them.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Identifier of the generator construction recorded in outputs.
pub const ALGORITHM_ID: &str = "chacha20-sha256path-v1";

/// The concrete generator handed to samplers.
pub type StreamRng = ChaCha20Rng;

/// Name of a random stream.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    master_seed: u64,
    stream_path: Vec<(String, u64)>,
}

impl RngState {
    pub fn new(master_seed: u64) -> Self {
        RngState {
            master_seed,
            stream_path: Vec::new(),
        }
    }

    pub fn algorithm_id(&self) -> &'static str {
        ALGORITHM_ID
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_path(&self) -> &[(String, u64)] {
        &self.stream_path
    }

    /// Child stream with `(label, index)` appended to the path.
    ///
    /// # Panics
    ///
    /// If `label` is empty. Use [`derive_rng`] for a fallible version.
    pub fn derive(&self, label: &str, index: u64) -> RngState {
        assert!(!label.is_empty(), "stream labels must be nonempty");
        let mut stream_path = self.stream_path.clone();
        stream_path.push((label.to_string(), index));
        RngState {
            master_seed: self.master_seed,
            stream_path,
        }
    }

    /// 32-byte key of this stream.
    pub fn key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(ALGORITHM_ID.as_bytes());
        h.update(self.master_seed.to_le_bytes());
        for (label, index) in &self.stream_path {
            // length prefix keeps ("ab",1) and ("a",..)("b",..) apart
            h.update((label.len() as u64).to_le_bytes());
            h.update(label.as_bytes());
            h.update(index.to_le_bytes());
        }
        let mut key = [0u8; 32];
        key.copy_from_slice(&h.finalize());
        key
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> StreamRng {
        ChaCha20Rng::from_seed(self.key())
    }

    /// Human-readable path, e.g. `seed=7/row#0/trial#3`.
    pub fn describe(&self) -> String {
        let mut s = format!("seed={}", self.master_seed);
        for (label, index) in &self.stream_path {
            s.push_str(&format!("/{label}#{index}"));
        }
        s
    }
}

/// Derives a child stream; fails on an empty label.
pub fn derive_rng(parent: &RngState, label: &str, index: u64) -> Result<RngState> {
    if label.is_empty() {
        return Err(Error::InvalidInput("stream label must be nonempty".into()));
    }
    Ok(parent.derive(label, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn first(state: &RngState, n: usize) -> Vec<u64> {
        let mut g = state.generator();
        (0..n).map(|_| g.next_u64()).collect()
    }

    #[test]
    fn same_path_same_stream() {
        let root = RngState::new(42);
        assert_eq!(
            first(&root.derive("trial", 3), 64),
            first(&root.derive("trial", 3), 64)
        );
    }

    #[test]
    fn sibling_indices_differ() {
        let root = RngState::new(42);
        assert_ne!(
            first(&root.derive("trial", 0), 64),
            first(&root.derive("trial", 1), 64)
        );
    }

    #[test]
    fn chained_derivation_is_path_composition() {
        let root = RngState::new(9);
        let chained = root.derive("a", 1).derive("b", 2);
        let direct = RngState {
            master_seed: 9,
            stream_path: vec![("a".into(), 1), ("b".into(), 2)],
        };
        assert_eq!(chained, direct);
        assert_eq!(first(&chained, 8), first(&direct, 8));
    }

    #[test]
    fn empty_label_rejected() {
        assert!(derive_rng(&RngState::new(1), "", 0).is_err());
    }

    #[test]
    fn label_boundaries_matter() {
        let root = RngState::new(5);
        assert_ne!(
            root.derive("ab", 1).key(),
            root.derive("a", 1).derive("b", 1).key()
        );
    }

    // First words of the stream at path [("frozen", 0)] under seed 0, computed
    // with a separate ChaCha20 implementation over the same SHA-256 key.
    const FROZEN: [u64; 2] = [17696453617143187428, 2903805208015522220];
    #[test]
    fn stream_is_frozen() {
        let v = first(&RngState::new(0).derive("frozen", 0), 2);
        assert_eq!(v, FROZEN);
        assert_eq!(RngState::new(0).describe(), "seed=0");
    }
}
