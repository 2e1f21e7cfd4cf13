//! Per-stage seeds derived from one master seed.

use sha2::{Digest, Sha256};

/// Stage name used when splitting targets into train and test.
pub const STAGE_SPLIT: &str = "split";
/// Stage name used when training the wikilink forest.
pub const STAGE_FOREST: &str = "forest";
/// Stage name used when training the pairwise ranker.
pub const STAGE_RANKER: &str = "ranker";

/// Derives a stage seed as the first 8 bytes (little endian) of
/// `SHA-256(master_le || stage)`.
pub fn derive_seed(master: u64, stage: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(stage.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
