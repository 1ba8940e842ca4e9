//! Per-output-directory manifest: configuration hash, seed, generator
//! id, and artifact version, so every report directory is reproducible
//! from its manifest alone.

use crate::error::Result;
use sha2::{Digest, Sha256};
use std::path::Path;

pub const GENERATOR_ID: &str = "chacha8";

pub fn config_hash(config_text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_text(config_text: &str, seed: u64) -> String {
    format!(
        "config_sha256 = {}\nseed = {}\nrng = {}\npackage = {} {}\n",
        config_hash(config_text),
        seed,
        GENERATOR_ID,
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
    )
}

pub fn write_manifest(out_dir: &Path, config_text: &str, seed: u64) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("manifest.txt"), manifest_text(config_text, seed))?;
    Ok(())
}
