use std::path::PathBuf;

use crate::error::{CliError, Result};

/// Environment variable consulted when no `--seed` is given.
pub const SEED_ENV: &str = "SPECTRAL_VOTE_SEED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub manifest: PathBuf,
    /// Restrict and order the feature sources; `None` uses every source in the manifest.
    pub sources: Option<Vec<String>>,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub out: PathBuf,
    /// Ground-truth masks (`<id>.pgm` / `<id>.png`) for reference IoU in sidecars.
    pub gt_dir: Option<PathBuf>,
    pub workers: usize,
    pub upsample: Option<(usize, usize)>,
    pub keep_going: bool,
}

impl RunConfig {
    pub fn new(manifest: PathBuf, out: PathBuf) -> Self {
        Self {
            manifest,
            sources: None,
            ks: vec![2, 3, 4],
            seed: 0,
            out,
            gt_dir: None,
            workers: 1,
            upsample: None,
            keep_going: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() {
            return Err(CliError::Invalid("--ks must list at least one cluster count".into()));
        }
        if self.ks.contains(&0) {
            return Err(CliError::Invalid("cluster counts must be at least 1".into()));
        }
        if let Some((h, w)) = self.upsample {
            if h == 0 || w == 0 {
                return Err(CliError::Invalid("--upsample dimensions must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Seed from the flag, else the environment, else 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{SEED_ENV}='{v}' is not an unsigned 64-bit integer"))),
        Err(_) => Ok(0),
    }
}
