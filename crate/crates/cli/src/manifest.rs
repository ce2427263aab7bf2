//! Run manifests: per-image feature files grouped by feature source name.
//!
//! ```json
//! {
//!   "images": [
//!     { "id": "0001", "features": { "dino": "feats/dino/0001.npy", "swav": "feats/swav/0001.npy" } }
//!   ]
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory. Image ids become
//! output file names, so they may not contain path separators.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub features: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub images: Vec<ImageEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Format(format!("manifest: {e}")).with_path(path))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut manifest.images {
            for p in entry.features.values_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        manifest.validate().map_err(|e| e.with_path(path))?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for entry in &self.images {
            let id = entry.id.as_str();
            if id.is_empty() || id == "." || id == ".." || id.contains(['/', '\\']) {
                return Err(CliError::Invalid(format!("image id '{id}' is not a valid file name")));
            }
            if !seen.insert(id) {
                return Err(CliError::Invalid(format!("duplicate image id '{id}'")));
            }
        }
        Ok(())
    }

    /// Source names to process: the requested ones, or every source named in
    /// the manifest in sorted order.
    pub fn resolve_sources(&self, requested: Option<&[String]>) -> Result<Vec<String>> {
        match requested {
            Some(list) if !list.is_empty() => {
                let mut seen = BTreeSet::new();
                for s in list {
                    if !seen.insert(s) {
                        return Err(CliError::Invalid(format!("source '{s}' listed twice")));
                    }
                }
                Ok(list.to_vec())
            }
            _ => {
                let all: BTreeSet<&String> = self.images.iter().flat_map(|e| e.features.keys()).collect();
                if all.is_empty() {
                    return Err(CliError::Invalid("manifest names no feature sources".into()));
                }
                Ok(all.into_iter().cloned().collect())
            }
        }
    }
}

impl ImageEntry {
    pub fn feature_path(&self, source: &str) -> Result<&Path> {
        self.features
            .get(source)
            .map(PathBuf::as_path)
            .ok_or_else(|| CliError::Invalid(format!("image '{}' has no '{source}' features", self.id)))
    }
}
