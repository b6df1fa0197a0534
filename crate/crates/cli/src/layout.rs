//! File layout of intermediate artifacts.
//!
//! ```text
//! work/<animation>/rotation.json
//! work/<animation>/interpolated.json
//! work/<animation>/variants/index.json, variant_000.json, ...
//! work/<animation>/cameras/variant_000_viewpoint_000.json, ...
//! ```

use std::path::{Path, PathBuf};

pub const INDEX_FILE: &str = "index.json";
pub const MANIFEST_FILE: &str = "manifest.csv";
pub const DIGEST_FILE: &str = "plan.sha256";

#[derive(Debug, Clone)]
pub struct WorkLayout {
    pub root: PathBuf,
}

impl WorkLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn animation(&self, id: &str) -> PathBuf {
        self.root.join(id)
    }

    pub fn rotation(&self, id: &str) -> PathBuf {
        self.animation(id).join("rotation.json")
    }

    pub fn interpolated(&self, id: &str) -> PathBuf {
        self.animation(id).join("interpolated.json")
    }

    pub fn variants(&self, id: &str) -> PathBuf {
        self.animation(id).join("variants")
    }

    pub fn camera(&self, id: &str, variant: usize, viewpoint: usize) -> PathBuf {
        self.animation(id).join("cameras").join(camera_file_name(variant, viewpoint))
    }
}

pub fn camera_file_name(variant: usize, viewpoint: usize) -> String {
    format!("variant_{variant:03}_viewpoint_{viewpoint:03}.json")
}

pub fn manifest_path(dataset: &Path) -> PathBuf {
    dataset.join(MANIFEST_FILE)
}
