use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use infoshot_core::{load_features, BenchmarkConfig, FeatureSequence, SyntheticTruth};
use serde::{Deserialize, Serialize};

/// `manifest.json` written by `synth`. Paths are relative to the manifest.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config: BenchmarkConfig,
    pub videos: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub features: String,
    pub truth: String,
}

pub struct Video {
    pub id: String,
    pub features: FeatureSequence,
    pub truth: SyntheticTruth,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn load_videos(&self, manifest_path: &Path) -> Result<Vec<Video>> {
        let base: PathBuf = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.videos
            .iter()
            .map(|e| {
                let fpath = base.join(&e.features);
                let features = load_features(&fpath, None).with_context(|| format!("loading {}", fpath.display()))?;
                let tpath = base.join(&e.truth);
                let text =
                    std::fs::read_to_string(&tpath).with_context(|| format!("reading {}", tpath.display()))?;
                let truth = SyntheticTruth::from_json(&text).with_context(|| format!("parsing {}", tpath.display()))?;
                Ok(Video { id: e.id.clone(), features, truth })
            })
            .collect()
    }
}
