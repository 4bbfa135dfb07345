//! Run manifests: enough provenance beside every generated file to reproduce
//! its checksums bitwise with the same binary, plus stage timings and any
//! metric report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use videomerge_core::metrics::MetricReport;
use videomerge_core::refine::RefinedPrompt;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
    pub seed: u64,
    /// Wall-clock stage timings in milliseconds.
    pub timings_ms: BTreeMap<String, f64>,
    pub outputs: Vec<OutputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_prompt: Option<RefinedPromptRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<ReportDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    /// FNV-1a-64 of the payload bytes, 16 hex digits.
    pub checksum: String,
    pub frames: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinedPromptRecord {
    pub original: String,
    pub refined: String,
    pub source: String,
}

impl From<&RefinedPrompt> for RefinedPromptRecord {
    fn from(r: &RefinedPrompt) -> Self {
        Self {
            original: r.original.clone(),
            refined: r.refined.clone(),
            source: r.source.as_str().to_owned(),
        }
    }
}

/// Serialized form of a metric report: named scalars plus provenance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
    pub scores: BTreeMap<String, f64>,
}

impl From<&MetricReport> for ReportDoc {
    fn from(report: &MetricReport) -> Self {
        Self {
            seed: report.seed,
            config_digest: report.config_digest.clone(),
            scores: report.scalars().clone(),
        }
    }
}

impl RunManifest {
    pub fn new(config_digest: String, seed: u64) -> Self {
        Self {
            tool: "videomerge".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config_digest,
            seed,
            ..Self::default()
        }
    }

    pub fn record_timing(&mut self, stage: &str, elapsed: std::time::Duration) {
        self.timings_ms
            .insert(stage.to_owned(), elapsed.as_secs_f64() * 1e3);
    }

    pub fn record_output(&mut self, path: &Path, checksum: u64, frames: usize) {
        self.outputs.push(OutputRecord {
            path: path.display().to_string(),
            checksum: format!("{checksum:016x}"),
            frames,
        });
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::ConfigParse {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }
}
