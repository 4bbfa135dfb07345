//! Run configuration: a TOML document with a checked schema version and
//! strictly rejected unknown keys. Command-line flags mirror the leaf keys
//! and override them after parsing; the digest is taken over the effective
//! (post-override) document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use videomerge_core::filter::ButterworthParams;
use videomerge_core::fusion::TileLayout;
use videomerge_core::noise::{BlendMode, NoiseInitConfig};
use videomerge_core::sampling::{build_schedule, ConditionVector, GenerationConfig, TileExecution};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Config schema version; must equal [`SCHEMA_VERSION`].
    pub schema: u32,
    #[serde(default)]
    pub shape: ShapeSection,
    #[serde(default)]
    pub tiles: TilesSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub condition: ConditionSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub refine: RefineSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapeSection {
    pub batch: usize,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Default for ShapeSection {
    fn default() -> Self {
        Self {
            batch: 1,
            channels: 16,
            height: 40,
            width: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TilesSection {
    pub tile_frames: usize,
    pub overlap: usize,
    pub replicas: usize,
}

impl Default for TilesSection {
    fn default() -> Self {
        Self {
            tile_frames: 16,
            overlap: 12,
            replicas: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub seed: u64,
    pub max_merge: f32,
    pub blend_mode: BlendModeKey,
    pub butterworth: ButterworthSection,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            seed: 0,
            max_merge: 0.1,
            blend_mode: BlendModeKey::TimeRamp,
            butterworth: ButterworthSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlendModeKey {
    #[serde(rename = "time-ramp")]
    TimeRamp,
    #[serde(rename = "literal-frequency-ramp")]
    LiteralFrequencyRamp,
}

impl From<BlendModeKey> for BlendMode {
    fn from(key: BlendModeKey) -> Self {
        match key {
            BlendModeKey::TimeRamp => BlendMode::TimeRamp,
            BlendModeKey::LiteralFrequencyRamp => BlendMode::LiteralFrequencyRamp,
        }
    }
}

impl std::str::FromStr for BlendModeKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "time-ramp" => Ok(BlendModeKey::TimeRamp),
            "literal-frequency-ramp" => Ok(BlendModeKey::LiteralFrequencyRamp),
            other => Err(format!(
                "unknown blend mode '{other}' (expected time-ramp or literal-frequency-ramp)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ButterworthSection {
    pub order: u32,
    pub temporal_cutoff: f64,
    pub spatial_cutoff: f64,
}

impl Default for ButterworthSection {
    fn default() -> Self {
        Self {
            order: 4,
            temporal_cutoff: 0.25,
            spatial_cutoff: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    pub steps: usize,
    pub parallel_tiles: bool,
    pub max_in_flight_tiles: Option<usize>,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            steps: 30,
            parallel_tiles: false,
            max_in_flight_tiles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConditionSection {
    pub prompt: String,
    pub embedding_dim: usize,
}

impl Default for ConditionSection {
    fn default() -> Self {
        Self {
            prompt: String::new(),
            embedding_dim: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    /// Tolerance for identity consistency. No default: the metrics
    /// subcommand requires it from the config or the --identity-tau flag.
    pub identity_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefineSection {
    pub enabled: bool,
    pub category: String,
}

impl Default for RefineSection {
    fn default() -> Self {
        Self {
            enabled: false,
            category: "human".to_owned(),
        }
    }
}

/// Optional command-line overrides, mirroring the config leaf keys.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigOverrides {
    /// Override [shape] batch
    #[arg(long)]
    pub batch: Option<usize>,
    /// Override [shape] channels
    #[arg(long)]
    pub channels: Option<usize>,
    /// Override [shape] height
    #[arg(long)]
    pub height: Option<usize>,
    /// Override [shape] width
    #[arg(long)]
    pub width: Option<usize>,
    /// Override [tiles] tile_frames
    #[arg(long)]
    pub tile_frames: Option<usize>,
    /// Override [tiles] overlap
    #[arg(long)]
    pub overlap: Option<usize>,
    /// Override [tiles] replicas
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Override [noise] seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override [noise] max_merge
    #[arg(long)]
    pub max_merge: Option<f32>,
    /// Override [noise] blend_mode
    #[arg(long)]
    pub blend_mode: Option<BlendModeKey>,
    /// Override [noise.butterworth] order
    #[arg(long)]
    pub butterworth_order: Option<u32>,
    /// Override [noise.butterworth] temporal_cutoff
    #[arg(long)]
    pub temporal_cutoff: Option<f64>,
    /// Override [noise.butterworth] spatial_cutoff
    #[arg(long)]
    pub spatial_cutoff: Option<f64>,
    /// Override [sampling] steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override [sampling] parallel_tiles
    #[arg(long)]
    pub parallel_tiles: Option<bool>,
    /// Override [sampling] max_in_flight_tiles
    #[arg(long)]
    pub max_in_flight_tiles: Option<usize>,
    /// Override [condition] prompt
    #[arg(long)]
    pub prompt: Option<String>,
    /// Override [condition] embedding_dim
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    /// Override [metrics] identity_tau
    #[arg(long)]
    pub identity_tau: Option<f64>,
    /// Override [refine] enabled
    #[arg(long)]
    pub refine_enabled: Option<bool>,
    /// Override [refine] category
    #[arg(long)]
    pub refine_category: Option<String>,
}

impl RunConfig {
    /// Parse a TOML document, checking the schema version.
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        if config.schema != SCHEMA_VERSION {
            return Err(CliError::ConfigParse {
                path: path.to_owned(),
                message: format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    config.schema
                ),
            });
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Load and apply overrides in one step.
    pub fn load_with_overrides(path: &Path, overrides: &ConfigOverrides) -> Result<Self> {
        let mut config = Self::load(path)?;
        config.apply_overrides(overrides);
        Ok(config)
    }

    pub fn apply_overrides(&mut self, o: &ConfigOverrides) {
        macro_rules! set {
            ($target:expr, $source:expr) => {
                if let Some(v) = &$source {
                    $target = v.clone();
                }
            };
        }
        set!(self.shape.batch, o.batch);
        set!(self.shape.channels, o.channels);
        set!(self.shape.height, o.height);
        set!(self.shape.width, o.width);
        set!(self.tiles.tile_frames, o.tile_frames);
        set!(self.tiles.overlap, o.overlap);
        set!(self.tiles.replicas, o.replicas);
        set!(self.noise.seed, o.seed);
        set!(self.noise.max_merge, o.max_merge);
        set!(self.noise.blend_mode, o.blend_mode);
        set!(self.noise.butterworth.order, o.butterworth_order);
        set!(self.noise.butterworth.temporal_cutoff, o.temporal_cutoff);
        set!(self.noise.butterworth.spatial_cutoff, o.spatial_cutoff);
        set!(self.sampling.steps, o.steps);
        set!(self.sampling.parallel_tiles, o.parallel_tiles);
        if o.max_in_flight_tiles.is_some() {
            self.sampling.max_in_flight_tiles = o.max_in_flight_tiles;
        }
        set!(self.condition.prompt, o.prompt);
        set!(self.condition.embedding_dim, o.embedding_dim);
        if o.identity_tau.is_some() {
            self.metrics.identity_tau = o.identity_tau;
        }
        set!(self.refine.enabled, o.refine_enabled);
        set!(self.refine.category, o.refine_category);
    }

    /// FNV-1a digest of the canonical serialized form, as 16 hex digits.
    pub fn digest(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        format!(
            "{:016x}",
            videomerge_core::hash::fnv1a64(canonical.as_bytes())
        )
    }

    pub fn butterworth(&self) -> ButterworthParams {
        ButterworthParams {
            order: self.noise.butterworth.order,
            temporal_cutoff: self.noise.butterworth.temporal_cutoff,
            spatial_cutoff: self.noise.butterworth.spatial_cutoff,
        }
    }

    pub fn noise_config(&self) -> NoiseInitConfig<f32> {
        NoiseInitConfig {
            batch: self.shape.batch,
            channels: self.shape.channels,
            tile_frames: self.tiles.tile_frames,
            height: self.shape.height,
            width: self.shape.width,
            overlap: self.tiles.overlap,
            replicas: self.tiles.replicas,
            max_merge: self.noise.max_merge,
            butterworth: self.butterworth(),
            blend_mode: self.noise.blend_mode.into(),
            seed: self.noise.seed,
        }
    }

    pub fn layout(&self) -> Result<TileLayout> {
        let noise = self.noise_config();
        Ok(TileLayout::new(
            self.tiles.tile_frames,
            self.tiles.overlap,
            noise.long_frames(),
        )?)
    }

    /// Full generation configuration, conditioning on `prompt_text` (the
    /// possibly refined prompt).
    pub fn generation_config(&self, prompt_text: &str) -> Result<GenerationConfig<f32>> {
        let noise = self.noise_config();
        Ok(GenerationConfig {
            layout: self.layout()?,
            schedule: build_schedule(self.sampling.steps)?,
            condition: ConditionVector::from_prompt(prompt_text, self.condition.embedding_dim),
            noise,
            execution: TileExecution {
                parallel: self.sampling.parallel_tiles,
                max_in_flight: self.sampling.max_in_flight_tiles,
            },
        })
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            shape: ShapeSection::default(),
            tiles: TilesSection::default(),
            noise: NoiseSection::default(),
            sampling: SamplingSection::default(),
            condition: ConditionSection::default(),
            metrics: MetricsSection::default(),
            refine: RefineSection::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema = 1\n";

    fn path() -> std::path::PathBuf {
        std::path::PathBuf::from("test.toml")
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL, &path()).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.tiles.tile_frames, 16);
        assert_eq!(cfg.tiles.overlap, 12);
        assert_eq!(cfg.noise.max_merge, 0.1);
        assert_eq!(cfg.sampling.steps, 30);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let text = "schema = 1\n[tiles]\ntile_frames = 16\nbanana = 3\n";
        let err = RunConfig::from_toml(text, &path()).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("banana"), "message: {message}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let err = RunConfig::from_toml("schema = 2\n", &path()).unwrap_err();
        assert!(err.to_string().contains("schema"));
    }

    #[test]
    fn missing_schema_is_rejected() {
        assert!(RunConfig::from_toml("[tiles]\ntile_frames = 8\n", &path()).is_err());
    }

    #[test]
    fn overrides_apply_and_change_the_digest() {
        let mut cfg = RunConfig::from_toml(MINIMAL, &path()).unwrap();
        let base_digest = cfg.digest();
        cfg.apply_overrides(&ConfigOverrides {
            seed: Some(9),
            steps: Some(12),
            parallel_tiles: Some(true),
            ..ConfigOverrides::default()
        });
        assert_eq!(cfg.noise.seed, 9);
        assert_eq!(cfg.sampling.steps, 12);
        assert!(cfg.sampling.parallel_tiles);
        assert_ne!(cfg.digest(), base_digest);
    }

    #[test]
    fn digest_is_stable_for_equal_configs() {
        let a = RunConfig::from_toml(MINIMAL, &path()).unwrap();
        let b = RunConfig::default();
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn blend_mode_round_trips_through_toml() {
        let text = "schema = 1\n[noise]\nblend_mode = \"literal-frequency-ramp\"\n";
        let cfg = RunConfig::from_toml(text, &path()).unwrap();
        assert_eq!(cfg.noise.blend_mode, BlendModeKey::LiteralFrequencyRamp);
        let serialized = toml::to_string(&cfg).unwrap();
        assert!(serialized.contains("literal-frequency-ramp"));
    }

    #[test]
    fn layout_comes_from_tiles_section() {
        let cfg = RunConfig::from_toml(MINIMAL, &path()).unwrap();
        let layout = cfg.layout().unwrap();
        assert_eq!(layout.long_frames(), 112);
        assert_eq!(layout.tile_count(), 25);
    }
}
