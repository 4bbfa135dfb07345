//! Subcommand implementations. Each returns through [`crate::error::Result`]
//! so `main` can print one coded error line and exit nonzero.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use videomerge_core::denoisers::{GlobalTargetOracle, PerturbedOracle, ZeroDenoiser};
use videomerge_core::filter::ButterworthMask;
use videomerge_core::fusion::{weight_table, TileLayout};
use videomerge_core::metrics::{
    frame_features, frechet_distance, identity_consistency, low_freq_similarity,
    pairwise_consistency, temporal_flicker, MetricReport, ToyExtractor,
};
use videomerge_core::noise::init_long_noise;
use videomerge_core::refine::{refine, stub_client, PromptCategory, RefineSource, RefinedPrompt};
use videomerge_core::sampling::{generate, Denoiser};
use videomerge_core::LatentTensor;

use crate::config::{ConfigOverrides, RunConfig};
use crate::error::{CliError, Result};
use crate::http::HttpRefinerClient;
use crate::manifest::{ReportDoc, RunManifest};
use crate::vmlt;

/// Which denoiser `generate` plugs into the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DenoiserKind {
    /// Zero velocity: output equals the initialized noise.
    Zero,
    /// Analytic oracle toward a target latent file.
    Target,
    /// Target oracle plus per-tile perturbation fields.
    Perturbed,
}

pub fn cmd_init_noise(
    config_path: &Path,
    overrides: &ConfigOverrides,
    output: &Path,
) -> Result<()> {
    let config = RunConfig::load_with_overrides(config_path, overrides)?;
    let noise_cfg = config.noise_config();
    let started = Instant::now();
    let tensor = init_long_noise(&noise_cfg)?;
    let elapsed = started.elapsed();
    let checksum = vmlt::save_latent(output, &tensor)?;
    println!(
        "wrote {} shape {} checksum {:016x} ({:.1} ms)",
        output.display(),
        tensor.shape(),
        checksum,
        elapsed.as_secs_f64() * 1e3,
    );
    Ok(())
}

fn load_target(path: Option<&Path>, expected: &RunConfig) -> Result<LatentTensor> {
    let path = path.ok_or_else(|| {
        CliError::Config("the selected denoiser needs a target latent (--target <file>)".into())
    })?;
    let (target, _) = vmlt::load_latent(path)?;
    let noise_cfg = expected.noise_config();
    if target.shape() != noise_cfg.long_shape() {
        return Err(CliError::Config(format!(
            "target shape {} does not match the configured long latent {}",
            target.shape(),
            noise_cfg.long_shape()
        )));
    }
    Ok(target)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_generate(
    config_path: &Path,
    overrides: &ConfigOverrides,
    denoiser_kind: DenoiserKind,
    target_path: Option<&Path>,
    amplitude: f32,
    perturb_seed: Option<u64>,
    output: &Path,
) -> Result<()> {
    let config = RunConfig::load_with_overrides(config_path, overrides)?;
    let mut manifest = RunManifest::new(config.digest(), config.noise.seed);

    // Optional prompt refinement; failures degrade to passthrough.
    let mut prompt_text = config.condition.prompt.clone();
    if config.refine.enabled && !prompt_text.trim().is_empty() {
        let category: PromptCategory = config.refine.category.parse()?;
        let refined = refine_with_default_client(&prompt_text, category)?;
        if let Some(warning) = &refined.warning {
            eprintln!("warning: {warning}");
        }
        manifest.refined_prompt = Some((&refined).into());
        prompt_text = refined.refined;
    }

    let gen_cfg = config.generation_config(&prompt_text)?;

    let denoiser: Box<dyn Denoiser<f32>> = match denoiser_kind {
        DenoiserKind::Zero => Box::new(ZeroDenoiser),
        DenoiserKind::Target => {
            Box::new(GlobalTargetOracle::new(load_target(target_path, &config)?))
        }
        DenoiserKind::Perturbed => Box::new(PerturbedOracle::new(
            load_target(target_path, &config)?,
            amplitude,
            perturb_seed.unwrap_or(config.noise.seed),
        )),
    };

    let started = Instant::now();
    let video = generate(&gen_cfg, denoiser.as_ref())?;
    manifest.record_timing("generate", started.elapsed());

    let write_started = Instant::now();
    let checksum = vmlt::save_latent(output, &video)?;
    manifest.record_timing("write", write_started.elapsed());
    manifest.record_output(output, checksum, video.shape().frames);

    let manifest_path = manifest_path_for(output);
    manifest.save(&manifest_path)?;
    println!(
        "wrote {} shape {} checksum {:016x}",
        output.display(),
        video.shape(),
        checksum
    );
    println!("manifest {}", manifest_path.display());
    Ok(())
}

pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.toml");
    PathBuf::from(name)
}

pub fn cmd_metrics(
    input: &Path,
    reference: Option<&Path>,
    diff: Option<&Path>,
    config_path: Option<&Path>,
    overrides: &ConfigOverrides,
    report_path: Option<&Path>,
) -> Result<()> {
    let (video, _) = vmlt::load_latent(input)?;

    // Diff mode: just the elementwise comparison.
    if let Some(other_path) = diff {
        let (other, _) = vmlt::load_latent(other_path)?;
        let max_abs = video.max_abs_diff(&other)?;
        println!("max_abs_diff = {max_abs:e}");
        return Ok(());
    }

    let config = match config_path {
        Some(path) => RunConfig::load_with_overrides(path, overrides)?,
        None => {
            let mut config = RunConfig::default();
            config.apply_overrides(overrides);
            config
        }
    };
    let tau = config.metrics.identity_tau.ok_or_else(|| {
        CliError::Config(
            "identity consistency needs a tolerance: set [metrics] identity_tau or pass \
             --identity-tau"
                .into(),
        )
    })?;

    let extractor = ToyExtractor::default();
    let mut report = MetricReport::new();
    report.seed = Some(config.noise.seed);
    report.config_digest = Some(config.digest());
    report.insert("temporal_flicker", temporal_flicker(&video)?)?;
    report.insert(
        "subject_consistency",
        pairwise_consistency(&video, &extractor)?,
    )?;
    report.insert(
        "identity_consistency",
        identity_consistency(&video, &extractor, tau)?,
    )?;

    // Cross-tile low-frequency similarity, when the configured tile geometry
    // covers this video.
    let shape = video.shape();
    match TileLayout::new(config.tiles.tile_frames, config.tiles.overlap, shape.frames) {
        Ok(layout) => {
            let mask = ButterworthMask::new(
                config.tiles.tile_frames,
                shape.height,
                shape.width,
                config.butterworth(),
            )?;
            match low_freq_similarity(&video, &layout, &mask) {
                Ok(score) => report.insert("low_freq_similarity", score)?,
                Err(err) => eprintln!("warning: skipping low_freq_similarity: {err}"),
            }
        }
        Err(err) => eprintln!("warning: skipping low_freq_similarity: {err}"),
    }

    if let Some(reference_path) = reference {
        let (reference_video, _) = vmlt::load_latent(reference_path)?;
        let a = frame_features(&video, &extractor)?;
        let b = frame_features(&reference_video, &extractor)?;
        report.insert("frechet_distance", frechet_distance(&a, &b)?)?;
    }

    let doc = ReportDoc::from(&report);
    let text = toml::to_string_pretty(&doc).expect("report serializes");
    print!("{text}");
    if let Some(path) = report_path {
        std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn cmd_weights(tile_frames: usize, overlap: usize, long_frames: usize) -> Result<()> {
    use std::io::Write;
    let layout = TileLayout::new(tile_frames, overlap, long_frames)?;
    let table: Vec<Vec<(usize, f64)>> = weight_table(&layout)?;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut emit = || -> std::io::Result<()> {
        writeln!(out, "# frame\ttile:weight ...")?;
        for (frame, row) in table.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|(tile, weight)| format!("{tile}:{weight:.12}"))
                .collect();
            writeln!(out, "{frame}\t{}", cells.join("\t"))?;
        }
        out.flush()
    };
    match emit() {
        Ok(()) => Ok(()),
        // A closed pipe (e.g. `| head`) is not an error for a table printer.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::io("stdout", e)),
    }
}

/// Load a fixture table (TOML map of prompt -> response) for the stub client.
fn load_fixtures(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::ConfigParse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn refine_with_default_client(prompt: &str, category: PromptCategory) -> Result<RefinedPrompt> {
    match HttpRefinerClient::from_env() {
        Some(client) => Ok(refine(prompt, category, &client)?),
        None => Ok(refine(prompt, category, &stub_client(BTreeMap::new()))?),
    }
}

pub fn cmd_refine_prompt(
    prompt: &str,
    category: PromptCategory,
    fixtures: Option<&Path>,
) -> Result<()> {
    let refined = match (HttpRefinerClient::from_env(), fixtures) {
        // An explicit fixture table forces the stub, endpoint or not.
        (_, Some(path)) => {
            let client = stub_client(load_fixtures(path)?);
            refine(prompt, category, &client)?
        }
        (Some(client), None) => refine(prompt, category, &client)?,
        (None, None) => refine(prompt, category, &stub_client(BTreeMap::new()))?,
    };
    if let Some(warning) = &refined.warning {
        eprintln!("warning: {warning}");
    }
    println!("original: {}", refined.original);
    println!("refined: {}", refined.refined);
    println!("source: {}", refined.source.as_str());
    if refined.source != RefineSource::Passthrough && !refined.attributes.is_empty() {
        for (attr, value) in &refined.attributes {
            println!("attribute.{attr}: {value}");
        }
    }
    Ok(())
}
