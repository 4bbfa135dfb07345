//! `videomerge`: long-video latent pipeline CLI.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use videomerge_cli::commands::{self, DenoiserKind};
use videomerge_cli::config::ConfigOverrides;
use videomerge_core::refine::PromptCategory;

#[derive(Parser)]
#[command(
    name = "videomerge",
    version,
    about = "Training-free long-video latent pipeline: long noise initialization, \
             sine-weighted tile fusion, tiled denoising, and consistency metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the long initial noise and write it as a VMLT latent file.
    InitNoise {
        /// Run configuration (TOML).
        #[arg(long, short)]
        config: PathBuf,
        /// Output latent file.
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Run the full tiled generation loop and write latent + manifest.
    Generate {
        /// Run configuration (TOML).
        #[arg(long, short)]
        config: PathBuf,
        /// Which denoiser drives the loop.
        #[arg(long, value_enum, default_value = "zero")]
        denoiser: DenoiserKind,
        /// Target latent file for the oracle denoisers.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Perturbation amplitude for the perturbed denoiser.
        #[arg(long, default_value_t = 0.5)]
        amplitude: f32,
        /// Seed of the perturbation fields (defaults to the noise seed).
        #[arg(long)]
        perturb_seed: Option<u64>,
        /// Output latent file; the manifest lands beside it.
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Score a latent file: flicker, consistency, identity, and (with a
    /// reference) the Fréchet distance. --diff compares two files instead.
    Metrics {
        /// Latent file to score.
        input: PathBuf,
        /// Second latent set for the Fréchet distance.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Diff mode: print the max absolute difference to this file.
        #[arg(long)]
        diff: Option<PathBuf>,
        /// Run configuration (TOML); defaults apply when omitted.
        #[arg(long, short)]
        config: Option<PathBuf>,
        /// Write the report (TOML) here as well as stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Print the per-frame fusion weight table for a tile layout.
    Weights {
        /// Frames per tile.
        #[arg(long)]
        tile_frames: usize,
        /// Overlap between consecutive tiles.
        #[arg(long)]
        overlap: usize,
        /// Long latent length in frames.
        #[arg(long)]
        long: usize,
    },
    /// Refine a prompt through the configured endpoint or the offline stub.
    RefinePrompt {
        /// The prompt to refine.
        prompt: String,
        /// Content category: human, animal, or landscape.
        #[arg(long, default_value = "human")]
        category: PromptCategory,
        /// Fixture table (TOML map prompt -> response); forces the stub.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> videomerge_cli::Result<()> {
    match cli.command {
        Command::InitNoise {
            config,
            output,
            overrides,
        } => commands::cmd_init_noise(&config, &overrides, &output),
        Command::Generate {
            config,
            denoiser,
            target,
            amplitude,
            perturb_seed,
            output,
            overrides,
        } => commands::cmd_generate(
            &config,
            &overrides,
            denoiser,
            target.as_deref(),
            amplitude,
            perturb_seed,
            &output,
        ),
        Command::Metrics {
            input,
            reference,
            diff,
            config,
            report,
            overrides,
        } => commands::cmd_metrics(
            &input,
            reference.as_deref(),
            diff.as_deref(),
            config.as_deref(),
            &overrides,
            report.as_deref(),
        ),
        Command::Weights {
            tile_frames,
            overlap,
            long,
        } => commands::cmd_weights(tile_frames, overlap, long),
        Command::RefinePrompt {
            prompt,
            category,
            fixtures,
        } => commands::cmd_refine_prompt(&prompt, category, fixtures.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // First line is the machine-parseable code; any remaining
            // diagnostic detail (e.g. TOML carets) follows verbatim.
            let text = err.to_string();
            let mut lines = text.lines();
            eprintln!("error[{}]: {}", err.code(), lines.next().unwrap_or(""));
            for line in lines {
                eprintln!("{line}");
            }
            ExitCode::FAILURE
        }
    }
}
