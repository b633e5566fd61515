//! Command-line interface definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channel::{codebook_train, CodebookCodec, CodebookTrainConfig};
use crate::context::{CooccurrenceEmbedding, EmbeddingProvider, FileEmbedding};
use crate::error::{Error, Result};
use crate::harness::{
    self, emit_plot, load_scenes, save_scenes, ExperimentConfig,
};
use crate::rng::RngStream;

#[derive(Debug, Parser)]
#[command(name = "semcom", version, about = "Semantic communication simulator")]
pub struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Experiment config JSON.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for experiment artifacts.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// CI-scale run: 1,000-scene dataset and a coarse SNR grid.
    #[arg(long, global = true)]
    pub quick: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label taxonomy tools.
    Taxonomy {
        #[command(subcommand)]
        cmd: TaxonomyCmd,
    },
    /// Scene dataset tools.
    Dataset {
        #[command(subcommand)]
        cmd: DatasetCmd,
    },
    /// Encode a scene dataset into semantic vectors.
    Encode(EncodeArgs),
    /// Embedding provider tools.
    Embed {
        #[command(subcommand)]
        cmd: EmbedCmd,
    },
    /// Codebook codec tools.
    Codec {
        #[command(subcommand)]
        cmd: CodecCmd,
    },
    /// Channel diagnostics.
    Channel {
        #[command(subcommand)]
        cmd: ChannelCmd,
    },
    /// Generate-criticize loop diagnostics.
    Critic {
        #[command(subcommand)]
        cmd: CriticCmd,
    },
    /// Seeded end-to-end experiments.
    Exp {
        #[command(subcommand)]
        cmd: ExpCmd,
    },
    /// Render an experiment CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum TaxonomyCmd {
    /// Write the default taxonomy as JSON.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCmd {
    /// Generate a scene dataset.
    Gen {
        #[arg(long)]
        scenes: usize,
        #[arg(long, default_value_t = 0.082)]
        ood_fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Scene dataset JSON.
    #[arg(long)]
    pub scenes: PathBuf,
    /// Output JSON of semantic vectors.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    /// Print a token's embedding vector.
    Inspect {
        /// Provider: "file" or "cooccurrence".
        #[arg(long)]
        provider: String,
        /// Vector file ("file" provider).
        #[arg(long)]
        path: Option<PathBuf>,
        /// Scene dataset ("cooccurrence" provider).
        #[arg(long)]
        scenes: Option<PathBuf>,
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodecCmd {
    /// Train a codebook codec and save it as JSON.
    Train {
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
        #[arg(long, default_value_t = 50)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0.05)]
        lr: f64,
        #[arg(long, default_value_t = 512)]
        batch: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChannelCmd {
    /// Token accuracy of a trained codec across an SNR range.
    Sweep {
        #[arg(long)]
        codec: PathBuf,
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        snr_from: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        snr_to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = 10_000)]
        tokens: usize,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CriticCmd {
    /// Monte Carlo loop accuracy versus the iteration limit.
    Sweep {
        #[arg(long, default_value_t = 0.78)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        fa: f64,
        #[arg(long, default_value_t = 0.0)]
        fr: f64,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExpCmd {
    /// Accuracy of expert-only / general-only / hybrid across OOD shares.
    OodSweep,
    /// Correction-rate curves versus tau for both providers.
    TauSweep,
    /// Pareto curves, frontier, and the tangent optimum.
    Pareto,
    /// Loop accuracy versus iteration limit with analytic overlay.
    CriticSweep,
    /// End-to-end semantic loss across channel SNRs.
    SnrSweep,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub csv: PathBuf,
    /// Output SVG (next to the CSV when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolves the experiment config from the global flags.
fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.quick {
        cfg.apply_quick();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Taxonomy { cmd } => match cmd {
            TaxonomyCmd::Export { out } => {
                let taxonomy = cfg.taxonomy()?;
                std::fs::write(out, serde_json::to_string_pretty(&taxonomy)?)?;
                println!("wrote {}", out.display());
            }
        },
        Command::Dataset { cmd } => match cmd {
            DatasetCmd::Gen {
                scenes,
                ood_fraction,
                out,
            } => {
                let taxonomy = cfg.taxonomy()?;
                let prior = cfg.prior_for(&taxonomy);
                let stream = RngStream::from_seed(cfg.seed).derive_label("dataset");
                let data =
                    harness::generate_dataset(&prior, &taxonomy, *scenes, *ood_fraction, &stream)?;
                save_scenes(&data, out)?;
                println!("wrote {} scenes to {}", data.len(), out.display());
            }
        },
        Command::Encode(args) => {
            let taxonomy = cfg.taxonomy()?;
            let scenes = load_scenes(&args.scenes, &taxonomy)?;
            let expert = cfg.expert_for(&taxonomy);
            let general = cfg.general_for(&taxonomy);
            let provider = CooccurrenceEmbedding::from_scenes(&scenes, &taxonomy);
            let encoded = harness::encode_dataset(
                &scenes,
                &taxonomy,
                &expert,
                &general,
                &provider,
                &cfg.encoder,
                cfg.seed,
            )?;
            std::fs::write(&args.out, serde_json::to_string_pretty(&encoded)?)?;
            println!("wrote {} encoded scenes to {}", encoded.scenes.len(), args.out.display());
        }
        Command::Embed { cmd } => match cmd {
            EmbedCmd::Inspect {
                provider,
                path,
                scenes,
                word,
            } => {
                let vector: Vec<f64> = match provider.as_str() {
                    "file" => {
                        let path = path.as_ref().ok_or_else(|| {
                            Error::Config("--path is required for the file provider".into())
                        })?;
                        FileEmbedding::from_path(path)?.token_vector(word)?.to_vec()
                    }
                    "cooccurrence" => {
                        let taxonomy = cfg.taxonomy()?;
                        let scenes_path = scenes.as_ref().ok_or_else(|| {
                            Error::Config(
                                "--scenes is required for the cooccurrence provider".into(),
                            )
                        })?;
                        let data = load_scenes(scenes_path, &taxonomy)?;
                        CooccurrenceEmbedding::from_scenes(&data, &taxonomy)
                            .token_vector(word)?
                            .to_vec()
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unknown provider {other:?} (expected file|cooccurrence)"
                        )))
                    }
                };
                let norm: f64 = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
                println!("token: {word}");
                println!("dim: {}", vector.len());
                println!("l2_norm: {norm}");
                println!(
                    "vector: {}",
                    vector
                        .iter()
                        .map(|v| format!("{v}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                );
            }
        },
        Command::Codec { cmd } => match cmd {
            CodecCmd::Train {
                snr,
                d,
                epochs,
                lr,
                batch,
                out,
            } => {
                let taxonomy = cfg.taxonomy()?;
                let train_cfg = CodebookTrainConfig {
                    dim: *d,
                    train_snr_db: *snr,
                    epochs: *epochs,
                    learning_rate: *lr,
                    batch_size: *batch,
                };
                let mut stream = RngStream::from_seed(cfg.seed).derive_label("codec-train");
                let codec = codebook_train(&taxonomy, &train_cfg, &mut stream)?;
                codec.save(out)?;
                println!(
                    "trained {}x{} codec at {} dB, wrote {}",
                    codec.num_labels(),
                    codec.dim(),
                    snr,
                    out.display()
                );
            }
        },
        Command::Channel { cmd } => match cmd {
            ChannelCmd::Sweep {
                codec,
                snr_from,
                snr_to,
                step,
                tokens,
                out,
            } => {
                let codec = CodebookCodec::load(codec)?;
                let rows = harness::channel_accuracy_sweep(
                    &codec, *snr_from, *snr_to, *step, *tokens, cfg.seed,
                )?;
                let mut body = String::from("snr_db,token_accuracy\n");
                for (snr, acc) in &rows {
                    body.push_str(&format!("{snr},{acc}\n"));
                }
                match out {
                    Some(path) => {
                        std::fs::write(path, body)?;
                        println!("wrote {}", path.display());
                    }
                    None => print!("{body}"),
                }
            }
        },
        Command::Critic { cmd } => match cmd {
            CriticCmd::Sweep {
                q,
                fa,
                fr,
                k_max,
                trials,
                out,
            } => {
                let mut params = cfg.critic;
                params.success_prob = *q;
                params.false_accept = *fa;
                params.false_reject = *fr;
                params.k_max = *k_max;
                params.trials = *trials;
                let taxonomy = cfg.taxonomy()?;
                harness::run_critic_sweep(&params, taxonomy.num_labels(), cfg.seed, out)?;
                println!("wrote {}", out.display());
            }
        },
        Command::Exp { cmd } => {
            std::fs::create_dir_all(&cli.out_dir)?;
            match cmd {
                ExpCmd::OodSweep => {
                    harness::exp_ood_sweep(&cfg, &cli.out_dir)?;
                    println!("wrote {}", cli.out_dir.join("ood_sweep.csv").display());
                }
                ExpCmd::TauSweep => {
                    harness::exp_tau_sweep(&cfg, &cli.out_dir)?;
                    println!("wrote {}", cli.out_dir.join("tau_sweep.csv").display());
                }
                ExpCmd::Pareto => {
                    let outcome = harness::exp_pareto(&cfg, &cli.out_dir)?;
                    println!(
                        "tau* = {} at (r_plus {}, r_minus {}), R = {}",
                        outcome.optimum.tau,
                        outcome.optimum.point.r_plus,
                        outcome.optimum.point.r_minus,
                        outcome.optimum.r
                    );
                    println!("wrote {}", cli.out_dir.join("pareto.csv").display());
                }
                ExpCmd::CriticSweep => {
                    harness::exp_critic_sweep(&cfg, &cli.out_dir)?;
                    println!("wrote {}", cli.out_dir.join("critic.csv").display());
                }
                ExpCmd::SnrSweep => {
                    harness::exp_snr_sweep(&cfg, &cli.out_dir)?;
                    println!("wrote {}", cli.out_dir.join("snr_sweep.csv").display());
                }
            }
        }
        Command::Plot(args) => {
            let out = emit_plot(&args.csv, args.out.as_deref())?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
