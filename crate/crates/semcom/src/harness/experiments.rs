//! End-to-end experiment pipelines.
//!
//! Every experiment derives its randomness from the master seed through
//! labeled substreams (`derive_label(experiment)` then `derive(trial)` then
//! per-stage tags), so reruns are byte-identical and extending a sweep or a
//! trial count never disturbs the prefix already computed.

use std::path::Path;

use serde::Serialize;

use crate::analysis::{
    compute_prf, optimize_tau, pareto_frontier, pareto_sweep, Averaging, EpsilonSplit, EvalCase,
    ParetoPoint, TauOptimum,
};
use crate::channel::{awgn_apply, codebook_train, ChannelConfig, CodebookCodec};
use crate::context::{
    cooccurrence_counts, ContextInfo, CooccurrenceEmbedding, EmbeddingProvider, FileEmbedding,
};
use crate::encoder::{encode_scene, EncoderConfig};
use crate::error::{Error, Result};
use crate::perception::{
    cet_extract, expert_classify, general_score_matrix, ExpertModel, GeneralModel, Scene,
};
use crate::receiver::{
    generate_criticize_loop, loop_accuracy_analytic, semantic_loss, CriticModel, GeneratorModel,
    Prompt,
};
use crate::rng::RngStream;
use crate::taxonomy::{one_hot, LabelTaxonomy};

use super::config::{CriticParams, ExperimentConfig};
use super::dataset::{generate_dataset, generate_scenes_min_objects};
use super::report::{content_hash, fmt, write_csv, RunReport};

// Stage tags within one object's stream; these mirror the encoder so pool
// construction replays the same draws.
const STAGE_EXPERT: u64 = 0;
const STAGE_GENERAL: u64 = 1;

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

fn report_for(
    cfg: &ExperimentConfig,
    experiment: &str,
    csv_files: Vec<String>,
    summary: serde_json::Value,
) -> RunReport {
    RunReport {
        experiment: experiment.to_string(),
        seed: cfg.seed,
        config_hash: content_hash(cfg),
        config: serde_json::to_value(cfg).expect("config serializes"),
        csv_files,
        summary,
    }
}

/// One row of the OOD-proportion sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OodSweepRow {
    pub ood_fraction: f64,
    pub expert_acc: f64,
    pub general_acc: f64,
    pub hybrid_acc: f64,
}

/// Per-object predictions of the three schemes over one scene set.
struct SchemePredictions {
    truths: Vec<usize>,
    expert: Vec<usize>,
    general: Vec<usize>,
    hybrid: Vec<usize>,
}

fn run_schemes(
    scenes: &[Scene],
    taxonomy: &LabelTaxonomy,
    expert: &ExpertModel,
    general: &GeneralModel,
    provider: &dyn EmbeddingProvider,
    encoder_cfg: &EncoderConfig,
    point: &RngStream,
) -> Result<SchemePredictions> {
    let b = one_hot(taxonomy)?;
    let enc_stream = point.derive_label("encode");
    let exp_stream = point.derive_label("expert");
    let gen_stream = point.derive_label("general");
    let mut preds = SchemePredictions {
        truths: Vec::new(),
        expert: Vec::new(),
        general: Vec::new(),
        hybrid: Vec::new(),
    };
    for (s, scene) in scenes.iter().enumerate() {
        let (sv, _) = encode_scene(
            scene,
            expert,
            general,
            provider,
            taxonomy,
            encoder_cfg,
            &enc_stream.derive(s as u64),
        )?;
        for (i, obj) in scene.objects.iter().enumerate() {
            preds.truths.push(obj.true_label);
            preds.hybrid.push(sv.entries[i]);
            let mut es = exp_stream.derive(s as u64).derive(i as u64);
            preds
                .expert
                .push(expert_classify(i, obj, expert, taxonomy, &mut es).label);
            let mut gs = gen_stream.derive(s as u64).derive(i as u64);
            let scores = general_score_matrix(obj, general, taxonomy, &mut gs);
            preds.general.push(cet_extract(&scores, &b)?.argmax());
        }
    }
    Ok(preds)
}

fn accuracy(preds: &[usize], truths: &[usize]) -> f64 {
    let hits = preds.iter().zip(truths.iter()).filter(|(a, b)| a == b).count();
    hits as f64 / truths.len() as f64
}

/// Accuracy of expert-only, general-only, and the hybrid encoder across OOD
/// proportions. Writes `ood_sweep.csv` plus table-style `prf.csv` metrics at
/// the reference composition and with OOD scenes excluded.
pub fn exp_ood_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<OodSweepRow>> {
    ensure_dir(out_dir)?;
    let taxonomy = cfg.taxonomy()?;
    let expert = cfg.expert_for(&taxonomy);
    let general = cfg.general_for(&taxonomy);
    let prior = cfg.prior_for(&taxonomy);
    let master = RngStream::from_seed(cfg.seed);

    // Embedding provider from the reference dataset composition.
    let provider_scenes = generate_dataset(
        &prior,
        &taxonomy,
        cfg.dataset.n_scenes.min(2000),
        cfg.dataset.ood_fraction,
        &master.derive_label("provider-dataset"),
    )?;
    let provider = CooccurrenceEmbedding::from_scenes(&provider_scenes, &taxonomy);

    let mut rows = Vec::new();
    for (pi, &fraction) in cfg.ood_sweep.fractions.iter().enumerate() {
        let point = master.derive_label("ood-sweep").derive(pi as u64);
        let scenes = generate_scenes_min_objects(
            &prior,
            &taxonomy,
            cfg.ood_sweep.objects_per_point,
            fraction,
            &point.derive_label("scenes"),
        )?;
        let preds = run_schemes(
            &scenes,
            &taxonomy,
            &expert,
            &general,
            &provider,
            &cfg.encoder,
            &point,
        )?;
        rows.push(OodSweepRow {
            ood_fraction: fraction,
            expert_acc: accuracy(&preds.expert, &preds.truths),
            general_acc: accuracy(&preds.general, &preds.truths),
            hybrid_acc: accuracy(&preds.hybrid, &preds.truths),
        });
    }

    let csv = out_dir.join("ood_sweep.csv");
    write_csv(
        &csv,
        &["ood_fraction", "expert_acc", "general_acc", "hybrid_acc"],
        &rows
            .iter()
            .map(|r| {
                vec![
                    fmt(r.ood_fraction),
                    fmt(r.expert_acc),
                    fmt(r.general_acc),
                    fmt(r.hybrid_acc),
                ]
            })
            .collect::<Vec<_>>(),
    )?;

    // Table-style precision/recall/F1: the mixed reference composition and
    // the same composition with OOD objects excluded.
    let mut prf_rows: Vec<Vec<String>> = Vec::new();
    for (suffix, fraction) in [("mixed", cfg.dataset.ood_fraction), ("no_ood", 0.0)] {
        let point = master.derive_label("prf").derive_label(suffix);
        let scenes = generate_scenes_min_objects(
            &prior,
            &taxonomy,
            cfg.ood_sweep.objects_per_point,
            fraction,
            &point.derive_label("scenes"),
        )?;
        let preds = run_schemes(
            &scenes,
            &taxonomy,
            &expert,
            &general,
            &provider,
            &cfg.encoder,
            &point,
        )?;
        for (model, labels) in [
            ("expert", &preds.expert),
            ("general", &preds.general),
            ("hybrid", &preds.hybrid),
        ] {
            let scores = compute_prf(labels, &preds.truths, Averaging::Micro)?;
            prf_rows.push(vec![
                format!("{model}_{suffix}"),
                fmt(scores.precision),
                fmt(scores.recall),
                fmt(scores.f1),
            ]);
        }
    }
    write_csv(
        &out_dir.join("prf.csv"),
        &["model", "precision", "recall", "f1"],
        &prf_rows,
    )?;

    report_for(
        cfg,
        "ood_sweep",
        vec!["ood_sweep.csv".into(), "prf.csv".into()],
        serde_json::to_value(&rows).expect("rows serialize"),
    )
    .write(out_dir)?;
    Ok(rows)
}

/// Builds the frozen evaluation pool from scenes that have at least one
/// confident detection (the context) and at least one unconfident object
/// (the revision target). Returns the pool and its initially-wrong /
/// initially-correct split.
pub fn build_eval_pool(
    scenes: &[Scene],
    taxonomy: &LabelTaxonomy,
    expert: &ExpertModel,
    general: &GeneralModel,
    rho: f64,
    stream: &RngStream,
) -> Result<(Vec<EvalCase>, EpsilonSplit)> {
    let b = one_hot(taxonomy)?;
    let mut pool = Vec::new();
    for (s, scene) in scenes.iter().enumerate() {
        let scene_stream = stream.derive(s as u64);
        let mut context = ContextInfo::new();
        let mut confident = vec![false; scene.objects.len()];
        for (i, obj) in scene.objects.iter().enumerate() {
            let mut rng = scene_stream.derive(i as u64).derive(STAGE_EXPERT);
            let det = expert_classify(i, obj, expert, taxonomy, &mut rng);
            if det.confidence >= rho {
                context.push(det.label);
                confident[i] = true;
            }
        }
        if context.is_empty() {
            continue;
        }
        for (i, obj) in scene.objects.iter().enumerate() {
            if confident[i] {
                continue;
            }
            let mut rng = scene_stream.derive(i as u64).derive(STAGE_GENERAL);
            let scores = general_score_matrix(obj, general, taxonomy, &mut rng);
            pool.push(EvalCase {
                distribution: cet_extract(&scores, &b)?,
                context: context.clone(),
                true_label: obj.true_label,
            });
        }
    }
    if pool.is_empty() {
        return Err(Error::EmptyInput("evaluation pool"));
    }
    let wrong = pool
        .iter()
        .filter(|c| c.distribution.argmax() != c.true_label)
        .count();
    let eps = EpsilonSplit::from_counts(wrong, pool.len() - wrong)?;
    Ok((pool, eps))
}

/// Raw-count label vectors (L2-normalized co-occurrence rows) written in the
/// embedding file format, giving the second, less sharpened provider.
fn write_count_vectors(
    scenes: &[Scene],
    taxonomy: &LabelTaxonomy,
    path: &Path,
) -> Result<FileEmbedding> {
    let counts = cooccurrence_counts(scenes, taxonomy.num_labels());
    let entries: Vec<(String, Vec<f64>)> = counts
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            let vec = if norm > 0.0 {
                row.iter().map(|v| v / norm).collect()
            } else {
                let mut one_hot = vec![0.0; row.len()];
                one_hot[j] = 1.0;
                one_hot
            };
            (taxonomy.label(j).to_string(), vec)
        })
        .collect();
    let mut buf = Vec::new();
    FileEmbedding::write_vectors(&mut buf, &entries)?;
    std::fs::write(path, &buf)?;
    FileEmbedding::from_path(path)
}

/// The two provider curves of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ProviderCurve {
    pub provider: String,
    pub points: Vec<ParetoPoint>,
}

struct PoolSetup {
    taxonomy: LabelTaxonomy,
    pool: Vec<EvalCase>,
    eps: EpsilonSplit,
    cooc: CooccurrenceEmbedding,
    file: FileEmbedding,
    pool_size: usize,
}

fn build_pool_setup(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PoolSetup> {
    let taxonomy = cfg.taxonomy()?;
    let expert = cfg.expert_for(&taxonomy);
    let general = cfg.general_for(&taxonomy);
    let prior = cfg.prior_for(&taxonomy);
    let master = RngStream::from_seed(cfg.seed);
    let scenes = generate_dataset(
        &prior,
        &taxonomy,
        cfg.dataset.n_scenes,
        cfg.dataset.ood_fraction,
        &master.derive_label("dataset"),
    )?;
    let (pool, eps) = build_eval_pool(
        &scenes,
        &taxonomy,
        &expert,
        &general,
        cfg.encoder.rho,
        &master.derive_label("pool"),
    )?;
    let cooc = CooccurrenceEmbedding::from_scenes(&scenes, &taxonomy);
    let file = write_count_vectors(&scenes, &taxonomy, &out_dir.join("vectors.txt"))?;
    let pool_size = pool.len();
    Ok(PoolSetup {
        taxonomy,
        pool,
        eps,
        cooc,
        file,
        pool_size,
    })
}

/// Correction-rate curves versus `tau` for both embedding providers on a
/// shared grid. Writes `tau_sweep.csv` (long format with a provider column).
pub fn exp_tau_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<ProviderCurve>> {
    ensure_dir(out_dir)?;
    let setup = build_pool_setup(cfg, out_dir)?;
    let curves = vec![
        ProviderCurve {
            provider: setup.cooc.name().to_string(),
            points: pareto_sweep(&setup.pool, &setup.cooc, &setup.taxonomy, &cfg.tau_grid)?,
        },
        ProviderCurve {
            provider: setup.file.name().to_string(),
            points: pareto_sweep(&setup.pool, &setup.file, &setup.taxonomy, &cfg.tau_grid)?,
        },
    ];
    let mut rows = Vec::new();
    for curve in &curves {
        for p in &curve.points {
            rows.push(vec![
                curve.provider.clone(),
                fmt(p.tau),
                fmt(p.r_plus),
                fmt(p.r_minus),
            ]);
        }
    }
    write_csv(
        &out_dir.join("tau_sweep.csv"),
        &["provider", "tau", "r_plus", "r_minus"],
        &rows,
    )?;
    report_for(
        cfg,
        "tau_sweep",
        vec!["tau_sweep.csv".into(), "vectors.txt".into()],
        serde_json::json!({
            "pool_size": setup.pool_size,
            "eps_plus": setup.eps.eps_plus,
            "eps_minus": setup.eps.eps_minus,
        }),
    )
    .write(out_dir)?;
    Ok(curves)
}

/// Output of the Pareto experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ParetoOutcome {
    pub eps: EpsilonSplit,
    pub curves: Vec<ProviderCurve>,
    pub frontier: Vec<ParetoPoint>,
    pub optimum: TauOptimum,
}

fn points_csv(path: &Path, points: &[ParetoPoint]) -> Result<()> {
    write_csv(
        path,
        &["tau", "r_plus", "r_minus"],
        &points
            .iter()
            .map(|p| vec![fmt(p.tau), fmt(p.r_plus), fmt(p.r_minus)])
            .collect::<Vec<_>>(),
    )
}

/// Full Pareto pipeline on the primary (co-occurrence) provider, with the
/// file provider as the comparison curve. Writes `pareto.csv`,
/// `pareto_file.csv`, `pareto_frontier.csv`, and `optimum.json`.
pub fn exp_pareto(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ParetoOutcome> {
    ensure_dir(out_dir)?;
    let setup = build_pool_setup(cfg, out_dir)?;
    let primary = pareto_sweep(&setup.pool, &setup.cooc, &setup.taxonomy, &cfg.tau_grid)?;
    let secondary = pareto_sweep(&setup.pool, &setup.file, &setup.taxonomy, &cfg.tau_grid)?;
    let frontier = pareto_frontier(&primary);
    let optimum = optimize_tau(&primary, &setup.eps)?;

    points_csv(&out_dir.join("pareto.csv"), &primary)?;
    points_csv(&out_dir.join("pareto_file.csv"), &secondary)?;
    points_csv(&out_dir.join("pareto_frontier.csv"), &frontier)?;
    let optimum_json = serde_json::json!({
        "tau": optimum.tau,
        "r_plus": optimum.point.r_plus,
        "r_minus": optimum.point.r_minus,
        "R": optimum.r,
    });
    std::fs::write(
        out_dir.join("optimum.json"),
        serde_json::to_string_pretty(&optimum_json)?,
    )?;

    let outcome = ParetoOutcome {
        eps: setup.eps,
        curves: vec![
            ProviderCurve {
                provider: setup.cooc.name().to_string(),
                points: primary,
            },
            ProviderCurve {
                provider: setup.file.name().to_string(),
                points: secondary,
            },
        ],
        frontier,
        optimum,
    };
    report_for(
        cfg,
        "pareto",
        vec![
            "pareto.csv".into(),
            "pareto_file.csv".into(),
            "pareto_frontier.csv".into(),
            "optimum.json".into(),
            "vectors.txt".into(),
        ],
        serde_json::json!({
            "pool_size": setup.pool_size,
            "eps_plus": setup.eps.eps_plus,
            "eps_minus": setup.eps.eps_minus,
            "tau_star": outcome.optimum.tau,
            "r_star": outcome.optimum.r,
            "certificate_ok": outcome.optimum.certificate_ok,
            "max_violation": outcome.optimum.max_violation,
        }),
    )
    .write(out_dir)?;
    Ok(outcome)
}

/// Per-trial success indicators for one iteration limit; trial `i` draws
/// only from the substream tagged `i`, so truncating the trial count
/// preserves the prefix.
pub fn critic_trial_outcomes(
    gen: &GeneratorModel,
    critic: &CriticModel,
    limit: usize,
    trials: usize,
    min_count: u32,
    max_count: u32,
    stream: &RngStream,
) -> Vec<bool> {
    (0..trials)
        .map(|trial| {
            let mut rng = stream.derive(trial as u64);
            let prompt = Prompt {
                object_label: rng.uniform_usize(gen.num_labels),
                count: min_count + rng.uniform_usize((max_count - min_count + 1) as usize) as u32,
            };
            let (scene, _) = generate_criticize_loop(&prompt, gen, critic, limit, &mut rng);
            scene.matches(&prompt)
        })
        .collect()
}

/// One row of the critic sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticSweepRow {
    pub k: usize,
    pub mc_accuracy: f64,
    pub analytic_accuracy: f64,
    pub ci95_half_width: f64,
}

/// Monte Carlo accuracy of the generate-criticize loop versus the iteration
/// limit, with the analytic overlay. Writes to `out_path`.
pub fn run_critic_sweep(
    params: &CriticParams,
    num_labels: usize,
    seed: u64,
    out_path: &Path,
) -> Result<Vec<CriticSweepRow>> {
    if params.k_max == 0 || params.trials == 0 {
        return Err(Error::Config("critic sweep needs k_max, trials >= 1".into()));
    }
    if params.min_count > params.max_count || params.min_count == 0 {
        return Err(Error::Config("critic sweep count range invalid".into()));
    }
    let gen = GeneratorModel {
        success_prob: params.success_prob,
        mislabel_prob: params.mislabel_prob,
        miscount_spread: vec![(1, 0.7), (2, 0.3)],
        num_labels,
    };
    let critic = CriticModel {
        false_accept: params.false_accept,
        false_reject: params.false_reject,
    };
    let master = RngStream::from_seed(seed).derive_label("critic");
    let mut rows = Vec::new();
    for k in 1..=params.k_max {
        let outcomes = critic_trial_outcomes(
            &gen,
            &critic,
            k,
            params.trials,
            params.min_count,
            params.max_count,
            &master.derive(k as u64),
        );
        let hits = outcomes.iter().filter(|&&h| h).count();
        let mc = hits as f64 / params.trials as f64;
        let analytic = loop_accuracy_analytic(
            params.success_prob,
            params.false_accept,
            params.false_reject,
            k,
        );
        let ci = 1.96 * (mc * (1.0 - mc) / params.trials as f64).sqrt();
        rows.push(CriticSweepRow {
            k,
            mc_accuracy: mc,
            analytic_accuracy: analytic,
            ci95_half_width: ci,
        });
    }
    write_csv(
        out_path,
        &["k", "mc_accuracy", "analytic_accuracy", "ci95_half_width"],
        &rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    fmt(r.mc_accuracy),
                    fmt(r.analytic_accuracy),
                    fmt(r.ci95_half_width),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    Ok(rows)
}

/// Config-driven critic sweep writing `critic.csv` plus a run report.
pub fn exp_critic_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<CriticSweepRow>> {
    ensure_dir(out_dir)?;
    let taxonomy = cfg.taxonomy()?;
    let rows = run_critic_sweep(
        &cfg.critic,
        taxonomy.num_labels(),
        cfg.seed,
        &out_dir.join("critic.csv"),
    )?;
    report_for(
        cfg,
        "critic_sweep",
        vec!["critic.csv".into()],
        serde_json::to_value(&rows).expect("rows serialize"),
    )
    .write(out_dir)?;
    Ok(rows)
}

/// One row of the SNR sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SnrSweepRow {
    pub snr_db: f64,
    pub mean_loss: f64,
    pub ci95_half_width: f64,
}

/// End-to-end mean semantic loss (ground truth vs decoded) across test SNRs
/// plus the training-SNR reference point. Channel noise per scene reuses the
/// same substream at every SNR, so points are paired. Writes
/// `snr_sweep.csv`.
pub fn exp_snr_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<SnrSweepRow>> {
    ensure_dir(out_dir)?;
    let taxonomy = cfg.taxonomy()?;
    let expert = cfg.expert_for(&taxonomy);
    let general = cfg.general_for(&taxonomy);
    let prior = cfg.prior_for(&taxonomy);
    let master = RngStream::from_seed(cfg.seed);

    let codec = match &cfg.codec_path {
        Some(path) => CodebookCodec::load(path)?,
        None => codebook_train(
            &taxonomy,
            &cfg.codec_train,
            &mut master.derive_label("codec-train"),
        )?,
    };

    let provider_scenes = generate_dataset(
        &prior,
        &taxonomy,
        cfg.dataset.n_scenes.min(2000),
        cfg.dataset.ood_fraction,
        &master.derive_label("provider-dataset"),
    )?;
    let provider = CooccurrenceEmbedding::from_scenes(&provider_scenes, &taxonomy);

    let scenes = generate_dataset(
        &prior,
        &taxonomy,
        cfg.snr_sweep.scenes,
        cfg.snr_sweep.ood_fraction,
        &master.derive_label("snr-scenes"),
    )?;
    let enc_stream = master.derive_label("snr-encode");
    let mut sent = Vec::with_capacity(scenes.len());
    let mut truths = Vec::with_capacity(scenes.len());
    for (s, scene) in scenes.iter().enumerate() {
        let (sv, _) = encode_scene(
            scene,
            &expert,
            &general,
            &provider,
            &taxonomy,
            &cfg.encoder,
            &enc_stream.derive(s as u64),
        )?;
        truths.push(
            scene
                .objects
                .iter()
                .map(|o| o.true_label)
                .collect::<Vec<_>>(),
        );
        sent.push(sv.entries);
    }

    let sweep = &cfg.snr_sweep;
    let mut grid: Vec<f64> = Vec::new();
    let mut snr = sweep.from_db;
    while snr <= sweep.to_db + 1e-9 {
        grid.push(snr);
        snr += sweep.step_db;
    }
    if !grid.iter().any(|&g| (g - sweep.reference_db).abs() < 1e-9) {
        grid.push(sweep.reference_db);
    }

    let chan_stream = master.derive_label("snr-channel");
    let mut rows = Vec::new();
    for &snr_db in &grid {
        let cfg_point = ChannelConfig::new(snr_db);
        let mut losses = Vec::with_capacity(scenes.len());
        for s in 0..scenes.len() {
            // Paired noise: the same substream per scene at every SNR.
            let mut chan = chan_stream.derive(s as u64);
            let x = codec.encode_labels(&sent[s])?;
            let y = awgn_apply(&x, &cfg_point, &mut chan);
            let decoded = codec.decode(&y)?;
            losses.push(semantic_loss(
                &truths[s],
                &decoded,
                &provider,
                &taxonomy,
                sweep.alpha,
            )?);
        }
        let n = losses.len() as f64;
        let mean = losses.iter().sum::<f64>() / n;
        let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
        rows.push(SnrSweepRow {
            snr_db,
            mean_loss: mean,
            ci95_half_width: 1.96 * (var / n).sqrt(),
        });
    }

    // Channel-free reference: the loss of the encoding itself.
    let mut channel_free = 0.0;
    for s in 0..scenes.len() {
        channel_free +=
            semantic_loss(&truths[s], &sent[s], &provider, &taxonomy, sweep.alpha)?;
    }
    channel_free /= scenes.len() as f64;

    write_csv(
        &out_dir.join("snr_sweep.csv"),
        &["snr_db", "mean_loss", "ci95_half_width"],
        &rows
            .iter()
            .map(|r| vec![fmt(r.snr_db), fmt(r.mean_loss), fmt(r.ci95_half_width)])
            .collect::<Vec<_>>(),
    )?;
    report_for(
        cfg,
        "snr_sweep",
        vec!["snr_sweep.csv".into()],
        serde_json::json!({
            "channel_free_loss": channel_free,
            "rows": serde_json::to_value(&rows).expect("rows serialize"),
        }),
    )
    .write(out_dir)?;
    Ok(rows)
}

/// Encoded-scene output schema for the `encode` CLI.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct EncodedScene {
    #[serde(rename = "S")]
    pub entries: Vec<usize>,
    pub provenance: Vec<crate::encoder::Provenance>,
    pub context: Vec<usize>,
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct EncodedFile {
    pub scenes: Vec<EncodedScene>,
}

/// Encodes a scene dataset and returns the JSON-ready structure.
pub fn encode_dataset(
    scenes: &[Scene],
    taxonomy: &LabelTaxonomy,
    expert: &ExpertModel,
    general: &GeneralModel,
    provider: &dyn EmbeddingProvider,
    encoder_cfg: &EncoderConfig,
    seed: u64,
) -> Result<EncodedFile> {
    let stream = RngStream::from_seed(seed).derive_label("encode");
    let mut out = Vec::with_capacity(scenes.len());
    for (s, scene) in scenes.iter().enumerate() {
        let (sv, ctx) = encode_scene(
            scene,
            expert,
            general,
            provider,
            taxonomy,
            encoder_cfg,
            &stream.derive(s as u64),
        )?;
        out.push(EncodedScene {
            entries: sv.entries,
            provenance: sv.provenance,
            context: ctx.labels().to_vec(),
        });
    }
    Ok(EncodedFile { scenes: out })
}

/// Token accuracy of a codec across an SNR range (the `channel sweep` CLI).
pub fn channel_accuracy_sweep(
    codec: &CodebookCodec,
    from_db: f64,
    to_db: f64,
    step_db: f64,
    tokens: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if !(step_db > 0.0) {
        return Err(Error::Config("sweep step must be positive".into()));
    }
    let master = RngStream::from_seed(seed).derive_label("channel-sweep");
    let mut rows = Vec::new();
    let mut snr = from_db;
    let mut point = 0u64;
    while snr <= to_db + 1e-9 {
        let mut rng = master.derive(point);
        let acc = codec.token_accuracy(snr, tokens, &mut rng)?;
        rows.push((snr, acc));
        snr += step_db;
        point += 1;
    }
    Ok(rows)
}
