//! Experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::TauGrid;
use crate::channel::CodebookTrainConfig;
use crate::encoder::EncoderConfig;
use crate::error::{Error, Result};
use crate::perception::{ExpertModel, GeneralModel};
use crate::taxonomy::{build_default_taxonomy, LabelTaxonomy};

use super::dataset::{default_scene_prior, ScenePrior};

fn default_seed() -> u64 {
    42
}

/// Dataset size and composition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DatasetParams {
    pub n_scenes: usize,
    pub ood_fraction: f64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        // Flagship composition: 14,423 scenes at an 8.2% OOD share.
        DatasetParams {
            n_scenes: 14_423,
            ood_fraction: 0.082,
        }
    }
}

/// OOD-proportion sweep settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OodSweepParams {
    pub objects_per_point: usize,
    pub fractions: Vec<f64>,
}

impl Default for OodSweepParams {
    fn default() -> Self {
        OodSweepParams {
            objects_per_point: 2000,
            fractions: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

/// Channel sweep settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SnrSweepParams {
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
    /// Reference point appended after the grid.
    pub reference_db: f64,
    pub scenes: usize,
    pub ood_fraction: f64,
    /// Exact-mismatch weight in the semantic loss.
    pub alpha: f64,
}

impl Default for SnrSweepParams {
    fn default() -> Self {
        SnrSweepParams {
            from_db: -20.0,
            to_db: 5.0,
            step_db: 1.0,
            reference_db: 10.0,
            scenes: 100,
            ood_fraction: 0.08,
            alpha: 0.1,
        }
    }
}

/// Generate-criticize sweep settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticParams {
    pub success_prob: f64,
    pub false_accept: f64,
    pub false_reject: f64,
    pub mislabel_prob: f64,
    pub k_max: usize,
    pub trials: usize,
    pub min_count: u32,
    pub max_count: u32,
}

impl Default for CriticParams {
    fn default() -> Self {
        CriticParams {
            success_prob: 0.78,
            false_accept: 0.0,
            false_reject: 0.0,
            mislabel_prob: 0.2,
            k_max: 6,
            trials: 10_000,
            min_count: 3,
            max_count: 8,
        }
    }
}

/// Full experiment configuration; any omitted block falls back to the
/// pinned defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub taxonomy_path: Option<PathBuf>,
    pub codec_path: Option<PathBuf>,
    pub expert: Option<ExpertModel>,
    pub general: Option<GeneralModel>,
    pub prior: Option<ScenePrior>,
    pub encoder: EncoderConfig,
    pub codec_train: CodebookTrainConfig,
    pub dataset: DatasetParams,
    pub ood_sweep: OodSweepParams,
    pub tau_grid: TauGrid,
    pub snr_sweep: SnrSweepParams,
    pub critic: CriticParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: default_seed(),
            taxonomy_path: None,
            codec_path: None,
            expert: None,
            general: None,
            prior: None,
            encoder: EncoderConfig::default(),
            codec_train: CodebookTrainConfig::default(),
            dataset: DatasetParams::default(),
            ood_sweep: OodSweepParams::default(),
            tau_grid: TauGrid::default(),
            snr_sweep: SnrSweepParams::default(),
            critic: CriticParams::default(),
        }
    }
}

impl ExperimentConfig {
    /// Loads a config file, checking that every referenced file exists.
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.into()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&body)?;
        cfg.check_references()?;
        Ok(cfg)
    }

    pub fn check_references(&self) -> Result<()> {
        for p in [&self.taxonomy_path, &self.codec_path].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
        Ok(())
    }

    /// The CI-scale configuration: a 1,000-scene dataset and a coarser SNR
    /// grid; everything else keeps the pinned defaults.
    pub fn apply_quick(&mut self) {
        self.dataset.n_scenes = 1000;
        self.snr_sweep.step_db = 5.0;
    }

    /// Resolves the taxonomy (file-backed or the built-in default).
    pub fn taxonomy(&self) -> Result<LabelTaxonomy> {
        match &self.taxonomy_path {
            Some(path) => {
                let body =
                    std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.clone()))?;
                Ok(serde_json::from_str(&body)?)
            }
            None => Ok(build_default_taxonomy()),
        }
    }

    pub fn expert_for(&self, taxonomy: &LabelTaxonomy) -> ExpertModel {
        self.expert
            .clone()
            .unwrap_or_else(|| ExpertModel::default_for(taxonomy))
    }

    pub fn general_for(&self, taxonomy: &LabelTaxonomy) -> GeneralModel {
        self.general
            .clone()
            .unwrap_or_else(|| GeneralModel::default_for(taxonomy))
    }

    pub fn prior_for(&self, taxonomy: &LabelTaxonomy) -> ScenePrior {
        self.prior
            .clone()
            .unwrap_or_else(|| default_scene_prior(taxonomy))
    }
}
