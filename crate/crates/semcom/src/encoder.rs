//! The two-plan semantic encoding pipeline.
//!
//! Pass 1 runs the expert classifier on every object and keeps detections at
//! or above the confidence threshold `rho`; those form the scene's
//! contextual information. Pass 2 re-identifies each below-threshold object
//! with the general model, optionally revised by the contextual
//! re-weighting. The context is frozen after pass 1 — resolving one blurry
//! object never influences another.

use serde::{Deserialize, Serialize};

use crate::context::{revise_identification, ContextInfo, EmbeddingProvider};
use crate::error::Result;
use crate::perception::{
    cet_extract, expert_classify, general_score_matrix, ExpertModel, GeneralModel, Scene,
};
use crate::rng::RngStream;
use crate::taxonomy::{one_hot, LabelTaxonomy};

/// Which pipeline produced a semantic entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "A")]
    PlanA,
    #[serde(rename = "B")]
    PlanB,
}

/// The ordered semantic payload of a scene with per-entry provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticVector {
    pub entries: Vec<usize>,
    pub provenance: Vec<Provenance>,
}

impl SemanticVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Encoder settings: confidence threshold, re-weighting exponent, and
/// whether the Bayesian revision is applied at all.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub rho: f64,
    pub tau: f64,
    pub bayes_enabled: bool,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            rho: 0.7,
            tau: 0.2,
            bayes_enabled: true,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(crate::error::Error::Config(format!(
                "rho {} outside [0,1]",
                self.rho
            )));
        }
        if self.tau < 0.0 || !self.tau.is_finite() {
            return Err(crate::error::Error::Config(format!(
                "tau {} must be finite and >= 0",
                self.tau
            )));
        }
        Ok(())
    }
}

// Substream tags within one object's stream.
const STAGE_EXPERT: u64 = 0;
const STAGE_GENERAL: u64 = 1;

/// Encodes a scene into its semantic vector plus the contextual information
/// used for revision.
///
/// The boundary case `confidence == rho` stays with the expert result.
/// Object `i` draws from `rng.derive(i)`, split again per stage, so scenes
/// and objects can be processed in any order with identical results.
pub fn encode_scene(
    scene: &Scene,
    expert: &ExpertModel,
    general: &GeneralModel,
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
    cfg: &EncoderConfig,
    rng: &RngStream,
) -> Result<(SemanticVector, ContextInfo)> {
    cfg.validate()?;
    scene.validate(taxonomy)?;
    let b = one_hot(taxonomy)?;

    // Pass 1: expert detections and the confident context.
    let mut detections = Vec::with_capacity(scene.objects.len());
    let mut context = ContextInfo::new();
    for (i, obj) in scene.objects.iter().enumerate() {
        let mut stream = rng.derive(i as u64).derive(STAGE_EXPERT);
        let det = expert_classify(i, obj, expert, taxonomy, &mut stream);
        if det.confidence >= cfg.rho {
            context.push(det.label);
        }
        detections.push(det);
    }

    // Pass 2: general-model re-identification of unconfident objects.
    let mut entries = Vec::with_capacity(scene.objects.len());
    let mut provenance = Vec::with_capacity(scene.objects.len());
    for (i, obj) in scene.objects.iter().enumerate() {
        if detections[i].confidence >= cfg.rho {
            entries.push(detections[i].label);
            provenance.push(Provenance::PlanA);
            continue;
        }
        let mut stream = rng.derive(i as u64).derive(STAGE_GENERAL);
        let scores = general_score_matrix(obj, general, taxonomy, &mut stream);
        let p = cet_extract(&scores, &b)?;
        let label = if cfg.bayes_enabled {
            revise_identification(&p, &context, provider, taxonomy, cfg.tau)?
        } else {
            p.argmax()
        };
        entries.push(label);
        provenance.push(Provenance::PlanB);
    }

    Ok((
        SemanticVector {
            entries,
            provenance,
        },
        context,
    ))
}
