//! Synthetic expert and general classifier models, and the cross-entropy
//! token extraction (CET) that turns a general-model score matrix into a
//! label probability distribution.
//!
//! The expert model stands in for a detector trained on the expert-known
//! classes only: it never emits an OOD label, and on OOD inputs it falls
//! back to a fixed substitute with low confidence. The general model stands
//! in for a large vision-language model: it scores every label, with the
//! true label's vocabulary position carrying most of the mass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::taxonomy::{LabelTaxonomy, OneHotMatrix};

/// A single annotated object: its true label and a blurriness factor in
/// `[0, 1]` that degrades both classifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthObject {
    #[serde(rename = "label")]
    pub true_label: usize,
    pub difficulty: f64,
}

/// An annotated scene: a non-empty ordered object list plus the index of the
/// scene category it was drawn from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    #[serde(rename = "category")]
    pub scene_category: usize,
    pub objects: Vec<GroundTruthObject>,
}

impl Scene {
    pub fn validate(&self, taxonomy: &LabelTaxonomy) -> Result<()> {
        if self.objects.is_empty() {
            return Err(Error::EmptyInput("scene has no objects"));
        }
        for obj in &self.objects {
            if obj.true_label >= taxonomy.num_labels() {
                return Err(Error::LabelOutOfRange(obj.true_label));
            }
            if !(0.0..=1.0).contains(&obj.difficulty) {
                return Err(Error::Config(format!(
                    "difficulty {} outside [0,1]",
                    obj.difficulty
                )));
            }
        }
        Ok(())
    }
}

/// Expert-model output for one object: a label from the expert-known set and
/// a confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub object_index: usize,
    pub label: usize,
    pub confidence: f64,
}

/// Nonnegative `M x P` score matrix (simulated attention rows extracted for
/// the label list).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "score matrix {rows}x{cols} expects {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::Config("score entries must be finite and >= 0".into()));
        }
        Ok(ScoreMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, x: usize) -> f64 {
        self.data[j * self.cols + x]
    }

    pub fn set(&mut self, j: usize, x: usize, v: f64) {
        self.data[j * self.cols + x] = v;
    }
}

/// Normalized `M`-dimensional label distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates nonnegativity and normalization (sum within 1e-9 of 1).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("probability vector"));
        }
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::Config(
                "probability entries must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "probability vector sums to {sum}, expected 1"
            )));
        }
        Ok(ProbabilityVector(values))
    }

    /// Normalizes nonnegative weights; an all-zero weight vector becomes the
    /// uniform distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("weight vector"));
        }
        if weights.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::Config("weights must be finite and >= 0".into()));
        }
        let sum: f64 = weights.iter().sum();
        let values = if sum == 0.0 {
            vec![1.0 / weights.len() as f64; weights.len()]
        } else {
            weights.iter().map(|&w| w / sum).collect()
        };
        Ok(ProbabilityVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest entry; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate().skip(1) {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Beta distribution parameters for confidence sampling.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        rng.beta(self.alpha, self.beta)
    }
}

/// A pair of labels the models tend to confuse, with a leak strength that
/// scales with object difficulty.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConfusablePair {
    pub label_a: usize,
    pub label_b: usize,
    pub leak: f64,
}

impl ConfusablePair {
    fn partner_of(&self, label: usize) -> Option<usize> {
        if label == self.label_a {
            Some(self.label_b)
        } else if label == self.label_b {
            Some(self.label_a)
        } else {
            None
        }
    }
}

/// Synthetic expert classifier configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpertModel {
    pub base_accuracy: f64,
    pub confusable_pairs: Vec<ConfusablePair>,
    /// Fixed substitute label (expert-known) emitted for each OOD input.
    pub ood_map: BTreeMap<usize, usize>,
    pub confidence_correct: BetaParams,
    pub confidence_wrong: BetaParams,
    pub confidence_ood: BetaParams,
}

impl ExpertModel {
    /// Pinned default configuration for a taxonomy: base accuracy 0.85,
    /// confidences Beta(8,2) / Beta(2,4) / Beta(2,6), every OOD label mapped
    /// to "person".
    pub fn default_for(taxonomy: &LabelTaxonomy) -> Self {
        let idx = |name: &str| taxonomy.label_index(name).expect("default label");
        let fallback = idx("person");
        let ood_map = taxonomy.ood().iter().map(|&j| (j, fallback)).collect();
        ExpertModel {
            base_accuracy: 0.85,
            confusable_pairs: vec![
                ConfusablePair {
                    label_a: idx("car"),
                    label_b: idx("truck"),
                    leak: 0.3,
                },
                ConfusablePair {
                    label_a: idx("chair"),
                    label_b: idx("couch"),
                    leak: 0.25,
                },
            ],
            ood_map,
            confidence_correct: BetaParams {
                alpha: 8.0,
                beta: 2.0,
            },
            confidence_wrong: BetaParams {
                alpha: 2.0,
                beta: 4.0,
            },
            confidence_ood: BetaParams {
                alpha: 2.0,
                beta: 6.0,
            },
        }
    }

    /// Probability the expert returns the true label for a known-class
    /// object (the closed form the Monte Carlo tests check against).
    pub fn success_probability(&self, obj: &GroundTruthObject) -> f64 {
        let leak = self
            .confusable_pairs
            .iter()
            .filter(|p| p.partner_of(obj.true_label).is_some())
            .map(|p| p.leak)
            .fold(0.0f64, f64::max);
        (self.base_accuracy - obj.difficulty * leak).max(0.0)
    }
}

/// Synthetic general classifier configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralModel {
    pub base_accuracy: f64,
    pub confusable_pairs: Vec<ConfusablePair>,
    /// Upper bound of the uniform noise added to every score entry.
    pub score_noise: f64,
    /// How strongly difficulty erodes the true label's score.
    pub difficulty_kappa: f64,
}

impl GeneralModel {
    /// Pinned default configuration: base accuracy 0.80, noise 0.3,
    /// difficulty sensitivity 0.6, and cross-class confusions that the
    /// contextual reweighting can act on.
    pub fn default_for(taxonomy: &LabelTaxonomy) -> Self {
        let idx = |name: &str| taxonomy.label_index(name).expect("default label");
        let pair = |a: &str, b: &str, leak: f64| ConfusablePair {
            label_a: idx(a),
            label_b: idx(b),
            leak,
        };
        GeneralModel {
            base_accuracy: 0.80,
            confusable_pairs: vec![
                pair("person", "dog", 0.7),
                pair("cat", "dog", 0.38),
                pair("horse", "cow", 0.38),
                pair("sheep", "cow", 0.38),
                pair("zebra", "horse", 0.38),
                pair("car", "truck", 0.55),
                pair("bus", "truck", 0.5),
                pair("bicycle", "motorcycle", 0.5),
                pair("cup", "bowl", 0.5),
                pair("fork", "spoon", 0.45),
                pair("chair", "couch", 0.5),
                pair("bed", "couch", 0.45),
                pair("tv", "laptop", 0.45),
                pair("backpack", "handbag", 0.45),
                pair("apple", "orange", 0.45),
                pair("pizza", "donut", 0.4),
            ],
            score_noise: 0.3,
            difficulty_kappa: 0.6,
        }
    }
}

/// Runs the expert classifier on one object.
///
/// Known-class objects return the true label with probability
/// `max(0, base_accuracy - difficulty * leak)`, otherwise a confusable (or
/// uniformly random) known label. OOD objects return the model's fixed
/// substitute. Confidence is drawn from the Beta parameters matching the
/// outcome. Deterministic given the stream state.
pub fn expert_classify(
    object_index: usize,
    obj: &GroundTruthObject,
    model: &ExpertModel,
    taxonomy: &LabelTaxonomy,
    rng: &mut RngStream,
) -> Detection {
    if taxonomy.is_ood(obj.true_label) {
        let label = model
            .ood_map
            .get(&obj.true_label)
            .copied()
            .unwrap_or(taxonomy.expert_known()[0]);
        let confidence = model.confidence_ood.sample(rng);
        return Detection {
            object_index,
            label,
            confidence,
        };
    }
    let p_ok = model.success_probability(obj);
    if rng.uniform() < p_ok {
        Detection {
            object_index,
            label: obj.true_label,
            confidence: model.confidence_correct.sample(rng),
        }
    } else {
        let partner = model
            .confusable_pairs
            .iter()
            .filter_map(|p| p.partner_of(obj.true_label).map(|q| (p.leak, q)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, q)| q)
            .filter(|&q| !taxonomy.is_ood(q));
        let label = match partner {
            Some(q) => q,
            None => {
                // Uniform over expert-known labels other than the truth.
                let known = taxonomy.expert_known();
                let truth_pos = known.iter().position(|&k| k == obj.true_label);
                let mut i = rng.uniform_usize(known.len() - truth_pos.map_or(0, |_| 1));
                if let Some(tp) = truth_pos {
                    if i >= tp {
                        i += 1;
                    }
                }
                known[i]
            }
        };
        Detection {
            object_index,
            label,
            confidence: model.confidence_wrong.sample(rng),
        }
    }
}

/// Simulates the general model's score matrix for one object.
///
/// Every entry gets uniform noise in `[0, score_noise)`; the true label's
/// vocabulary position additionally gets
/// `base_accuracy * (1 - difficulty * kappa)`, and each confusable partner's
/// position gets `leak * difficulty`. Entries are clamped at zero.
pub fn general_score_matrix(
    obj: &GroundTruthObject,
    model: &GeneralModel,
    taxonomy: &LabelTaxonomy,
    rng: &mut RngStream,
) -> ScoreMatrix {
    let m = taxonomy.num_labels();
    let p = taxonomy.vocab_size();
    let mut data = Vec::with_capacity(m * p);
    for _ in 0..m * p {
        data.push(rng.uniform() * model.score_noise);
    }
    let mut scores = ScoreMatrix {
        rows: m,
        cols: p,
        data,
    };
    let s_true =
        (model.base_accuracy * (1.0 - obj.difficulty * model.difficulty_kappa)).max(0.0);
    let kt = taxonomy.vocab_index_of_label(obj.true_label);
    scores.set(obj.true_label, kt, scores.get(obj.true_label, kt) + s_true);
    for pair in &model.confusable_pairs {
        if let Some(partner) = pair.partner_of(obj.true_label) {
            let kp = taxonomy.vocab_index_of_label(partner);
            scores.set(partner, kp, scores.get(partner, kp) + pair.leak * obj.difficulty);
        }
    }
    scores
}

/// Cross-entropy token extraction: collapses a score matrix to a label
/// distribution through its one-hot mask.
///
/// `L_j = -sum_x scores[j][x] * b[j][x]`, `D_j = -L_j`, and the output is the
/// sum-normalization of `D`. An all-zero `D` yields the uniform distribution.
pub fn cet_extract(scores: &ScoreMatrix, b: &OneHotMatrix) -> Result<ProbabilityVector> {
    if scores.rows() != b.rows() || scores.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "scores {}x{} vs one-hot {}x{}",
            scores.rows(),
            scores.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut d = Vec::with_capacity(scores.rows());
    for j in 0..scores.rows() {
        let mut loss = 0.0;
        for x in 0..scores.cols() {
            loss -= scores.get(j, x) * b.value(j, x);
        }
        d.push(-loss);
    }
    ProbabilityVector::from_weights(&d)
}
