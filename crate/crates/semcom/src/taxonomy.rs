//! Label vocabularies and the expert / out-of-distribution partition.
//!
//! A [`LabelTaxonomy`] fixes three aligned spaces: the full vocabulary of
//! tokens (length `P`), the task label list (length `M`, a subset of the
//! vocabulary), and a partition of the labels into an `expert_known` set and
//! an `ood` set. [`one_hot`] maps the label list into vocabulary space as an
//! `M x P` selection matrix.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 80 object categories the default taxonomy is modeled on.
const DEFAULT_LABELS: [&str; 80] = [
    "person",
    "bicycle",
    "car",
    "motorcycle",
    "airplane",
    "bus",
    "train",
    "truck",
    "boat",
    "traffic light",
    "fire hydrant",
    "stop sign",
    "parking meter",
    "bench",
    "bird",
    "cat",
    "dog",
    "horse",
    "sheep",
    "cow",
    "elephant",
    "bear",
    "zebra",
    "giraffe",
    "backpack",
    "umbrella",
    "handbag",
    "tie",
    "suitcase",
    "frisbee",
    "skis",
    "snowboard",
    "sports ball",
    "kite",
    "baseball bat",
    "baseball glove",
    "skateboard",
    "surfboard",
    "tennis racket",
    "bottle",
    "wine glass",
    "cup",
    "fork",
    "knife",
    "spoon",
    "bowl",
    "banana",
    "apple",
    "sandwich",
    "orange",
    "broccoli",
    "carrot",
    "hot dog",
    "pizza",
    "donut",
    "cake",
    "chair",
    "couch",
    "potted plant",
    "bed",
    "dining table",
    "toilet",
    "tv",
    "laptop",
    "mouse",
    "remote",
    "keyboard",
    "cell phone",
    "microwave",
    "oven",
    "toaster",
    "sink",
    "refrigerator",
    "book",
    "clock",
    "vase",
    "scissors",
    "teddy bear",
    "hair drier",
    "toothbrush",
];

/// The ten animal labels treated as out-of-distribution for the expert.
const DEFAULT_OOD: [&str; 10] = [
    "bird", "cat", "dog", "horse", "sheep", "cow", "elephant", "bear", "zebra", "giraffe",
];

/// Default full-vocabulary size (labels plus distractor tokens).
pub const DEFAULT_VOCAB_SIZE: usize = 200;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaxonomyRepr {
    vocab: Vec<String>,
    labels: Vec<String>,
    expert_known: Vec<usize>,
    ood: Vec<usize>,
}

/// Vocabulary, label list, label-to-vocabulary alignment, and the
/// expert/OOD partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TaxonomyRepr", into = "TaxonomyRepr")]
pub struct LabelTaxonomy {
    vocab: Vec<String>,
    labels: Vec<String>,
    label_vocab_index: Vec<usize>,
    expert_known: Vec<usize>,
    ood: Vec<usize>,
    is_ood: Vec<bool>,
    label_lookup: HashMap<String, usize>,
}

impl TryFrom<TaxonomyRepr> for LabelTaxonomy {
    type Error = Error;
    fn try_from(r: TaxonomyRepr) -> Result<Self> {
        LabelTaxonomy::new(r.vocab, r.labels, r.expert_known, r.ood)
    }
}

impl From<LabelTaxonomy> for TaxonomyRepr {
    fn from(t: LabelTaxonomy) -> Self {
        TaxonomyRepr {
            vocab: t.vocab,
            labels: t.labels,
            expert_known: t.expert_known,
            ood: t.ood,
        }
    }
}

impl LabelTaxonomy {
    /// Validates the invariants and computes the label-to-vocabulary map.
    pub fn new(
        vocab: Vec<String>,
        labels: Vec<String>,
        expert_known: Vec<usize>,
        ood: Vec<usize>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Config("label list is empty".into()));
        }
        if vocab.len() < labels.len() {
            return Err(Error::Config(format!(
                "vocabulary ({}) smaller than label list ({})",
                vocab.len(),
                labels.len()
            )));
        }
        let mut vocab_lookup = HashMap::with_capacity(vocab.len());
        for (k, tok) in vocab.iter().enumerate() {
            if vocab_lookup.insert(tok.clone(), k).is_some() {
                return Err(Error::Config(format!("duplicate vocab token {tok:?}")));
            }
        }
        let mut label_lookup = HashMap::with_capacity(labels.len());
        let mut label_vocab_index = Vec::with_capacity(labels.len());
        for (j, lab) in labels.iter().enumerate() {
            if label_lookup.insert(lab.clone(), j).is_some() {
                return Err(Error::Config(format!("duplicate label {lab:?}")));
            }
            match vocab_lookup.get(lab) {
                Some(&k) => label_vocab_index.push(k),
                None => {
                    return Err(Error::Config(format!(
                        "label {lab:?} missing from vocabulary"
                    )))
                }
            }
        }
        let m = labels.len();
        let mut is_ood = vec![false; m];
        let mut seen = vec![false; m];
        for &j in &ood {
            if j >= m {
                return Err(Error::LabelOutOfRange(j));
            }
            is_ood[j] = true;
            seen[j] = true;
        }
        for &j in &expert_known {
            if j >= m {
                return Err(Error::LabelOutOfRange(j));
            }
            if seen[j] && is_ood[j] {
                return Err(Error::Config(format!(
                    "label {j} listed as both expert-known and OOD"
                )));
            }
            seen[j] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config(
                "expert_known and ood must partition the label set".into(),
            ));
        }
        let mut expert_known = expert_known;
        let mut ood = ood;
        expert_known.sort_unstable();
        ood.sort_unstable();
        Ok(LabelTaxonomy {
            vocab,
            labels,
            label_vocab_index,
            expert_known,
            ood,
            is_ood,
            label_lookup,
        })
    }

    /// Number of labels `M`.
    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    /// Vocabulary size `P`.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    /// Vocabulary position `k(j)` of label `j`.
    pub fn vocab_index_of_label(&self, j: usize) -> usize {
        self.label_vocab_index[j]
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.label_lookup.get(name).copied()
    }

    pub fn expert_known(&self) -> &[usize] {
        &self.expert_known
    }

    pub fn ood(&self) -> &[usize] {
        &self.ood
    }

    pub fn is_ood(&self, j: usize) -> bool {
        self.is_ood[j]
    }
}

/// Builds the default 80-label taxonomy: 70 expert-known classes, 10 animal
/// OOD classes, and a 200-token vocabulary interleaving the labels with
/// deterministic distractor tokens (`tok_000`, `tok_001`, ...).
pub fn build_default_taxonomy() -> LabelTaxonomy {
    let labels: Vec<String> = DEFAULT_LABELS.iter().map(|s| s.to_string()).collect();
    let n_distractors = DEFAULT_VOCAB_SIZE - labels.len();
    let distractors: Vec<String> = (0..n_distractors).map(|i| format!("tok_{i:03}")).collect();
    // Interleave label/distractor so label positions in the vocabulary are
    // nontrivial (k(j) = 2j), then append the remaining distractors.
    let mut vocab = Vec::with_capacity(DEFAULT_VOCAB_SIZE);
    for (j, lab) in labels.iter().enumerate() {
        vocab.push(lab.clone());
        if j < n_distractors {
            vocab.push(distractors[j].clone());
        }
    }
    for d in &distractors[labels.len().min(n_distractors)..] {
        vocab.push(d.clone());
    }
    let ood: Vec<usize> = DEFAULT_OOD
        .iter()
        .map(|name| labels.iter().position(|l| l == name).expect("animal label"))
        .collect();
    let expert_known: Vec<usize> = (0..labels.len()).filter(|j| !ood.contains(j)).collect();
    LabelTaxonomy::new(vocab, labels, expert_known, ood).expect("default taxonomy is valid")
}

/// One-hot selection matrix `b` (`M x P`): row `j` has its single 1 at the
/// vocabulary position of label `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneHotMatrix {
    rows: usize,
    cols: usize,
    hot: Vec<usize>,
}

impl OneHotMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `b[j][k]` as a float.
    pub fn value(&self, j: usize, k: usize) -> f64 {
        if self.hot[j] == k {
            1.0
        } else {
            0.0
        }
    }

    /// Column of the single 1 in row `j`.
    pub fn hot_column(&self, j: usize) -> usize {
        self.hot[j]
    }
}

/// One-hot encoding from raw label / vocabulary lists. Fails if a label is
/// missing from the vocabulary.
pub fn one_hot_from_lists(labels: &[String], vocab: &[String]) -> Result<OneHotMatrix> {
    let mut hot = Vec::with_capacity(labels.len());
    for lab in labels {
        match vocab.iter().position(|tok| tok == lab) {
            Some(k) => hot.push(k),
            None => {
                return Err(Error::Config(format!(
                    "label {lab:?} missing from vocabulary"
                )))
            }
        }
    }
    Ok(OneHotMatrix {
        rows: labels.len(),
        cols: vocab.len(),
        hot,
    })
}

/// One-hot encoding of a taxonomy's label list against its vocabulary.
pub fn one_hot(taxonomy: &LabelTaxonomy) -> Result<OneHotMatrix> {
    one_hot_from_lists(taxonomy.labels(), taxonomy.vocab())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_taxonomy_shape() {
        let t = build_default_taxonomy();
        assert_eq!(t.num_labels(), 80);
        assert_eq!(t.ood().len(), 10);
        assert_eq!(t.expert_known().len(), 70);
        assert_eq!(t.vocab_size(), DEFAULT_VOCAB_SIZE);
    }

    #[test]
    fn label_vocab_alignment() {
        let t = build_default_taxonomy();
        for j in 0..t.num_labels() {
            assert_eq!(t.vocab()[t.vocab_index_of_label(j)], t.label(j));
        }
    }

    #[test]
    fn one_hot_has_one_per_row() {
        let t = build_default_taxonomy();
        let b = one_hot(&t).unwrap();
        let mut ones = 0;
        for j in 0..b.rows() {
            for k in 0..b.cols() {
                if b.value(j, k) == 1.0 {
                    ones += 1;
                }
            }
        }
        assert_eq!(ones, 80);
    }

    #[test]
    fn one_hot_small_example() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let vocab = vec!["a".to_string(), "x".to_string(), "b".to_string()];
        let b = one_hot_from_lists(&labels, &vocab).unwrap();
        let row0: Vec<f64> = (0..3).map(|k| b.value(0, k)).collect();
        let row1: Vec<f64> = (0..3).map(|k| b.value(1, k)).collect();
        assert_eq!(row0, vec![1.0, 0.0, 0.0]);
        assert_eq!(row1, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn one_hot_identity_case() {
        let labels: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        let b = one_hot_from_lists(&labels, &labels).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(b.value(j, k), if j == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn one_hot_matches_linear_scan() {
        let t = build_default_taxonomy();
        let b = one_hot(&t).unwrap();
        for (j, lab) in t.labels().iter().enumerate() {
            let k = t.vocab().iter().position(|tok| tok == lab).unwrap();
            assert_eq!(b.hot_column(j), k);
        }
    }

    #[test]
    fn one_hot_missing_label_fails() {
        let labels = vec!["a".to_string(), "z".to_string()];
        let vocab = vec!["a".to_string(), "b".to_string()];
        assert!(one_hot_from_lists(&labels, &vocab).is_err());
    }

    #[test]
    fn row_and_column_sums() {
        let t = build_default_taxonomy();
        let b = one_hot(&t).unwrap();
        for j in 0..b.rows() {
            let s: f64 = (0..b.cols()).map(|k| b.value(j, k)).sum();
            assert_eq!(s, 1.0);
        }
        for k in 0..b.cols() {
            let s: f64 = (0..b.rows()).map(|j| b.value(j, k)).sum();
            assert!(s == 0.0 || s == 1.0);
        }
    }

    #[test]
    fn json_round_trip_is_identity() {
        let t = build_default_taxonomy();
        let json = serde_json::to_string(&t).unwrap();
        let back: LabelTaxonomy = serde_json::from_str(&json).unwrap();
        assert_eq!(back.vocab(), t.vocab());
        assert_eq!(back.labels(), t.labels());
        assert_eq!(back.expert_known(), t.expert_known());
        assert_eq!(back.ood(), t.ood());
        for j in 0..t.num_labels() {
            assert_eq!(back.vocab_index_of_label(j), t.vocab_index_of_label(j));
        }
    }

    #[test]
    fn rejects_overlapping_partition() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let vocab = labels.clone();
        assert!(LabelTaxonomy::new(vocab, labels, vec![0, 1], vec![1]).is_err());
    }

    #[test]
    fn rejects_incomplete_partition() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let vocab = labels.clone();
        assert!(LabelTaxonomy::new(vocab, labels, vec![0], vec![]).is_err());
    }
}
