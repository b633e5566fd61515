//! Contextual re-weighting of label distributions.
//!
//! Confident detections in a scene form contextual information. Embedding
//! that context and each candidate label into a common vector space gives a
//! per-label cosine similarity; raising it to an exponent `tau` and applying
//! Bayes' rule reshapes the label distribution toward labels that fit the
//! context. `tau = 0` is the identity, large `tau` trusts context
//! aggressively.
//!
//! Two providers implement the embedding space: [`CooccurrenceEmbedding`]
//! builds label vectors from positive-PMI rows of a scene corpus's label
//! co-occurrence counts, and [`FileEmbedding`] loads externally trained
//! per-token vectors from a text file.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::{ProbabilityVector, Scene};
use crate::taxonomy::LabelTaxonomy;

/// Cosine values are clamped to `[COSINE_FLOOR, 1]` before exponentiation so
/// fractional exponents stay defined for any embedding.
pub const COSINE_FLOOR: f64 = 1e-6;

/// A dense embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        EmbeddingVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Deterministic token-to-vector map with a fixed dimension.
pub trait EmbeddingProvider {
    fn dim(&self) -> usize;

    /// Vector for a single token; unknown tokens are an error.
    fn token_vector(&self, token: &str) -> Result<&[f64]>;

    /// Human-readable provider name used in CSV output.
    fn name(&self) -> &str;
}

/// Phrase embedding: the arithmetic mean of the per-token vectors.
pub fn embed_text(provider: &dyn EmbeddingProvider, tokens: &[&str]) -> Result<EmbeddingVector> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("embed_text token sequence"));
    }
    let mut acc = vec![0.0; provider.dim()];
    for tok in tokens {
        let v = provider.token_vector(tok)?;
        for (a, x) in acc.iter_mut().zip(v.iter()) {
            *a += x;
        }
    }
    let n = tokens.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Ok(EmbeddingVector(acc))
}

/// Cosine similarity between two equal-dimension nonzero vectors.
pub fn cosine_angle(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cosine between dims {} and {}",
            u.len(),
            v.len()
        )));
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v.iter()) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Numeric("cosine of a zero-norm vector".into()));
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

/// Contextual similarity: the cosine clamped to `[COSINE_FLOOR, 1]`, raised
/// to the exponent `tau`.
pub fn contextual_similarity(ca: f64, tau: f64) -> f64 {
    assert!(tau >= 0.0, "tau must be nonnegative");
    ca.clamp(COSINE_FLOOR, 1.0).powf(tau)
}

/// Bayesian re-weighting: `P'_j = cs_j * P_j / sum_n(P_n * cs_n)`.
pub fn bayes_reweight(p: &ProbabilityVector, cs: &[f64]) -> Result<ProbabilityVector> {
    if p.len() != cs.len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution of {} labels vs {} similarities",
            p.len(),
            cs.len()
        )));
    }
    if cs.iter().any(|&c| !c.is_finite() || c <= 0.0) {
        return Err(Error::Config(
            "contextual similarities must be finite and > 0".into(),
        ));
    }
    let denom: f64 = p.values().iter().zip(cs.iter()).map(|(pj, cj)| pj * cj).sum();
    if denom == 0.0 {
        return Err(Error::Numeric("re-weighting denominator is zero".into()));
    }
    let values = p
        .values()
        .iter()
        .zip(cs.iter())
        .map(|(pj, cj)| cj * pj / denom)
        .collect();
    ProbabilityVector::new(values)
}

/// The multiset of confidently identified labels in a scene, in detection
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextInfo {
    labels: Vec<usize>,
}

impl ContextInfo {
    pub fn new() -> Self {
        ContextInfo::default()
    }

    pub fn from_labels(labels: Vec<usize>) -> Self {
        ContextInfo { labels }
    }

    pub fn push(&mut self, label: usize) {
        self.labels.push(label);
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Embeds the concatenated context (mean of its label-token vectors).
pub fn context_embedding(
    context: &ContextInfo,
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
) -> Result<EmbeddingVector> {
    let tokens: Vec<&str> = context.labels().iter().map(|&j| taxonomy.label(j)).collect();
    embed_text(provider, &tokens)
}

/// Cosine of the context embedding against every label embedding.
pub fn context_ca_vector(
    context: &ContextInfo,
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
) -> Result<Vec<f64>> {
    let t_context = context_embedding(context, provider, taxonomy)?;
    let mut cas = Vec::with_capacity(taxonomy.num_labels());
    for j in 0..taxonomy.num_labels() {
        let t_label = provider.token_vector(taxonomy.label(j))?;
        cas.push(cosine_angle(t_context.values(), t_label)?);
    }
    Ok(cas)
}

/// Revised distribution for a precomputed cosine vector.
pub fn reweight_with_ca(
    p: &ProbabilityVector,
    cas: &[f64],
    tau: f64,
) -> Result<ProbabilityVector> {
    let cs: Vec<f64> = cas.iter().map(|&ca| contextual_similarity(ca, tau)).collect();
    bayes_reweight(p, &cs)
}

/// Picks the final label for a distribution given scene context.
///
/// Empty context or `tau == 0` select the raw argmax (the re-weighting chain
/// is the identity there); otherwise the distribution is re-weighted by the
/// exponentiated context cosines and the argmax of the revision is returned.
/// Ties resolve to the lowest label index.
pub fn revise_identification(
    p: &ProbabilityVector,
    context: &ContextInfo,
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
    tau: f64,
) -> Result<usize> {
    if context.is_empty() || tau == 0.0 {
        return Ok(p.argmax());
    }
    let cas = context_ca_vector(context, provider, taxonomy)?;
    Ok(reweight_with_ca(p, &cas, tau)?.argmax())
}

fn lookup_normalized<'a>(
    index: &HashMap<String, usize>,
    vectors: &'a [Vec<f64>],
    token: &str,
    provider: &str,
) -> Result<&'a [f64]> {
    if let Some(&i) = index.get(token) {
        return Ok(&vectors[i]);
    }
    // Vector files commonly store multi-word tokens with underscores.
    let underscored = token.replace(' ', "_");
    if let Some(&i) = index.get(&underscored) {
        return Ok(&vectors[i]);
    }
    Err(Error::UnknownToken(format!("{token} ({provider})")))
}

/// Label embeddings from positive PMI over scene co-occurrence counts.
///
/// The vector of label `j` is row `j` of the PPMI matrix of pairwise label
/// co-occurrences (within a scene), unit-normalized; dimension equals the
/// number of labels. A label that never co-occurs falls back to its one-hot
/// self vector so every embedding stays nonzero.
#[derive(Debug, Clone)]
pub struct CooccurrenceEmbedding {
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl CooccurrenceEmbedding {
    pub fn from_scenes(scenes: &[Scene], taxonomy: &LabelTaxonomy) -> Self {
        let counts = cooccurrence_counts(scenes, taxonomy.num_labels());
        let vectors = ppmi_rows(&counts);
        Self::from_vectors(taxonomy, vectors)
    }

    fn from_vectors(taxonomy: &LabelTaxonomy, vectors: Vec<Vec<f64>>) -> Self {
        let tokens: Vec<String> = taxonomy.labels().to_vec();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        CooccurrenceEmbedding {
            tokens,
            vectors,
            index,
        }
    }
}

impl EmbeddingProvider for CooccurrenceEmbedding {
    fn dim(&self) -> usize {
        self.tokens.len()
    }

    fn token_vector(&self, token: &str) -> Result<&[f64]> {
        lookup_normalized(&self.index, &self.vectors, token, "cooccurrence")
    }

    fn name(&self) -> &str {
        "cooccurrence"
    }
}

/// Pairwise label co-occurrence counts over a scene corpus (including
/// same-label pairs within one scene).
pub fn cooccurrence_counts(scenes: &[Scene], num_labels: usize) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0.0; num_labels]; num_labels];
    for scene in scenes {
        for (i, a) in scene.objects.iter().enumerate() {
            for b in scene.objects.iter().skip(i + 1) {
                counts[a.true_label][b.true_label] += 1.0;
                counts[b.true_label][a.true_label] += 1.0;
            }
        }
    }
    counts
}

/// Positive-PMI rows of a count matrix, unit-normalized. Empty rows become
/// one-hot self vectors.
pub fn ppmi_rows(counts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = counts.len();
    let row_sums: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let mut rows = Vec::with_capacity(n);
    for a in 0..n {
        let mut row = vec![0.0; n];
        if row_sums[a] > 0.0 {
            for b in 0..n {
                if counts[a][b] > 0.0 && row_sums[b] > 0.0 {
                    let pmi = (counts[a][b] * total / (row_sums[a] * row_sums[b])).ln();
                    row[b] = pmi.max(0.0);
                }
            }
        }
        let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut row {
                *v /= norm;
            }
        } else {
            row[a] = 1.0;
        }
        rows.push(row);
    }
    rows
}

/// Per-token vectors loaded from a text file.
///
/// Format: one `token v1 v2 ... vG` line per token (space-separated
/// decimals); an optional first line `COUNT DIM` is auto-detected. Vectors
/// are used exactly as stored.
#[derive(Debug, Clone)]
pub struct FileEmbedding {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl FileEmbedding {
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut vectors: Vec<Vec<f64>> = Vec::new();
        let mut index = HashMap::new();
        let mut dim: Option<usize> = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let token = parts.next().expect("non-empty line").to_string();
            let rest: Vec<&str> = parts.collect();
            // `COUNT DIM` header: exactly two integer fields on the first line.
            if lineno == 0 && rest.len() == 1 {
                if let (Ok(_), Ok(d)) = (token.parse::<usize>(), rest[0].parse::<usize>()) {
                    dim = Some(d);
                    continue;
                }
            }
            let values: Vec<f64> = rest
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::Config(format!("line {}: bad number {s:?}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if values.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: token {token:?} has no vector",
                    lineno + 1
                )));
            }
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::Config(format!(
                        "line {}: dimension {} != {}",
                        lineno + 1,
                        values.len(),
                        d
                    )))
                }
                _ => {}
            }
            if index.insert(token.clone(), vectors.len()).is_some() {
                return Err(Error::Config(format!("duplicate token {token:?}")));
            }
            vectors.push(values);
        }
        let dim = dim.ok_or(Error::EmptyInput("embedding file"))?;
        if vectors.is_empty() {
            return Err(Error::EmptyInput("embedding file"));
        }
        Ok(FileEmbedding {
            dim,
            vectors,
            index,
        })
    }

    /// Writes vectors in the same format (with `COUNT DIM` header); spaces in
    /// tokens are stored as underscores.
    pub fn write_vectors<W: std::io::Write>(
        mut w: W,
        entries: &[(String, Vec<f64>)],
    ) -> Result<()> {
        let dim = entries.first().map_or(0, |(_, v)| v.len());
        writeln!(w, "{} {}", entries.len(), dim)?;
        for (token, vec) in entries {
            write!(w, "{}", token.replace(' ', "_"))?;
            for v in vec {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

impl EmbeddingProvider for FileEmbedding {
    fn dim(&self) -> usize {
        self.dim
    }

    fn token_vector(&self, token: &str) -> Result<&[f64]> {
        lookup_normalized(&self.index, &self.vectors, token, "file")
    }

    fn name(&self) -> &str {
        "file"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::GroundTruthObject;
    use crate::rng::RngStream;
    use crate::taxonomy::build_default_taxonomy;
    use proptest::prelude::*;

    struct ToyProvider {
        tokens: Vec<(&'static str, Vec<f64>)>,
    }

    impl EmbeddingProvider for ToyProvider {
        fn dim(&self) -> usize {
            self.tokens[0].1.len()
        }
        fn token_vector(&self, token: &str) -> Result<&[f64]> {
            self.tokens
                .iter()
                .find(|(t, _)| *t == token)
                .map(|(_, v)| v.as_slice())
                .ok_or_else(|| Error::UnknownToken(token.into()))
        }
        fn name(&self) -> &str {
            "toy"
        }
    }

    fn toy() -> ToyProvider {
        ToyProvider {
            tokens: vec![
                ("a", vec![1.0, 0.0, 0.0]),
                ("b", vec![0.0, 2.0, 0.0]),
                ("c", vec![0.0, 0.0, 3.0]),
            ],
        }
    }

    #[test]
    fn embed_single_token_is_its_vector() {
        let p = toy();
        let e = embed_text(&p, &["b"]).unwrap();
        assert_eq!(e.values(), &[0.0, 2.0, 0.0]);
    }

    #[test]
    fn embed_repeated_token_is_idempotent() {
        let p = toy();
        let once = embed_text(&p, &["a"]).unwrap();
        let twice = embed_text(&p, &["a", "a"]).unwrap();
        assert_eq!(once.values(), twice.values());
    }

    #[test]
    fn embed_two_tokens_is_mean() {
        let p = toy();
        let e = embed_text(&p, &["a", "b"]).unwrap();
        // Independent recomputation of the two-vector average.
        assert_eq!(e.values(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn embed_unknown_token_errors() {
        let p = toy();
        assert!(matches!(
            embed_text(&p, &["zzz"]),
            Err(Error::UnknownToken(_))
        ));
        assert!(matches!(embed_text(&p, &[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn cosine_identical_vectors() {
        let v = [0.3, -0.7, 2.0];
        assert!((cosine_angle(&v, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_orthogonal() {
        assert_eq!(cosine_angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_hand_value() {
        // (1,1,0).(1,0,0) = 1/sqrt(2).
        let got = cosine_angle(&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((got - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn cosine_rejects_zero_and_mismatch() {
        assert!(cosine_angle(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(cosine_angle(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn cosine_is_symmetric() {
        let u = [0.2, 0.5, -0.1];
        let v = [1.0, -0.4, 0.9];
        assert_eq!(
            cosine_angle(&u, &v).unwrap(),
            cosine_angle(&v, &u).unwrap()
        );
    }

    #[test]
    fn similarity_exponent_cases() {
        assert_eq!(contextual_similarity(0.42, 0.0), 1.0);
        assert_eq!(contextual_similarity(1.0, 3.7), 1.0);
        assert!((contextual_similarity(0.25, 2.0) - 0.0625).abs() < 1e-15);
        // Negative cosines clamp to the floor.
        assert_eq!(
            contextual_similarity(-0.5, 1.0),
            COSINE_FLOOR
        );
    }

    #[test]
    fn reweight_arithmetic_example() {
        let p = ProbabilityVector::new(vec![0.4, 0.6]).unwrap();
        let out = bayes_reweight(&p, &[0.9, 0.5]).unwrap();
        assert!((out.values()[0] - 0.36 / 0.66).abs() < 1e-12);
        assert!((out.values()[1] - 0.30 / 0.66).abs() < 1e-12);
    }

    #[test]
    fn reweight_constant_similarities_is_identity() {
        let p = ProbabilityVector::from_weights(&[0.2, 0.5, 0.3]).unwrap();
        for c in [1.0, 0.25, 7.0] {
            let out = bayes_reweight(&p, &[c, c, c]).unwrap();
            for (a, b) in out.values().iter().zip(p.values().iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reweight_rejects_nonpositive_similarity() {
        let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        assert!(bayes_reweight(&p, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn revise_empty_context_and_tau_zero_pass_through() {
        let t = build_default_taxonomy();
        let provider = default_cooc(&t);
        let mut weights = vec![0.0; t.num_labels()];
        weights[17] = 3.0;
        weights[4] = 1.0;
        let p = ProbabilityVector::from_weights(&weights).unwrap();
        let empty = ContextInfo::new();
        assert_eq!(
            revise_identification(&p, &empty, &provider, &t, 2.0).unwrap(),
            17
        );
        let ctx = ContextInfo::from_labels(vec![0, 0, 13]);
        assert_eq!(
            revise_identification(&p, &ctx, &provider, &t, 0.0).unwrap(),
            17
        );
    }

    fn default_cooc(t: &LabelTaxonomy) -> CooccurrenceEmbedding {
        // A small sports-flavored corpus for the unit tests.
        let mk = |labels: &[&str]| Scene {
            scene_category: 0,
            objects: labels
                .iter()
                .map(|n| GroundTruthObject {
                    true_label: t.label_index(n).unwrap(),
                    difficulty: 0.0,
                })
                .collect(),
        };
        let scenes = vec![
            mk(&["person", "sports ball", "bench", "person"]),
            mk(&["person", "sports ball", "person"]),
            mk(&["person", "bench", "backpack"]),
            mk(&["dog", "couch", "tv"]),
            mk(&["dog", "cat", "couch"]),
            mk(&["car", "truck", "person", "traffic light"]),
        ];
        CooccurrenceEmbedding::from_scenes(&scenes, t)
    }

    #[test]
    fn sports_context_rescues_person_from_dog() {
        let t = build_default_taxonomy();
        let provider = default_cooc(&t);
        let person = t.label_index("person").unwrap();
        let dog = t.label_index("dog").unwrap();
        let ball = t.label_index("sports ball").unwrap();
        let bench = t.label_index("bench").unwrap();
        // Raw distribution slightly prefers "dog".
        let mut weights = vec![0.0; t.num_labels()];
        weights[dog] = 0.52;
        weights[person] = 0.48;
        let p = ProbabilityVector::from_weights(&weights).unwrap();
        let ctx = ContextInfo::from_labels(vec![
            person, person, person, person, person, ball, ball, bench,
        ]);
        let tau = 1.7;
        let got = revise_identification(&p, &ctx, &provider, &t, tau).unwrap();
        assert_eq!(got, person);

        // Straight-line recomputation of the full chain.
        let tokens: Vec<&str> = ctx.labels().iter().map(|&j| t.label(j)).collect();
        let t_ctx = embed_text(&provider, &tokens).unwrap();
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut denom = 0.0;
        let mut numerators = vec![0.0; t.num_labels()];
        for j in 0..t.num_labels() {
            let ca = cosine_angle(t_ctx.values(), provider.token_vector(t.label(j)).unwrap())
                .unwrap();
            let cs = ca.clamp(COSINE_FLOOR, 1.0).powf(tau);
            numerators[j] = cs * p.values()[j];
            denom += p.values()[j] * cs;
        }
        for (j, &num) in numerators.iter().enumerate() {
            let pj = num / denom;
            if pj > best.1 {
                best = (j, pj);
            }
        }
        assert_eq!(best.0, got);
    }

    #[test]
    fn odds_ratio_monotone_in_tau() {
        let mut rng = RngStream::from_seed(2024);
        for _ in 0..200 {
            let m = 6;
            let weights: Vec<f64> = (0..m).map(|_| rng.uniform() + 0.01).collect();
            let p = ProbabilityVector::from_weights(&weights).unwrap();
            let cas: Vec<f64> = (0..m).map(|_| rng.uniform()).collect();
            let (j, k) = (0, 1);
            let (ca_j, ca_k) = (
                cas[j].clamp(COSINE_FLOOR, 1.0),
                cas[k].clamp(COSINE_FLOOR, 1.0),
            );
            if ca_j <= ca_k {
                continue;
            }
            let mut last = f64::NEG_INFINITY;
            for tau in [0.5, 1.0, 2.0, 4.0] {
                let out = reweight_with_ca(&p, &cas, tau).unwrap();
                let ratio = out.values()[j] / out.values()[k];
                assert!(ratio > last, "ratio not increasing at tau={tau}");
                last = ratio;
            }
        }
    }

    #[test]
    fn file_embedding_parsing() {
        let body = "3 2\nperson 1.0 0.5\nsports_ball 0.5 1.0\ndog -0.2 0.7\n";
        let fe = FileEmbedding::from_reader(body.as_bytes()).unwrap();
        assert_eq!(fe.dim(), 2);
        assert_eq!(fe.token_vector("person").unwrap(), &[1.0, 0.5]);
        // Space-separated query matches the underscored stored token.
        assert_eq!(fe.token_vector("sports ball").unwrap(), &[0.5, 1.0]);
        assert!(fe.token_vector("zebra").is_err());

        // No header variant.
        let fe2 = FileEmbedding::from_reader("x 1 2 3\ny 4 5 6\n".as_bytes()).unwrap();
        assert_eq!(fe2.dim(), 3);

        // Inconsistent dimensions rejected.
        assert!(FileEmbedding::from_reader("x 1 2\ny 3\n".as_bytes()).is_err());
        assert!(FileEmbedding::from_reader("".as_bytes()).is_err());
    }

    #[test]
    fn ppmi_fallback_rows_are_one_hot() {
        // A label that never co-occurs must still embed.
        let counts = vec![
            vec![0.0, 2.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let rows = ppmi_rows(&counts);
        assert_eq!(rows[2], vec![0.0, 0.0, 1.0]);
        let n0: f64 = rows[0].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n0 - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn reweight_output_is_normalized(seed in 0u64..3000) {
            let mut rng = RngStream::from_seed(seed);
            let m = 8;
            let weights: Vec<f64> = (0..m).map(|_| rng.uniform() + 1e-6).collect();
            let p = ProbabilityVector::from_weights(&weights).unwrap();
            let cs: Vec<f64> = (0..m).map(|_| rng.uniform() + 1e-6).collect();
            let out = bayes_reweight(&p, &cs).unwrap();
            let sum: f64 = out.values().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }

        #[test]
        fn reweight_scale_invariant(seed in 0u64..1000, scale in 1e-3f64..1e3) {
            let mut rng = RngStream::from_seed(seed);
            let m = 5;
            let weights: Vec<f64> = (0..m).map(|_| rng.uniform() + 1e-6).collect();
            let p = ProbabilityVector::from_weights(&weights).unwrap();
            let cs: Vec<f64> = (0..m).map(|_| rng.uniform() + 1e-6).collect();
            let scaled: Vec<f64> = cs.iter().map(|c| c * scale).collect();
            let a = bayes_reweight(&p, &cs).unwrap();
            let b = bayes_reweight(&p, &scaled).unwrap();
            prop_assert_eq!(a.argmax(), b.argmax());
            for (x, y) in a.values().iter().zip(b.values().iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
