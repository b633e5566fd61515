//! Trainable codebook codec.
//!
//! One complex codeword of dimension `d` per label, projected to unit
//! average power. Decoding is nearest-codeword. Training minimizes the
//! cross-entropy of a softmax over negative squared distances with AWGN in
//! the loop, by plain gradient descent on the codewords; the gradient flows
//! both through the decoder reference points and through the transmitted
//! codeword itself.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoder::SemanticVector;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::taxonomy::LabelTaxonomy;

use super::awgn::{awgn_apply, ChannelConfig, ComplexSignal};

#[derive(Debug, Serialize, Deserialize)]
struct CodecRepr {
    d: usize,
    train_snr_db: f64,
    codewords: Vec<[f64; 2]>,
}

/// A label-to-codeword map with unit average power.
#[derive(Debug, Clone)]
pub struct CodebookCodec {
    codewords: Vec<Complex64>,
    num_labels: usize,
    dim: usize,
    train_snr_db: f64,
    trained: bool,
}

impl CodebookCodec {
    /// Random complex Gaussian initialization, projected to unit power.
    pub fn random_init(num_labels: usize, dim: usize, rng: &mut RngStream) -> Self {
        assert!(num_labels > 0 && dim > 0);
        let mut codewords = Vec::with_capacity(num_labels * dim);
        for _ in 0..num_labels * dim {
            codewords.push(Complex64::new(rng.standard_normal(), rng.standard_normal()));
        }
        let mut codec = CodebookCodec {
            codewords,
            num_labels,
            dim,
            train_snr_db: f64::NAN,
            trained: false,
        };
        codec.project_unit_power();
        codec
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn train_snr_db(&self) -> f64 {
        self.train_snr_db
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn codeword(&self, label: usize) -> &[Complex64] {
        &self.codewords[label * self.dim..(label + 1) * self.dim]
    }

    pub fn codewords(&self) -> &[Complex64] {
        &self.codewords
    }

    /// Mean `|c|^2` per complex entry over the whole codebook.
    pub fn average_power(&self) -> f64 {
        self.codewords.iter().map(|z| z.norm_sqr()).sum::<f64>()
            / self.codewords.len() as f64
    }

    /// Rescales the codebook to unit average power.
    pub fn project_unit_power(&mut self) {
        let p = self.average_power();
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            for z in &mut self.codewords {
                *z *= s;
            }
        }
    }

    fn check_usable(&self) -> Result<()> {
        if self.codewords.is_empty() {
            return Err(Error::UntrainedCodec);
        }
        Ok(())
    }

    /// Maps each semantic entry to its codeword row.
    pub fn encode(&self, s: &SemanticVector) -> Result<ComplexSignal> {
        self.encode_labels(&s.entries)
    }

    /// Maps a label sequence to its codeword rows.
    pub fn encode_labels(&self, labels: &[usize]) -> Result<ComplexSignal> {
        self.check_usable()?;
        let mut data = Vec::with_capacity(labels.len() * self.dim);
        for &label in labels {
            if label >= self.num_labels {
                return Err(Error::LabelOutOfRange(label));
            }
            data.extend_from_slice(self.codeword(label));
        }
        Ok(ComplexSignal::new(data, labels.len(), self.dim))
    }

    /// Nearest-codeword decoding: per token, the label minimizing
    /// `||y - c_m||^2` (ties to the lowest label).
    pub fn decode(&self, y: &ComplexSignal) -> Result<Vec<usize>> {
        self.check_usable()?;
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "signal dim {} vs codec dim {}",
                y.dim(),
                self.dim
            )));
        }
        let mut labels = Vec::with_capacity(y.tokens());
        for i in 0..y.tokens() {
            let row = y.token_row(i);
            let mut best = (0usize, f64::INFINITY);
            for m in 0..self.num_labels {
                let c = self.codeword(m);
                let d2: f64 = row
                    .iter()
                    .zip(c.iter())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                if d2 < best.1 {
                    best = (m, d2);
                }
            }
            labels.push(best.0);
        }
        Ok(labels)
    }

    /// Monte Carlo token accuracy over uniform random labels at `snr_db`.
    pub fn token_accuracy(&self, snr_db: f64, tokens: usize, rng: &mut RngStream) -> Result<f64> {
        let labels: Vec<usize> = (0..tokens).map(|_| rng.uniform_usize(self.num_labels)).collect();
        let x = self.encode_labels(&labels)?;
        let y = awgn_apply(&x, &ChannelConfig::new(snr_db), rng);
        let decoded = self.decode(&y)?;
        let hits = labels
            .iter()
            .zip(decoded.iter())
            .filter(|(a, b)| a == b)
            .count();
        Ok(hits as f64 / tokens as f64)
    }

    pub fn to_json(&self) -> String {
        let repr = CodecRepr {
            d: self.dim,
            train_snr_db: self.train_snr_db,
            codewords: self.codewords.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string_pretty(&repr).expect("codec serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let repr: CodecRepr = serde_json::from_str(json)?;
        if repr.d == 0 || repr.codewords.is_empty() || repr.codewords.len() % repr.d != 0 {
            return Err(Error::Config("codec JSON has inconsistent shape".into()));
        }
        Ok(CodebookCodec {
            num_labels: repr.codewords.len() / repr.d,
            dim: repr.d,
            train_snr_db: repr.train_snr_db,
            trained: true,
            codewords: repr
                .codewords
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        Self::from_json(&body)
    }
}

/// One training draw: a transmitted label and a frozen noise realization.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub label: usize,
    pub noise: Vec<Complex64>,
}

/// Draws a `dim`-dimensional complex Gaussian noise vector for `snr_db`.
pub fn sample_noise_matrix(dim: usize, snr_db: f64, rng: &mut RngStream) -> Vec<Complex64> {
    let sigma_component = (ChannelConfig::new(snr_db).noise_variance() / 2.0).sqrt();
    (0..dim)
        .map(|_| {
            Complex64::new(
                rng.standard_normal() * sigma_component,
                rng.standard_normal() * sigma_component,
            )
        })
        .collect()
}

fn softmax_from_distances(codewords: &[Complex64], dim: usize, y: &[Complex64]) -> Vec<f64> {
    let m = codewords.len() / dim;
    let mut logits = Vec::with_capacity(m);
    for c in 0..m {
        let cw = &codewords[c * dim..(c + 1) * dim];
        let d2: f64 = y.iter().zip(cw.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        logits.push(-d2);
    }
    let z_max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logits.iter().map(|z| (z - z_max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}

/// Mean cross-entropy of the softmax over negative squared distances for a
/// frozen batch. Pure in the codebook, so finite differences apply directly.
pub fn softmax_batch_loss(codewords: &[Complex64], dim: usize, batch: &[TrainSample]) -> f64 {
    let mut total = 0.0;
    for sample in batch {
        let cw = &codewords[sample.label * dim..(sample.label + 1) * dim];
        let y: Vec<Complex64> = cw
            .iter()
            .zip(sample.noise.iter())
            .map(|(c, n)| c + n)
            .collect();
        let probs = softmax_from_distances(codewords, dim, &y);
        total -= probs[sample.label].max(f64::MIN_POSITIVE).ln();
    }
    total / batch.len() as f64
}

/// Loss plus its analytic gradient with respect to every codeword entry.
pub fn softmax_batch_loss_grad(
    codewords: &[Complex64],
    dim: usize,
    batch: &[TrainSample],
) -> (f64, Vec<Complex64>) {
    let m = codewords.len() / dim;
    let mut grad = vec![Complex64::new(0.0, 0.0); codewords.len()];
    let mut total = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for sample in batch {
        let t = sample.label;
        let cw_t = &codewords[t * dim..(t + 1) * dim];
        let y: Vec<Complex64> = cw_t
            .iter()
            .zip(sample.noise.iter())
            .map(|(c, n)| c + n)
            .collect();
        let probs = softmax_from_distances(codewords, dim, &y);
        total -= probs[t].max(f64::MIN_POSITIVE).ln();

        // Mixture sum_m p_m c_m, needed for the gradient path through the
        // transmitted codeword.
        let mut mixture = vec![Complex64::new(0.0, 0.0); dim];
        for c in 0..m {
            let cw = &codewords[c * dim..(c + 1) * dim];
            for (mix, &w) in mixture.iter_mut().zip(cw.iter()) {
                *mix += w * probs[c];
            }
        }
        for c in 0..m {
            let coeff = probs[c] - if c == t { 1.0 } else { 0.0 };
            let cw = &codewords[c * dim..(c + 1) * dim];
            for k in 0..dim {
                grad[c * dim + k] += (y[k] - cw[k]) * (2.0 * coeff * scale);
            }
        }
        for k in 0..dim {
            grad[t * dim + k] += (cw_t[k] - mixture[k]) * (-2.0 * scale);
        }
    }
    (total * scale, grad)
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CodebookTrainConfig {
    pub dim: usize,
    pub train_snr_db: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for CodebookTrainConfig {
    fn default() -> Self {
        CodebookTrainConfig {
            dim: 50,
            train_snr_db: 10.0,
            epochs: 200,
            learning_rate: 0.05,
            batch_size: 512,
        }
    }
}

/// Trains a codebook for a taxonomy: per epoch, a fresh batch of uniform
/// labels and noise at the training SNR, one gradient step, then projection
/// back to unit average power. Deterministic given the stream.
pub fn codebook_train(
    taxonomy: &LabelTaxonomy,
    cfg: &CodebookTrainConfig,
    rng: &mut RngStream,
) -> Result<CodebookCodec> {
    if cfg.dim == 0 || cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(Error::Config(
            "codebook training needs dim, epochs, batch_size >= 1".into(),
        ));
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::Config("learning rate must be positive".into()));
    }
    let m = taxonomy.num_labels();
    let mut codec = CodebookCodec::random_init(m, cfg.dim, rng);
    for epoch in 0..cfg.epochs {
        let batch: Vec<TrainSample> = (0..cfg.batch_size)
            .map(|_| TrainSample {
                label: rng.uniform_usize(m),
                noise: sample_noise_matrix(cfg.dim, cfg.train_snr_db, rng),
            })
            .collect();
        let (loss, grad) = softmax_batch_loss_grad(&codec.codewords, cfg.dim, &batch);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "training loss diverged at epoch {epoch}"
            )));
        }
        for (w, g) in codec.codewords.iter_mut().zip(grad.iter()) {
            *w -= g * cfg.learning_rate;
        }
        codec.project_unit_power();
    }
    codec.train_snr_db = cfg.train_snr_db;
    codec.trained = true;
    Ok(codec)
}

/// Per-epoch loss trace of a training run (same schedule as
/// [`codebook_train`]), for descent diagnostics.
pub fn codebook_train_trace(
    taxonomy: &LabelTaxonomy,
    cfg: &CodebookTrainConfig,
    rng: &mut RngStream,
) -> Result<(CodebookCodec, Vec<f64>)> {
    let m = taxonomy.num_labels();
    let mut codec = CodebookCodec::random_init(m, cfg.dim, rng);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let batch: Vec<TrainSample> = (0..cfg.batch_size)
            .map(|_| TrainSample {
                label: rng.uniform_usize(m),
                noise: sample_noise_matrix(cfg.dim, cfg.train_snr_db, rng),
            })
            .collect();
        let (loss, grad) = softmax_batch_loss_grad(&codec.codewords, cfg.dim, &batch);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "training loss diverged at epoch {epoch}"
            )));
        }
        trace.push(loss);
        for (w, g) in codec.codewords.iter_mut().zip(grad.iter()) {
            *w -= g * cfg.learning_rate;
        }
        codec.project_unit_power();
    }
    codec.train_snr_db = cfg.train_snr_db;
    codec.trained = true;
    Ok((codec, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::build_default_taxonomy;

    fn tiny_taxonomy(m: usize) -> LabelTaxonomy {
        let labels: Vec<String> = (0..m).map(|i| format!("l{i}")).collect();
        let known: Vec<usize> = (0..m - 1).collect();
        LabelTaxonomy::new(labels.clone(), labels, known, vec![m - 1]).unwrap()
    }

    #[test]
    fn power_projection_invariant() {
        let mut rng = RngStream::from_seed(5);
        let codec = CodebookCodec::random_init(10, 4, &mut rng);
        assert!((codec.average_power() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn noiseless_roundtrip_identity() {
        let mut rng = RngStream::from_seed(6);
        let codec = CodebookCodec::random_init(12, 6, &mut rng);
        let labels: Vec<usize> = (0..12).collect();
        let x = codec.encode_labels(&labels).unwrap();
        assert_eq!(codec.decode(&x).unwrap(), labels);
    }

    #[test]
    fn decode_invariant_under_global_phase() {
        let mut rng = RngStream::from_seed(7);
        let codec = CodebookCodec::random_init(8, 5, &mut rng);
        let labels = vec![0, 3, 5, 7, 2];
        let x = codec.encode_labels(&labels).unwrap();
        let y = awgn_apply(&x, &ChannelConfig::new(8.0), &mut rng);
        let base = codec.decode(&y).unwrap();

        let phase = Complex64::from_polar(1.0, 1.234);
        let mut rotated_codec = codec.clone();
        for w in &mut rotated_codec.codewords {
            *w *= phase;
        }
        let rotated_y = ComplexSignal::new(
            y.samples().iter().map(|z| z * phase).collect(),
            y.tokens(),
            y.dim(),
        );
        assert_eq!(rotated_codec.decode(&rotated_y).unwrap(), base);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = tiny_taxonomy(6);
        let dim = 4;
        let mut rng = RngStream::from_seed(11);
        let codec = CodebookCodec::random_init(t.num_labels(), dim, &mut rng);
        let batch: Vec<TrainSample> = (0..16)
            .map(|_| TrainSample {
                label: rng.uniform_usize(t.num_labels()),
                noise: sample_noise_matrix(dim, 6.0, &mut rng),
            })
            .collect();
        let (_, grad) = softmax_batch_loss_grad(codec.codewords(), dim, &batch);
        let h = 1e-5;
        for trial in 0..10 {
            let idx = (trial * 7) % codec.codewords().len();
            for part in [0usize, 1] {
                let mut plus = codec.codewords().to_vec();
                let mut minus = codec.codewords().to_vec();
                if part == 0 {
                    plus[idx].re += h;
                    minus[idx].re -= h;
                } else {
                    plus[idx].im += h;
                    minus[idx].im -= h;
                }
                let fd = (softmax_batch_loss(&plus, dim, &batch)
                    - softmax_batch_loss(&minus, dim, &batch))
                    / (2.0 * h);
                let an = if part == 0 { grad[idx].re } else { grad[idx].im };
                let denom = fd.abs().max(an.abs()).max(1e-8);
                assert!(
                    ((fd - an) / denom).abs() < 1e-4,
                    "entry {idx} part {part}: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn training_reduces_loss() {
        let t = tiny_taxonomy(8);
        let cfg = CodebookTrainConfig {
            dim: 4,
            train_snr_db: 4.0,
            epochs: 60,
            learning_rate: 0.05,
            batch_size: 128,
        };
        let mut rng = RngStream::from_seed(13);
        let (_, trace) = codebook_train_trace(&t, &cfg, &mut rng).unwrap();
        assert!(
            trace[trace.len() - 1] <= trace[0],
            "loss went {} -> {}",
            trace[0],
            trace[trace.len() - 1]
        );
    }

    #[test]
    fn training_is_deterministic() {
        let t = tiny_taxonomy(5);
        let cfg = CodebookTrainConfig {
            dim: 3,
            train_snr_db: 8.0,
            epochs: 10,
            learning_rate: 0.05,
            batch_size: 32,
        };
        let a = codebook_train(&t, &cfg, &mut RngStream::from_seed(21)).unwrap();
        let b = codebook_train(&t, &cfg, &mut RngStream::from_seed(21)).unwrap();
        assert_eq!(a.codewords(), b.codewords());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = RngStream::from_seed(31);
        let mut codec = CodebookCodec::random_init(7, 3, &mut rng);
        codec.train_snr_db = 10.0;
        codec.trained = true;
        let back = CodebookCodec::from_json(&codec.to_json()).unwrap();
        assert_eq!(back.codewords(), codec.codewords());
        assert_eq!(back.dim(), codec.dim());
        assert_eq!(back.num_labels(), codec.num_labels());
        assert!(back.is_trained());
    }

    #[test]
    fn default_shape_matches_taxonomy() {
        let t = build_default_taxonomy();
        let cfg = CodebookTrainConfig {
            epochs: 2,
            batch_size: 32,
            ..Default::default()
        };
        let codec = codebook_train(&t, &cfg, &mut RngStream::from_seed(1)).unwrap();
        assert_eq!(codec.num_labels(), 80);
        assert_eq!(codec.dim(), 50);
        assert!((codec.average_power() - 1.0).abs() < 1e-6);
    }
}
