//! Receiver-side reconstruction.
//!
//! A stochastic generator model stands in for a text-to-image model: given a
//! prompt (an object label and a count) it produces an exact match with
//! probability `q`, otherwise it either substitutes the label or perturbs
//! the count. A critic model accepts or rejects each candidate with
//! configurable error rates; the generate-criticize loop retries up to an
//! iteration limit and returns the last candidate if every round is
//! rejected. [`loop_accuracy_analytic`] gives the closed-form probability
//! that the returned scene is correct.

use serde::{Deserialize, Serialize};

use crate::context::{cosine_angle, embed_text, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::taxonomy::LabelTaxonomy;

/// What the transmitter asks the generator to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub object_label: usize,
    pub count: u32,
}

/// A structured stand-in for a generated image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructedScene {
    pub object_label: usize,
    pub count: u32,
}

impl ReconstructedScene {
    pub fn matches(&self, prompt: &Prompt) -> bool {
        self.object_label == prompt.object_label && self.count == prompt.count
    }
}

/// Stochastic generator configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorModel {
    /// Probability a single generation matches the prompt exactly.
    pub success_prob: f64,
    /// Given a failure, probability the error is a label substitution
    /// (otherwise the count is perturbed).
    pub mislabel_prob: f64,
    /// Count-error magnitudes and their weights, e.g. `[(1, 0.7), (2, 0.3)]`.
    pub miscount_spread: Vec<(u32, f64)>,
    /// Label universe size for substitutions.
    pub num_labels: usize,
}

impl GeneratorModel {
    pub fn new(success_prob: f64, num_labels: usize) -> Self {
        GeneratorModel {
            success_prob,
            mislabel_prob: 0.2,
            miscount_spread: vec![(1, 0.7), (2, 0.3)],
            num_labels,
        }
    }
}

/// Critic error rates: `false_accept` passes a wrong scene, `false_reject`
/// blocks a correct one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticModel {
    pub false_accept: f64,
    pub false_reject: f64,
}

impl CriticModel {
    pub fn perfect() -> Self {
        CriticModel {
            false_accept: 0.0,
            false_reject: 0.0,
        }
    }

    /// The no-critic baseline: everything is accepted, so a single round is
    /// returned unfiltered.
    pub fn accept_all() -> Self {
        CriticModel {
            false_accept: 1.0,
            false_reject: 0.0,
        }
    }
}

/// Critic verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

/// Draws one candidate scene for a prompt.
pub fn generate(prompt: &Prompt, gen: &GeneratorModel, rng: &mut RngStream) -> ReconstructedScene {
    if rng.uniform() < gen.success_prob {
        return ReconstructedScene {
            object_label: prompt.object_label,
            count: prompt.count,
        };
    }
    if rng.uniform() < gen.mislabel_prob {
        // Uniform over the other labels, correct count.
        let mut label = rng.uniform_usize(gen.num_labels.max(2) - 1);
        if label >= prompt.object_label {
            label += 1;
        }
        return ReconstructedScene {
            object_label: label,
            count: prompt.count,
        };
    }
    let weights: Vec<f64> = gen.miscount_spread.iter().map(|&(_, w)| w).collect();
    let magnitude = gen.miscount_spread[rng.choose_weighted(&weights)].0;
    let count = if rng.bernoulli(0.5) {
        prompt.count + magnitude
    } else {
        prompt.count.saturating_sub(magnitude)
    };
    ReconstructedScene {
        object_label: prompt.object_label,
        count,
    }
}

/// Judges a candidate against the prompt with the critic's error rates.
pub fn criticize(
    scene: &ReconstructedScene,
    prompt: &Prompt,
    critic: &CriticModel,
    rng: &mut RngStream,
) -> Verdict {
    let accept_prob = if scene.matches(prompt) {
        1.0 - critic.false_reject
    } else {
        critic.false_accept
    };
    if rng.uniform() < accept_prob {
        Verdict::Accept
    } else {
        Verdict::Reject
    }
}

/// Runs the generate-criticize loop: up to `limit` rounds, returning the
/// first accepted scene, or the final round's scene if every round was
/// rejected. Also reports how many rounds ran.
pub fn generate_criticize_loop(
    prompt: &Prompt,
    gen: &GeneratorModel,
    critic: &CriticModel,
    limit: usize,
    rng: &mut RngStream,
) -> (ReconstructedScene, usize) {
    assert!(limit >= 1, "iteration limit must be >= 1");
    for round in 1..=limit {
        let scene = generate(prompt, gen, rng);
        // The final round's scene is returned regardless of the verdict, so
        // the critic is only consulted on earlier rounds.
        if round == limit || criticize(&scene, prompt, critic, rng) == Verdict::Accept {
            return (scene, round);
        }
    }
    unreachable!("loop returns within the limit");
}

/// Closed-form probability the loop's returned scene is correct.
///
/// Each non-final round accepts a correct scene with probability
/// `q * (1 - f_r)` and an incorrect one with `(1 - q) * f_a`; rejected
/// rounds continue, and the final round's scene is returned regardless of
/// the critic.
pub fn loop_accuracy_analytic(q: f64, f_a: f64, f_r: f64, limit: usize) -> f64 {
    assert!(limit >= 1);
    assert!((0.0..=1.0).contains(&q));
    assert!((0.0..=1.0).contains(&f_a) && (0.0..=1.0).contains(&f_r));
    let accept_correct = q * (1.0 - f_r);
    let accept_incorrect = (1.0 - q) * f_a;
    let continue_prob = 1.0 - accept_correct - accept_incorrect;
    let mut prob = 0.0;
    let mut reach = 1.0; // probability of reaching the current round
    for _ in 1..limit {
        prob += reach * accept_correct;
        reach *= continue_prob;
    }
    prob + reach * q
}

/// Semantic loss between a transmitted and a received label sequence:
/// `alpha * EM + (1 - alpha) * TD`, where `EM` is the exact-mismatch rate
/// (length mismatches count excess positions as mismatches) and `TD` is one
/// minus the cosine between the two sequence embeddings (negative cosines
/// clamp to zero so the loss stays in `[0, 1]`).
pub fn semantic_loss(
    sent: &[usize],
    received: &[usize],
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
    alpha: f64,
) -> Result<f64> {
    if sent.is_empty() || received.is_empty() {
        return Err(Error::EmptyInput("semantic_loss label sequence"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha {alpha} outside [0,1]")));
    }
    let longer = sent.len().max(received.len());
    let shorter = sent.len().min(received.len());
    let mut mismatches = longer - shorter;
    for i in 0..shorter {
        if sent[i] != received[i] {
            mismatches += 1;
        }
    }
    let em = mismatches as f64 / longer as f64;

    let tokens_of = |labels: &[usize]| -> Vec<&str> {
        labels.iter().map(|&j| taxonomy.label(j)).collect()
    };
    let e_sent = embed_text(provider, &tokens_of(sent))?;
    let e_recv = embed_text(provider, &tokens_of(received))?;
    let cos = cosine_angle(e_sent.values(), e_recv.values())?;
    let td = 1.0 - cos.clamp(0.0, 1.0);
    Ok(alpha * em + (1.0 - alpha) * td)
}
