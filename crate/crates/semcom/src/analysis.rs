//! Evaluation metrics and the correction-rate / Pareto machinery for tuning
//! the re-weighting exponent.
//!
//! For a frozen pool of unconfident cases, sweeping `tau` yields per-point
//! correction rates: `r_plus` is the fraction of initially wrong
//! identifications the revision fixes, `r_minus` the fraction of initially
//! correct ones it breaks. The scalar objective
//! `R = -eps_plus * r_plus + eps_minus * r_minus` weighs them by the pool's
//! initially-wrong / initially-correct split; its grid argmin coincides with
//! the point where the supporting line of slope `-eps_plus / eps_minus`
//! touches the Pareto curve in `(-r_plus, r_minus)` coordinates.

use serde::{Deserialize, Serialize};

use crate::context::{context_ca_vector, reweight_with_ca, ContextInfo, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::perception::ProbabilityVector;
use crate::taxonomy::LabelTaxonomy;

/// One evaluated object: was the raw argmax right, and is the revised pick
/// right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeRecord {
    pub initially_correct: bool,
    pub finally_correct: bool,
}

/// Correction rates with definedness flags for degenerate pools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRates {
    pub r_plus: f64,
    pub r_minus: f64,
    /// False when the pool had no initially wrong (resp. correct) records,
    /// in which case the undefined rate reports as 0.
    pub plus_defined: bool,
    pub minus_defined: bool,
}

/// `r_plus = #(wrong -> correct) / #wrong`, `r_minus = #(correct -> wrong) /
/// #correct`. Undefined rates report as 0 with the matching flag cleared.
pub fn rplus_rminus(outcomes: &[OutcomeRecord]) -> Result<CorrectionRates> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("outcome records"));
    }
    let wrong = outcomes.iter().filter(|o| !o.initially_correct).count();
    let fixed = outcomes
        .iter()
        .filter(|o| !o.initially_correct && o.finally_correct)
        .count();
    let correct = outcomes.len() - wrong;
    let broken = outcomes
        .iter()
        .filter(|o| o.initially_correct && !o.finally_correct)
        .count();
    Ok(CorrectionRates {
        r_plus: if wrong > 0 { fixed as f64 / wrong as f64 } else { 0.0 },
        r_minus: if correct > 0 {
            broken as f64 / correct as f64
        } else {
            0.0
        },
        plus_defined: wrong > 0,
        minus_defined: correct > 0,
    })
}

/// One operating point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub tau: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

/// Pool split weights: the fractions of initially wrong / correct cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSplit {
    pub eps_plus: f64,
    pub eps_minus: f64,
}

impl EpsilonSplit {
    pub fn new(eps_plus: f64, eps_minus: f64) -> Result<Self> {
        if eps_plus < 0.0 || eps_minus < 0.0 || (eps_plus + eps_minus - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "epsilon split ({eps_plus}, {eps_minus}) must be nonnegative and sum to 1"
            )));
        }
        Ok(EpsilonSplit {
            eps_plus,
            eps_minus,
        })
    }

    pub fn from_counts(initially_wrong: usize, initially_correct: usize) -> Result<Self> {
        let total = initially_wrong + initially_correct;
        if total == 0 {
            return Err(Error::EmptyInput("epsilon split counts"));
        }
        Ok(EpsilonSplit {
            eps_plus: initially_wrong as f64 / total as f64,
            eps_minus: initially_correct as f64 / total as f64,
        })
    }
}

/// The scalar objective `R = -eps_plus * r_plus + eps_minus * r_minus`
/// (lower is better).
pub fn r_metric(r_plus: f64, r_minus: f64, eps: &EpsilonSplit) -> f64 {
    -eps.eps_plus * r_plus + eps.eps_minus * r_minus
}

/// Micro or macro averaging for multiclass precision/recall/F1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    Micro,
    Macro,
}

/// Precision, recall, and F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn f1_of(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Multiclass precision/recall/F1 from parallel prediction and truth lists.
pub fn compute_prf(predictions: &[usize], truths: &[usize], mode: Averaging) -> Result<PrfScores> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions vs {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    let num_classes = predictions
        .iter()
        .chain(truths.iter())
        .max()
        .copied()
        .unwrap_or(0)
        + 1;
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fn_ = vec![0usize; num_classes];
    for (&pred, &truth) in predictions.iter().zip(truths.iter()) {
        if pred == truth {
            tp[pred] += 1;
        } else {
            fp[pred] += 1;
            fn_[truth] += 1;
        }
    }
    match mode {
        Averaging::Micro => {
            let tp_sum: usize = tp.iter().sum();
            let fp_sum: usize = fp.iter().sum();
            let fn_sum: usize = fn_.iter().sum();
            let precision = tp_sum as f64 / (tp_sum + fp_sum) as f64;
            let recall = tp_sum as f64 / (tp_sum + fn_sum) as f64;
            Ok(PrfScores {
                precision,
                recall,
                f1: f1_of(precision, recall),
            })
        }
        Averaging::Macro => {
            // Unweighted mean over classes that appear in truths or
            // predictions.
            let mut n = 0usize;
            let (mut p_sum, mut r_sum, mut f_sum) = (0.0, 0.0, 0.0);
            for c in 0..num_classes {
                if tp[c] + fp[c] + fn_[c] == 0 {
                    continue;
                }
                n += 1;
                let p = if tp[c] + fp[c] > 0 {
                    tp[c] as f64 / (tp[c] + fp[c]) as f64
                } else {
                    0.0
                };
                let r = if tp[c] + fn_[c] > 0 {
                    tp[c] as f64 / (tp[c] + fn_[c]) as f64
                } else {
                    0.0
                };
                p_sum += p;
                r_sum += r;
                f_sum += f1_of(p, r);
            }
            Ok(PrfScores {
                precision: p_sum / n as f64,
                recall: r_sum / n as f64,
                f1: f_sum / n as f64,
            })
        }
    }
}

/// One case of the frozen evaluation pool: the raw label distribution, the
/// confident context, and the ground truth.
#[derive(Debug, Clone)]
pub struct EvalCase {
    pub distribution: ProbabilityVector,
    pub context: ContextInfo,
    pub true_label: usize,
}

/// A uniform `tau` grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TauGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Default for TauGrid {
    fn default() -> Self {
        TauGrid {
            from: 0.0,
            to: 5.0,
            step: 0.025,
        }
    }
}

impl TauGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) {
            return Err(Error::Config("tau grid step must be positive".into()));
        }
        if self.to < self.from {
            return Err(Error::Config("tau grid end below start".into()));
        }
        let n = ((self.to - self.from) / self.step).round() as usize + 1;
        Ok((0..n).map(|i| self.from + i as f64 * self.step).collect())
    }
}

/// Correction rates of a pool at a single `tau`.
pub fn evaluate_pool_at_tau(
    pool: &[EvalCase],
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
    tau: f64,
) -> Result<CorrectionRates> {
    if pool.is_empty() {
        return Err(Error::EmptyInput("evaluation pool"));
    }
    let mut outcomes = Vec::with_capacity(pool.len());
    for case in pool {
        let initially = case.distribution.argmax() == case.true_label;
        let revised = crate::context::revise_identification(
            &case.distribution,
            &case.context,
            provider,
            taxonomy,
            tau,
        )?;
        outcomes.push(OutcomeRecord {
            initially_correct: initially,
            finally_correct: revised == case.true_label,
        });
    }
    rplus_rminus(&outcomes)
}

/// Sweeps the grid over a frozen pool, recording `(tau, r_plus, r_minus)`
/// per point. Context cosines are computed once per case; the revision at
/// each `tau` is identical to a from-scratch single-`tau` evaluation.
pub fn pareto_sweep(
    pool: &[EvalCase],
    provider: &dyn EmbeddingProvider,
    taxonomy: &LabelTaxonomy,
    grid: &TauGrid,
) -> Result<Vec<ParetoPoint>> {
    if pool.is_empty() {
        return Err(Error::EmptyInput("evaluation pool"));
    }
    let taus = grid.values()?;
    // Per-case invariants across tau: raw argmax and the context cosines.
    let mut initially = Vec::with_capacity(pool.len());
    let mut cas: Vec<Option<Vec<f64>>> = Vec::with_capacity(pool.len());
    for case in pool {
        initially.push(case.distribution.argmax() == case.true_label);
        if case.context.is_empty() {
            cas.push(None);
        } else {
            cas.push(Some(context_ca_vector(&case.context, provider, taxonomy)?));
        }
    }
    let mut points = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let mut outcomes = Vec::with_capacity(pool.len());
        for (i, case) in pool.iter().enumerate() {
            let revised = match (&cas[i], tau) {
                (None, _) => case.distribution.argmax(),
                (_, t) if t == 0.0 => case.distribution.argmax(),
                (Some(ca), _) => reweight_with_ca(&case.distribution, ca, tau)?.argmax(),
            };
            outcomes.push(OutcomeRecord {
                initially_correct: initially[i],
                finally_correct: revised == case.true_label,
            });
        }
        let rates = rplus_rminus(&outcomes)?;
        points.push(ParetoPoint {
            tau,
            r_plus: rates.r_plus,
            r_minus: rates.r_minus,
        });
    }
    Ok(points)
}

fn dominates(a: &ParetoPoint, b: &ParetoPoint) -> bool {
    a.r_plus >= b.r_plus
        && a.r_minus <= b.r_minus
        && (a.r_plus > b.r_plus || a.r_minus < b.r_minus)
}

/// Non-dominated subset (maximize `r_plus`, minimize `r_minus`), sorted by
/// `r_plus` ascending.
pub fn pareto_frontier(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut frontier: Vec<ParetoPoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| dominates(q, p)))
        .copied()
        .collect();
    frontier.sort_by(|a, b| {
        a.r_plus
            .total_cmp(&b.r_plus)
            .then(a.r_minus.total_cmp(&b.r_minus))
            .then(a.tau.total_cmp(&b.tau))
    });
    frontier.dedup_by(|a, b| a.r_plus == b.r_plus && a.r_minus == b.r_minus);
    frontier
}

/// Result of the grid optimization, with the supporting-line certificate in
/// `(-r_plus, r_minus)` coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TauOptimum {
    pub tau: f64,
    pub point: ParetoPoint,
    pub r: f64,
    /// Supporting line slope `-eps_plus / eps_minus`.
    pub slope: f64,
    /// Line intercept through the optimum.
    pub intercept: f64,
    /// Most negative signed distance of any point below the line; the
    /// certificate holds when this is above `-1e-9`.
    pub max_violation: f64,
    pub certificate_ok: bool,
}

/// Grid argmin of the `R` metric (ties to the smaller `tau`), plus the
/// supporting-line certificate: the line of slope `-eps_plus / eps_minus`
/// through the optimum leaves every swept point on or above it.
pub fn optimize_tau(points: &[ParetoPoint], eps: &EpsilonSplit) -> Result<TauOptimum> {
    if points.is_empty() {
        return Err(Error::EmptyInput("pareto points"));
    }
    let mut best = &points[0];
    let mut best_r = r_metric(best.r_plus, best.r_minus, eps);
    for p in &points[1..] {
        let r = r_metric(p.r_plus, p.r_minus, eps);
        if r < best_r || (r == best_r && p.tau < best.tau) {
            best = p;
            best_r = r;
        }
    }
    let slope = -eps.eps_plus / eps.eps_minus;
    let intercept = best.r_minus - slope * (-best.r_plus);
    let mut max_violation = 0.0f64;
    for p in points {
        let line_y = slope * (-p.r_plus) + intercept;
        max_violation = max_violation.min(p.r_minus - line_y);
    }
    Ok(TauOptimum {
        tau: best.tau,
        point: *best,
        r: best_r,
        slope,
        intercept,
        max_violation,
        certificate_ok: max_violation > -1e-9,
    })
}
