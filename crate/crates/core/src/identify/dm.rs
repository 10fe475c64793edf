use super::data::Dataset;
use crate::error::{MmmError, Result};
use crate::model::{IntentionTheta, Structure};
use crate::trace::DataTag;

#[derive(Clone, Debug, PartialEq)]
pub struct DmFit {
    pub decision: Vec<IntentionTheta>,
    /// Training accuracy per intention.
    pub accuracy: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    weight: f64,
    offset: f64,
    correct: usize,
    margin: f64,
}

impl Candidate {
    /// Better accuracy, then smaller |weight|, then wider margin.
    fn beats(&self, other: &Candidate) -> bool {
        if self.correct != other.correct {
            return self.correct > other.correct;
        }
        if self.weight.abs() != other.weight.abs() {
            return self.weight.abs() < other.weight.abs();
        }
        self.margin > other.margin
    }
}

/// Best one-dimensional threshold classifier `act iff w g + b > 0` with
/// `w` in {0, 1, -1}.
fn fit_one(samples: &[(f64, bool)]) -> Candidate {
    let positives = samples.iter().filter(|s| s.1).count();
    // the constant predictors; "never" wins ties
    let never = Candidate {
        weight: 0.0,
        offset: -0.5,
        correct: samples.len() - positives,
        margin: 0.0,
    };
    let always = Candidate {
        weight: 0.0,
        offset: 0.5,
        correct: positives,
        margin: 0.0,
    };
    let mut best = if always.beats(&never) { always } else { never };
    for w in [1.0, -1.0] {
        let mut xs: Vec<f64> = samples.iter().map(|s| w * s.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut cuts: Vec<f64> = xs.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        if let (Some(&lo), Some(&hi)) = (xs.first(), xs.last()) {
            cuts.push(lo - 0.1);
            cuts.push(hi + 0.1);
        }
        for t in cuts {
            let correct = samples.iter().filter(|s| (w * s.0 - t > 0.0) == s.1).count();
            let margin = xs.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
            let c = Candidate {
                weight: w,
                offset: -t,
                correct,
                margin,
            };
            if c.beats(&best) {
                best = c;
            }
        }
    }
    best
}

/// Fits each intention's weights and offset on the rows carrying one of
/// `tags`, from the measured goals and the recorded actions. Only the most
/// predictive source of a multi-source intention receives a weight.
pub fn identify_dm(structure: &Structure, data: &Dataset, tags: &[DataTag]) -> Result<DmFit> {
    let spec = structure.spec();
    let dims = structure.dims();
    let mut decision = Vec::new();
    let mut accuracy = Vec::new();
    for (intention, sources) in spec.intentions.iter().zip(structure.intentions()) {
        let mut best: Option<(usize, Candidate)> = None;
        let mut total = 0;
        for (k, &var) in sources.iter().enumerate() {
            let col = dims.flat(var);
            if col >= dims.measured() {
                return Err(MmmError::Structure(format!(
                    "intention {} reads an unmeasured variable",
                    intention.name
                )));
            }
            let mut samples = Vec::new();
            for s in &data.sessions {
                let a = s.action_names.iter().position(|n| *n == intention.name).ok_or_else(|| {
                    MmmError::Data(format!("trace has no action column for intention {}", intention.name))
                })?;
                for r in s.rows.iter().filter(|r| tags.contains(&r.tag)) {
                    samples.push((r.answers[col], r.actions[a]));
                }
            }
            total = samples.len();
            let c = fit_one(&samples);
            if best.is_none_or(|(_, b)| c.beats(&b)) {
                best = Some((k, c));
            }
        }
        let mut theta = IntentionTheta {
            weights: vec![0.0; sources.len()],
            offset: -0.5,
        };
        let mut acc = 1.0;
        if let Some((k, c)) = best {
            theta.weights[k] = c.weight;
            theta.offset = c.offset;
            acc = if total == 0 { 1.0 } else { c.correct as f64 / total as f64 };
        }
        decision.push(theta);
        accuracy.push(acc);
    }
    Ok(DmFit { decision, accuracy })
}
