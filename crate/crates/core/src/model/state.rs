use serde::{Deserialize, Serialize};

use super::spec::{Dims, VarKind, VarRef};
use crate::error::{MmmError, Result};

pub fn clip_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// State vector of the cognition module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MentalState {
    pub beliefs: Vec<f64>,
    pub goals: Vec<f64>,
    pub emotions: Vec<f64>,
    pub bias: Vec<f64>,
    pub perceived_knowledge: Vec<f64>,
    /// Cognition time index k.
    pub step: u64,
    /// Perception time index k^p.
    pub perception_step: u64,
}

impl MentalState {
    pub fn zeros(dims: Dims) -> Self {
        MentalState {
            beliefs: vec![0.0; dims.beliefs],
            goals: vec![0.0; dims.goals],
            emotions: vec![0.0; dims.emotions],
            bias: vec![0.0; dims.biases],
            perceived_knowledge: vec![0.0; dims.pk],
            step: 0,
            perception_step: 0,
        }
    }

    pub fn get(&self, var: VarRef) -> f64 {
        self.slice(var.kind)[var.index]
    }

    pub fn set(&mut self, var: VarRef, value: f64) {
        self.slice_mut(var.kind)[var.index] = value;
    }

    pub fn slice(&self, kind: VarKind) -> &[f64] {
        match kind {
            VarKind::Belief => &self.beliefs,
            VarKind::Goal => &self.goals,
            VarKind::Emotion => &self.emotions,
            VarKind::Bias => &self.bias,
            VarKind::PerceivedKnowledge => &self.perceived_knowledge,
        }
    }

    pub fn slice_mut(&mut self, kind: VarKind) -> &mut Vec<f64> {
        match kind {
            VarKind::Belief => &mut self.beliefs,
            VarKind::Goal => &mut self.goals,
            VarKind::Emotion => &mut self.emotions,
            VarKind::Bias => &mut self.bias,
            VarKind::PerceivedKnowledge => &mut self.perceived_knowledge,
        }
    }

    /// Beliefs, goals and emotions concatenated: the measurable part.
    pub fn measured(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.beliefs.len() + self.goals.len() + self.emotions.len());
        v.extend_from_slice(&self.beliefs);
        v.extend_from_slice(&self.goals);
        v.extend_from_slice(&self.emotions);
        v
    }

    /// Overwrites beliefs, goals and emotions from a flat measured vector.
    pub fn set_measured(&mut self, values: &[f64]) -> Result<()> {
        let (nb, ng, ne) = (self.beliefs.len(), self.goals.len(), self.emotions.len());
        if values.len() != nb + ng + ne {
            return Err(MmmError::Structure(format!(
                "measured vector has {} entries, expected {}",
                values.len(),
                nb + ng + ne
            )));
        }
        self.beliefs.copy_from_slice(&values[..nb]);
        self.goals.copy_from_slice(&values[nb..nb + ng]);
        self.emotions.copy_from_slice(&values[nb + ng..]);
        Ok(())
    }

    pub fn matches(&self, dims: Dims) -> bool {
        self.beliefs.len() == dims.beliefs
            && self.goals.len() == dims.goals
            && self.emotions.len() == dims.emotions
            && self.bias.len() == dims.biases
            && self.perceived_knowledge.len() == dims.pk
    }

    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        self.beliefs
            .iter()
            .chain(&self.goals)
            .chain(&self.emotions)
            .chain(&self.bias)
            .chain(&self.perceived_knowledge)
            .copied()
    }

    pub fn in_bounds(&self) -> bool {
        self.components().all(|x| (-1.0..=1.0).contains(&x))
    }
}

/// Maps a state value to the 0–10 answer scale and back.
///
/// Rounds `5 (x + 1)` half away from zero, so the round-trip error is at most 0.1.
pub fn quantize_answer(x: f64) -> u8 {
    (5.0 * (clip_unit(x) + 1.0)).round().clamp(0.0, 10.0) as u8
}

pub fn answer_to_state(q: u8) -> f64 {
    (f64::from(q.min(10)) - 5.0) / 5.0
}

pub fn quantize_state(x: f64) -> f64 {
    answer_to_state(quantize_answer(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answer_scale_endpoints() {
        assert_eq!(answer_to_state(5), 0.0);
        assert_eq!(answer_to_state(0), -1.0);
        assert_eq!(answer_to_state(10), 1.0);
        assert_eq!(quantize_answer(0.1), 6); // 5.5 rounds away from zero
        assert_eq!(quantize_answer(-0.1), 5); // 4.5 rounds away from zero
    }

    #[test]
    fn quantizer_error_bound() {
        for i in -1000..=1000 {
            let x = i as f64 / 1000.0;
            assert!((quantize_state(x) - x).abs() <= 0.1 + 1e-12, "x = {x}");
        }
    }
}
