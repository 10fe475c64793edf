use super::params::{LinkWeights, ParameterSet};
use super::perception::rational_reasoning_into;
use super::spec::{Structure, VarKind, VarRef, WeightKind};
use super::stability::check_stability;
use super::state::{clip_unit, MentalState};
use crate::error::{MmmError, Result};

/// Update order inside one cognition step.
const STAGES: [&[VarKind]; 4] = [
    &[VarKind::Bias],
    &[VarKind::PerceivedKnowledge],
    &[VarKind::Belief],
    &[VarKind::Goal, VarKind::Emotion],
];

pub fn weight_lookup(kind: WeightKind, weights: &LinkWeights, x: f64) -> f64 {
    match kind {
        WeightKind::TwoPiece => weights.at(x),
        WeightKind::Constant | WeightKind::Fixed => weights.positive,
    }
}

/// A structure bound to a parameter set that has passed the stability check.
#[derive(Clone, Copy, Debug)]
pub struct Model<'a> {
    structure: &'a Structure,
    params: &'a ParameterSet,
}

impl<'a> Model<'a> {
    pub fn new(structure: &'a Structure, params: &'a ParameterSet) -> Result<Self> {
        params.check(structure)?;
        check_stability(structure, params)?;
        Ok(Model { structure, params })
    }

    pub fn structure(&self) -> &'a Structure {
        self.structure
    }

    pub fn params(&self) -> &'a ParameterSet {
        self.params
    }

    pub fn rational_reasoning(&self, pd: &[f64]) -> (Vec<f64>, bool) {
        let mut y = vec![0.0; self.structure.dims().rpk];
        let sat = rational_reasoning_into(self.structure, self.params, pd, &mut y);
        (y, sat)
    }

    /// One cognition step from `prev` into `next` (both sized for the structure).
    pub fn step_into(&self, prev: &MentalState, y_rr: &[f64], next: &mut MentalState) {
        let s = self.structure;
        let dims = s.dims();
        for stage in STAGES {
            for &kind in stage {
                for index in 0..dims.len(kind) {
                    let var = VarRef { kind, index };
                    let mut acc = 0.0;
                    for &l in s.incoming(var) {
                        let link = &s.links()[l];
                        let x = if link.from.kind.stage() < kind.stage() {
                            next.get(link.from)
                        } else {
                            prev.get(link.from)
                        };
                        acc += weight_lookup(link.kind, &self.params.linkages[l], x) * x;
                    }
                    if kind == VarKind::Emotion {
                        acc *= self.params.trait_gains[index];
                    }
                    if kind == VarKind::PerceivedKnowledge {
                        acc += y_rr[s.pk_source(index)];
                    }
                    let v = s.self_weight(var) * prev.get(var) + acc;
                    next.set(var, clip_unit(v));
                }
            }
        }
        next.step = prev.step + 1;
        next.perception_step = prev.perception_step;
    }

    /// Recomputes bias and perceived knowledge from the state's own emotions
    /// without advancing time.
    pub fn recompute_auxiliaries(&self, state: &mut MentalState, y_rr: &[f64]) {
        let s = self.structure;
        for kind in [VarKind::Bias, VarKind::PerceivedKnowledge] {
            for index in 0..s.dims().len(kind) {
                let var = VarRef { kind, index };
                let mut acc: f64 = s
                    .incoming(var)
                    .iter()
                    .map(|&l| {
                        let x = state.get(s.links()[l].from);
                        weight_lookup(s.links()[l].kind, &self.params.linkages[l], x) * x
                    })
                    .sum();
                if kind == VarKind::PerceivedKnowledge {
                    acc += y_rr[s.pk_source(index)];
                }
                state.set(var, clip_unit(acc));
            }
        }
    }

    pub fn step(&self, state: &MentalState, y_rr: &[f64]) -> MentalState {
        let mut next = state.clone();
        self.step_into(state, y_rr, &mut next);
        next
    }

    /// Perception on `pd`, then `substeps` cognition steps with the perception
    /// output held. Returns the saturation flag of the perception pass.
    pub fn advance(&self, state: &MentalState, pd: &[f64], substeps: usize) -> (MentalState, bool) {
        let (y, sat) = self.rational_reasoning(pd);
        let mut cur = state.clone();
        let mut next = state.clone();
        for _ in 0..substeps {
            self.step_into(&cur, &y, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur.perception_step = state.perception_step + 1;
        (cur, sat)
    }

    pub fn intentions(&self, state: &MentalState) -> Vec<f64> {
        self.structure
            .intentions()
            .iter()
            .zip(&self.params.decision)
            .map(|(srcs, theta)| {
                srcs.iter()
                    .zip(&theta.weights)
                    .map(|(&v, &w)| w * state.get(v))
                    .sum::<f64>()
                    + theta.offset
            })
            .collect()
    }
}

/// Checked single cognition step.
pub fn cognition_step(
    state: &MentalState,
    y_rr: &[f64],
    params: &ParameterSet,
    structure: &Structure,
) -> Result<MentalState> {
    let model = Model::new(structure, params)?;
    if !state.matches(structure.dims()) {
        return Err(MmmError::Structure("state does not match the model dimensions".into()));
    }
    if y_rr.len() != structure.dims().rpk {
        return Err(MmmError::Structure(format!(
            "{} perception outputs, expected {}",
            y_rr.len(),
            structure.dims().rpk
        )));
    }
    Ok(model.step(state, y_rr))
}

pub fn intention_strengths(state: &MentalState, params: &ParameterSet, structure: &Structure) -> Vec<f64> {
    Model {
        structure,
        params,
    }
    .intentions(state)
}

/// An action fires iff its intention is strictly positive.
pub fn select_actions(intentions: &[f64]) -> Vec<bool> {
    intentions.iter().map(|&i| i > 0.0).collect()
}
