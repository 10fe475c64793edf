//! One-step model-based controller over the 12 (difficulty, reward) inputs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::model::{
    clip_unit, perceive, MentalState, Model, Normalizer, ParameterSet, RealLifeData, Structure, MAX_DIFFICULTY,
    N_CHANNELS,
};
use crate::simulate::{EventKind, InputPolicy};

/// Cognition sub-steps between two perception steps.
pub const SUBSTEPS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ControlInput {
    pub difficulty: u8,
    pub reward: bool,
}

impl ControlInput {
    /// All inputs in tie-break order: lower difficulty first, then no reward.
    pub fn all() -> Vec<ControlInput> {
        (0..=MAX_DIFFICULTY)
            .flat_map(|difficulty| {
                [false, true].map(|reward| ControlInput { difficulty, reward })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerConfig {
    pub w_g: f64,
    pub w_e: f64,
    /// Smoothing factor of the rolling performance statistics.
    pub ewma_alpha: f64,
    /// Number of recent puzzles feeding the rolling statistics.
    pub window: usize,
    /// Only a one-step horizon is supported.
    pub horizon: usize,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            w_g: 1.0,
            w_e: 1.0,
            ewma_alpha: 0.5,
            window: 3,
            horizon: 1,
        }
    }
}

/// Identified model plus everything the controller tracks between decisions.
#[derive(Clone, Debug)]
pub struct ControllerState {
    structure: Structure,
    params: ParameterSet,
    normalizer: Normalizer,
    config: ControllerConfig,
    state: MentalState,
    perceived: [f64; N_CHANNELS],
    /// (hints, wrong attempts, solve time) at the first-move event of recent puzzles.
    recent: VecDeque<[f64; 3]>,
}

/// Result of overwriting the state with a measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Reset {
    pub state: MentalState,
    /// Indices of measured components that were outside [-1, 1] and got clipped.
    pub clipped: Vec<usize>,
}

impl ControllerState {
    pub fn new(
        structure: Structure,
        params: ParameterSet,
        normalizer: Normalizer,
        config: ControllerConfig,
    ) -> Result<Self> {
        Model::new(&structure, &params)?;
        if !(config.w_g >= 0.0 && config.w_e >= 0.0) {
            return Err(MmmError::Data("controller weights must be nonnegative".into()));
        }
        if config.horizon != 1 {
            return Err(MmmError::Data(format!("horizon {} not supported, only 1", config.horizon)));
        }
        if !(config.ewma_alpha > 0.0 && config.ewma_alpha <= 1.0) || config.window == 0 {
            return Err(MmmError::Data("rolling statistics need alpha in (0, 1] and a window".into()));
        }
        let state = MentalState::zeros(structure.dims());
        Ok(ControllerState {
            structure,
            params,
            normalizer,
            config,
            state,
            perceived: [0.0; N_CHANNELS],
            recent: VecDeque::new(),
        })
    }

    pub fn model(&self) -> Model<'_> {
        Model::new(&self.structure, &self.params).expect("checked at construction")
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn state(&self) -> &MentalState {
        &self.state
    }

    /// Follows one observed event: advances the internal estimate, records
    /// first-move statistics and resets to the measurement when there is one.
    pub fn observe(&mut self, rld: &RealLifeData, kind: EventKind, answers: Option<&[f64]>) -> Result<()> {
        self.perceived = perceive(rld, &self.normalizer, &self.perceived);
        let (next, _) = self.model().advance(&self.state, &self.perceived, SUBSTEPS);
        self.state = next;
        if kind == EventKind::Mid {
            if self.recent.len() == self.config.window {
                self.recent.pop_front();
            }
            self.recent
                .push_back([f64::from(rld.hints), f64::from(rld.wrong_attempts), rld.solve_time]);
        }
        if let Some(a) = answers {
            self.state = reset_state(a, self)?.state;
        }
        Ok(())
    }

    /// Exponentially weighted mean over the recent puzzles, oldest first.
    pub fn rolling_stats(&self) -> [f64; 3] {
        let mut it = self.recent.iter();
        let Some(first) = it.next() else {
            return [0.0; 3];
        };
        let a = self.config.ewma_alpha;
        it.fold(*first, |acc, x| {
            [0, 1, 2].map(|c| a * x[c] + (1.0 - a) * acc[c])
        })
    }

    pub fn predicted_rld(&self, candidate: ControlInput) -> RealLifeData {
        let [hints, wrong, time] = self.rolling_stats();
        RealLifeData {
            difficulty: candidate.difficulty,
            hints: hints.round() as u32,
            wrong_attempts: wrong.round() as u32,
            solve_time: time,
            skipped: false,
            reward_given: candidate.reward,
            ..Default::default()
        }
    }
}

/// Replaces beliefs, goals and emotions by the measurement and recomputes
/// the auxiliary variables from the model.
pub fn reset_state(measurement: &[f64], ctrl: &ControllerState) -> Result<Reset> {
    let mut clipped = Vec::new();
    let values: Vec<f64> = measurement
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if !(-1.0..=1.0).contains(&x) {
                clipped.push(i);
            }
            clip_unit(x)
        })
        .collect();
    if values.iter().any(|x| x.is_nan()) {
        return Err(MmmError::Data("measurement contains NaN".into()));
    }
    let mut state = ctrl.state.clone();
    state.set_measured(&values)?;
    let model = ctrl.model();
    let (y, _) = model.rational_reasoning(&ctrl.perceived);
    model.recompute_auxiliaries(&mut state, &y);
    Ok(Reset { state, clipped })
}

pub fn predict_next(state: &MentalState, candidate: ControlInput, ctrl: &ControllerState) -> Result<MentalState> {
    if candidate.difficulty > MAX_DIFFICULTY {
        return Err(MmmError::Data(format!("difficulty {} is not a valid input", candidate.difficulty)));
    }
    let rld = ctrl.predicted_rld(candidate);
    let pd = perceive(&rld, &ctrl.normalizer, &ctrl.perceived);
    let (next, _) = ctrl.model().advance(state, &pd, SUBSTEPS);
    if !next.components().all(f64::is_finite) {
        return Err(MmmError::Numerical("prediction is not finite".into()));
    }
    Ok(next)
}

/// `|b1| + w_g (g1 + g2) + w_e (e1 + e2)`.
pub fn cost(next: &MentalState, w_g: f64, w_e: f64) -> f64 {
    let b = next.beliefs.first().copied().unwrap_or(0.0).abs();
    let g: f64 = next.goals.iter().take(2).sum();
    let e: f64 = next.emotions.iter().take(2).sum();
    b + w_g * g + w_e * e
}

/// Candidate costs in [`ControlInput::all`] order; failed predictions are `None`.
pub fn candidate_costs(state: &MentalState, ctrl: &ControllerState) -> Vec<(ControlInput, Option<f64>)> {
    ControlInput::all()
        .into_iter()
        .map(|c| {
            let j = predict_next(state, c, ctrl)
                .ok()
                .map(|n| cost(&n, ctrl.config.w_g, ctrl.config.w_e))
                .filter(|j| j.is_finite());
            (c, j)
        })
        .collect()
}

/// Lowest-cost input; ties go to the lower difficulty, then to no reward.
pub fn choose_input(state: &MentalState, ctrl: &ControllerState) -> Result<ControlInput> {
    argmin_input(candidate_costs(state, ctrl))
        .ok_or_else(|| MmmError::Numerical("every candidate prediction failed".into()))
}

/// Lowest finite cost, ties to the input that sorts first. The result does not
/// depend on the order of `costs`.
pub fn argmin_input(costs: impl IntoIterator<Item = (ControlInput, Option<f64>)>) -> Option<ControlInput> {
    costs
        .into_iter()
        .filter_map(|(c, j)| j.filter(|j| j.is_finite()).map(|j| (j, c)))
        // partial_cmp so that -0.0 and 0.0 tie
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)))
        .map(|(_, c)| c)
}

/// Controller policy driven by an identified model.
#[derive(Clone, Debug)]
pub struct ModelBasedController {
    pub ctrl: ControllerState,
}

impl InputPolicy for ModelBasedController {
    fn next_input(&mut self) -> Result<ControlInput> {
        choose_input(self.ctrl.state(), &self.ctrl)
    }

    fn observe(&mut self, rld: &RealLifeData, kind: EventKind, answers: Option<&[f64]>) -> Result<()> {
        self.ctrl.observe(rld, kind, answers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;

    fn zero_ctrl() -> ControllerState {
        let s = Structure::compile(&ModelSpec::case_study()).unwrap();
        let p = ParameterSet::neutral(&s);
        let n = Normalizer::from_ranges([0.0; 6], [5.0, 6.0, 20.0, 600.0, 1.0, 1.0]);
        ControllerState::new(s, p, n, ControllerConfig::default()).unwrap()
    }

    #[test]
    fn twelve_inputs_in_tie_break_order() {
        let all = ControlInput::all();
        assert_eq!(all.len(), 12);
        assert_eq!(all[0], ControlInput { difficulty: 0, reward: false });
        assert_eq!(all[1], ControlInput { difficulty: 0, reward: true });
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
    }

    #[test]
    fn cost_examples() {
        let s = Structure::compile(&ModelSpec::case_study()).unwrap();
        let mut st = MentalState::zeros(s.dims());
        assert_eq!(cost(&st, 3.0, 7.0), 0.0);
        st.beliefs[0] = -0.5;
        st.goals[0] = -0.6;
        st.goals[1] = -0.6;
        st.emotions = vec![-0.4, -0.4];
        assert!((cost(&st, 1.0, 1.0) - (-1.5)).abs() < 1e-12);
        assert_eq!(cost(&st, 0.0, 0.0), 0.5);
    }

    #[test]
    fn zero_model_prefers_easiest_without_reward() {
        let ctrl = zero_ctrl();
        let st = ctrl.state().clone();
        let first = predict_next(&st, ControlInput { difficulty: 0, reward: false }, &ctrl).unwrap();
        for c in ControlInput::all() {
            assert_eq!(predict_next(&st, c, &ctrl).unwrap(), first);
        }
        assert_eq!(choose_input(&st, &ctrl).unwrap(), ControlInput { difficulty: 0, reward: false });
    }

    #[test]
    fn one_step_contract() {
        let ctrl = zero_ctrl();
        let st = ctrl.state().clone();
        let next = predict_next(&st, ControlInput { difficulty: 3, reward: true }, &ctrl).unwrap();
        assert_eq!(next.step, st.step + 2);
        assert_eq!(next.perception_step, st.perception_step + 1);
    }

    #[test]
    fn reset_clips_and_copies() {
        let ctrl = zero_ctrl();
        let mut m = vec![0.0; 8];
        let r = reset_state(&m, &ctrl).unwrap();
        assert!(r.state.measured().iter().all(|&x| x == 0.0));
        m[3] = 1.2;
        m[0] = 0.4;
        let r = reset_state(&m, &ctrl).unwrap();
        assert_eq!(r.clipped, [3]);
        assert_eq!(r.state.goals[1], 1.0);
        assert_eq!(r.state.beliefs[0], 0.4);
    }

    #[test]
    fn rolling_stats_weight_recent_puzzles() {
        let mut ctrl = zero_ctrl();
        assert_eq!(ctrl.rolling_stats(), [0.0; 3]);
        for (h, w, t) in [(0, 0, 10.0), (2, 4, 30.0), (4, 8, 50.0), (6, 12, 70.0)] {
            let rld = RealLifeData {
                hints: h,
                wrong_attempts: w,
                solve_time: t,
                ..Default::default()
            };
            ctrl.observe(&rld, EventKind::Mid, None).unwrap();
        }
        // window keeps the last three: 30, 50, 70 -> 0.5*70 + 0.5*(0.5*50 + 0.5*30)
        let s = ctrl.rolling_stats();
        assert!((s[2] - 55.0).abs() < 1e-12);
        assert!((s[0] - 4.5).abs() < 1e-12);
    }
}
