use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use super::EventKind;
use crate::error::{MmmError, Result};
use crate::model::{
    perceive, quantize_state, select_actions, ChannelTheta, IntentionTheta, LinkWeights, MentalState, Model,
    ModelDocument, ModelSpec, Normalizer, ParameterSet, RealLifeData, Structure, N_CHANNELS,
};
use crate::control::SUBSTEPS;

/// Constants of the synthetic puzzle-solving performance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerformanceModel {
    /// Expected wrong attempts per move when difficulty equals 5 x skill.
    pub wrong_rate: f64,
    /// Log-rate increase per difficulty level above 5 x skill.
    pub wrong_slope: f64,
    /// Each of the first two hints multiplies the wrong-attempt rate by this.
    pub hint_relief: f64,
    pub move_seconds: f64,
    pub move_seconds_per_level: f64,
    /// Log-normal spread of the thinking time per move.
    pub time_noise: f64,
    pub seconds_per_wrong: f64,
    pub seconds_per_hint: f64,
    /// Time spent between puzzles (set-up and questions).
    pub overhead_seconds: f64,
    pub min_moves: u32,
    pub max_moves: u32,
    pub max_wrong: u32,
    pub max_seconds: f64,
}

impl Default for PerformanceModel {
    fn default() -> Self {
        PerformanceModel {
            wrong_rate: 0.5,
            wrong_slope: 0.8,
            hint_relief: 0.5,
            move_seconds: 10.0,
            move_seconds_per_level: 4.0,
            time_noise: 0.3,
            seconds_per_wrong: 8.0,
            seconds_per_hint: 15.0,
            overhead_seconds: 30.0,
            min_moves: 2,
            max_moves: 6,
            max_wrong: 20,
            max_seconds: 600.0,
        }
    }
}

impl PerformanceModel {
    /// Raw ranges matching the caps of this model.
    pub fn normalizer(&self) -> Normalizer {
        Normalizer::from_ranges(
            [0.0; N_CHANNELS],
            [5.0, 6.0, f64::from(self.max_wrong), self.max_seconds, 1.0, 1.0],
        )
    }

    pub fn wrong_rate_at(&self, difficulty: u8, skill: f64, hints: u32) -> f64 {
        let relief = self.hint_relief.powi(hints.min(2) as i32);
        self.wrong_rate * (self.wrong_slope * (f64::from(difficulty) - 5.0 * skill)).exp() * relief
    }

    /// Plays one move, updating wrong attempts and solve time in place.
    pub fn play_move<R: Rng + ?Sized>(&self, rng: &mut R, skill: f64, rld: &mut RealLifeData) {
        let rate = self.wrong_rate_at(rld.difficulty, skill, rld.hints);
        let wrong = if rate > 0.0 {
            Poisson::new(rate).map(|p| p.sample(rng) as u32).unwrap_or(self.max_wrong)
        } else {
            0
        };
        let think = self.move_seconds + self.move_seconds_per_level * f64::from(rld.difficulty);
        let noise = LogNormal::new(0.0, self.time_noise)
            .map(|d| d.sample(rng))
            .unwrap_or(1.0);
        rld.wrong_attempts = (rld.wrong_attempts + wrong).min(self.max_wrong);
        rld.solve_time = (rld.solve_time + think * noise + self.seconds_per_wrong * f64::from(wrong))
            .min(self.max_seconds);
    }
}

/// Ground truth of one synthetic participant, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticipantFile {
    pub id: String,
    pub skill: f64,
    pub seed: u64,
    #[serde(default)]
    pub performance: PerformanceModel,
    pub model: ModelDocument,
}

/// What the participant reports and does at one event.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    /// Quantized beliefs, goals and emotions.
    pub answers: Vec<f64>,
    pub actions: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct SyntheticParticipant {
    pub id: String,
    pub skill: f64,
    pub performance: PerformanceModel,
    structure: Structure,
    params: ParameterSet,
    normalizer: Normalizer,
    rng: ChaCha8Rng,
    state: MentalState,
    perceived: [f64; N_CHANNELS],
    actions: Vec<bool>,
    quit: Option<usize>,
    skip: Option<usize>,
    help: Option<usize>,
}

impl SyntheticParticipant {
    pub fn new(
        id: &str,
        structure: Structure,
        params: ParameterSet,
        skill: f64,
        performance: PerformanceModel,
        seed: u64,
    ) -> Result<Self> {
        Model::new(&structure, &params)?;
        if !(0.0..=1.0).contains(&skill) {
            return Err(MmmError::Data(format!("skill {skill} outside [0, 1]")));
        }
        let find = |name: &str| structure.spec().intentions.iter().position(|i| i.name == name);
        let (quit, skip, help) = (find("quit"), find("skip"), find("ask_help"));
        let n_actions = structure.spec().intentions.len();
        Ok(SyntheticParticipant {
            id: id.to_string(),
            skill,
            normalizer: performance.normalizer(),
            performance,
            state: MentalState::zeros(structure.dims()),
            structure,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            perceived: [0.0; N_CHANNELS],
            actions: vec![false; n_actions],
            quit,
            skip,
            help,
        })
    }

    pub fn from_file(file: &ParticipantFile) -> Result<Self> {
        let structure = Structure::compile(&file.model.spec)?;
        Self::new(
            &file.id,
            structure,
            file.model.params.clone(),
            file.skill,
            file.performance.clone(),
            file.seed,
        )
    }

    /// Reseeds the performance noise, e.g. at the start of a session.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn reset_mind(&mut self) {
        self.state = MentalState::zeros(self.structure.dims());
        self.perceived = [0.0; N_CHANNELS];
        self.actions.iter_mut().for_each(|a| *a = false);
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn state(&self) -> &MentalState {
        &self.state
    }

    pub fn actions(&self) -> &[bool] {
        &self.actions
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn action(&self, slot: Option<usize>) -> bool {
        slot.is_some_and(|i| self.actions[i])
    }

    pub fn wants_quit(&self) -> bool {
        self.action(self.quit)
    }

    pub fn wants_skip(&self) -> bool {
        self.action(self.skip)
    }

    pub fn wants_help(&self) -> bool {
        self.action(self.help)
    }
}

/// Ground-truth perception, two cognition sub-steps and decision-making on one event.
pub fn participant_step(p: &mut SyntheticParticipant, rld: &RealLifeData) -> Observation {
    p.perceived = perceive(rld, &p.normalizer, &p.perceived);
    let model = Model::new(&p.structure, &p.params).expect("checked at construction");
    let (next, _) = model.advance(&p.state, &p.perceived, SUBSTEPS);
    p.state = next;
    p.actions = select_actions(&model.intentions(&p.state));
    Observation {
        answers: p.state.measured().into_iter().map(quantize_state).collect(),
        actions: p.actions.clone(),
    }
}

/// How a puzzle ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PuzzleEnd {
    Solved,
    Skipped,
    Quit,
}

/// Plays one puzzle event by event. `on_event` sees every event after the
/// participant has processed it.
pub fn play_puzzle(
    p: &mut SyntheticParticipant,
    difficulty: u8,
    reward: bool,
    mut on_event: impl FnMut(EventKind, &RealLifeData, &Observation) -> Result<()>,
) -> Result<(RealLifeData, PuzzleEnd)> {
    let perf = p.performance.clone();
    let n_moves = p.rng.random_range(perf.min_moves..=perf.max_moves);
    let mut rld = RealLifeData {
        difficulty,
        reward_given: reward,
        ..Default::default()
    };
    perf.play_move(&mut p.rng, p.skill, &mut rld);
    let obs = participant_step(p, &rld);
    on_event(EventKind::Mid, &rld, &obs)?;
    if p.wants_quit() {
        return Ok((rld, PuzzleEnd::Quit));
    }
    let hint_cap = 1 + 2 * n_moves;
    loop {
        if p.wants_skip() {
            rld.skipped = true;
            break;
        }
        if p.wants_help() && rld.hints < hint_cap {
            rld.hints += 1;
            rld.solve_time = (rld.solve_time + perf.seconds_per_hint).min(perf.max_seconds);
            let obs = participant_step(p, &rld);
            on_event(EventKind::Hint, &rld, &obs)?;
            if p.wants_quit() {
                return Ok((rld, PuzzleEnd::Quit));
            }
            continue;
        }
        break;
    }
    if !rld.skipped {
        for _ in 1..n_moves {
            perf.play_move(&mut p.rng, p.skill, &mut rld);
        }
    }
    let obs = participant_step(p, &rld);
    on_event(EventKind::End, &rld, &obs)?;
    let end = if p.wants_quit() {
        PuzzleEnd::Quit
    } else if rld.skipped {
        PuzzleEnd::Skipped
    } else {
        PuzzleEnd::Solved
    };
    Ok((rld, end))
}

/// Final real-life data of one puzzle under the participant's own behavior.
pub fn participant_perform(p: &mut SyntheticParticipant, difficulty: u8, reward: bool) -> RealLifeData {
    play_puzzle(p, difficulty, reward, |_, _, _| Ok(()))
        .map(|(rld, _)| rld)
        .expect("callback never fails")
}

fn link_index(spec: &ModelSpec, from: &str, to: &str) -> usize {
    spec.linkages
        .iter()
        .position(|l| l.from == from && l.to == to)
        .unwrap_or_else(|| panic!("template linkage {from} -> {to} missing"))
}

/// Demonstration ground truth for the case-study structure.
///
/// Harder puzzles and poor performance raise the belief that the puzzle is
/// difficult; easy puzzles without reward breed boredom, hard ones frustration.
pub fn template_parameters(structure: &Structure) -> Result<ParameterSet> {
    let spec = structure.spec();
    if spec.name != ModelSpec::case_study().name {
        return Err(MmmError::Structure(format!(
            "the demo template is defined for the case-study structure, not `{}`",
            spec.name
        )));
    }
    let mut p = ParameterSet::neutral(structure);
    let th = |theta0, theta1| ChannelTheta { theta0, theta1 };
    p.perception = vec![
        th(1.4, -1.6),
        th(0.5, -1.3),
        th(1.2, 0.25),
        th(1.0, 0.25),
        th(-0.55, 0.1),
        th(-0.4, 0.6),
    ];
    let mut set = |from: &str, to: &str, w: LinkWeights| p.linkages[link_index(spec, from, to)] = w;
    let two = LinkWeights::two_piece;
    set("e_boredom", "bias_puzzle_difficult", LinkWeights::constant(-0.2));
    set("e_frustration", "bias_puzzle_difficult", LinkWeights::constant(0.4));
    set("bias_puzzle_difficult", "pk_puzzle_difficult", LinkWeights::constant(0.5));
    set("b_puzzle_difficult", "g_quit", two(0.02, 0.03));
    set("e_boredom", "g_quit", two(0.02, 0.06));
    set("e_frustration", "g_quit", two(0.02, 0.05));
    set("b_puzzle_difficult", "g_skip", two(0.04, 0.06));
    set("e_frustration", "g_skip", two(0.03, 0.05));
    set("b_puzzle_difficult", "g_help", two(0.05, 0.08));
    set("e_boredom", "g_help", two(0.02, -0.03));
    set("e_frustration", "g_help", two(0.02, 0.04));
    set("b_puzzle_difficult", "g_change_difficulty", two(0.05, 0.07));
    set("e_frustration", "g_change_difficulty", two(0.02, 0.04));
    set("b_puzzle_difficult", "e_boredom", two(-0.12, -0.06));
    set("b_reward_offered", "e_boredom", two(-0.06, -0.09));
    set("b_puzzle_difficult", "e_frustration", two(0.04, 0.1));
    set("b_reward_offered", "e_frustration", two(0.02, -0.03));
    p.trait_gains = vec![1.0, 1.0];
    let it = |w: f64, offset: f64| IntentionTheta {
        weights: vec![w],
        offset,
    };
    p.decision = vec![it(1.0, -0.9), it(1.0, -0.6), it(1.0, 0.0), it(1.0, -0.4), it(-1.0, -0.4)];
    p.check(structure)?;
    crate::model::check_stability(structure, &p)?;
    Ok(p)
}
