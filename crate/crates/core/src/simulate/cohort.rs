use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::participant::{template_parameters, ParticipantFile, PerformanceModel, SyntheticParticipant};
use super::script::{RuleBasedController, ScriptedPolicy, SessionScript};
use super::session::{run_session, SessionConfig};
use super::InputPolicy;
use crate::control::{ControllerState, ModelBasedController};
use crate::error::{MmmError, Result};
use crate::model::{is_stable, ModelDocument, ModelSpec, ParameterSet, Structure, WeightKind};
use crate::trace::SessionTrace;

/// Attempts at drawing a stable perturbed parameter set.
pub const MAX_PERTURB_DRAWS: usize = 100;

/// Skill of an unperturbed participant.
pub const BASE_SKILL: f64 = 0.6;

fn draw_z<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z.clamp(-2.0, 2.0)
}

/// Multiplies every free perception, linkage and trait-gain value by
/// `1 + scale z` with `z` standard normal clipped to [-2, 2], redrawing until
/// the result is stable.
pub fn perturb_parameters<R: Rng + ?Sized>(
    structure: &Structure,
    template: &ParameterSet,
    scale: f64,
    rng: &mut R,
) -> Result<ParameterSet> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(MmmError::Data(format!("perturbation scale {scale} must be finite and nonnegative")));
    }
    for _ in 0..MAX_PERTURB_DRAWS {
        let mut p = template.clone();
        let mut f = |v: &mut f64| *v *= 1.0 + scale * draw_z(rng);
        for c in &mut p.perception {
            f(&mut c.theta0);
            f(&mut c.theta1);
        }
        for (w, link) in p.linkages.iter_mut().zip(structure.links()) {
            match link.kind {
                WeightKind::Fixed => {}
                WeightKind::Constant => {
                    f(&mut w.negative);
                    w.positive = w.negative;
                }
                WeightKind::TwoPiece => {
                    f(&mut w.negative);
                    f(&mut w.positive);
                }
            }
        }
        for g in &mut p.trait_gains {
            f(g);
        }
        if is_stable(structure, &p) {
            return Ok(p);
        }
    }
    Err(MmmError::Numerical(format!(
        "no stable perturbation in {MAX_PERTURB_DRAWS} draws"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CohortConfig {
    pub size: usize,
    pub perturbation: f64,
    pub seed: u64,
    pub performance: PerformanceModel,
}

impl Default for CohortConfig {
    fn default() -> Self {
        CohortConfig {
            size: 10,
            perturbation: 0.2,
            seed: 1,
            performance: PerformanceModel::default(),
        }
    }
}

pub fn participant_id(index: usize) -> String {
    format!("p{:02}", index + 1)
}

/// Synthetic participants around the demonstration template.
pub fn generate_cohort(config: &CohortConfig) -> Result<Vec<ParticipantFile>> {
    if config.size == 0 {
        return Err(MmmError::Data("cohort size must be at least 1".into()));
    }
    let spec = ModelSpec::case_study();
    let structure = Structure::compile(&spec)?;
    let template = template_parameters(&structure)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.size)
        .map(|i| {
            let params = perturb_parameters(&structure, &template, config.perturbation, &mut rng)?;
            let skill = (BASE_SKILL + 1.5 * config.perturbation * draw_z(&mut rng)).clamp(0.1, 1.0);
            Ok(ParticipantFile {
                id: participant_id(i),
                skill,
                seed: rng.random(),
                performance: config.performance.clone(),
                model: ModelDocument {
                    spec: spec.clone(),
                    params,
                },
            })
        })
        .collect()
}

fn derived_seed(seed: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng.random()
}

/// Scripted sessions 1 and 2, each starting from a neutral mind.
pub fn collect_sessions(file: &ParticipantFile) -> Result<Vec<SessionTrace>> {
    let mut p = SyntheticParticipant::from_file(file)?;
    [1u8, 2]
        .into_iter()
        .map(|s| {
            p.reset_mind();
            p.reseed(derived_seed(file.seed, u64::from(s)));
            let mut policy = ScriptedPolicy::new(SessionScript::session(s)?, derived_seed(file.seed, 10 + u64::from(s)))?;
            let trace = run_session(&mut p, &mut policy, &SessionConfig::scripted());
            trace.validate()?;
            Ok(trace)
        })
        .collect()
}

/// The two interactions of the comparison session, in the order played.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTraces {
    pub mbc_first: bool,
    pub mbc: SessionTrace,
    pub rule_based: SessionTrace,
}

/// Session 3: one interaction with the model-based controller and one with
/// the uniform rule-based controller, back to back without resetting the mind.
pub fn run_comparison(
    file: &ParticipantFile,
    controller: ControllerState,
    minutes: f64,
    mbc_first: bool,
) -> Result<ComparisonTraces> {
    let mut p = SyntheticParticipant::from_file(file)?;
    p.reset_mind();
    p.reseed(derived_seed(file.seed, 3));
    let config = SessionConfig::controlled(minutes);
    let mut mbc = ModelBasedController { ctrl: controller };
    let mut rule = RuleBasedController::new(derived_seed(file.seed, 13));
    let mut play = |policy: &mut dyn InputPolicy| -> Result<SessionTrace> {
        let t = run_session(&mut p, policy, &config);
        t.validate()?;
        if !t.complete {
            return Err(MmmError::Numerical(format!("controller failed during the session of {}", file.id)));
        }
        Ok(t)
    };
    let (mbc_trace, rule_trace) = if mbc_first {
        let a = play(&mut mbc)?;
        (a, play(&mut rule)?)
    } else {
        let b = play(&mut rule)?;
        (play(&mut mbc)?, b)
    };
    Ok(ComparisonTraces {
        mbc_first,
        mbc: mbc_trace,
        rule_based: rule_trace,
    })
}
