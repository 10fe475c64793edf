//! Synthetic participants and the session protocol that replaces human data.

mod cohort;
mod participant;
mod script;
mod session;

pub use cohort::{
    collect_sessions, generate_cohort, participant_id, perturb_parameters, run_comparison, CohortConfig,
    ComparisonTraces, BASE_SKILL, MAX_PERTURB_DRAWS,
};
pub use participant::{
    participant_perform, participant_step, play_puzzle, template_parameters, Observation, ParticipantFile,
    PerformanceModel, PuzzleEnd, SyntheticParticipant,
};
pub use script::{
    rating_to_level, rule_based_controller, RuleBasedController, ScriptedPolicy, SessionLimits, SessionScript,
    RATING_BANDS,
};
pub use session::{run_session, MeasurementRule, SessionConfig};

use crate::control::ControlInput;
use crate::error::Result;
use crate::model::RealLifeData;

/// Kinds of events inside a puzzle at which the participant perceives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// After the first move.
    Mid,
    /// After a hint was given.
    Hint,
    /// When the puzzle is solved or skipped.
    End,
}

/// Anything that picks the next puzzle's input and watches the session.
pub trait InputPolicy {
    fn next_input(&mut self) -> Result<ControlInput>;

    /// Sees every event; `answers` is present when the participant was asked.
    fn observe(&mut self, rld: &RealLifeData, kind: EventKind, answers: Option<&[f64]>) -> Result<()>;
}
