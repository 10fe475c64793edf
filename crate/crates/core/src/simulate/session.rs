use serde::{Deserialize, Serialize};

use super::participant::{play_puzzle, PuzzleEnd, SyntheticParticipant};
use super::script::SessionLimits;
use super::{EventKind, InputPolicy};
use crate::trace::{DataTag, SessionTrace, TraceRow};

/// When the participant is asked about their mental state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementRule {
    /// At every event: after the first move, after each hint and at the end of each puzzle.
    EveryEvent,
    /// After the first move of a puzzle, when more than `seconds` have passed
    /// or `puzzles` puzzles were played since the previous questions.
    Sparse { seconds: f64, puzzles: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub limits: SessionLimits,
    pub measurement: MeasurementRule,
}

impl SessionConfig {
    pub fn scripted() -> Self {
        SessionConfig {
            limits: SessionLimits::scripted(),
            measurement: MeasurementRule::EveryEvent,
        }
    }

    pub fn controlled(minutes: f64) -> Self {
        SessionConfig {
            limits: SessionLimits::controlled(minutes),
            measurement: MeasurementRule::Sparse {
                seconds: 150.0,
                puzzles: 3,
            },
        }
    }
}

/// Runs puzzles until the limits are reached or the participant quits.
/// A failing policy ends the session early with the trace marked incomplete.
pub fn run_session(p: &mut SyntheticParticipant, policy: &mut dyn InputPolicy, config: &SessionConfig) -> SessionTrace {
    let structure = p.structure();
    let answer_names: Vec<String> = {
        let spec = structure.spec();
        spec.beliefs.iter().chain(&spec.goals).chain(&spec.emotions).cloned().collect()
    };
    let action_names = structure.spec().intentions.iter().map(|i| i.name.clone()).collect();
    let mut trace = SessionTrace::new(answer_names, action_names);

    let mut clock = 0.0;
    let mut m: u64 = 0;
    let mut puzzles: u32 = 0;
    let mut last_asked: Option<(f64, u32)> = None;
    loop {
        let input = match policy.next_input() {
            Ok(c) => c,
            Err(_) => {
                trace.complete = false;
                break;
            }
        };
        let puzzle = puzzles;
        let start = clock;
        let outcome = play_puzzle(p, input.difficulty, input.reward, |kind, rld, obs| {
            let now = start + rld.solve_time;
            let measured = match config.measurement {
                MeasurementRule::EveryEvent => true,
                MeasurementRule::Sparse { seconds, puzzles: every } => {
                    kind == EventKind::Mid
                        && last_asked.is_none_or(|(t, n)| now - t > seconds || puzzle - n >= every)
                }
            };
            if measured {
                last_asked = Some((now, puzzle));
                trace.rows.push(TraceRow {
                    m,
                    rld: rld.clone(),
                    answers: obs.answers.clone(),
                    actions: obs.actions.clone(),
                    seconds: now,
                    puzzle,
                    tag: DataTag::Unassigned,
                });
            }
            m += 1;
            let answers = measured.then_some(obs.answers.as_slice());
            policy.observe(rld, kind, answers)
        });
        let Ok((rld, end)) = outcome else {
            trace.complete = false;
            break;
        };
        clock = start + rld.solve_time + p.performance.overhead_seconds;
        puzzles += 1;
        if end == PuzzleEnd::Quit || config.limits.done(puzzles, clock) {
            break;
        }
    }
    trace
}
