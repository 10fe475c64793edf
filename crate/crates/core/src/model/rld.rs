use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};

pub const N_CHANNELS: usize = 6;

/// Channel order: difficulty, hints, wrong attempts, solve time, skipped, reward given.
pub const CHANNEL_NAMES: [&str; N_CHANNELS] = [
    "difficulty",
    "hints",
    "wrong_attempts",
    "solve_time",
    "skipped",
    "reward_given",
];

const BOOLEAN_CHANNELS: [bool; N_CHANNELS] = [false, false, false, false, true, true];

pub const MAX_DIFFICULTY: u8 = 5;

/// Observable data of one perception step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealLifeData {
    pub difficulty: u8,
    pub hints: u32,
    pub wrong_attempts: u32,
    /// Seconds spent on the puzzle so far.
    pub solve_time: f64,
    pub skipped: bool,
    pub reward_given: bool,
    pub captured: [bool; N_CHANNELS],
}

impl Default for RealLifeData {
    fn default() -> Self {
        RealLifeData {
            difficulty: 0,
            hints: 0,
            wrong_attempts: 0,
            solve_time: 0.0,
            skipped: false,
            reward_given: false,
            captured: [true; N_CHANNELS],
        }
    }
}

impl RealLifeData {
    pub fn values(&self) -> [f64; N_CHANNELS] {
        [
            f64::from(self.difficulty),
            f64::from(self.hints),
            f64::from(self.wrong_attempts),
            self.solve_time,
            if self.skipped { 1.0 } else { 0.0 },
            if self.reward_given { 1.0 } else { 0.0 },
        ]
    }

    /// Checks ranges. When the puzzle length is known, hints are capped at
    /// `1 + 2 n_moves` and anything above is rejected.
    pub fn validate(&self, n_moves: Option<u32>) -> Result<()> {
        if self.difficulty > MAX_DIFFICULTY {
            return Err(MmmError::Data(format!(
                "difficulty {} outside 0..={MAX_DIFFICULTY}",
                self.difficulty
            )));
        }
        if !(self.solve_time.is_finite() && self.solve_time >= 0.0) {
            return Err(MmmError::Data(format!("solve time {} invalid", self.solve_time)));
        }
        if let Some(n) = n_moves {
            if self.hints > 1 + 2 * n {
                return Err(MmmError::Data(format!(
                    "{} hints exceed the bound 1 + 2*{n}",
                    self.hints
                )));
            }
        }
        Ok(())
    }
}

/// Per-channel min/max scaling of raw data into [0, 1]. Boolean channels
/// are fixed to {0, 1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: [f64; N_CHANNELS],
    pub max: [f64; N_CHANNELS],
}

impl Normalizer {
    pub fn from_ranges(min: [f64; N_CHANNELS], max: [f64; N_CHANNELS]) -> Self {
        let mut n = Normalizer { min, max };
        for c in 0..N_CHANNELS {
            if BOOLEAN_CHANNELS[c] {
                n.min[c] = 0.0;
                n.max[c] = 1.0;
            }
        }
        n
    }

    pub fn fit<'a>(data: impl IntoIterator<Item = &'a RealLifeData>) -> Result<Self> {
        let mut min = [f64::INFINITY; N_CHANNELS];
        let mut max = [f64::NEG_INFINITY; N_CHANNELS];
        let mut any = false;
        for rld in data {
            any = true;
            for (c, v) in rld.values().into_iter().enumerate() {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
        if !any {
            return Err(MmmError::Data("cannot fit a normalizer on no data".into()));
        }
        Ok(Normalizer::from_ranges(min, max))
    }

    /// Scales raw channel values; degenerate ranges map to 0, values outside
    /// the fitted range are clamped.
    pub fn apply(&self, raw: &[f64; N_CHANNELS]) -> [f64; N_CHANNELS] {
        let mut out = [0.0; N_CHANNELS];
        for c in 0..N_CHANNELS {
            let span = self.max[c] - self.min[c];
            out[c] = if BOOLEAN_CHANNELS[c] {
                if raw[c] > 0.5 {
                    1.0
                } else {
                    0.0
                }
            } else if span > 0.0 {
                ((raw[c] - self.min[c]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}
