use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EventKind, InputPolicy};
use crate::control::ControlInput;
use crate::error::{MmmError, Result};
use crate::model::{RealLifeData, MAX_DIFFICULTY};

/// Rating bands per difficulty level, inclusive.
pub const RATING_BANDS: [(u32, u32); 6] = [
    (600, 800),
    (920, 1120),
    (1240, 1440),
    (1560, 1760),
    (1880, 2080),
    (2200, 2400),
];

pub fn rating_to_level(rating: u32) -> Result<u8> {
    RATING_BANDS
        .iter()
        .position(|&(lo, hi)| (lo..=hi).contains(&rating))
        .map(|l| l as u8)
        .ok_or_else(|| MmmError::Data(format!("rating {rating} lies in no difficulty band")))
}

/// When a session stops: after a puzzle, once both minima are reached or
/// either maximum is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionLimits {
    pub min_puzzles: u32,
    pub max_puzzles: u32,
    pub min_seconds: f64,
    pub max_seconds: f64,
}

impl SessionLimits {
    pub fn scripted() -> Self {
        SessionLimits {
            min_puzzles: 18,
            max_puzzles: 30,
            min_seconds: 45.0 * 60.0,
            max_seconds: 60.0 * 60.0,
        }
    }

    /// One controlled interaction: a fixed duration, at most 30 puzzles.
    pub fn controlled(minutes: f64) -> Self {
        SessionLimits {
            min_puzzles: 30,
            max_puzzles: 30,
            min_seconds: minutes * 60.0,
            max_seconds: minutes * 60.0,
        }
    }

    pub fn done(&self, puzzles: u32, seconds: f64) -> bool {
        puzzles >= self.max_puzzles
            || seconds >= self.max_seconds
            || (puzzles >= self.min_puzzles && seconds >= self.min_seconds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionScript {
    pub session: u8,
    /// Difficulty of each block of `block_len` puzzles.
    pub blocks: Vec<u8>,
    pub block_len: u32,
    pub limits: SessionLimits,
}

impl SessionScript {
    pub fn session(id: u8) -> Result<Self> {
        let blocks = match id {
            1 => vec![0, 2, 4, 4, 2, 0],
            2 => vec![5, 3, 1, 1, 3, 5],
            _ => return Err(MmmError::Data(format!("no script for session {id}"))),
        };
        Ok(SessionScript {
            session: id,
            blocks,
            block_len: 3,
            limits: SessionLimits::scripted(),
        })
    }

    pub fn cycle_len(&self) -> u32 {
        self.blocks.len() as u32 * self.block_len
    }

    /// Difficulty of puzzle `n` (0-based); after the last block the sequence repeats.
    pub fn difficulty(&self, n: u32) -> u8 {
        let n = n % self.cycle_len();
        self.blocks[(n / self.block_len) as usize]
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.block_len == 0 {
            return Err(MmmError::Data("script has no puzzles".into()));
        }
        if self.blocks.iter().any(|&d| d > MAX_DIFFICULTY) {
            return Err(MmmError::Data("script difficulty above the maximum level".into()));
        }
        Ok(())
    }
}

/// Plays a script; one puzzle per block, picked at random, comes with a reward.
#[derive(Clone, Debug)]
pub struct ScriptedPolicy {
    script: SessionScript,
    rng: ChaCha8Rng,
    puzzle: u32,
    rewarded: u32,
}

impl ScriptedPolicy {
    pub fn new(script: SessionScript, seed: u64) -> Result<Self> {
        script.validate()?;
        Ok(ScriptedPolicy {
            script,
            rng: ChaCha8Rng::seed_from_u64(seed),
            puzzle: 0,
            rewarded: 0,
        })
    }
}

impl InputPolicy for ScriptedPolicy {
    fn next_input(&mut self) -> Result<ControlInput> {
        let n = self.puzzle;
        let len = self.script.block_len;
        if n % len == 0 {
            self.rewarded = n + self.rng.random_range(0..len);
        }
        self.puzzle += 1;
        Ok(ControlInput {
            difficulty: self.script.difficulty(n),
            reward: n == self.rewarded,
        })
    }

    fn observe(&mut self, _: &RealLifeData, _: EventKind, _: Option<&[f64]>) -> Result<()> {
        Ok(())
    }
}

/// Uniform draw over the 12 inputs.
pub fn rule_based_controller<R: Rng + ?Sized>(rng: &mut R) -> ControlInput {
    let all = ControlInput::all();
    all[rng.random_range(0..all.len())]
}

#[derive(Clone, Debug)]
pub struct RuleBasedController {
    rng: ChaCha8Rng,
}

impl RuleBasedController {
    pub fn new(seed: u64) -> Self {
        RuleBasedController {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl InputPolicy for RuleBasedController {
    fn next_input(&mut self) -> Result<ControlInput> {
        Ok(rule_based_controller(&mut self.rng))
    }

    fn observe(&mut self, _: &RealLifeData, _: EventKind, _: Option<&[f64]>) -> Result<()> {
        Ok(())
    }
}
