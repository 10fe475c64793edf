use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::layout::Bounds;
use crate::error::{MmmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Conventional,
    A,
    B,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Conventional, Approach::A, Approach::B];

    pub fn name(self) -> &'static str {
        match self {
            Approach::Conventional => "conventional",
            Approach::A => "a",
            Approach::B => "b",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Approach {
    type Err = MmmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "conventional" => Ok(Approach::Conventional),
            "a" => Ok(Approach::A),
            "b" => Ok(Approach::B),
            _ => Err(MmmError::Data(format!("unknown approach {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentificationConfig {
    pub n_run: usize,
    pub n_opt: usize,
    /// Cutoff on the standard deviation of a parameter across the best runs,
    /// in units of its bound width.
    pub std_threshold: f64,
    pub split_ratio: f64,
    /// Tail of the training block held out for model selection.
    pub validation_fraction: f64,
    pub seed: u64,
    pub approach: Approach,
    /// Objective evaluations per optimization run.
    pub budget: usize,
    pub bounds: Bounds,
    /// Goal/emotion self weight the schedule starts from.
    pub self_weight: f64,
    pub self_weight_step: f64,
    /// Training MSE at which the self-weight schedule stops.
    pub acceptable_cost: f64,
}

impl Default for IdentificationConfig {
    fn default() -> Self {
        IdentificationConfig {
            n_run: 30,
            n_opt: 5,
            std_threshold: 0.1,
            split_ratio: 0.67,
            validation_fraction: 0.2,
            seed: 0,
            approach: Approach::B,
            budget: 2000,
            bounds: Bounds::default(),
            self_weight: 0.9,
            self_weight_step: 0.1,
            acceptable_cost: 0.1,
        }
    }
}

impl IdentificationConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(MmmError::Data(m.to_string()));
        if self.n_run == 0 {
            return err("n_run must be positive");
        }
        if self.n_opt == 0 || self.n_opt > self.n_run {
            return err("n_opt must lie in 1..=n_run");
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return err("split_ratio must lie strictly between 0 and 1");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return err("validation_fraction must lie in [0, 1)");
        }
        if self.budget == 0 {
            return err("budget must be positive");
        }
        if !(self.std_threshold >= 0.0) {
            return err("std_threshold must be non-negative");
        }
        if !(0.0..1.0).contains(&self.self_weight) {
            return err("self_weight must lie in [0, 1)");
        }
        if !(self.self_weight_step >= 0.0) || !self.acceptable_cost.is_finite() {
            return err("self_weight_step and acceptable_cost must be finite and non-negative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        IdentificationConfig::default().validate().unwrap();
        let bad = IdentificationConfig {
            n_opt: 31,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IdentificationConfig {
            budget: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn approach_names_round_trip() {
        for a in Approach::ALL {
            assert_eq!(a.name().parse::<Approach>().unwrap(), a);
        }
        assert!("c".parse::<Approach>().is_err());
    }
}
