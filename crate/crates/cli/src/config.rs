use std::path::Path;

use serde::{Deserialize, Serialize};

use mmm_core::control::ControllerConfig;
use mmm_core::identify::{Approach, IdentificationConfig};
use mmm_core::simulate::{CohortConfig, PerformanceModel};
use mmm_core::{MmmError, Result};

/// Everything one pipeline run depends on. Missing keys take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds the cohort, the sessions and the identification runs.
    pub seed: u64,
    pub participants: usize,
    /// Relative spread of participant parameters around the template.
    pub perturbation: f64,
    /// Length of each controlled interaction in the comparison session.
    pub session_minutes: f64,
    pub approaches: Vec<Approach>,
    /// Goal/emotion self weights to identify with. The first is the model
    /// handed to the controller.
    pub self_weights: Vec<f64>,
    /// Approach whose model drives the model-based controller.
    pub controller_approach: Approach,
    /// Lower the first self weight while the training MSE is unacceptable.
    pub self_weight_schedule: bool,
    pub identification: IdentificationConfig,
    pub controller: ControllerConfig,
    pub performance: PerformanceModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            participants: 10,
            perturbation: 0.2,
            session_minutes: 35.0,
            approaches: Approach::ALL.to_vec(),
            self_weights: vec![0.9, 0.0],
            controller_approach: Approach::B,
            self_weight_schedule: true,
            identification: IdentificationConfig::default(),
            controller: ControllerConfig::default(),
            performance: PerformanceModel::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MmmError::Data(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(MmmError::Data(m.to_string()));
        if self.participants == 0 {
            return err("the cohort needs at least one participant");
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return err("perturbation must be finite and nonnegative");
        }
        if !(self.session_minutes > 0.0 && self.session_minutes.is_finite()) {
            return err("session_minutes must be positive");
        }
        if self.approaches.is_empty() {
            return err("at least one approach is required");
        }
        if self.self_weights.is_empty() || self.self_weights.iter().any(|w| !(0.0..1.0).contains(w)) {
            return err("self_weights must be a nonempty list of values in [0, 1)");
        }
        self.identification.validate()?;
        Ok(())
    }

    pub fn cohort(&self) -> CohortConfig {
        CohortConfig {
            size: self.participants,
            perturbation: self.perturbation,
            seed: self.seed,
            performance: self.performance.clone(),
        }
    }

    pub fn identification_for(&self, approach: Approach) -> IdentificationConfig {
        IdentificationConfig {
            approach,
            seed: self.seed,
            ..self.identification.clone()
        }
    }

    /// Whether the controller's model is among the identified ones.
    pub fn controller_model_available(&self) -> bool {
        self.approaches.contains(&self.controller_approach)
    }
}

/// File-name tag of a self weight, e.g. `w09` for 0.9.
pub fn weight_tag(w: f64) -> String {
    format!("w{:02}", (w * 10.0).round() as i64)
}
