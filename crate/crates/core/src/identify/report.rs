use serde::{Deserialize, Serialize};

use super::config::Approach;
use super::fit::{assess_identifiability, RunRecord};
use crate::error::{MmmError, Result};
use crate::model::{ModelDocument, Normalizer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterRow {
    pub name: String,
    pub value: f64,
    /// Standard deviation over the selected runs, in units of the bound width.
    pub sigma: f64,
    pub identified: bool,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentReport {
    pub approach: Approach,
    pub seed: u64,
    pub std_threshold: f64,
    pub n_opt: usize,
    pub train_pairs: usize,
    pub validation_pairs: usize,
    pub test_pairs: usize,
    pub train_mse: f64,
    pub validation_mse: f64,
    pub test_mse: f64,
    /// Test MSE without resetting to the measured state between pairs.
    pub free_run_test_mse: f64,
    pub percent_identified: f64,
    pub warm_start_cost: Option<f64>,
    pub dm_accuracy: Vec<f64>,
    /// Indices of the runs the flags were computed from, best first.
    pub selected: Vec<usize>,
    pub normalizer: Normalizer,
    pub model: ModelDocument,
    pub parameters: Vec<ParameterRow>,
    pub runs: Vec<RunRecord>,
}

impl IdentReport {
    pub fn flags(&self) -> Vec<bool> {
        self.parameters.iter().map(|p| p.identified).collect()
    }

    pub fn self_weight(&self) -> f64 {
        self.model
            .spec
            .self_weights
            .iter()
            .map(|s| s.weight)
            .fold(0.0, f64::max)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let r: IdentReport = toml::from_str(text)?;
        r.check_consistency()?;
        Ok(r)
    }

    /// Recomputes the flags from the stored runs and compares them with the
    /// stored ones.
    pub fn check_consistency(&self) -> Result<()> {
        let widths: Vec<f64> = self.parameters.iter().map(|p| p.upper - p.lower).collect();
        let a = assess_identifiability(&self.runs, &widths, self.n_opt, self.std_threshold)?;
        let selected: Vec<usize> = a.selected.iter().map(|&r| self.runs[r].index).collect();
        if selected != self.selected || a.identified != self.flags() {
            return Err(MmmError::Format(
                "stored identifiability flags do not follow from the stored runs".into(),
            ));
        }
        Ok(())
    }

    /// Per-parameter table: name, value, sigma, flag.
    pub fn parameter_table(&self) -> String {
        let mut out = String::from("name,value,sigma,identified\n");
        for p in &self.parameters {
            out.push_str(&format!("{},{:.6},{:.6},{}\n", p.name, p.value, p.sigma, p.identified));
        }
        out
    }
}
