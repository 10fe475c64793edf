//! Perception, cognition and decision-making of one model instance.

mod cognition;
mod params;
mod perception;
mod rld;
mod spec;
mod stability;
mod state;

pub use cognition::{cognition_step, intention_strengths, select_actions, weight_lookup, Model};
pub use params::{ChannelTheta, IntentionTheta, LinkWeights, ParameterSet};
pub use perception::{eval_channel, perceive, perceptual_access, rational_reasoning, CHANNEL_OUTPUT_BOUND};
pub use rld::{Normalizer, RealLifeData, CHANNEL_NAMES, MAX_DIFFICULTY, N_CHANNELS};
pub use spec::{
    ChannelFamily, Dims, IntentionSpec, Linkage, ModelSpec, PerceptionChannel, ResolvedLink, SelfWeight,
    Structure, VarKind, VarRef, WeightKind,
};
pub use stability::{check_stability, is_contractive, is_stable, max_weight_matrix, spectral_radius};
pub use state::{answer_to_state, clip_unit, quantize_answer, quantize_state, MentalState};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A spec together with one parameter set, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub spec: ModelSpec,
    pub params: ParameterSet,
}

impl ModelDocument {
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: ModelDocument = toml::from_str(text)?;
        let structure = Structure::compile(&doc.spec)?;
        doc.params.check(&structure)?;
        Ok(doc)
    }
}
