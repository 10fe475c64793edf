use serde::{Deserialize, Serialize};

use super::spec::{Structure, WeightKind};
use crate::error::{MmmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelTheta {
    pub theta0: f64,
    pub theta1: f64,
}

/// Weights of one linkage. Constant and fixed linkages keep `negative == positive`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkWeights {
    pub negative: f64,
    pub positive: f64,
}

impl LinkWeights {
    pub fn constant(w: f64) -> Self {
        LinkWeights {
            negative: w,
            positive: w,
        }
    }

    pub fn two_piece(negative: f64, positive: f64) -> Self {
        LinkWeights { negative, positive }
    }

    /// Switched weight for influencer value `x`; the boundary `x = 0` takes
    /// the negative branch.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.negative
        } else {
            self.positive
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.negative.abs().max(self.positive.abs())
    }
}

/// Goal/belief weights (in intention source order) and the neutral offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntentionTheta {
    pub weights: Vec<f64>,
    pub offset: f64,
}

/// All scalars of one model instance. Vectors are aligned with the
/// corresponding lists of the owning [`ModelSpec`](super::ModelSpec):
/// `perception` with `perception_channels`, `linkages` with `linkages`,
/// `trait_gains` with `emotions`, `decision` with `intentions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub perception: Vec<ChannelTheta>,
    pub linkages: Vec<LinkWeights>,
    pub trait_gains: Vec<f64>,
    pub decision: Vec<IntentionTheta>,
}

impl ParameterSet {
    /// Zero perception and linkage weights, unit trait gains, fixed linkages
    /// at their declared values, zero decision parameters.
    pub fn neutral(structure: &Structure) -> Self {
        let spec = structure.spec();
        ParameterSet {
            perception: vec![
                ChannelTheta {
                    theta0: 0.0,
                    theta1: 0.0
                };
                spec.perception_channels.len()
            ],
            linkages: structure
                .links()
                .iter()
                .map(|l| LinkWeights::constant(l.fixed))
                .collect(),
            trait_gains: vec![1.0; spec.emotions.len()],
            decision: structure
                .intentions()
                .iter()
                .map(|srcs| IntentionTheta {
                    weights: vec![0.0; srcs.len()],
                    offset: 0.0,
                })
                .collect(),
        }
    }

    pub fn check(&self, structure: &Structure) -> Result<()> {
        let err = |m: String| Err(MmmError::Structure(m));
        let spec = structure.spec();
        if self.perception.len() != spec.perception_channels.len() {
            return err(format!(
                "{} perception entries for {} channels",
                self.perception.len(),
                spec.perception_channels.len()
            ));
        }
        if self.linkages.len() != spec.linkages.len() {
            return err(format!(
                "{} linkage entries for {} linkages",
                self.linkages.len(),
                spec.linkages.len()
            ));
        }
        if self.trait_gains.len() != spec.emotions.len() {
            return err(format!(
                "{} trait gains for {} emotions",
                self.trait_gains.len(),
                spec.emotions.len()
            ));
        }
        if self.decision.len() != spec.intentions.len() {
            return err(format!(
                "{} decision entries for {} intentions",
                self.decision.len(),
                spec.intentions.len()
            ));
        }
        for (i, (d, srcs)) in self.decision.iter().zip(structure.intentions()).enumerate() {
            if d.weights.len() != srcs.len() {
                return err(format!("intention {i}: {} weights for {} sources", d.weights.len(), srcs.len()));
            }
        }
        for (l, (w, link)) in self.linkages.iter().zip(structure.links()).enumerate() {
            match link.kind {
                WeightKind::Constant if w.negative != w.positive => {
                    return err(format!("linkage {l} is constant but has two values"))
                }
                WeightKind::Fixed if w.negative != link.fixed || w.positive != link.fixed => {
                    return err(format!(
                        "linkage {l} is fixed at {} but the parameter set says {:?}",
                        link.fixed, w
                    ))
                }
                _ => {}
            }
        }
        let finite = self
            .perception
            .iter()
            .flat_map(|c| [c.theta0, c.theta1])
            .chain(self.linkages.iter().flat_map(|w| [w.negative, w.positive]))
            .chain(self.trait_gains.iter().copied())
            .chain(
                self.decision
                    .iter()
                    .flat_map(|d| d.weights.iter().copied().chain([d.offset])),
            )
            .all(f64::is_finite);
        if !finite {
            return err("parameter set contains non-finite values".into());
        }
        Ok(())
    }
}
