use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::model::{ChannelFamily, ParameterSet, Structure, WeightKind};

/// Box bounds per parameter family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    pub affine: (f64, f64),
    /// Rate θ0 of exponential channels.
    pub exp_rate: (f64, f64),
    /// Scale θ1 of exponential channels.
    pub exp_scale: (f64, f64),
    pub boolean: (f64, f64),
    pub weight: (f64, f64),
    pub trait_gain: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            affine: (-2.0, 2.0),
            exp_rate: (-4.0, 4.0),
            exp_scale: (-2.0, 2.0),
            boolean: (-2.0, 2.0),
            weight: (-1.0, 1.0),
            trait_gain: (0.5, 1.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Perception,
    Cognition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Theta0(usize),
    Theta1(usize),
    /// Weight of a constant linkage.
    Weight(usize),
    Negative(usize),
    Positive(usize),
    Gain(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub name: String,
    pub block: Block,
    pub slot: Slot,
    pub lower: f64,
    pub upper: f64,
}

impl Entry {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn to_unit(&self, v: f64) -> f64 {
        (v - self.lower) / self.width()
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.lower + u * self.width()
    }
}

/// The identifiable perception and cognition scalars of a structure, in a
/// fixed order: all perception parameters, then all cognition parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub entries: Vec<Entry>,
}

impl Layout {
    pub fn new(structure: &Structure, bounds: &Bounds) -> Result<Self> {
        let check = |(lo, hi): (f64, f64), what: &str| {
            if lo.is_finite() && hi.is_finite() && lo < hi {
                Ok((lo, hi))
            } else {
                Err(MmmError::Data(format!("bounds for {what} must satisfy lower < upper")))
            }
        };
        let spec = structure.spec();
        let mut entries = Vec::new();
        for (c, ch) in spec.perception_channels.iter().enumerate() {
            let tag = format!("{}->{}", spec.input_channels[ch.input], spec.rpk_outputs[ch.output]);
            let (b0, b1) = match ch.family {
                ChannelFamily::Affine => (bounds.affine, bounds.affine),
                ChannelFamily::Exponential => (bounds.exp_rate, bounds.exp_scale),
                ChannelFamily::Boolean => (bounds.boolean, bounds.boolean),
            };
            for (slot, b, label) in [(Slot::Theta0(c), b0, "theta0"), (Slot::Theta1(c), b1, "theta1")] {
                let (lower, upper) = check(b, "perception")?;
                entries.push(Entry {
                    name: format!("{label}[{tag}]"),
                    block: Block::Perception,
                    slot,
                    lower,
                    upper,
                });
            }
        }
        let (wl, wu) = check(bounds.weight, "weights")?;
        for (l, link) in spec.linkages.iter().enumerate() {
            let tag = format!("{}->{}", link.from, link.to);
            let slots: &[(Slot, &str)] = match link.kind {
                WeightKind::Fixed => &[],
                WeightKind::Constant => &[(Slot::Weight(l), "w")],
                WeightKind::TwoPiece => &[(Slot::Negative(l), "w-"), (Slot::Positive(l), "w+")],
            };
            for &(slot, label) in slots {
                entries.push(Entry {
                    name: format!("{label}[{tag}]"),
                    block: Block::Cognition,
                    slot,
                    lower: wl,
                    upper: wu,
                });
            }
        }
        let (gl, gu) = check(bounds.trait_gain, "trait gains")?;
        for (e, name) in spec.emotions.iter().enumerate() {
            entries.push(Entry {
                name: format!("gain[{name}]"),
                block: Block::Cognition,
                slot: Slot::Gain(e),
                lower: gl,
                upper: gu,
            });
        }
        Ok(Layout { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self, block: Block) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.entries[i].block == block).collect()
    }

    pub fn extract(&self, p: &ParameterSet) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| match e.slot {
                Slot::Theta0(c) => p.perception[c].theta0,
                Slot::Theta1(c) => p.perception[c].theta1,
                Slot::Weight(l) | Slot::Positive(l) => p.linkages[l].positive,
                Slot::Negative(l) => p.linkages[l].negative,
                Slot::Gain(e) => p.trait_gains[e],
            })
            .collect()
    }

    pub fn apply(&self, values: &[f64], p: &mut ParameterSet) {
        for (e, &v) in self.entries.iter().zip(values) {
            match e.slot {
                Slot::Theta0(c) => p.perception[c].theta0 = v,
                Slot::Theta1(c) => p.perception[c].theta1 = v,
                Slot::Weight(l) => {
                    p.linkages[l].negative = v;
                    p.linkages[l].positive = v;
                }
                Slot::Negative(l) => p.linkages[l].negative = v,
                Slot::Positive(l) => p.linkages[l].positive = v,
                Slot::Gain(g) => p.trait_gains[g] = v,
            }
        }
    }

    pub fn to_unit(&self, values: &[f64]) -> Vec<f64> {
        self.entries.iter().zip(values).map(|(e, &v)| e.to_unit(v)).collect()
    }

    pub fn from_unit(&self, unit: &[f64]) -> Vec<f64> {
        self.entries.iter().zip(unit).map(|(e, &u)| e.from_unit(u)).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }
}
