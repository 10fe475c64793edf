//! Declarative description of a model instance and its compiled form.
//!
//! A [`ModelSpec`] names every variable and linkage; [`Structure`] resolves the
//! names into indices once so the update routines never touch strings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    Affine,
    Exponential,
    Boolean,
}

/// One term `f_ij` of the rational reasoning sum: input channel `input`
/// contributes to rationally-perceived-knowledge slot `output`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptionChannel {
    pub input: usize,
    pub output: usize,
    pub family: ChannelFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// One identifiable weight regardless of the influencer's sign.
    Constant,
    /// `negative` when the influencer is <= 0, `positive` otherwise.
    TwoPiece,
    /// Structural weight, not identified; its value lives in the spec.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linkage {
    pub from: String,
    pub to: String,
    pub kind: WeightKind,
    /// Only meaningful for [`WeightKind::Fixed`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Linkage {
    pub fn new(from: &str, to: &str, kind: WeightKind) -> Self {
        Linkage {
            from: from.to_string(),
            to: to.to_string(),
            kind,
            value: None,
        }
    }

    pub fn fixed(from: &str, to: &str, value: f64) -> Self {
        Linkage {
            from: from.to_string(),
            to: to.to_string(),
            kind: WeightKind::Fixed,
            value: Some(value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfWeight {
    pub var: String,
    pub weight: f64,
}

/// An intention and the beliefs/goals whose weighted sum drives it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntentionSpec {
    pub name: String,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub input_channels: Vec<String>,
    pub rpk_outputs: Vec<String>,
    pub beliefs: Vec<String>,
    pub goals: Vec<String>,
    pub emotions: Vec<String>,
    pub biases: Vec<String>,
    pub perceived_knowledge: Vec<String>,
    /// Per perceived-knowledge variable, the rpk slot it receives (z = 1).
    pub pk_sources: Vec<usize>,
    pub perception_channels: Vec<PerceptionChannel>,
    pub linkages: Vec<Linkage>,
    /// Variables not listed have w_ii = 0.
    #[serde(default)]
    pub self_weights: Vec<SelfWeight>,
    pub intentions: Vec<IntentionSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Bias,
    PerceivedKnowledge,
    Belief,
    Goal,
    Emotion,
}

impl VarKind {
    /// Position in the sequential update order of one cognition step.
    /// Influencers of an earlier stage are read at their freshly updated value.
    pub fn stage(self) -> u8 {
        match self {
            VarKind::Bias => 0,
            VarKind::PerceivedKnowledge => 1,
            VarKind::Belief => 2,
            VarKind::Goal | VarKind::Emotion => 3,
        }
    }

    pub fn is_memoryless(self) -> bool {
        matches!(
            self,
            VarKind::Bias | VarKind::PerceivedKnowledge | VarKind::Belief
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Dims {
    pub inputs: usize,
    pub rpk: usize,
    pub beliefs: usize,
    pub goals: usize,
    pub emotions: usize,
    pub biases: usize,
    pub pk: usize,
}

impl Dims {
    pub fn len(&self, kind: VarKind) -> usize {
        match kind {
            VarKind::Belief => self.beliefs,
            VarKind::Goal => self.goals,
            VarKind::Emotion => self.emotions,
            VarKind::Bias => self.biases,
            VarKind::PerceivedKnowledge => self.pk,
        }
    }

    /// Number of measured state components (beliefs, goals, emotions).
    pub fn measured(&self) -> usize {
        self.beliefs + self.goals + self.emotions
    }

    pub fn state_len(&self) -> usize {
        self.measured() + self.biases + self.pk
    }

    /// Offset of a variable in the flat `[beliefs | goals | emotions | bias | pk]` layout.
    pub fn flat(&self, var: VarRef) -> usize {
        let base = match var.kind {
            VarKind::Belief => 0,
            VarKind::Goal => self.beliefs,
            VarKind::Emotion => self.beliefs + self.goals,
            VarKind::Bias => self.measured(),
            VarKind::PerceivedKnowledge => self.measured() + self.biases,
        };
        base + var.index
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedLink {
    pub from: VarRef,
    pub to: VarRef,
    pub kind: WeightKind,
    pub fixed: f64,
}

/// A validated [`ModelSpec`] with all names resolved.
#[derive(Clone, Debug)]
pub struct Structure {
    spec: ModelSpec,
    dims: Dims,
    links: Vec<ResolvedLink>,
    /// Incoming linkage indices per target, keyed by flat target index.
    incoming: Vec<Vec<usize>>,
    self_weights: Vec<f64>,
    intentions: Vec<Vec<VarRef>>,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        Structure::compile(self).map(|_| ())
    }

    pub fn variable_names(&self) -> impl Iterator<Item = (&str, VarKind)> {
        self.beliefs
            .iter()
            .map(|n| (n.as_str(), VarKind::Belief))
            .chain(self.goals.iter().map(|n| (n.as_str(), VarKind::Goal)))
            .chain(self.emotions.iter().map(|n| (n.as_str(), VarKind::Emotion)))
            .chain(self.biases.iter().map(|n| (n.as_str(), VarKind::Bias)))
            .chain(
                self.perceived_knowledge
                    .iter()
                    .map(|n| (n.as_str(), VarKind::PerceivedKnowledge)),
            )
    }

    /// Lookup of a variable name in the spec.
    pub fn resolve(&self, name: &str) -> Option<VarRef> {
        let find = |list: &Vec<String>, kind| {
            list.iter()
                .position(|n| n == name)
                .map(|index| VarRef { kind, index })
        };
        find(&self.beliefs, VarKind::Belief)
            .or_else(|| find(&self.goals, VarKind::Goal))
            .or_else(|| find(&self.emotions, VarKind::Emotion))
            .or_else(|| find(&self.biases, VarKind::Bias))
            .or_else(|| find(&self.perceived_knowledge, VarKind::PerceivedKnowledge))
    }

    pub fn set_self_weight(&mut self, var: &str, weight: f64) {
        if let Some(sw) = self.self_weights.iter_mut().find(|s| s.var == var) {
            sw.weight = weight;
        } else {
            self.self_weights.push(SelfWeight {
                var: var.to_string(),
                weight,
            });
        }
    }

    /// Sets w_ii for every goal and emotion.
    pub fn with_goal_emotion_self_weight(mut self, weight: f64) -> Self {
        let names: Vec<String> = self.goals.iter().chain(&self.emotions).cloned().collect();
        for n in names {
            self.set_self_weight(&n, weight);
        }
        self
    }

    /// The chess-puzzle instance: 6 real-life data channels, 2 beliefs,
    /// 4 goals, 2 emotions, 1 bias, 2 perceived-knowledge variables.
    pub fn case_study() -> Self {
        use ChannelFamily::*;
        use WeightKind::*;
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let two = |from: &str, to: &str| Linkage::new(from, to, TwoPiece);
        let mut spec = ModelSpec {
            name: "chess-puzzles-complete".into(),
            input_channels: s(&[
                "difficulty",
                "hints",
                "wrong_attempts",
                "solve_time",
                "skipped",
                "reward_given",
            ]),
            rpk_outputs: s(&["rpk_puzzle_difficult", "rpk_reward_offered"]),
            beliefs: s(&["b_puzzle_difficult", "b_reward_offered"]),
            goals: s(&["g_quit", "g_skip", "g_help", "g_change_difficulty"]),
            emotions: s(&["e_boredom", "e_frustration"]),
            biases: s(&["bias_puzzle_difficult"]),
            perceived_knowledge: s(&["pk_puzzle_difficult", "pk_reward_offered"]),
            pk_sources: vec![0, 1],
            perception_channels: vec![
                PerceptionChannel { input: 0, output: 0, family: Affine },
                PerceptionChannel { input: 1, output: 0, family: Affine },
                PerceptionChannel { input: 2, output: 0, family: Exponential },
                PerceptionChannel { input: 3, output: 0, family: Exponential },
                PerceptionChannel { input: 4, output: 0, family: Boolean },
                PerceptionChannel { input: 5, output: 1, family: Boolean },
            ],
            linkages: vec![
                Linkage::new("e_boredom", "bias_puzzle_difficult", Constant),
                Linkage::new("e_frustration", "bias_puzzle_difficult", Constant),
                Linkage::new("bias_puzzle_difficult", "pk_puzzle_difficult", Constant),
                Linkage::fixed("pk_puzzle_difficult", "b_puzzle_difficult", 1.0),
                Linkage::fixed("pk_reward_offered", "b_reward_offered", 1.0),
                two("b_puzzle_difficult", "g_quit"),
                two("e_boredom", "g_quit"),
                two("e_frustration", "g_quit"),
                two("b_puzzle_difficult", "g_skip"),
                two("e_frustration", "g_skip"),
                two("b_puzzle_difficult", "g_help"),
                two("e_boredom", "g_help"),
                two("e_frustration", "g_help"),
                two("b_puzzle_difficult", "g_change_difficulty"),
                two("e_frustration", "g_change_difficulty"),
                two("b_puzzle_difficult", "e_boredom"),
                two("b_reward_offered", "e_boredom"),
                two("b_puzzle_difficult", "e_frustration"),
                two("b_reward_offered", "e_frustration"),
            ],
            self_weights: vec![],
            intentions: vec![
                IntentionSpec { name: "quit".into(), sources: s(&["g_quit"]) },
                IntentionSpec { name: "skip".into(), sources: s(&["g_skip"]) },
                IntentionSpec { name: "ask_help".into(), sources: s(&["g_help"]) },
                IntentionSpec { name: "ask_easier".into(), sources: s(&["g_change_difficulty"]) },
                IntentionSpec { name: "ask_harder".into(), sources: s(&["g_change_difficulty"]) },
            ],
        };
        spec = spec.with_goal_emotion_self_weight(0.9);
        spec
    }

    /// The case study with the "get help" and "change difficulty" goals removed.
    pub fn case_study_simplified() -> Self {
        let mut spec = Self::case_study();
        spec.name = "chess-puzzles-simplified".into();
        let dropped = ["g_help", "g_change_difficulty"];
        spec.goals.retain(|g| !dropped.contains(&g.as_str()));
        spec.linkages
            .retain(|l| !dropped.contains(&l.to.as_str()) && !dropped.contains(&l.from.as_str()));
        spec.self_weights.retain(|s| !dropped.contains(&s.var.as_str()));
        for i in &mut spec.intentions {
            i.sources.retain(|s| !dropped.contains(&s.as_str()));
        }
        spec.intentions.retain(|i| !i.sources.is_empty());
        spec
    }
}

impl Structure {
    pub fn compile(spec: &ModelSpec) -> Result<Structure> {
        let err = |m: String| Err(MmmError::Structure(m));
        let dims = Dims {
            inputs: spec.input_channels.len(),
            rpk: spec.rpk_outputs.len(),
            beliefs: spec.beliefs.len(),
            goals: spec.goals.len(),
            emotions: spec.emotions.len(),
            biases: spec.biases.len(),
            pk: spec.perceived_knowledge.len(),
        };

        let mut seen: HashMap<&str, VarKind> = HashMap::new();
        for (name, kind) in spec.variable_names() {
            if seen.insert(name, kind).is_some() {
                return err(format!("duplicate variable name `{name}`"));
            }
        }

        for (c, ch) in spec.perception_channels.iter().enumerate() {
            if ch.input >= dims.inputs {
                return err(format!("perception channel {c}: input {} out of range", ch.input));
            }
            if ch.output >= dims.rpk {
                return err(format!("perception channel {c}: output {} out of range", ch.output));
            }
        }
        if spec.pk_sources.len() != dims.pk {
            return err(format!(
                "pk_sources has {} entries for {} perceived-knowledge variables",
                spec.pk_sources.len(),
                dims.pk
            ));
        }
        if let Some(bad) = spec.pk_sources.iter().find(|&&l| l >= dims.rpk) {
            return err(format!("pk source {bad} names no rpk output"));
        }

        let resolve = |name: &str| {
            spec.resolve(name)
                .ok_or_else(|| MmmError::Structure(format!("unknown variable `{name}`")))
        };

        let mut links = Vec::with_capacity(spec.linkages.len());
        let mut incoming = vec![Vec::new(); dims.state_len()];
        for (l, link) in spec.linkages.iter().enumerate() {
            let from = resolve(&link.from)?;
            let to = resolve(&link.to)?;
            if from == to {
                return err(format!("linkage {l}: self-influence belongs in self_weights"));
            }
            let fixed = match (link.kind, link.value) {
                (WeightKind::Fixed, Some(v)) if v.is_finite() => v,
                (WeightKind::Fixed, _) => {
                    return err(format!("linkage {l}: fixed kind needs a finite value"))
                }
                _ => 0.0,
            };
            incoming[dims.flat(to)].push(l);
            links.push(ResolvedLink {
                from,
                to,
                kind: link.kind,
                fixed,
            });
        }

        let mut self_weights = vec![0.0; dims.state_len()];
        for sw in &spec.self_weights {
            let var = resolve(&sw.var)?;
            if !sw.weight.is_finite() {
                return err(format!("self weight of `{}` is not finite", sw.var));
            }
            if var.kind.is_memoryless() && sw.weight != 0.0 {
                return err(format!(
                    "`{}` is memoryless and must have w_ii = 0, got {}",
                    sw.var, sw.weight
                ));
            }
            self_weights[dims.flat(var)] = sw.weight;
        }

        let mut intentions = Vec::with_capacity(spec.intentions.len());
        for it in &spec.intentions {
            let mut srcs = Vec::with_capacity(it.sources.len());
            for s in &it.sources {
                let v = resolve(s)?;
                if !matches!(v.kind, VarKind::Belief | VarKind::Goal) {
                    return err(format!("intention `{}` may only read beliefs and goals", it.name));
                }
                srcs.push(v);
            }
            intentions.push(srcs);
        }

        Ok(Structure {
            spec: spec.clone(),
            dims,
            links,
            incoming,
            self_weights,
            intentions,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn links(&self) -> &[ResolvedLink] {
        &self.links
    }

    pub fn incoming(&self, to: VarRef) -> &[usize] {
        &self.incoming[self.dims.flat(to)]
    }

    pub fn self_weight(&self, var: VarRef) -> f64 {
        self.self_weights[self.dims.flat(var)]
    }

    pub fn channels(&self) -> &[PerceptionChannel] {
        &self.spec.perception_channels
    }

    pub fn intentions(&self) -> &[Vec<VarRef>] {
        &self.intentions
    }

    pub fn pk_source(&self, pk: usize) -> usize {
        self.spec.pk_sources[pk]
    }

    pub fn var_name(&self, var: VarRef) -> &str {
        let list = match var.kind {
            VarKind::Belief => &self.spec.beliefs,
            VarKind::Goal => &self.spec.goals,
            VarKind::Emotion => &self.spec.emotions,
            VarKind::Bias => &self.spec.biases,
            VarKind::PerceivedKnowledge => &self.spec.perceived_knowledge,
        };
        &list[var.index]
    }
}
