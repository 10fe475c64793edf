use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Approach, IdentificationConfig};
use super::data::{free_run, mse, predict_pairs, Dataset, Pair, PairSet};
use super::dm::identify_dm;
use super::layout::{Block, Layout};
use super::optim::{levenberg_marquardt, LeastSquares, LmOptions};
use super::report::{IdentReport, ParameterRow};
use crate::error::{MmmError, Result};
use crate::model::{is_stable, MentalState, Model, ModelDocument, ModelSpec, Normalizer, ParameterSet, Structure, VarKind};
use crate::trace::DataTag;

/// Attempts at drawing a stable random start before giving up.
pub const MAX_INIT_DRAWS: usize = 100;

/// One optimization run; `params` holds every layout entry in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub train_cost: f64,
    pub validation_cost: f64,
    pub params: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Full model from the measured state; all measured components scored.
    Coupled,
    /// Emotions held at zero so beliefs follow perception alone; beliefs scored.
    Decoupled,
}

struct Objective<'a> {
    structure: &'a Structure,
    layout: &'a Layout,
    base: &'a ParameterSet,
    full: Vec<f64>,
    free: Vec<usize>,
    pairs: &'a [Pair],
    mode: Mode,
    scale: f64,
}

impl<'a> Objective<'a> {
    fn new(
        ctx: &'a Context,
        base: &'a ParameterSet,
        full: Vec<f64>,
        free: Vec<usize>,
        pairs: &'a [Pair],
        mode: Mode,
    ) -> Self {
        let width = match mode {
            Mode::Coupled => ctx.structure.dims().measured(),
            Mode::Decoupled => ctx.structure.dims().beliefs,
        };
        let count = (pairs.len() * width).max(1);
        Objective {
            structure: &ctx.structure,
            layout: &ctx.layout,
            base,
            full,
            free,
            pairs,
            mode,
            scale: 1.0 / (count as f64).sqrt(),
        }
    }

    fn values_at(&self, u: &[f64]) -> Vec<f64> {
        let mut v = self.full.clone();
        for (&i, &x) in self.free.iter().zip(u) {
            v[i] = self.layout.entries[i].from_unit(x);
        }
        v
    }

    fn params_at(&self, u: &[f64]) -> ParameterSet {
        let mut p = self.base.clone();
        self.layout.apply(&self.values_at(u), &mut p);
        p
    }

    fn start(&self) -> Vec<f64> {
        self.free.iter().map(|&i| self.layout.entries[i].to_unit(self.full[i])).collect()
    }
}

impl LeastSquares for Objective<'_> {
    fn dim(&self) -> usize {
        self.free.len()
    }

    fn residuals(&self, u: &[f64], out: &mut Vec<f64>) -> bool {
        out.clear();
        let p = self.params_at(u);
        if !is_stable(self.structure, &p) {
            return false;
        }
        let Ok(model) = Model::new(self.structure, &p) else {
            return false;
        };
        let dims = self.structure.dims();
        let mut scratch = MentalState::zeros(dims);
        let zero = MentalState::zeros(dims);
        for pair in self.pairs {
            match self.mode {
                Mode::Coupled => {
                    scratch
                        .set_measured(&pair.source)
                        .expect("pair width matches the structure");
                    let next = model.advance(&scratch, &pair.pd, crate::control::SUBSTEPS).0;
                    let pred = next.measured();
                    out.extend(pred.iter().zip(&pair.target).map(|(a, b)| (a - b) * self.scale));
                }
                Mode::Decoupled => {
                    let next = model.advance(&zero, &pair.pd, 1).0;
                    let pred = next.slice(VarKind::Belief);
                    out.extend(pred.iter().zip(&pair.target).map(|(a, b)| (a - b) * self.scale));
                }
            }
        }
        true
    }
}

/// Everything one identification needs, built once from tagged data.
pub struct Context {
    pub structure: Structure,
    pub layout: Layout,
    pub normalizer: Normalizer,
    pub train: PairSet,
    pub validation: PairSet,
    /// Train with decision parameters fitted, cognition neutral.
    pub base: ParameterSet,
    pub dm_accuracy: Vec<f64>,
}

impl Context {
    /// Builds pair sets from the `Train` and `Validation` rows of `data`.
    /// Test rows are never read here.
    pub fn new(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<Self> {
        config.validate()?;
        let structure = Structure::compile(spec)?;
        let layout = Layout::new(&structure, &config.bounds)?;
        let normalizer = data.fit_normalizer()?;
        let train = PairSet::build(data, &normalizer, DataTag::Train);
        if train.is_empty() {
            return Err(MmmError::Data("no consecutive training measurements".into()));
        }
        let validation = PairSet::build(data, &normalizer, DataTag::Validation);
        let width = structure.dims().measured();
        for s in &data.sessions {
            if s.answer_names.len() != width {
                return Err(MmmError::Structure(format!(
                    "trace has {} answers, the model measures {width}",
                    s.answer_names.len()
                )));
            }
        }
        let dm = identify_dm(&structure, data, &[DataTag::Train, DataTag::Validation])?;
        let mut base = ParameterSet::neutral(&structure);
        base.decision = dm.decision;
        Ok(Context {
            structure,
            layout,
            normalizer,
            train,
            validation,
            base,
            dm_accuracy: dm.accuracy,
        })
    }

    fn model_mse(&self, p: &ParameterSet, set: &PairSet) -> Result<f64> {
        let model = Model::new(&self.structure, p)?;
        mse(&predict_pairs(&model, set), &set.targets())
    }

    fn params_of(&self, values: &[f64]) -> ParameterSet {
        let mut p = self.base.clone();
        self.layout.apply(values, &mut p);
        p
    }
}

fn run_rng(seed: u64, stage: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stage << 32) | index as u64);
    rng
}

/// Draws the entries in `random` uniformly within their bounds until the
/// resulting parameter set is stable.
fn random_start(ctx: &Context, fixed: &[f64], random: &[usize], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    for _ in 0..MAX_INIT_DRAWS {
        let mut v = fixed.to_vec();
        for &i in random {
            v[i] = ctx.layout.entries[i].from_unit(rng.random::<f64>());
        }
        if is_stable(&ctx.structure, &ctx.params_of(&v)) {
            return Ok(v);
        }
    }
    Err(MmmError::Numerical(format!(
        "no stable random start in {MAX_INIT_DRAWS} draws"
    )))
}

fn optimize_run(
    ctx: &Context,
    start: Vec<f64>,
    free: Vec<usize>,
    mode: Mode,
    budget: usize,
    index: usize,
) -> Result<RunRecord> {
    let obj = Objective::new(ctx, &ctx.base, start, free, &ctx.train.pairs, mode);
    let opts = LmOptions {
        budget,
        ..LmOptions::default()
    };
    let res = levenberg_marquardt(&obj, &obj.start(), &opts)?;
    let values = obj.values_at(&res.u);
    let validation_cost = match mode {
        Mode::Coupled if !ctx.validation.is_empty() => ctx.model_mse(&ctx.params_of(&values), &ctx.validation)?,
        Mode::Decoupled if !ctx.validation.is_empty() => {
            let v = Objective::new(ctx, &ctx.base, values.clone(), Vec::new(), &ctx.validation.pairs, mode);
            let mut r = Vec::new();
            v.residuals(&[], &mut r);
            r.iter().map(|x| x * x).sum()
        }
        _ => res.cost,
    };
    Ok(RunRecord {
        index,
        train_cost: res.cost,
        validation_cost,
        params: values,
    })
}

/// Orders runs by validation cost, then training cost, then index.
fn ranking(runs: &[RunRecord]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| {
        runs[a]
            .validation_cost
            .total_cmp(&runs[b].validation_cost)
            .then(runs[a].train_cost.total_cmp(&runs[b].train_cost))
            .then(runs[a].index.cmp(&runs[b].index))
    });
    order
}

/// Identifiability of each parameter over the `n_opt` runs with the lowest
/// validation cost: the population standard deviation of the parameter,
/// measured in units of its bound width, must not exceed `threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assessment {
    /// Positions in the run list, best first.
    pub selected: Vec<usize>,
    pub sigma: Vec<f64>,
    pub identified: Vec<bool>,
}

pub fn assess_identifiability(runs: &[RunRecord], widths: &[f64], n_opt: usize, threshold: f64) -> Result<Assessment> {
    if runs.is_empty() || n_opt == 0 {
        return Err(MmmError::Data("identifiability needs at least one run".into()));
    }
    if runs.iter().any(|r| r.params.len() != widths.len()) {
        return Err(MmmError::Data("run parameter count differs from the layout".into()));
    }
    let selected: Vec<usize> = ranking(runs).into_iter().take(n_opt).collect();
    let k = selected.len() as f64;
    let sigma: Vec<f64> = (0..widths.len())
        .map(|j| {
            let xs: Vec<f64> = selected.iter().map(|&r| runs[r].params[j] / widths[j]).collect();
            let mean = xs.iter().sum::<f64>() / k;
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k).sqrt()
        })
        .collect();
    let identified = sigma.iter().map(|&s| s <= threshold).collect();
    Ok(Assessment {
        selected,
        sigma,
        identified,
    })
}

/// Minimum-cost perception parameters with beliefs following perception
/// alone (zero bias), from `n_run` random starts.
pub fn warm_start_perception(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<RunRecord> {
    let ctx = Context::new(data, spec, config)?;
    warm_start(&ctx, config)
}

fn warm_start(ctx: &Context, config: &IdentificationConfig) -> Result<RunRecord> {
    let perception = ctx.layout.indices(Block::Perception);
    let neutral = ctx.layout.extract(&ParameterSet::neutral(&ctx.structure));
    let runs: Vec<RunRecord> = (0..config.n_run)
        .into_par_iter()
        .map(|i| {
            let mut rng = run_rng(config.seed, 0, i);
            let start = random_start(ctx, &neutral, &perception, &mut rng)?;
            optimize_run(ctx, start, perception.clone(), Mode::Decoupled, config.budget, i)
        })
        .collect::<Result<_>>()?;
    let best = runs
        .iter()
        .min_by(|a, b| a.train_cost.total_cmp(&b.train_cost).then(a.index.cmp(&b.index)))
        .expect("n_run is positive");
    Ok(best.clone())
}

/// Multi-start identification without warm start.
pub fn identify_conventional(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<IdentReport> {
    let config = IdentificationConfig {
        approach: Approach::Conventional,
        ..config.clone()
    };
    identify(data, spec, &config)
}

/// Perception starts from the warm start in every run, cognition at random.
pub fn identify_approach_a(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<IdentReport> {
    let config = IdentificationConfig {
        approach: Approach::A,
        ..config.clone()
    };
    identify(data, spec, &config)
}

/// Cognition fitted with perception frozen at the warm start, then the best
/// cognition vectors seed joint runs.
pub fn identify_approach_b(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<IdentReport> {
    let config = IdentificationConfig {
        approach: Approach::B,
        ..config.clone()
    };
    identify(data, spec, &config)
}

/// Identification of perception and cognition by `config.approach` on the
/// `Train` rows of `data` (model selection on `Validation` rows), evaluated on
/// its `Test` rows. Decision-making parameters are fitted separately.
pub fn identify(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<IdentReport> {
    let ctx = Context::new(data, spec, config)?;
    let all: Vec<usize> = (0..ctx.layout.len()).collect();
    let perception = ctx.layout.indices(Block::Perception);
    let cognition = ctx.layout.indices(Block::Cognition);
    let neutral = ctx.layout.extract(&ParameterSet::neutral(&ctx.structure));
    let n_run = config.n_run;

    let (warm, runs) = match config.approach {
        Approach::Conventional => {
            let runs = (0..n_run)
                .into_par_iter()
                .map(|i| {
                    let mut rng = run_rng(config.seed, 1, i);
                    let start = random_start(&ctx, &neutral, &all, &mut rng)?;
                    optimize_run(&ctx, start, all.clone(), Mode::Coupled, config.budget, i)
                })
                .collect::<Result<Vec<_>>>()?;
            (None, runs)
        }
        Approach::A => {
            let warm = warm_start(&ctx, config)?;
            let runs = (0..n_run)
                .into_par_iter()
                .map(|i| {
                    let mut rng = run_rng(config.seed, 1, i);
                    let start = random_start(&ctx, &warm.params, &cognition, &mut rng)?;
                    optimize_run(&ctx, start, all.clone(), Mode::Coupled, config.budget, i)
                })
                .collect::<Result<Vec<_>>>()?;
            (Some(warm), runs)
        }
        Approach::B => {
            let warm = warm_start(&ctx, config)?;
            let stage_one = (0..n_run)
                .into_par_iter()
                .map(|i| {
                    let mut rng = run_rng(config.seed, 1, i);
                    let start = random_start(&ctx, &warm.params, &cognition, &mut rng)?;
                    optimize_run(&ctx, start, cognition.clone(), Mode::Coupled, config.budget, i)
                })
                .collect::<Result<Vec<_>>>()?;
            let seeds: Vec<usize> = ranking(&stage_one).into_iter().take(config.n_opt).collect();
            let runs = seeds
                .par_iter()
                .map(|&k| {
                    let mut start = stage_one[k].params.clone();
                    for &i in &perception {
                        start[i] = warm.params[i];
                    }
                    optimize_run(&ctx, start, all.clone(), Mode::Coupled, config.budget, stage_one[k].index)
                })
                .collect::<Result<Vec<_>>>()?;
            (Some(warm), runs)
        }
    };

    let widths: Vec<f64> = ctx.layout.entries.iter().map(|e| e.width()).collect();
    let assessment = assess_identifiability(&runs, &widths, config.n_opt, config.std_threshold)?;
    let best = &runs[assessment.selected[0]];
    let params = ctx.params_of(&best.params);
    let model = Model::new(&ctx.structure, &params)?;

    let test = PairSet::build(data, &ctx.normalizer, DataTag::Test);
    let train_mse = mse(&predict_pairs(&model, &ctx.train), &ctx.train.targets())?;
    let validation_mse = mse(&predict_pairs(&model, &ctx.validation), &ctx.validation.targets())?;
    let test_mse = mse(&predict_pairs(&model, &test), &test.targets())?;
    let free_run_test_mse = mse(&free_run(&model, &test), &test.targets())?;

    let parameters = ctx
        .layout
        .entries
        .iter()
        .enumerate()
        .map(|(j, e)| ParameterRow {
            name: e.name.clone(),
            value: best.params[j],
            sigma: assessment.sigma[j],
            identified: assessment.identified[j],
            lower: e.lower,
            upper: e.upper,
        })
        .collect();
    let n_identified = assessment.identified.iter().filter(|&&f| f).count();
    Ok(IdentReport {
        approach: config.approach,
        seed: config.seed,
        std_threshold: config.std_threshold,
        n_opt: config.n_opt,
        model: ModelDocument {
            spec: spec.clone(),
            params,
        },
        normalizer: ctx.normalizer.clone(),
        warm_start_cost: warm.map(|w| w.train_cost),
        train_pairs: ctx.train.len(),
        validation_pairs: ctx.validation.len(),
        test_pairs: test.len(),
        train_mse,
        validation_mse,
        test_mse,
        free_run_test_mse,
        percent_identified: 100.0 * n_identified as f64 / widths.len().max(1) as f64,
        dm_accuracy: ctx.dm_accuracy.clone(),
        selected: assessment.selected.iter().map(|&r| runs[r].index).collect(),
        parameters,
        runs,
    })
}

/// Identification with goal/emotion self weight `config.self_weight`,
/// lowered by `config.self_weight_step` while the training MSE exceeds
/// `config.acceptable_cost`.
pub fn identify_with_schedule(data: &Dataset, spec: &ModelSpec, config: &IdentificationConfig) -> Result<IdentReport> {
    let mut w = config.self_weight;
    loop {
        let s = spec.clone().with_goal_emotion_self_weight(w);
        let report = identify(data, &s, config)?;
        if report.train_mse <= config.acceptable_cost || w <= 0.0 || config.self_weight_step <= 0.0 {
            return Ok(report);
        }
        // keep the schedule on the decimal grid
        w = (((w - config.self_weight_step) * 1e6).round() / 1e6).max(0.0);
    }
}
