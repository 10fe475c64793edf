use crate::control::SUBSTEPS;
use crate::error::{MmmError, Result};
use crate::model::{perceive, MentalState, Model, Normalizer, ParameterSet, Structure, N_CHANNELS};
use crate::trace::{DataTag, SessionTrace};

/// Minimum number of measurements a trace needs before it can be split.
pub const MIN_SPLIT_ROWS: usize = 6;

/// `floor(ratio * n)`, robust to representation error in `ratio`.
pub fn train_len(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64) + 1e-9).floor() as usize
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(MmmError::Data(format!("split ratio {ratio} must lie strictly between 0 and 1")))
    }
}

/// Contiguous split: the first `floor(ratio n)` measurements train, the rest test.
/// Time series are never shuffled, so `_seed` does not influence the result.
pub fn split_dataset(trace: &SessionTrace, ratio: f64, _seed: u64) -> Result<(SessionTrace, SessionTrace)> {
    check_ratio(ratio)?;
    if trace.len() < MIN_SPLIT_ROWS {
        return Err(MmmError::Data(format!(
            "{} measurements, at least {MIN_SPLIT_ROWS} needed to split",
            trace.len()
        )));
    }
    let k = train_len(trace.len(), ratio);
    let mut train = trace.clone();
    let mut test = trace.clone();
    train.rows.truncate(k);
    test.rows.drain(..k);
    train.rows.iter_mut().for_each(|r| r.tag = DataTag::Train);
    test.rows.iter_mut().for_each(|r| r.tag = DataTag::Test);
    Ok((train, test))
}

/// The sessions of one participant in chronological order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub sessions: Vec<SessionTrace>,
}

impl Dataset {
    pub fn new(sessions: Vec<SessionTrace>) -> Self {
        Dataset { sessions }
    }

    pub fn len(&self) -> usize {
        self.sessions.iter().map(SessionTrace::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tags the chronological prefix as training data (its last
    /// `validation_fraction` as validation) and the rest as test data.
    pub fn assign_tags(&mut self, ratio: f64, validation_fraction: f64) -> Result<()> {
        check_ratio(ratio)?;
        if !(0.0..1.0).contains(&validation_fraction) {
            return Err(MmmError::Data("validation fraction must lie in [0, 1)".into()));
        }
        let n = self.len();
        if n < MIN_SPLIT_ROWS {
            return Err(MmmError::Data(format!("{n} measurements, at least {MIN_SPLIT_ROWS} needed to split")));
        }
        let n_train = train_len(n, ratio);
        let n_fit = n_train - train_len(n_train, validation_fraction);
        let rows = self.sessions.iter_mut().flat_map(|s| s.rows.iter_mut());
        for (i, row) in rows.enumerate() {
            row.tag = if i < n_fit {
                DataTag::Train
            } else if i < n_train {
                DataTag::Validation
            } else {
                DataTag::Test
            };
        }
        Ok(())
    }

    pub fn count(&self, tag: DataTag) -> usize {
        self.sessions
            .iter()
            .flat_map(|s| &s.rows)
            .filter(|r| r.tag == tag)
            .count()
    }

    /// Min/max scaling fitted on training and validation rows only.
    pub fn fit_normalizer(&self) -> Result<Normalizer> {
        Normalizer::fit(
            self.sessions
                .iter()
                .flat_map(|s| &s.rows)
                .filter(|r| matches!(r.tag, DataTag::Train | DataTag::Validation))
                .map(|r| &r.rld),
        )
    }
}

/// One teacher-forced prediction problem: from the measured state at `m`
/// and the perceived data at `m + 1`, predict the measurement at `m + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub pd: [f64; N_CHANNELS],
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    /// True when the source is not the previous pair's target.
    pub chain_start: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSet {
    pub tag: DataTag,
    pub pairs: Vec<Pair>,
}

fn pairs_of(trace: &SessionTrace, normalizer: &Normalizer, keep: impl Fn(DataTag, DataTag) -> bool) -> Vec<Pair> {
    let mut out = Vec::new();
    let mut last_target: Option<usize> = None;
    for i in 1..trace.rows.len() {
        let (a, b) = (&trace.rows[i - 1], &trace.rows[i]);
        if b.m != a.m + 1 || !keep(a.tag, b.tag) {
            continue;
        }
        let prev = normalizer.apply(&a.rld.values());
        out.push(Pair {
            pd: perceive(&b.rld, normalizer, &prev),
            source: a.answers.clone(),
            target: b.answers.clone(),
            chain_start: last_target != Some(i - 1),
        });
        last_target = Some(i);
    }
    out
}

impl PairSet {
    /// Pairs whose source and target rows both carry `tag`.
    pub fn build(data: &Dataset, normalizer: &Normalizer, tag: DataTag) -> Self {
        let pairs = data
            .sessions
            .iter()
            .flat_map(|s| pairs_of(s, normalizer, |a, b| a == tag && b == tag))
            .collect();
        PairSet { tag, pairs }
    }

    /// Pairs whose source and target rows both carry one of `tags`.
    pub fn build_any(data: &Dataset, normalizer: &Normalizer, tags: &[DataTag]) -> Self {
        let pairs = data
            .sessions
            .iter()
            .flat_map(|s| pairs_of(s, normalizer, |a, b| tags.contains(&a) && tags.contains(&b)))
            .collect();
        PairSet {
            tag: tags.first().copied().unwrap_or_default(),
            pairs,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn targets(&self) -> Vec<Vec<f64>> {
        self.pairs.iter().map(|p| p.target.clone()).collect()
    }
}

pub(crate) fn predict_pair(model: &Model, scratch: &mut MentalState, pair: &Pair) -> MentalState {
    scratch
        .set_measured(&pair.source)
        .expect("pair width matches the structure");
    model.advance(scratch, &pair.pd, SUBSTEPS).0
}

/// Teacher-forced one-measurement-ahead predictions for every consecutive
/// pair of measurements in `trace`.
pub fn predict_one_ahead(
    params: &ParameterSet,
    structure: &Structure,
    trace: &SessionTrace,
    normalizer: &Normalizer,
) -> Result<Vec<Vec<f64>>> {
    let model = Model::new(structure, params)?;
    if trace.answer_names.len() != structure.dims().measured() {
        return Err(MmmError::Structure(format!(
            "trace has {} answers, the model measures {}",
            trace.answer_names.len(),
            structure.dims().measured()
        )));
    }
    let mut scratch = MentalState::zeros(structure.dims());
    Ok(pairs_of(trace, normalizer, |_, _| true)
        .iter()
        .map(|p| predict_pair(&model, &mut scratch, p).measured())
        .collect())
}

pub fn predict_pairs(model: &Model, set: &PairSet) -> Vec<Vec<f64>> {
    let mut scratch = MentalState::zeros(model.structure().dims());
    set.pairs
        .iter()
        .map(|p| predict_pair(model, &mut scratch, p).measured())
        .collect()
}

/// Predictions without resetting to measurements inside a chain of
/// consecutive pairs.
pub fn free_run(model: &Model, set: &PairSet) -> Vec<Vec<f64>> {
    let mut state = MentalState::zeros(model.structure().dims());
    let mut out = Vec::with_capacity(set.len());
    for p in &set.pairs {
        if p.chain_start {
            state.set_measured(&p.source).expect("pair width matches the structure");
        }
        state = model.advance(&state, &p.pd, SUBSTEPS).0;
        out.push(state.measured());
    }
    out
}

/// Mean squared error over all components of all predictions.
pub fn mse(predicted: &[Vec<f64>], measured: &[Vec<f64>]) -> Result<f64> {
    if predicted.len() != measured.len() {
        return Err(MmmError::Data(format!(
            "{} predictions for {} measurements",
            predicted.len(),
            measured.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (p, m) in predicted.iter().zip(measured) {
        if p.len() != m.len() {
            return Err(MmmError::Data("prediction and measurement widths differ".into()));
        }
        sum += p.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        count += p.len();
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}
