//! Session traces: one row per measurement, stored as CSV.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::model::{RealLifeData, CHANNEL_NAMES, N_CHANNELS};

/// Which part of an identification run a row was assigned to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataTag {
    #[default]
    Unassigned,
    Train,
    Validation,
    Test,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    /// Event index within the session; consecutive events give consecutive `m`.
    pub m: u64,
    pub rld: RealLifeData,
    /// Measured beliefs, goals and emotions in [-1, 1].
    pub answers: Vec<f64>,
    pub actions: Vec<bool>,
    /// Simulated session time at the measurement.
    pub seconds: f64,
    pub puzzle: u32,
    pub tag: DataTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionTrace {
    pub answer_names: Vec<String>,
    pub action_names: Vec<String>,
    pub rows: Vec<TraceRow>,
    /// False when the session was aborted by a driver failure.
    pub complete: bool,
}

impl SessionTrace {
    pub fn new(answer_names: Vec<String>, action_names: Vec<String>) -> Self {
        SessionTrace {
            answer_names,
            action_names,
            rows: Vec::new(),
            complete: true,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let mut last: Option<u64> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if last.is_some_and(|l| r.m <= l) {
                return Err(MmmError::Data(format!("row {i}: measurement index {} not increasing", r.m)));
            }
            last = Some(r.m);
            if r.answers.len() != self.answer_names.len() {
                return Err(MmmError::Data(format!("row {i}: {} answers", r.answers.len())));
            }
            if r.actions.len() != self.action_names.len() {
                return Err(MmmError::Data(format!("row {i}: {} actions", r.actions.len())));
            }
            if r.answers.iter().any(|a| !(-1.0..=1.0).contains(a)) {
                return Err(MmmError::Data(format!("row {i}: answer outside [-1, 1]")));
            }
            r.rld.validate(None)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = vec!["m".into()];
        header.extend(CHANNEL_NAMES.iter().map(|c| c.to_string()));
        header.extend(self.answer_names.iter().map(|n| format!("ans_{n}")));
        header.extend(self.action_names.iter().map(|n| format!("act_{n}")));
        header.push("seconds".into());
        header.push("puzzle".into());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            rec.push(r.m.to_string());
            rec.push(r.rld.difficulty.to_string());
            rec.push(r.rld.hints.to_string());
            rec.push(r.rld.wrong_attempts.to_string());
            rec.push(r.rld.solve_time.to_string());
            rec.push(u8::from(r.rld.skipped).to_string());
            rec.push(u8::from(r.rld.reward_given).to_string());
            rec.extend(r.answers.iter().map(|a| a.to_string()));
            rec.extend(r.actions.iter().map(|&a| u8::from(a).to_string()));
            rec.push(r.seconds.to_string());
            rec.push(r.puzzle.to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let names: Vec<&str> = header.iter().collect();
        let expect_prefix = 1 + N_CHANNELS;
        if names.len() < expect_prefix + 2
            || names[0] != "m"
            || names[1..expect_prefix] != CHANNEL_NAMES[..]
            || names[names.len() - 2..] != ["seconds", "puzzle"]
        {
            return Err(MmmError::Format(format!("unexpected trace header {names:?}")));
        }
        let middle = &names[expect_prefix..names.len() - 2];
        let answer_names: Vec<String> = middle
            .iter()
            .filter_map(|n| n.strip_prefix("ans_").map(str::to_string))
            .collect();
        let action_names: Vec<String> = middle
            .iter()
            .filter_map(|n| n.strip_prefix("act_").map(str::to_string))
            .collect();
        if answer_names.len() + action_names.len() != middle.len()
            || middle[..answer_names.len()].iter().any(|n| !n.starts_with("ans_"))
        {
            return Err(MmmError::Format("trace columns must be answers then actions".into()));
        }
        let (na, nact) = (answer_names.len(), action_names.len());
        let mut trace = SessionTrace::new(answer_names, action_names);
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let bad = |i: usize| MmmError::Format(format!("row {line}: cannot parse `{}` in column {i}", field(i)));
            let int = |i: usize| field(i).parse::<u64>().map_err(|_| bad(i));
            let real = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
            let flag = |i: usize| match field(i) {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad(i)),
            };
            let rld = RealLifeData {
                difficulty: u8::try_from(int(1)?).map_err(|_| bad(1))?,
                hints: u32::try_from(int(2)?).map_err(|_| bad(2))?,
                wrong_attempts: u32::try_from(int(3)?).map_err(|_| bad(3))?,
                solve_time: real(4)?,
                skipped: flag(5)?,
                reward_given: flag(6)?,
                ..Default::default()
            };
            let base = expect_prefix;
            let answers = (0..na).map(|k| real(base + k)).collect::<Result<Vec<_>>>()?;
            let actions = (0..nact).map(|k| flag(base + na + k)).collect::<Result<Vec<_>>>()?;
            let tail = base + na + nact;
            trace.rows.push(TraceRow {
                m: int(0)?,
                rld,
                answers,
                actions,
                seconds: real(tail)?,
                puzzle: u32::try_from(int(tail + 1)?).map_err(|_| bad(tail + 1))?,
                tag: DataTag::Unassigned,
            });
        }
        trace.validate()?;
        Ok(trace)
    }
}
