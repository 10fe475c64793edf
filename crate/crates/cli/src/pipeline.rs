use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use mmm_core::control::ControllerState;
use mmm_core::identify::{identify, identify_with_schedule, Approach, Dataset, IdentReport};
use mmm_core::model::{ModelSpec, Structure};
use mmm_core::simulate::{collect_sessions, generate_cohort, participant_id, run_comparison, ParticipantFile};
use mmm_core::trace::SessionTrace;
use mmm_core::{MmmError, Result};

use crate::config::{weight_tag, ExperimentConfig};
use crate::stats::paired_permutation_test;

/// Variables compared between the two controllers.
pub const COMPARED: [&str; 4] = ["g_quit", "g_skip", "e_boredom", "e_frustration"];

pub const ARMS: [&str; 2] = ["mbc", "rule"];

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| MmmError::Data(format!("cannot read {}: {e}", path.display())))
}

pub fn participant_path(out: &Path, id: &str) -> PathBuf {
    out.join("participants").join(format!("{id}.toml"))
}

pub fn trace_path(out: &Path, id: &str, session: u8) -> PathBuf {
    out.join("traces").join(format!("{id}_s{session}.csv"))
}

pub fn report_path(out: &Path, id: &str, approach: Approach, w: f64) -> PathBuf {
    out.join("reports").join(format!("{id}_{approach}_{}.toml", weight_tag(w)))
}

pub fn session3_path(out: &Path, id: &str, arm: &str) -> PathBuf {
    out.join("session3").join(format!("{id}_{arm}.csv"))
}

fn ids(cfg: &ExperimentConfig) -> Vec<String> {
    (0..cfg.participants).map(participant_id).collect()
}

fn write_trace(path: &Path, trace: &SessionTrace) -> Result<()> {
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    write_file(path, &String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn read_trace(path: &Path) -> Result<SessionTrace> {
    let t = SessionTrace::read_csv(read_file(path)?.as_bytes())?;
    t.validate()?;
    Ok(t)
}

pub fn load_participant(out: &Path, id: &str) -> Result<ParticipantFile> {
    let text = read_file(&participant_path(out, id))?;
    let file: ParticipantFile = toml::from_str(&text)?;
    Structure::compile(&file.model.spec)?;
    Ok(file)
}

pub fn load_report(path: &Path) -> Result<IdentReport> {
    IdentReport::from_toml(&read_file(path)?)
}

/// Writes one ground-truth file per participant.
pub fn cmd_synth_gen(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let files = generate_cohort(&cfg.cohort())?;
    files
        .iter()
        .map(|f| {
            let path = participant_path(out, &f.id);
            write_file(&path, &toml::to_string(f)?)?;
            Ok(path)
        })
        .collect()
}

/// Runs the two scripted sessions of every participant.
pub fn cmd_collect(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let per: Vec<Vec<(PathBuf, SessionTrace)>> = ids(cfg)
        .par_iter()
        .map(|id| {
            let file = load_participant(out, id)?;
            let traces = collect_sessions(&file)?;
            Ok(traces
                .into_iter()
                .zip([1u8, 2])
                .map(|(t, s)| (trace_path(out, id, s), t))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut paths = Vec::new();
    for (path, trace) in per.into_iter().flatten() {
        write_trace(&path, &trace)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Cohort averages of one (self weight, approach) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    pub self_weight: f64,
    pub approach: Approach,
    pub train_mse: f64,
    pub test_mse: f64,
    pub percent_identified: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentifyGrid {
    pub cells: Vec<GridCell>,
    /// Per participant, reports in cell order.
    pub reports: Vec<(String, Vec<IdentReport>)>,
}

impl IdentifyGrid {
    pub fn cell(&self, w: f64, approach: Approach) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.self_weight == w && c.approach == approach)
    }
}

/// Loads the scripted-session traces of one participant as a tagged data set.
pub fn load_dataset(cfg: &ExperimentConfig, out: &Path, id: &str) -> Result<Dataset> {
    let sessions = [1u8, 2]
        .into_iter()
        .map(|s| read_trace(&trace_path(out, id, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Dataset::new(sessions);
    data.assign_tags(cfg.identification.split_ratio, cfg.identification.validation_fraction)?;
    Ok(data)
}

fn grid_conditions(cfg: &ExperimentConfig) -> Vec<(f64, Approach)> {
    cfg.self_weights
        .iter()
        .flat_map(|&w| cfg.approaches.iter().map(move |&a| (w, a)))
        .collect()
}

/// Identifies every participant under every (self weight, approach) pair.
pub fn cmd_identify(cfg: &ExperimentConfig, out: &Path) -> Result<IdentifyGrid> {
    cfg.validate()?;
    let conditions = grid_conditions(cfg);
    let spec = ModelSpec::case_study();
    let reports: Vec<(String, Vec<IdentReport>)> = ids(cfg)
        .par_iter()
        .map(|id| {
            let data = load_dataset(cfg, out, id)?;
            let reports = conditions
                .iter()
                .map(|&(w, a)| {
                    let ic = cfg.identification_for(a);
                    if cfg.self_weight_schedule && w == cfg.self_weights[0] {
                        let ic = mmm_core::identify::IdentificationConfig {
                            self_weight: w,
                            ..ic
                        };
                        identify_with_schedule(&data, &spec, &ic)
                    } else {
                        identify(&data, &spec.clone().with_goal_emotion_self_weight(w), &ic)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((id.clone(), reports))
        })
        .collect::<Result<_>>()?;

    for (id, rs) in &reports {
        for (&(w, a), r) in conditions.iter().zip(rs) {
            write_file(&report_path(out, id, a, w), &r.to_toml()?)?;
        }
    }
    let n = reports.len() as f64;
    let cells: Vec<GridCell> = conditions
        .iter()
        .enumerate()
        .map(|(k, &(w, a))| {
            let avg = |f: &dyn Fn(&IdentReport) -> f64| reports.iter().map(|(_, rs)| f(&rs[k])).sum::<f64>() / n;
            GridCell {
                self_weight: w,
                approach: a,
                train_mse: avg(&|r| r.train_mse),
                test_mse: avg(&|r| r.test_mse),
                percent_identified: avg(&|r| r.percent_identified),
            }
        })
        .collect();

    let mut grid = String::from("self_weight,approach,train_mse,test_mse,percent_identified\n");
    for c in &cells {
        writeln!(
            grid,
            "{:.1},{},{:.6},{:.6},{:.2}",
            c.self_weight, c.approach, c.train_mse, c.test_mse, c.percent_identified
        )
        .expect("write to string");
    }
    write_file(&out.join("identify_grid.csv"), &grid)?;

    let mut per = String::from(
        "participant,self_weight,approach,fitted_self_weight,train_mse,test_mse,free_run_test_mse,percent_identified\n",
    );
    for (id, rs) in &reports {
        for (&(w, a), r) in conditions.iter().zip(rs) {
            writeln!(
                per,
                "{id},{w:.1},{a},{:.1},{:.6},{:.6},{:.6},{:.2}",
                r.self_weight(),
                r.train_mse,
                r.test_mse,
                r.free_run_test_mse,
                r.percent_identified
            )
            .expect("write to string");
        }
    }
    write_file(&out.join("identify_participants.csv"), &per)?;
    Ok(IdentifyGrid { cells, reports })
}

/// Mean of the named answer over all measurements of a trace.
pub fn mean_answer(trace: &SessionTrace, name: &str) -> Result<f64> {
    let col = trace
        .answer_names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| MmmError::Data(format!("trace has no answer column {name}")))?;
    if trace.is_empty() {
        return Err(MmmError::Data("no measurements in the comparison session".into()));
    }
    Ok(trace.rows.iter().map(|r| r.answers[col]).sum::<f64>() / trace.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub variable: String,
    pub mbc: f64,
    pub rule: f64,
    /// `mbc - rule`.
    pub diff: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonSummary {
    pub rows: Vec<ComparisonRow>,
    /// (participant, MBC played first, per-variable means of the MBC arm, of the rule-based arm).
    pub participants: Vec<(String, bool, Vec<f64>, Vec<f64>)>,
}

impl ComparisonSummary {
    pub fn row(&self, variable: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.variable == variable)
    }
}

/// Session 3 for every participant with the identified model in charge of
/// one arm and the uniform rule-based controller in charge of the other.
pub fn cmd_compare(cfg: &ExperimentConfig, out: &Path) -> Result<ComparisonSummary> {
    cfg.validate()?;
    let w = cfg.self_weights[0];
    let per: Vec<(String, bool, SessionTrace, SessionTrace)> = ids(cfg)
        .par_iter()
        .enumerate()
        .map(|(i, id)| {
            let file = load_participant(out, id)?;
            let report = load_report(&report_path(out, id, cfg.controller_approach, w))?;
            let structure = Structure::compile(&report.model.spec)?;
            let ctrl = ControllerState::new(
                structure,
                report.model.params.clone(),
                report.normalizer.clone(),
                cfg.controller.clone(),
            )?;
            // even positions play the model-based controller first
            let c = run_comparison(&file, ctrl, cfg.session_minutes, i % 2 == 0)?;
            Ok((id.clone(), c.mbc_first, c.mbc, c.rule_based))
        })
        .collect::<Result<_>>()?;

    let mut participants = Vec::new();
    for (id, first, mbc, rule) in &per {
        write_trace(&session3_path(out, id, "mbc"), mbc)?;
        write_trace(&session3_path(out, id, "rule"), rule)?;
        let m = COMPARED.iter().map(|v| mean_answer(mbc, v)).collect::<Result<Vec<_>>>()?;
        let r = COMPARED.iter().map(|v| mean_answer(rule, v)).collect::<Result<Vec<_>>>()?;
        participants.push((id.clone(), *first, m, r));
    }
    let n = participants.len() as f64;
    let rows = COMPARED
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let a: Vec<f64> = participants.iter().map(|p| p.2[k]).collect();
            let b: Vec<f64> = participants.iter().map(|p| p.3[k]).collect();
            let t = paired_permutation_test(&a, &b)?;
            Ok(ComparisonRow {
                variable: v.to_string(),
                mbc: a.iter().sum::<f64>() / n,
                rule: b.iter().sum::<f64>() / n,
                diff: t.mean_diff,
                p_value: t.p_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut text = String::from("participant,mbc_first");
    for arm in ARMS {
        for v in COMPARED {
            write!(text, ",{arm}_{v}").expect("write to string");
        }
    }
    text.push('\n');
    for (id, first, m, r) in &participants {
        write!(text, "{id},{}", u8::from(*first)).expect("write to string");
        for x in m.iter().chain(r) {
            write!(text, ",{x:.6}").expect("write to string");
        }
        text.push('\n');
    }
    write_file(&out.join("compare_participants.csv"), &text)?;

    let mut summary = String::from("variable,mbc,rule,diff,diff_pp,p_value\n");
    for r in &rows {
        writeln!(
            summary,
            "{},{:.6},{:.6},{:.6},{:.2},{:.6}",
            r.variable,
            r.mbc,
            r.rule,
            r.diff,
            50.0 * r.diff,
            r.p_value
        )
        .expect("write to string");
    }
    write_file(&out.join("compare_summary.csv"), &summary)?;
    Ok(ComparisonSummary { rows, participants })
}

/// Per participant and arm, the comparison session as plot data: puzzle
/// index, the eight measured variables and the two inputs.
pub fn timeseries_csv(trace: &SessionTrace) -> String {
    let mut s = String::from("puzzle");
    for n in &trace.answer_names {
        write!(s, ",{n}").expect("write to string");
    }
    s.push_str(",difficulty,reward\n");
    for r in &trace.rows {
        write!(s, "{}", r.puzzle).expect("write to string");
        for a in &r.answers {
            write!(s, ",{a:.1}").expect("write to string");
        }
        writeln!(s, ",{},{}", r.rld.difficulty, u8::from(r.rld.reward_given)).expect("write to string");
    }
    s
}

/// Plot data per participant and arm plus a plain-text summary of the
/// identification grid and the comparison.
pub fn cmd_report(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for id in ids(cfg) {
        for arm in ARMS {
            let trace = read_trace(&session3_path(out, &id, arm))?;
            let path = out.join("timeseries").join(format!("{id}_{arm}.csv"));
            write_file(&path, &timeseries_csv(&trace))?;
            written.push(path);
        }
    }
    let grid = read_file(&out.join("identify_grid.csv"))?;
    let compare = read_file(&out.join("compare_summary.csv"))?;
    let mut s = String::new();
    writeln!(s, "participants: {}  seed: {}", cfg.participants, cfg.seed).expect("write to string");
    s.push_str("\nidentification (cohort averages)\n");
    s.push_str(&table(&grid));
    s.push_str("\ncomparison session (MBC minus rule-based; diff_pp on the [-1, 1] range)\n");
    s.push_str(&table(&compare));
    let path = out.join("summary.txt");
    write_file(&path, &s)?;
    written.push(path);
    Ok(written)
}

/// Aligns a small comma-separated table into columns.
fn table(csv_text: &str) -> String {
    let rows: Vec<Vec<&str>> = csv_text.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|x| x.len()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, x)| format!("{x:>w$}", w = widths[c])).collect();
        s.push_str("  ");
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

fn collect_files(dir: &Path, root: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, root, out)?;
        } else {
            out.push(path.strip_prefix(root).expect("inside root").to_path_buf());
        }
    }
    Ok(())
}

pub const MANIFEST: &str = "manifest.txt";

/// Lists every artifact under `out` with its SHA-256, sorted by path.
pub fn write_manifest(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let mut files = Vec::new();
    collect_files(out, out, &mut files)?;
    files.retain(|p| p != Path::new(MANIFEST));
    files.sort();
    let mut s = String::new();
    writeln!(s, "seed {}", cfg.seed).expect("write to string");
    writeln!(s, "participants {}", cfg.participants).expect("write to string");
    for f in files {
        let bytes = fs::read(out.join(&f))?;
        let name = f.iter().map(|c| c.to_string_lossy()).collect::<Vec<_>>().join("/");
        writeln!(s, "{}  {name}", hex::encode(Sha256::digest(&bytes))).expect("write to string");
    }
    let path = out.join(MANIFEST);
    write_file(&path, &s)?;
    Ok(path)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunAll {
    pub grid: IdentifyGrid,
    pub comparison: Option<ComparisonSummary>,
}

/// The whole pipeline into `out`.
pub fn cmd_run_all(cfg: &ExperimentConfig, out: &Path) -> Result<RunAll> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    write_file(&out.join("config.toml"), &cfg.to_toml()?)?;
    cmd_synth_gen(cfg, out)?;
    cmd_collect(cfg, out)?;
    let grid = cmd_identify(cfg, out)?;
    let comparison = if cfg.controller_model_available() {
        let c = cmd_compare(cfg, out)?;
        cmd_report(cfg, out)?;
        Some(c)
    } else {
        None
    };
    write_manifest(cfg, out)?;
    Ok(RunAll { grid, comparison })
}
