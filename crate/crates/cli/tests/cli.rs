use std::fs;
use std::path::Path;
use std::process::Command;

use mmm_cli::config::ExperimentConfig;
use mmm_cli::pipeline::{
    cmd_collect, cmd_compare, cmd_identify, cmd_report, cmd_run_all, cmd_synth_gen, load_dataset, load_participant,
    mean_answer, participant_path, read_trace, report_path, trace_path, COMPARED, MANIFEST,
};
use mmm_cli::stats::paired_permutation_test;
use mmm_core::identify::{Approach, IdentificationConfig};
use mmm_core::model::{LinkWeights, ModelSpec, Structure};
use mmm_core::simulate::{
    participant_id, run_session, template_parameters, ParticipantFile, RuleBasedController, SessionConfig,
    SyntheticParticipant,
};
use mmm_core::trace::DataTag;
use tempfile::TempDir;

/// Three participants and a handful of short optimizer runs.
fn small() -> ExperimentConfig {
    ExperimentConfig {
        participants: 3,
        session_minutes: 10.0,
        identification: IdentificationConfig {
            n_run: 4,
            n_opt: 2,
            budget: 60,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn mmm(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mmm"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(args: &[&str], dir: &Path) -> i32 {
    mmm(args, dir).status.code().unwrap()
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&["--help"], d), 0);
    assert_eq!(code(&[], d), 1);
    assert_eq!(code(&["frobnicate"], d), 1);
    assert_eq!(code(&["synth-gen", "--approach", "d"], d), 1);
    assert_eq!(code(&["synth-gen", "--jobs", "0"], d), 1);
    assert_eq!(code(&["synth-gen", "--config", "missing.toml"], d), 2);
    fs::write(d.join("bad.toml"), "participants = 0\n").unwrap();
    assert_eq!(code(&["synth-gen", "--config", "bad.toml"], d), 2);
    fs::write(d.join("typo.toml"), "participant = 3\n").unwrap();
    assert_eq!(code(&["synth-gen", "--config", "typo.toml"], d), 2);
    // nothing collected yet
    assert_eq!(code(&["identify", "--participants", "2"], d), 2);
    assert_eq!(code(&["report", "--participants", "2"], d), 2);

    assert_eq!(code(&["synth-gen", "--participants", "2", "--seed", "4"], d), 0);
    // a participant whose dynamics diverge
    let path = participant_path(&d.join("out"), &participant_id(1));
    let mut f: ParticipantFile = toml::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for w in &mut f.model.params.linkages {
        *w = LinkWeights::constant(1.0);
    }
    fs::write(&path, toml::to_string(&f).unwrap()).unwrap();
    let o = mmm(&["collect", "--participants", "2"], d);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_gen_writes_one_file_per_participant() {
    let dir = TempDir::new().unwrap();
    let cfg = ExperimentConfig::default();
    let files = cmd_synth_gen(&cfg, dir.path()).unwrap();
    assert_eq!(files.len(), 10);
    assert!(files.iter().all(|p| p.exists()));

    let flat = ExperimentConfig {
        perturbation: 0.0,
        participants: 4,
        ..Default::default()
    };
    let dir = TempDir::new().unwrap();
    cmd_synth_gen(&flat, dir.path()).unwrap();
    let template = template_parameters(&Structure::compile(&ModelSpec::case_study()).unwrap()).unwrap();
    for i in 0..4 {
        let f = load_participant(dir.path(), &participant_id(i)).unwrap();
        assert_eq!(f.model.params, template);
    }
}

#[test]
fn collect_is_reproducible_and_follows_the_script() {
    let cfg = ExperimentConfig::default();
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        cmd_synth_gen(&cfg, d.path()).unwrap();
        let traces = cmd_collect(&cfg, d.path()).unwrap();
        assert_eq!(traces.len(), 20);
    }
    assert_eq!(read_tree(a.path()), read_tree(b.path()));
    let first_cycle = [0u8, 0, 0, 2, 2, 2, 4, 4, 4, 4, 4, 4, 2, 2, 2, 0, 0, 0];
    for i in 0..10 {
        let t = read_trace(&trace_path(a.path(), &participant_id(i), 1)).unwrap();
        for r in &t.rows {
            assert_eq!(r.rld.difficulty, first_cycle[r.puzzle as usize % 18]);
        }
    }
}

#[test]
fn small_pipeline_end_to_end() {
    let cfg = small();
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let run = cmd_run_all(&cfg, out).unwrap();

    // identification grid: 2 self weights x 3 approaches
    assert_eq!(run.grid.cells.len(), 6);
    for c in &run.grid.cells {
        for v in [c.train_mse, c.test_mse] {
            assert!((0.0..=4.0).contains(&v), "{c:?}");
        }
        assert!((0.0..=100.0).contains(&c.percent_identified));
    }
    let grid = fs::read_to_string(out.join("identify_grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 7);
    for (id, reports) in &run.grid.reports {
        assert_eq!(reports.len(), 6);
        for w in [0.9, 0.0] {
            for a in Approach::ALL {
                assert!(report_path(out, id, a, w).exists());
            }
        }
    }

    // comparison: four variables, order counterbalanced
    let c = run.comparison.as_ref().unwrap();
    let names: Vec<&str> = c.rows.iter().map(|r| r.variable.as_str()).collect();
    assert_eq!(names, COMPARED);
    for r in &c.rows {
        assert!((r.diff - (r.mbc - r.rule)).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&r.p_value));
    }
    let first = c.participants.iter().filter(|p| p.1).count();
    assert_eq!(first, cfg.participants.div_ceil(2));

    // plot data: puzzle index, eight variables, two inputs
    for i in 0..cfg.participants {
        for arm in ["mbc", "rule"] {
            let ts = fs::read_to_string(out.join("timeseries").join(format!("{}_{arm}.csv", participant_id(i)))).unwrap();
            let header: Vec<&str> = ts.lines().next().unwrap().split(',').collect();
            assert_eq!(header.len(), 11);
            assert_eq!(header[0], "puzzle");
            assert_eq!(header[9..], ["difficulty", "reward"]);
            assert!(ts.lines().skip(1).all(|l| l.split(',').count() == 11));
        }
    }
    assert!(out.join("summary.txt").exists());

    // the manifest lists every other file with its hash
    let manifest = fs::read_to_string(out.join(MANIFEST)).unwrap();
    assert!(manifest.starts_with(&format!("seed {}\nparticipants {}\n", cfg.seed, cfg.participants)));
    let listed = manifest.lines().count() - 2;
    assert_eq!(listed, read_tree(out).len() - 1);

    // report is a pure function of its inputs
    let before = read_tree(out);
    cmd_report(&cfg, out).unwrap();
    assert_eq!(read_tree(out), before);
}

#[test]
fn small_pipeline_is_byte_reproducible() {
    let cfg = small();
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    cmd_run_all(&cfg, a.path()).unwrap();
    cmd_run_all(&cfg, b.path()).unwrap();
    assert_eq!(read_tree(a.path()), read_tree(b.path()));
    let other = TempDir::new().unwrap();
    cmd_run_all(&ExperimentConfig { seed: 2, ..cfg }, other.path()).unwrap();
    assert_ne!(read_tree(a.path()), read_tree(other.path()));
}

#[test]
fn binary_run_all_matches_library() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("small.toml"), small().to_toml().unwrap()).unwrap();
    let o = mmm(&["run-all", "--config", "small.toml", "--out", "bin", "--jobs", "2"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("manifest:"));
    cmd_run_all(&small(), &d.join("lib")).unwrap();
    assert_eq!(read_tree(&d.join("bin")), read_tree(&d.join("lib")));
}

#[test]
fn test_rows_never_reach_the_optimizer() {
    let cfg = ExperimentConfig {
        participants: 2,
        approaches: vec![Approach::A],
        ..small()
    };
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    cmd_synth_gen(&cfg, out).unwrap();
    cmd_collect(&cfg, out).unwrap();
    let before = cmd_identify(&cfg, out).unwrap();

    // scramble every answer on rows tagged for testing
    for i in 0..cfg.participants {
        let id = participant_id(i);
        let data = load_dataset(&cfg, out, &id).unwrap();
        let mut touched = 0;
        for (k, s) in [1u8, 2].into_iter().enumerate() {
            let mut t = read_trace(&trace_path(out, &id, s)).unwrap();
            for (r, tagged) in t.rows.iter_mut().zip(&data.sessions[k].rows) {
                if tagged.tag == DataTag::Test {
                    r.answers.iter_mut().for_each(|a| *a = -*a);
                    touched += 1;
                }
            }
            let mut buf = Vec::new();
            t.write_csv(&mut buf).unwrap();
            fs::write(trace_path(out, &id, s), buf).unwrap();
        }
        assert!(touched > 0);
    }
    let after = cmd_identify(&cfg, out).unwrap();
    for ((_, a), (_, b)) in before.reports.iter().zip(&after.reports) {
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.model, y.model);
            assert_eq!(x.runs, y.runs);
            assert_eq!(x.train_mse, y.train_mse);
            assert_eq!(x.validation_mse, y.validation_mse);
            assert_ne!(x.test_mse, y.test_mse);
        }
    }
}

#[test]
fn identical_controllers_compare_as_equal() {
    let cfg = ExperimentConfig::default();
    let dir = TempDir::new().unwrap();
    cmd_synth_gen(&cfg, dir.path()).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..cfg.participants {
        let file = load_participant(dir.path(), &participant_id(i)).unwrap();
        let play = || {
            let mut p = SyntheticParticipant::from_file(&file).unwrap();
            let mut c = RuleBasedController::new(i as u64);
            run_session(&mut p, &mut c, &SessionConfig::controlled(cfg.session_minutes))
        };
        let (x, y) = (play(), play());
        a.push(mean_answer(&x, "e_boredom").unwrap());
        b.push(mean_answer(&y, "e_boredom").unwrap());
    }
    let t = paired_permutation_test(&a, &b).unwrap();
    assert_eq!(t.mean_diff, 0.0);
    assert_eq!(t.p_value, 1.0);
}

#[test]
fn compare_needs_identified_models() {
    let cfg = small();
    let dir = TempDir::new().unwrap();
    cmd_synth_gen(&cfg, dir.path()).unwrap();
    cmd_collect(&cfg, dir.path()).unwrap();
    assert!(cmd_compare(&cfg, dir.path()).is_err());
}
