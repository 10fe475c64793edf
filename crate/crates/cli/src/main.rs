use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mmm_cli::config::ExperimentConfig;
use mmm_cli::pipeline::{self, MANIFEST};
use mmm_core::identify::Approach;
use mmm_core::MmmError;

#[derive(Parser, Debug)]
#[command(name = "mmm", version, about = "Synthetic-cohort experiments for the mental model and its controller")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Restrict identification to one approach.
    #[arg(long, global = true, value_parser = ["conventional", "a", "b"])]
    approach: Option<String>,
    #[arg(long, global = true)]
    participants: Option<usize>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write ground-truth parameter files for the cohort.
    SynthGen,
    /// Run scripted sessions 1 and 2 for every participant.
    Collect,
    /// Identify every participant under each approach and self weight.
    Identify,
    /// Run the comparison session: model-based versus rule-based control.
    Compare,
    /// Write plot data and summary tables.
    Report,
    /// All of the above, then a manifest of every artifact.
    RunAll,
}

fn exit_code(e: &MmmError) -> u8 {
    match e {
        MmmError::Numerical(_) | MmmError::Unstable { .. } => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<(), MmmError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.participants {
        cfg.participants = n;
    }
    if let Some(a) = &cli.approach {
        let a: Approach = a.parse()?;
        cfg.approaches = vec![a];
        cfg.controller_approach = a;
    }
    cfg.validate()?;
    let out = &cli.out;
    match cli.command {
        Command::SynthGen => {
            let files = pipeline::cmd_synth_gen(&cfg, out)?;
            println!("wrote {} participant files", files.len());
        }
        Command::Collect => {
            let files = pipeline::cmd_collect(&cfg, out)?;
            println!("wrote {} traces", files.len());
        }
        Command::Identify => {
            let grid = pipeline::cmd_identify(&cfg, out)?;
            print_grid(&grid);
        }
        Command::Compare => {
            let c = pipeline::cmd_compare(&cfg, out)?;
            print_comparison(&c);
        }
        Command::Report => {
            let files = pipeline::cmd_report(&cfg, out)?;
            println!("wrote {} report files", files.len());
        }
        Command::RunAll => {
            let r = pipeline::cmd_run_all(&cfg, out)?;
            print_grid(&r.grid);
            if let Some(c) = &r.comparison {
                print_comparison(c);
            }
            println!("manifest: {}", out.join(MANIFEST).display());
        }
    }
    Ok(())
}

fn print_grid(grid: &pipeline::IdentifyGrid) {
    println!("self_weight approach      train_mse test_mse identified%");
    for c in &grid.cells {
        println!(
            "{:11.1} {:<12} {:9.4} {:8.4} {:11.2}",
            c.self_weight, c.approach, c.train_mse, c.test_mse, c.percent_identified
        );
    }
}

fn print_comparison(c: &pipeline::ComparisonSummary) {
    println!("variable          mbc     rule     diff  p_value");
    for r in &c.rows {
        println!("{:14} {:7.3} {:8.3} {:8.3} {:8.4}", r.variable, r.mbc, r.rule, r.diff, r.p_value);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
