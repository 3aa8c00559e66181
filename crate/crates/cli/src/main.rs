//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use birwalk_cli::commands::error_exit_code;
use birwalk_cli::{cmd_compare, cmd_crosscheck, cmd_equidist, cmd_sample, cmd_walk, GeneratorSpec, Outcome, RunConfig};
use birwalk_core::walk::ArithMode;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "birwalk", version, about = "Random products of plane birational maps on the Picard-Manin space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Generator seed for `sample`, base trial seed otherwise.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    mode: Option<ArithMode>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Certificate length for `sample`, prefix length for `equidist`, word
    /// length otherwise.
    #[arg(long, global = true)]
    max_len: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample and certify a generator tuple.
    Sample,
    /// Run walk trials.
    Walk,
    /// Verify identities over all short reduced words.
    Crosscheck,
    /// Pull a curve back along walk prefixes.
    Equidist,
    /// Pair the final classes of two walk artifacts.
    Compare { a: PathBuf, b: PathBuf },
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        match (&cli.command, &mut config.generators) {
            (Command::Sample, GeneratorSpec::Sample { seed: s, .. }) => *s = seed,
            _ => config.seed = seed,
        }
    }
    if let Some(mode) = cli.mode {
        config.mode = mode;
    }
    if let Some(steps) = cli.steps {
        config.steps = steps;
    }
    if let Some(len) = cli.max_len {
        match cli.command {
            Command::Sample => config.certificate_len = len,
            Command::Equidist => config.equidist.max_len = len,
            _ => config.max_len = len,
        }
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let config = configure(cli)?;
    let dir = config.output_dir.display();
    let outcome = match &cli.command {
        Command::Sample => {
            let (a, o) = cmd_sample(&config)?;
            println!("sample: {} generators after {} attempt(s) -> {}/generators.json", a.generators.len(), a.attempts, dir);
            o
        }
        Command::Walk => {
            let (a, o) = cmd_walk(&config)?;
            let aborted = a.trials.iter().filter(|t| t.report.abort.is_some()).count();
            println!("walk: {} trial(s), {} aborted -> {}/walk.json", a.trials.len(), aborted, dir);
            for t in &a.trials {
                if let Some(ab) = &t.report.abort {
                    eprintln!("trial {} (seed {}): {}", t.trial, t.seed, serde_json::to_string(ab)?);
                }
            }
            o
        }
        Command::Crosscheck => {
            let (a, o) = cmd_crosscheck(&config)?;
            for (check, t) in &a.report.tallies {
                println!("{:?}: {} passed, {} failed", check, t.passed, t.failed);
            }
            o
        }
        Command::Equidist => {
            let (a, o) = cmd_equidist(&config)?;
            for w in &a.warnings {
                eprintln!("warning: {}", w);
            }
            println!("equidist: {} trial(s) -> {}/equidist.json", a.trials.len(), dir);
            o
        }
        Command::Compare { a, b } => {
            let (art, o) = cmd_compare(a, b, &config.output_dir)?;
            for p in &art.pairs {
                println!(
                    "trial {}: pairing {:e}, control {:e}",
                    p.trial,
                    p.comparison.pairing,
                    p.comparison.control()
                );
            }
            o
        }
    };
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(o) => ExitCode::from(o.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
