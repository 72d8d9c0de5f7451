use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixsch::harness::config::ExperimentKind;
use mixsch::harness::record::read_jsonl_file;
use mixsch::harness::registry::{find, CRITERIA};
use mixsch::harness::{parse_config, replay, run_experiment};
use mixsch::Error;

/// Finite-n and continuum engines for critical 1-D random Schrödinger operators.
///
/// Exit codes: 0 ok, 1 I/O error or failed acceptance criterion, 2 configuration
/// error, 3 numerical failure budget exceeded, 4 integrity error (including
/// replay mismatches).
#[derive(Parser)]
#[command(name = "mixsch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file, or a named acceptance experiment.
    Run {
        #[arg(long, env = "MIXSCH_CONFIG", conflicts_with = "experiment", required_unless_present = "experiment")]
        config: Option<PathBuf>,
        /// Name from `list-experiments`.
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long, env = "MIXSCH_REPLICAS")]
        replicas: Option<u64>,
        #[arg(long, env = "MIXSCH_SEED")]
        seed: Option<u64>,
        #[arg(long, env = "MIXSCH_SHARDS")]
        shards: Option<u64>,
        #[arg(long, env = "MIXSCH_OUT")]
        out: Option<PathBuf>,
    },
    /// Recompute records from their seed lineage and compare payload digests.
    Replay {
        #[arg(long)]
        record: PathBuf,
        /// Replay only the record on this 0-based line.
        #[arg(long)]
        line: Option<usize>,
    },
    /// Named acceptance experiments and config experiment kinds.
    ListExperiments,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::ListExperiments => {
            println!("acceptance experiments (run --experiment <name>):");
            for c in &CRITERIA {
                println!("  {:<20} {:>5}s  {}", c.name, c.budget.as_secs(), c.summary);
            }
            println!("config experiment kinds:");
            for k in ExperimentKind::ALL {
                println!("  {}", k.name());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { experiment: Some(name), .. } => {
            let c = find(&name).ok_or_else(|| {
                let names: Vec<_> = CRITERIA.iter().map(|c| c.name).collect();
                Error::Config(vec![format!("experiment: unknown name {name:?}; known: {}", names.join(", "))])
            })?;
            let outcome = c.run();
            println!("{}", outcome.line());
            Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Run { config, replicas, seed, shards, out, .. } => {
            let path = config.expect("clap requires --config without --experiment");
            let mut cfg = parse_config(&std::fs::read_to_string(&path)?)?;
            if let Some(r) = replicas {
                cfg.mc.replicas = r;
            }
            if let Some(s) = seed {
                cfg.mc.base_seed = s;
            }
            if let Some(s) = shards {
                cfg.mc.shards = s;
            }
            if let Some(o) = out {
                cfg.output.directory = Some(o.to_string_lossy().into_owned());
            }
            cfg.validate()?;
            let result = run_experiment(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&result.aggregate().payload)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { record, line } => {
            let records = read_jsonl_file(&record)?;
            let selected: Vec<_> = match line {
                Some(i) => vec![records
                    .get(i)
                    .ok_or_else(|| Error::Argument(format!("{} has no line {i}", record.display())))?],
                None => records.iter().collect(),
            };
            for r in &selected {
                replay(r)?;
            }
            println!("replayed {} record(s): payload digests match", selected.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
