use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use easym_cli::config::{ExperimentConfig, Mode};
use easym_cli::{presets, run_experiment, write_outputs, CliError};

#[derive(Parser)]
#[command(name = "easym", version, about = "Entanglement-asymmetry quench and random-circuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Overrides circuit.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List figure recipes, or print one as a config file.
    Presets { name: Option<String> },
}

fn run(config: PathBuf, out: PathBuf, seed: Option<u64>, threads: Option<usize>) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        match cfg.circuit.as_mut() {
            Some(c) if cfg.mode == Mode::Circuit => c.master_seed = seed,
            _ => eprintln!("note: --seed only affects circuit runs"),
        }
    }
    let pool = match threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let record = pool.install(|| run_experiment(&cfg))?;
    for path in write_outputs(&record, &out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, threads } => run(config, out, seed, threads),
        Command::Presets { name: None } => {
            for p in presets::PRESETS {
                println!("{:<16}{}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Presets { name: Some(name) } => match presets::find(&name) {
            Some(p) => {
                print!("{}", p.config);
                Ok(())
            }
            None => Err(CliError::Config(format!("unknown preset {name:?}; run `easym presets` for the list"))),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
