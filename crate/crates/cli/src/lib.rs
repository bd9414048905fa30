//! Command-line front end for `squeezed-discord`: scenario files, sweeps,
//! presets and byte-stable artifacts.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod presets;
pub mod table;
pub mod validate;

pub use commands::{run, Artifact, Command};
pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};

use std::path::Path;

use args::{Cli, Sub};
use squeezed_discord::dynamics::corner_at;
use squeezed_discord::states::with_corner;

/// Runs a parsed command line on a pool of `--workers` threads.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli, workers))
}

fn dispatch(cli: &Cli, workers: usize) -> CliResult<()> {
    match &cli.command {
        Sub::Validate {
            fast,
            seed,
            set_tolerance,
            json,
        } => {
            let overrides = validate::parse_overrides(set_tolerance)?;
            let report = validate::run_checks(&validate::ValidateOptions { fast: *fast, seed: *seed }, &overrides);
            if *json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.table());
            }
            match report.failures() {
                0 => Ok(()),
                n => Err(CliError::ValidationFailed(n)),
            }
        }
        Sub::Preset {
            name,
            list,
            show,
            scenario,
        } => {
            if *list {
                for n in presets::NAMES {
                    let p = presets::preset(n).expect("listed preset exists");
                    println!("{:<12} {:<9} {}", p.name, p.command.name(), p.description);
                }
                return Ok(());
            }
            let name = name.as_deref().unwrap_or_default();
            let p = presets::preset(name).ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}`; known: {}", presets::NAMES.join(", ")))
            })?;
            let cfg = scenario.resolve(p.config)?;
            if *show {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
                return Ok(());
            }
            run_and_emit(p.command, &cfg, p.name, &cli.out_dir, workers)
        }
        sub => {
            let (Sub::Trace { scenario, .. }
            | Sub::Critical { scenario }
            | Sub::Phase { scenario }
            | Sub::Amplify { scenario }
            | Sub::Qsl { scenario }) = sub
            else {
                unreachable!("handled above")
            };
            let command = sub.command().expect("computational subcommand");
            let cfg = scenario.resolve(ScenarioConfig::default())?;
            if let Sub::Trace {
                dump_state: Some(tau), ..
            } = sub
            {
                let (_, alpha) = corner_at(&cfg.state, &cfg.base_profile()?, *tau)?;
                let rho = with_corner(&cfg.state, alpha)?;
                println!("{}", serde_json::to_string(&rho).expect("state serializes"));
            }
            run_and_emit(command, &cfg, command.name(), &cli.out_dir, workers)
        }
    }
}

fn run_and_emit(command: Command, cfg: &ScenarioConfig, stem: &str, out_dir: &Path, workers: usize) -> CliResult<()> {
    let (started_unix, started) = commands::now();
    let artifact = run(command, cfg)?;
    let path = cfg
        .output
        .path
        .clone()
        .unwrap_or_else(|| commands::default_output_path(out_dir, stem, artifact.format));
    let (data, manifest) = commands::emit(&artifact, cfg, &path, workers, started_unix, started)?;
    for w in &artifact.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("wrote {} and {}", data.display(), manifest.display());
    Ok(())
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
