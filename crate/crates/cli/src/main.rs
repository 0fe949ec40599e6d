//! `ratchet`: batch driver for the vibron-assisted quantum ratchet simulator.
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical failure,
//! 1 anything else (I/O).

mod commands;
mod record;
mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use record::{write_json, Recorder};
use settings::ConfigError;

#[derive(Parser)]
#[command(
    name = "ratchet",
    version,
    about = "Simulate and sweep a vibron-driven two-level ratchet"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate ρ(t) from |1⟩⟨1| and report T̄.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Use the trace-scaled vibron (forces φ = 0).
        #[arg(long)]
        feedback: bool,
    },
    /// Evaluate the objective on a parameter grid and locate its minima.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the built-in presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Named preset (see `ratchet presets`).
    #[arg(long)]
    preset: Option<String>,
    /// TOML file overlaid on the preset.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one key, e.g. `drive.amplitude=0` or `objective.t0=4.0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Print the run record as JSON instead of a text summary.
    #[arg(long)]
    json: bool,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<ratchet_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn run(
    name: &'static str,
    args: &RunArgs,
    extra_sets: &[&str],
    body: impl FnOnce(
        &ratchet_core::config::RunConfig,
        &Path,
        &mut Recorder,
    ) -> anyhow::Result<serde_json::Value>,
) -> anyhow::Result<serde_json::Value> {
    let mut rec = Recorder::start(name);
    std::fs::create_dir_all(&args.out).map_err(|e| {
        anyhow::anyhow!("cannot create output directory {}: {e}", args.out.display())
    })?;
    let record_path = args.out.join("run_record.json");

    let mut sets = args.sets.clone();
    sets.extend(extra_sets.iter().map(|s| s.to_string()));
    let resolved = settings::resolve(args.preset.as_deref(), args.config.as_deref(), &sets);
    let (resolved, outcome) = match resolved {
        Ok(r) => {
            let outcome = body(&r.config, &args.out, &mut rec);
            (Some(r), outcome)
        }
        Err(e) => (None, Err(e)),
    };
    rec.outputs.push(record_path.clone());
    let (sources, config) = match resolved {
        Some(r) => (r.sources, Some(r.config)),
        None => (
            settings::Sources {
                preset: args.preset.clone(),
                config_file: args.config.clone(),
                overrides: sets,
            },
            None,
        ),
    };
    let record = rec.finish(
        sources,
        config,
        outcome
            .as_ref()
            .map(|s| s.clone())
            .map_err(|e| format!("{e:#}")),
    );
    write_json(&record_path, &record)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&record)?);
    }
    outcome
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            run: args,
            feedback,
        } => {
            let extra: &[&str] = if feedback {
                &["drive.feedback=true", "drive.phi=0.0"]
            } else {
                &[]
            };
            let summary = run("simulate", &args, extra, commands::simulate)?;
            if !args.json {
                commands::print_simulation(&summary);
            }
        }
        Command::Sweep { run: args, workers } => {
            if workers == Some(0) {
                return Err(ConfigError("--workers must be at least 1".into()).into());
            }
            let summary = run("sweep", &args, &[], |c, out, rec| {
                commands::sweep(c, workers, out, rec)
            })?;
            if !args.json {
                commands::print_sweep(&summary);
            }
        }
        Command::Presets { json } => commands::presets(json)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
