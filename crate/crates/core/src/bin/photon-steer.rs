use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use photon_steering::cli::{fn_table, presets, simulate, sweep, read_json, to_json};

/// Steering feasibility for lossy split single-photon experiments.
#[derive(Parser)]
#[command(name = "photon-steer", version)]
struct Cli {
    /// Print machine-readable JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a named parameter preset against its expected values.
    Scenario {
        /// Preset name (omit with --list to see all).
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Evaluate a quantity over a two-parameter grid and write CSV plus iso-contour.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the finite-setting bound f(n).
    FnTable {
        #[arg(long)]
        max: u32,
    },
    /// Run a seeded Monte Carlo of the experiment.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scenario { name, list } => {
            let name = match (name, list) {
                (Some(n), false) => n,
                (None, _) => {
                    let all = presets::presets();
                    if cli.json {
                        println!("{}", to_json(&all));
                    } else {
                        for p in all {
                            println!("{:<28} {}", p.name, p.description);
                        }
                    }
                    return Ok(ExitCode::SUCCESS);
                }
                (Some(_), true) => anyhow::bail!("give a preset name or --list, not both"),
            };
            let outcome = presets::cmd_scenario(&name)?;
            if cli.json {
                println!("{}", to_json(&outcome));
            } else {
                print!("{}", outcome.to_table());
            }
            Ok(if outcome.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Sweep { spec, out } => {
            let spec: sweep::SweepSpec = read_json(&spec)?;
            let (grid, outputs) = sweep::cmd_sweep(&spec, &out)?;
            if cli.json {
                println!("{}", to_json(&grid));
            } else {
                let unreachable = grid
                    .cells
                    .iter()
                    .filter(|c| c.flag == sweep::CellFlag::Unreachable)
                    .count();
                println!(
                    "{} cells ({} unreachable), {} contour segments at level {}",
                    grid.cells.len(),
                    unreachable,
                    grid.contour.len(),
                    grid.contour_level
                );
                println!("wrote {}", outputs.grid.display());
                println!("wrote {}", outputs.contour.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::FnTable { max } => {
            let table = fn_table::cmd_fn_table(max)?;
            if cli.json {
                println!("{}", to_json(&table));
            } else {
                print!("{}", table.to_table());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { config, out } => {
            let (result, outputs) = simulate::cmd_simulate(&config, &out)?;
            if cli.json {
                println!("{}", to_json(&result));
            } else {
                print!("{}", outputs.summary(&result));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
