// Copyright 2026 The ltreach Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Argument parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_contain, cmd_manifolds, cmd_reach, cmd_reference, RunOptions};
use crate::config::Overrides;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "ltreach", version, about = "Low-thrust minimum-time reachable sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario TOML file.
    pub config: PathBuf,
    /// Terminal-costate RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to one per hardware thread.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Number of sampled trajectories.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn options(&self, epsilon: Option<f64>) -> RunOptions {
        RunOptions {
            overrides: Overrides {
                seed: self.seed,
                samples: self.samples,
                output_dir: self.output_dir.clone(),
                epsilon,
            },
            threads: self.threads,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample and reconstruct the reachable set.
    Reach(ScenarioArgs),
    /// Export the ballistic reference trajectory.
    Reference(ScenarioArgs),
    /// Monodromy spectrum and invariant manifolds of a periodic orbit.
    Manifolds {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Seed offset along the eigenvectors (normalized units).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Test target states against the hulls of a computed set.
    Contain {
        /// `terminals.csv` or the directory containing it.
        set: PathBuf,
        /// Target CSV, trajectory CSV or orbital-elements TOML.
        target: PathBuf,
        /// Only query targets with this label.
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

/// Runs one parsed command, printing a short summary on success.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Reach(args) => {
            for out in cmd_reach(&args.config, &args.options(None))? {
                let r = &out.report;
                println!(
                    "{}: {} of {} samples in {:.3} s -> {}",
                    r.horizon.label,
                    r.samples.succeeded,
                    r.samples.attempted,
                    r.timing.total,
                    out.dir.display()
                );
            }
        }
        Command::Reference(args) => {
            for path in cmd_reference(&args.config, &args.options(None))? {
                println!("{}", path.display());
            }
        }
        Command::Manifolds { args, epsilon } => {
            let r = cmd_manifolds(&args.config, &args.options(epsilon))?;
            println!(
                "det(M) = {:.15}, lambda_u = {:.6}, closure = {:.3e}",
                r.determinant, r.lambda_unstable, r.closure_error
            );
        }
        Command::Contain {
            set,
            target,
            label,
            output_dir,
        } => {
            let f = cmd_contain(&set, &target, label.as_deref(), output_dir.as_deref())?;
            for q in &f.queries {
                println!(
                    "{} {}: {} (relative distance {:+.4})",
                    q.label,
                    q.space,
                    if q.inside { "inside" } else { "outside" },
                    q.relative_distance
                );
            }
        }
    }
    Ok(())
}
