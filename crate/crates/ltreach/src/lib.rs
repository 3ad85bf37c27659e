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

//! File formats, scenario configuration, the parallel batch runner and the
//! command-line front end for the `ltreach-core` reachability engine.
//!
//! The `ltreach` binary has four subcommands:
//!
//! | command | input | writes |
//! |---|---|---|
//! | `reach` | scenario TOML | `trajectories.csv`, `terminals.csv`, `report.json` |
//! | `reference` | scenario TOML | `reference.csv` |
//! | `manifolds` | scenario TOML with `[manifolds]` | `manifolds.csv`, `spectrum.json` |
//! | `contain` | `terminals.csv` and a target file | `containment.json` |
//!
//! Exit status is 0 on success, 1 for configuration or schema errors and 2
//! for runtime failures such as too many discarded samples.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;
pub mod targets;

pub use error::{CliError, CliResult};
