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

//! Subcommand bodies, callable without going through argument parsing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ltreach_core::analysis::contains;
use ltreach_core::hull::{convex_hull, HullSummary};
use ltreach_core::{Model, Space};

use crate::config::{load_scenario, Horizon, Overrides, Scenario};
use crate::error::{CliError, CliResult};
use crate::io::{read_terminals, write_manifolds, write_reference, write_terminals, write_trajectories, TargetRow, TerminalTable};
use crate::report::{
    read_json, write_json, ContainmentFile, DiscardEntry, HorizonInfo, HullInfo, QueryResult, RunReport, SampleCounts,
    SpectrumReport,
};
use crate::runner::{reference_for, run_manifolds, run_reach, seconds_since, thread_pool};
use crate::targets::load_targets;

pub const TRAJECTORIES_CSV: &str = "trajectories.csv";
pub const TERMINALS_CSV: &str = "terminals.csv";
pub const REFERENCE_CSV: &str = "reference.csv";
pub const MANIFOLDS_CSV: &str = "manifolds.csv";
pub const REPORT_JSON: &str = "report.json";
pub const SPECTRUM_JSON: &str = "spectrum.json";
pub const CONTAINMENT_JSON: &str = "containment.json";

/// Flags shared by the scenario-driven subcommands.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub overrides: Overrides,
    pub threads: Option<usize>,
}

pub fn model_name(model: &Model) -> &'static str {
    match model {
        Model::TwoBody(_) => "two_body",
        Model::Cr3bp(_) => "cr3bp",
    }
}

fn horizon_info(model: &Model, h: &Horizon) -> HorizonInfo {
    HorizonInfo {
        label: h.label.clone(),
        total: h.total,
        stages: h.stages,
        dt: h.dt,
        total_seconds: match model {
            Model::TwoBody(_) => h.total,
            Model::Cr3bp(m) => m.time_to_seconds(h.total),
        },
    }
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))
}

/// Output directory for one horizon.
pub fn horizon_dir(scenario: &Scenario, h: &Horizon) -> PathBuf {
    if scenario.multi_horizon {
        scenario.output_dir.join(&h.label)
    } else {
        scenario.output_dir.clone()
    }
}

/// Result of `reach` for one horizon.
#[derive(Clone, Debug)]
pub struct ReachOutput {
    pub dir: PathBuf,
    pub report: RunReport,
}

pub fn cmd_reach(config: &Path, opts: &RunOptions) -> CliResult<Vec<ReachOutput>> {
    let (_, scenario) = load_scenario(config, &opts.overrides)?;
    let pool = thread_pool(opts.threads)?;
    let mut outputs = Vec::new();
    for h in &scenario.horizons {
        let run = run_reach(&scenario.model, &scenario.x0, &scenario.propulsion, h, &scenario.reach, &pool)?;
        let dir = horizon_dir(&scenario, h);
        create_dir(&dir)?;
        let phase = Instant::now();
        write_trajectories(&dir.join(TRAJECTORIES_CSV), &run.set)?;
        write_terminals(&dir.join(TERMINALS_CSV), &run.set)?;
        let mut timing = run.timing;
        timing.output = seconds_since(phase);
        timing.total += timing.output;
        let set = &run.set;
        let report = RunReport {
            scenario: scenario.name.clone(),
            model: model_name(&scenario.model).to_string(),
            horizon: horizon_info(&scenario.model, h),
            seed: set.seed,
            threads: pool.current_num_threads(),
            config_hash: scenario.config_hash.clone(),
            samples: SampleCounts {
                attempted: set.attempted,
                succeeded: set.samples.len(),
                discarded: set.discarded.len(),
                clamped: set.clamped_count(),
                degenerate_boundary: set.degenerate_boundary_count(),
            },
            timing,
            discarded: set
                .discarded
                .iter()
                .map(|d| DiscardEntry {
                    sample_id: d.id,
                    reason: d.reason.to_string(),
                })
                .collect(),
        };
        write_json(&dir.join(REPORT_JSON), &report)?;
        outputs.push(ReachOutput { dir, report });
    }
    Ok(outputs)
}

pub fn cmd_reference(config: &Path, opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let (_, scenario) = load_scenario(config, &opts.overrides)?;
    let mut written = Vec::new();
    for h in &scenario.horizons {
        let reference = reference_for(&scenario.model, &scenario.x0, &scenario.propulsion, h, &scenario.reach.integrator)?;
        let dir = horizon_dir(&scenario, h);
        create_dir(&dir)?;
        let path = dir.join(REFERENCE_CSV);
        write_reference(&path, &reference)?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_manifolds(config: &Path, opts: &RunOptions) -> CliResult<SpectrumReport> {
    let (_, scenario) = load_scenario(config, &opts.overrides)?;
    let settings = scenario
        .manifolds
        .ok_or_else(|| CliError::config("manifolds", "the scenario has no [manifolds] table"))?;
    let Model::Cr3bp(model) = scenario.model else {
        return Err(CliError::config("model.kind", "manifolds require the cr3bp model"));
    };
    let pool = thread_pool(opts.threads)?;
    let run = run_manifolds(&model, &scenario.x0, &settings, &scenario.reach.integrator, &pool)?;
    create_dir(&scenario.output_dir)?;
    let phase = Instant::now();
    write_manifolds(&scenario.output_dir.join(MANIFOLDS_CSV), &run.branches, scenario.propulsion.initial_mass)?;
    let (_, base) = &run.decomposition[0];
    let mut timing = run.timing.clone();
    timing.output = seconds_since(phase);
    timing.total += timing.output;
    let report = SpectrumReport {
        scenario: scenario.name.clone(),
        x0: run.orbit.x0.to_vector().into(),
        period: run.orbit.period,
        corrected: run.corrected,
        closure_error: run.closure_error,
        eigenvalues: base.eigenvalues.iter().map(|&(re, im)| [re, im]).collect(),
        determinant: base.determinant(),
        reciprocal_pairing_error: base.reciprocal_pairing_error(),
        lambda_unstable: base.lambda_unstable,
        lambda_stable: base.lambda_stable,
        fixed_points: run.decomposition.len(),
        max_determinant_error: run
            .decomposition
            .iter()
            .map(|(_, d)| (d.determinant() - 1.0).abs())
            .fold(0.0, f64::max),
        epsilon: settings.epsilon,
        horizon: settings.horizon,
        branches: run.branches.iter().map(|b| b.label().to_string()).collect(),
        timing,
    };
    write_json(&scenario.output_dir.join(SPECTRUM_JSON), &report)?;
    Ok(report)
}

fn hull_info(space: Space, points: usize, h: &HullSummary) -> HullInfo {
    HullInfo {
        space: space.label().to_string(),
        points,
        vertices: h.vertices.len(),
        facets: h.facets.len(),
        volume: h.volume,
        scale: h.scale,
        centroid: h.centroid.into(),
    }
}

/// Hulls of both terminal clouds and the verdict for every target.
pub fn containment(table: &TerminalTable, targets: &[TargetRow]) -> ltreach_core::Result<(Vec<HullInfo>, Vec<QueryResult>)> {
    let mut hulls = Vec::new();
    let mut queries = Vec::new();
    for space in [Space::Position, Space::Velocity] {
        let points = table.points(space);
        let wanted: Vec<(&str, ltreach_core::Vec3)> = targets
            .iter()
            .filter_map(|t| match space {
                Space::Position => Some((t.label.as_str(), t.r)),
                Space::Velocity => t.v.map(|v| (t.label.as_str(), v)),
            })
            .collect();
        if points.is_empty() {
            continue;
        }
        let hull = convex_hull(&points)?;
        hulls.push(hull_info(space, points.len(), &hull));
        for (label, q) in wanted {
            let r = contains(&hull, &q);
            queries.push(QueryResult {
                label: label.to_string(),
                space: space.label().to_string(),
                query: q.into(),
                inside: r.inside,
                signed_distance: r.signed_distance,
                relative_distance: r.relative_distance,
                nearest_facet: r.nearest_facet,
            });
        }
    }
    Ok((hulls, queries))
}

/// `set` is a `terminals.csv` file or a directory holding one. The run's
/// `report.json`, when present next to it, supplies the model and horizon.
pub fn cmd_contain(set: &Path, target: &Path, label: Option<&str>, output_dir: Option<&Path>) -> CliResult<ContainmentFile> {
    let terminals = if set.is_dir() { set.join(TERMINALS_CSV) } else { set.to_path_buf() };
    let set_dir = terminals.parent().map(Path::to_path_buf).unwrap_or_default();
    let report_path = set_dir.join(REPORT_JSON);
    let report: Option<RunReport> = if report_path.is_file() { Some(read_json(&report_path)?) } else { None };
    let table = read_terminals(&terminals)?;
    if table.position.is_empty() {
        return Err(CliError::schema(&terminals, "no position rows"));
    }
    let mut targets = load_targets(target, report.as_ref())?;
    if let Some(l) = label {
        targets.retain(|t| t.label == l);
    }
    if targets.is_empty() {
        return Err(CliError::schema(target, match label {
            Some(l) => format!("no target labelled `{l}`"),
            None => "no targets".to_string(),
        }));
    }
    let (hulls, queries) = containment(&table, &targets)?;
    let model = report.as_ref().map(|r| r.model.clone());
    let file = ContainmentFile {
        set: terminals.display().to_string(),
        target: target.display().to_string(),
        over_approximation: model.as_deref() == Some("cr3bp"),
        model,
        horizon: report.map(|r| r.horizon),
        hulls,
        queries,
    };
    let out_dir = output_dir.map(Path::to_path_buf).unwrap_or(set_dir);
    create_dir(&out_dir)?;
    write_json(&out_dir.join(CONTAINMENT_JSON), &file)?;
    Ok(file)
}
