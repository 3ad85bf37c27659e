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

//! JSON reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Wall-clock seconds per phase of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub total: f64,
    pub reference: f64,
    pub sampling: f64,
    pub reconstruction: f64,
    pub output: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub attempted: usize,
    pub succeeded: usize,
    pub discarded: usize,
    /// Samples whose impulse magnitude was clamped to `[0, dv_max]`.
    pub clamped: usize,
    /// Samples whose pseudo-zero-stage costate fell below the floor.
    pub degenerate_boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscardEntry {
    pub sample_id: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonInfo {
    pub label: String,
    /// Model time units: seconds (two-body) or normalized time (cr3bp).
    pub total: f64,
    pub stages: usize,
    pub dt: f64,
    /// Seconds.
    pub total_seconds: f64,
}

/// Summary of one `reach` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub model: String,
    pub horizon: HorizonInfo,
    pub seed: u64,
    pub threads: usize,
    pub config_hash: String,
    pub samples: SampleCounts,
    pub timing: PhaseTimes,
    pub discarded: Vec<DiscardEntry>,
}

/// Spectrum of the monodromy matrix and orbit checks for `manifolds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub scenario: String,
    /// Normalized synodic state actually used (after correction, if any).
    pub x0: [f64; 6],
    pub period: f64,
    pub corrected: bool,
    /// `‖flow(x0, period) − x0‖`.
    pub closure_error: f64,
    /// Eigenvalues `[re, im]` of the monodromy matrix based at `x0`, by
    /// decreasing modulus.
    pub eigenvalues: Vec<[f64; 2]>,
    pub determinant: f64,
    pub reciprocal_pairing_error: f64,
    pub lambda_unstable: f64,
    pub lambda_stable: f64,
    pub fixed_points: usize,
    /// Worst `|det M − 1|` over all fixed points.
    pub max_determinant_error: f64,
    pub epsilon: f64,
    pub horizon: f64,
    pub branches: Vec<String>,
    pub timing: PhaseTimes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullInfo {
    pub space: String,
    pub points: usize,
    pub vertices: usize,
    pub facets: usize,
    pub volume: f64,
    pub scale: f64,
    pub centroid: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub label: String,
    pub space: String,
    pub query: [f64; 3],
    pub inside: bool,
    /// Positive outside; same units as the query.
    pub signed_distance: f64,
    /// `signed_distance` over the hull scale.
    pub relative_distance: f64,
    pub nearest_facet: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentFile {
    pub set: String,
    pub target: String,
    pub model: Option<String>,
    pub horizon: Option<HorizonInfo>,
    /// The convex hull of a three-body cloud can enclose states the
    /// reachable set does not, so verdicts there are over-approximate.
    pub over_approximation: bool,
    pub hulls: Vec<HullInfo>,
    pub queries: Vec<QueryResult>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types always serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::write(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::schema(path, e.to_string()))
}
