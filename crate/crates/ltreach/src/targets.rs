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

//! Query points for containment checks.
//!
//! Three target formats are accepted:
//!
//! * a CSV with header `label,x,y,z` or `label,x,y,z,vx,vy,vz`;
//! * a trajectory CSV (the `trajectories.csv` schema), whose last row per
//!   `sample_id` becomes a query with position and velocity;
//! * a TOML file of heliocentric osculating elements at the departure epoch,
//!   propagated on a Kepler orbit to the set's horizon.

use std::path::Path;

use ltreach_core::dynamics::MU_SUN;
use ltreach_core::kepler::OrbitalElements;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::report::RunReport;
use crate::io::{csv_header, read_target_csv, trajectory_terminals, TargetRow, TRAJECTORY_HEADER};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementsFile {
    pub label: String,
    /// Julian date of the elements (informational).
    #[serde(default)]
    pub epoch_jd: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    pub elements: ElementsDeg,
}

/// km and degrees.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementsDeg {
    pub a: f64,
    pub e: f64,
    pub inc: f64,
    pub raan: f64,
    pub argp: f64,
    pub mean_anomaly: f64,
}

impl ElementsFile {
    pub fn orbital_elements(&self) -> OrbitalElements {
        let d = &self.elements;
        OrbitalElements {
            a: d.a,
            e: d.e,
            inc: d.inc.to_radians(),
            raan: d.raan.to_radians(),
            argp: d.argp.to_radians(),
            mean_anomaly: d.mean_anomaly.to_radians(),
        }
    }

    /// Position and velocity `seconds` after the element epoch.
    pub fn state_after(&self, seconds: f64) -> ltreach_core::Result<TargetRow> {
        let mu = self.mu.unwrap_or(MU_SUN);
        let (r, v) = self.orbital_elements().advanced(seconds, mu).to_state(mu)?;
        Ok(TargetRow {
            label: self.label.clone(),
            r,
            v: Some(v),
        })
    }
}

/// Loads the queries in `path`. Element files need to know the set is a
/// two-body set and its horizon in seconds.
pub fn load_targets(path: &Path, set: Option<&RunReport>) -> CliResult<Vec<TargetRow>> {
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let file: ElementsFile = toml::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let report =
            set.ok_or_else(|| CliError::schema(path, "element targets need the set's report.json to know the horizon"))?;
        if report.model != "two_body" {
            return Err(CliError::schema(path, format!("heliocentric elements cannot be compared with a {} set", report.model)));
        }
        let seconds = report.horizon.total_seconds;
        let row = file
            .state_after(seconds)
            .map_err(|e| CliError::schema(path, e.to_string()))?;
        return Ok(vec![row]);
    }
    let header = csv_header(path)?;
    if header.len() >= TRAJECTORY_HEADER.len() && header[..TRAJECTORY_HEADER.len()] == TRAJECTORY_HEADER {
        trajectory_terminals(path)
    } else {
        read_target_csv(path)
    }
}
