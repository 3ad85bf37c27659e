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

//! CSV files.
//!
//! Every real number is written as `{:.16e}`, which carries 17 significant
//! digits and therefore round-trips an `f64` exactly. Rows follow sample
//! order, so output is identical for any worker count.
//!
//! Input files may carry `#` comment lines (provenance headers).
//!
//! Units follow the model: km, km/s, s and kg for two-body runs; normalized
//! synodic units (and mass as a fraction of `m0`) for the three-body model.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ltreach_core::manifolds::ManifoldBranch;
use ltreach_core::{ReachableSet, ReferenceTrajectory, StateVec, Vec3};

use crate::error::{CliError, CliResult};

pub const TRAJECTORY_HEADER: [&str; 13] = [
    "sample_id",
    "stage_index",
    "t",
    "x",
    "y",
    "z",
    "vx",
    "vy",
    "vz",
    "ax_hat",
    "ay_hat",
    "az_hat",
    "mass",
];

pub const TERMINAL_HEADER: [&str; 5] = ["sample_id", "space", "c1", "c2", "c3"];

/// Sample id used for the ballistic reference in `reference.csv`.
pub const REFERENCE_ID: i64 = -1;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

struct Sink<'a> {
    path: &'a Path,
    out: BufWriter<File>,
}

impl<'a> Sink<'a> {
    fn create(path: &'a Path) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::write(path, e))?;
        Ok(Sink {
            path,
            out: BufWriter::new(file),
        })
    }

    fn line(&mut self, fields: &[&str]) -> CliResult<()> {
        writeln!(self.out, "{}", fields.join(",")).map_err(|e| CliError::write(self.path, e))
    }

    fn finish(mut self) -> CliResult<()> {
        self.out.flush().map_err(|e| CliError::write(self.path, e))
    }
}

/// One row of the trajectory schema.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub sample_id: i64,
    pub stage_index: usize,
    pub t: f64,
    pub state: StateVec,
    pub control: Vec3,
    pub mass: f64,
}

impl TrajectoryRow {
    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.sample_id.to_string(), self.stage_index.to_string(), fmt(self.t)];
        f.extend(self.state.r.iter().chain(self.state.v.iter()).map(|&c| fmt(c)));
        f.extend(self.control.iter().map(|&c| fmt(c)));
        f.push(fmt(self.mass));
        f
    }
}

fn write_rows<'a>(
    path: &Path,
    extra_header: Option<&str>,
    rows: impl Iterator<Item = (TrajectoryRow, Option<&'a str>)>,
) -> CliResult<()> {
    let mut sink = Sink::create(path)?;
    let mut header: Vec<&str> = TRAJECTORY_HEADER.to_vec();
    header.extend(extra_header);
    sink.line(&header)?;
    for (row, extra) in rows {
        let mut fields = row.fields();
        fields.extend(extra.map(str::to_string));
        let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
        sink.line(&refs)?;
    }
    sink.finish()
}

/// Rows for every surviving sample. With histories off only the first and
/// last stage boundaries are written. Row `k` carries the steering of stage
/// `k`; the terminal row repeats the last stage's steering.
pub fn trajectory_rows(set: &ReachableSet) -> Vec<TrajectoryRow> {
    let reference = &set.reference;
    let n = reference.num_stages();
    let mut rows = Vec::new();
    for s in &set.samples {
        let m_init = s.boundary.map_or(reference.propulsion.initial_mass, |b| b.m_star);
        let profile = reference.mass_profile().restarted(m_init, reference.t0);
        let stage_indices: Vec<usize> = if s.has_history() { (0..=n).collect() } else { vec![0, n] };
        for (state, &k) in s.states.iter().zip(&stage_indices) {
            let t = reference.stage_time(k);
            let control = match &s.controls {
                Some(c) => c.as_slice()[k.min(n - 1)],
                None if k == 0 => s.endpoint_controls[0],
                None => s.endpoint_controls[1],
            };
            let mass = if k == n { s.terminal_mass } else { profile.mass_at(t).unwrap_or(f64::NAN) };
            rows.push(TrajectoryRow {
                sample_id: s.id as i64,
                stage_index: k,
                t,
                state: *state,
                control,
                mass,
            });
        }
    }
    rows
}

pub fn write_trajectories(path: &Path, set: &ReachableSet) -> CliResult<()> {
    write_rows(path, None, trajectory_rows(set).into_iter().map(|r| (r, None)))
}

/// Two rows per sample, position first.
pub fn write_terminals(path: &Path, set: &ReachableSet) -> CliResult<()> {
    let mut sink = Sink::create(path)?;
    sink.line(&TERMINAL_HEADER)?;
    for s in &set.samples {
        let id = s.id.to_string();
        for (space, c) in [("position", s.terminal.r), ("velocity", s.terminal.v)] {
            let (a, b, d) = (fmt(c.x), fmt(c.y), fmt(c.z));
            sink.line(&[&id, space, &a, &b, &d])?;
        }
    }
    sink.finish()
}

/// The ballistic reference at its `N + 1` stage boundaries.
pub fn reference_rows(reference: &ReferenceTrajectory) -> Vec<TrajectoryRow> {
    reference
        .boundary_states()
        .into_iter()
        .enumerate()
        .map(|(k, state)| TrajectoryRow {
            sample_id: REFERENCE_ID,
            stage_index: k,
            t: reference.stage_time(k),
            state,
            control: Vec3::zeros(),
            mass: reference.propulsion.initial_mass,
        })
        .collect()
}

pub fn write_reference(path: &Path, reference: &ReferenceTrajectory) -> CliResult<()> {
    write_rows(path, None, reference_rows(reference).into_iter().map(|r| (r, None)))
}

/// Manifold histories in the trajectory schema plus a `branch` column.
/// `sample_id` is the fixed-point index and `stage_index` the output segment.
pub fn write_manifolds(path: &Path, branches: &[ManifoldBranch], mass: f64) -> CliResult<()> {
    let rows = branches.iter().flat_map(|b| {
        b.trajectories.iter().enumerate().flat_map(move |(id, hist)| {
            hist.iter().enumerate().map(move |(k, (t, state))| {
                (
                    TrajectoryRow {
                        sample_id: id as i64,
                        stage_index: k,
                        t: *t,
                        state: *state,
                        control: Vec3::zeros(),
                        mass,
                    },
                    Some(b.label()),
                )
            })
        })
    });
    write_rows(path, Some("branch"), rows)
}

fn reader(path: &Path) -> CliResult<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Read {
                path: path.to_path_buf(),
                source,
            },
            other => CliError::schema(path, format!("{other:?}")),
        })
}

fn headers(path: &Path, rdr: &mut csv::Reader<File>) -> CliResult<Vec<String>> {
    Ok(rdr
        .headers()
        .map_err(|e| CliError::schema(path, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect())
}

fn records(path: &Path, rdr: &mut csv::Reader<File>) -> CliResult<Vec<csv::StringRecord>> {
    rdr.records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::schema(path, e.to_string()))
}

fn real(path: &Path, rec: &csv::StringRecord, i: usize) -> CliResult<f64> {
    let field = rec.get(i).unwrap_or("").trim();
    field
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::schema(path, format!("row {:?}: `{field}` is not a finite number", rec.position().map(|p| p.line()))))
}

fn integer<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> CliResult<T> {
    let field = rec.get(i).unwrap_or("").trim();
    field
        .parse::<T>()
        .map_err(|_| CliError::schema(path, format!("row {:?}: `{field}` is not an integer", rec.position().map(|p| p.line()))))
}

fn vec3_at(path: &Path, rec: &csv::StringRecord, i: usize) -> CliResult<Vec3> {
    Ok(Vec3::new(real(path, rec, i)?, real(path, rec, i + 1)?, real(path, rec, i + 2)?))
}

/// Terminal clouds read back from `terminals.csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TerminalTable {
    pub position: Vec<(usize, Vec3)>,
    pub velocity: Vec<(usize, Vec3)>,
}

impl TerminalTable {
    pub fn points(&self, space: ltreach_core::Space) -> Vec<Vec3> {
        let rows = match space {
            ltreach_core::Space::Position => &self.position,
            ltreach_core::Space::Velocity => &self.velocity,
        };
        rows.iter().map(|(_, p)| *p).collect()
    }
}

pub fn read_terminals(path: &Path) -> CliResult<TerminalTable> {
    let mut rdr = reader(path)?;
    if headers(path, &mut rdr)? != TERMINAL_HEADER {
        return Err(CliError::schema(path, format!("expected header {}", TERMINAL_HEADER.join(","))));
    }
    let mut table = TerminalTable::default();
    for rec in records(path, &mut rdr)? {
        if rec.len() != TERMINAL_HEADER.len() {
            return Err(CliError::schema(path, format!("expected {} columns, found {}", TERMINAL_HEADER.len(), rec.len())));
        }
        let id: usize = integer(path, &rec, 0)?;
        let p = vec3_at(path, &rec, 2)?;
        match ltreach_core::Space::parse(rec[1].trim()) {
            Some(ltreach_core::Space::Position) => table.position.push((id, p)),
            Some(ltreach_core::Space::Velocity) => table.velocity.push((id, p)),
            None => return Err(CliError::schema(path, format!("unknown space `{}`", &rec[1]))),
        }
    }
    Ok(table)
}

pub fn read_trajectory_rows(path: &Path) -> CliResult<Vec<TrajectoryRow>> {
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    if h.len() < TRAJECTORY_HEADER.len() || h[..TRAJECTORY_HEADER.len()] != TRAJECTORY_HEADER {
        return Err(CliError::schema(path, format!("expected header {}", TRAJECTORY_HEADER.join(","))));
    }
    records(path, &mut rdr)?
        .iter()
        .map(|rec| {
            if rec.len() != h.len() {
                return Err(CliError::schema(path, format!("expected {} columns, found {}", h.len(), rec.len())));
            }
            let r = vec3_at(path, rec, 3)?;
            let v = vec3_at(path, rec, 6)?;
            Ok(TrajectoryRow {
                sample_id: integer(path, rec, 0)?,
                stage_index: integer(path, rec, 1)?,
                t: real(path, rec, 2)?,
                state: StateVec { r, v, frame: ltreach_core::Frame::HelioInertial },
                control: vec3_at(path, rec, 9)?,
                mass: real(path, rec, 12)?,
            })
        })
        .collect()
}

/// A named query point, optionally with a velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetRow {
    pub label: String,
    pub r: Vec3,
    pub v: Option<Vec3>,
}

/// `label,x,y,z[,vx,vy,vz]`.
pub fn read_target_csv(path: &Path) -> CliResult<Vec<TargetRow>> {
    let mut rdr = reader(path)?;
    let h = headers(path, &mut rdr)?;
    let with_velocity = match h.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["label", "x", "y", "z"] => false,
        ["label", "x", "y", "z", "vx", "vy", "vz"] => true,
        _ => return Err(CliError::schema(path, "expected header label,x,y,z[,vx,vy,vz]")),
    };
    records(path, &mut rdr)?
        .iter()
        .map(|rec| {
            if rec.len() != h.len() {
                return Err(CliError::schema(path, format!("expected {} columns, found {}", h.len(), rec.len())));
            }
            Ok(TargetRow {
                label: rec[0].trim().to_string(),
                r: vec3_at(path, rec, 1)?,
                v: if with_velocity { Some(vec3_at(path, rec, 4)?) } else { None },
            })
        })
        .collect()
}

/// Terminal row (largest stage index) of every sample in a trajectory file.
pub fn trajectory_terminals(path: &Path) -> CliResult<Vec<TargetRow>> {
    let rows = read_trajectory_rows(path)?;
    let mut last: std::collections::BTreeMap<i64, TrajectoryRow> = std::collections::BTreeMap::new();
    for row in rows {
        let keep = last.get(&row.sample_id).is_none_or(|prev| row.stage_index >= prev.stage_index);
        if keep {
            last.insert(row.sample_id, row);
        }
    }
    if last.is_empty() {
        return Err(CliError::schema(path, "no trajectory rows"));
    }
    Ok(last
        .into_values()
        .map(|row| TargetRow {
            label: format!("trajectory_{}", row.sample_id),
            r: row.state.r,
            v: Some(row.state.v),
        })
        .collect())
}

/// Peeks at the first line of a CSV file.
pub fn csv_header(path: &Path) -> CliResult<Vec<String>> {
    let mut rdr = reader(path)?;
    headers(path, &mut rdr)
}
