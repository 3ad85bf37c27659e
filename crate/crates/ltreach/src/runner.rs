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

//! Parallel batch execution.
//!
//! Samples are independent given `(seed, id)`, so the work is spread with
//! rayon and the results gathered back in id order. Output never depends on
//! the number of workers.

use std::time::Instant;

use ltreach_core::integrator::IntegratorConfig;
use ltreach_core::manifolds::{
    correct_symmetric_orbit, fixed_points, manifold_trajectory, monodromy, orbit_closure_check, classify_spectrum,
    FixedPoint, PeriodicOrbitSpec, BRANCHES,
};
use ltreach_core::propagation::build_reference;
use ltreach_core::{
    Cr3bpModel, ManifoldBranch, Model, MonodromyDecomposition, Propulsion, ReachConfig, ReachProblem, ReachableSet,
    ReferenceTrajectory, Result, StateVec,
};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{Horizon, ManifoldSettings};
use crate::error::{CliError, CliResult};
use crate::report::PhaseTimes;

/// A pool with `threads` workers, or one per hardware thread.
pub fn thread_pool(threads: Option<usize>) -> CliResult<ThreadPool> {
    if threads == Some(0) {
        return Err(CliError::config("--threads", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config("--threads", e.to_string()))
}

pub fn seconds_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

pub fn reference_for(model: &Model, x0: &StateVec, propulsion: &Propulsion, horizon: &Horizon, integrator: &IntegratorConfig) -> Result<ReferenceTrajectory> {
    build_reference(model, x0, propulsion, horizon.stages, horizon.dt, 0.0, integrator)
}

/// A reachable set with per-phase timings (the `output` phase is left to
/// the caller).
pub struct ReachRun {
    pub set: ReachableSet,
    pub timing: PhaseTimes,
}

/// Reference pass, then the sampling and reconstruction passes across the
/// pool.
pub fn run_reach(
    model: &Model,
    x0: &StateVec,
    propulsion: &Propulsion,
    horizon: &Horizon,
    config: &ReachConfig,
    pool: &ThreadPool,
) -> Result<ReachRun> {
    let start = Instant::now();
    let reference = reference_for(model, x0, propulsion, horizon, &config.integrator)?;
    let t_reference = seconds_since(start);

    let problem = ReachProblem::new(&reference, config);
    let phase = Instant::now();
    let plans: Vec<_> = pool.install(|| (0..config.samples).into_par_iter().map(|id| problem.plan(id)).collect());
    let t_sampling = seconds_since(phase);

    let phase = Instant::now();
    let outcomes: Vec<_> = pool.install(|| {
        plans
            .into_par_iter()
            .enumerate()
            .map(|(id, plan)| (id, plan.and_then(|p| problem.reconstruct(p))))
            .collect()
    });
    let t_reconstruction = seconds_since(phase);

    let mut set = ReachableSet::collect(reference, config, outcomes)?;
    set.wall_time = seconds_since(start);
    Ok(ReachRun {
        timing: PhaseTimes {
            total: set.wall_time,
            reference: t_reference,
            sampling: t_sampling,
            reconstruction: t_reconstruction,
            output: 0.0,
        },
        set,
    })
}

/// Everything `manifolds` produces.
pub struct ManifoldRun {
    pub orbit: PeriodicOrbitSpec,
    pub corrected: bool,
    pub closure_error: f64,
    pub decomposition: Vec<(FixedPoint, MonodromyDecomposition)>,
    /// In [`BRANCHES`] order.
    pub branches: Vec<ManifoldBranch>,
    pub timing: PhaseTimes,
}

pub fn run_manifolds(
    model: &Cr3bpModel,
    x0: &StateVec,
    settings: &ManifoldSettings,
    integrator: &IntegratorConfig,
    pool: &ThreadPool,
) -> Result<ManifoldRun> {
    let start = Instant::now();
    let (x0, period) = if settings.correct {
        let c = correct_symmetric_orbit(model, x0, settings.period, 1e-12, integrator)?;
        (c.x0, c.period)
    } else {
        (*x0, settings.period)
    };
    let orbit = PeriodicOrbitSpec::new(x0, period, settings.n_fixed_points)?;
    let closure_error = orbit_closure_check(model, &orbit, integrator)?;
    let points = fixed_points(model, &orbit, integrator)?;
    let decomposition = pool.install(|| {
        points
            .into_par_iter()
            .map(|fp| Ok((fp, classify_spectrum(&monodromy(model, &orbit, &fp.state, integrator)?)?)))
            .collect::<Result<Vec<_>>>()
    })?;
    let t_reference = seconds_since(start);

    let phase = Instant::now();
    let branches = BRANCHES
        .iter()
        .map(|&(kind, s)| {
            let trajectories = pool.install(|| {
                decomposition
                    .par_iter()
                    .map(|p| {
                        manifold_trajectory(model, p, kind, s, settings.epsilon, settings.horizon, settings.segments, integrator)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            Ok(ManifoldBranch {
                kind,
                s,
                epsilon: settings.epsilon,
                trajectories,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let t_branches = seconds_since(phase);
    Ok(ManifoldRun {
        orbit,
        corrected: settings.correct,
        closure_error,
        decomposition,
        branches,
        timing: PhaseTimes {
            total: seconds_since(start),
            reference: t_reference,
            sampling: 0.0,
            reconstruction: t_branches,
            output: 0.0,
        },
    })
}
