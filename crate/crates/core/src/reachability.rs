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

//! Terminal costate sampling, backward costate recursion, primer-vector
//! control recovery and nonlinear reconstruction of reachable trajectories.
//!
//! A batch runs in three passes. The ballistic reference with its per-stage
//! `Φ`/`Ω` is built once. Every sample `j` then draws a terminal costate
//! direction, sweeps it backward with `λⁱ = Φᵢᵀ λⁱ⁺¹` while reading off the
//! steering `α̂ⁱ = −Ωᵢᵀλⁱ⁺¹ / ‖Ωᵢᵀλⁱ⁺¹‖`, and finally flies the schedule once
//! through the nonlinear dynamics at full thrust.
//!
//! Sample `j` draws its random numbers from its own ChaCha stream keyed by
//! `(seed, j)`, so results do not depend on evaluation order or on how the
//! batch is split across workers.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::boundary::{apply_initial_conditions, BoundaryResult, BoundarySpec};
use crate::dynamics::{Model, Propulsion, StateVec};
use crate::integrator::{IntegratorConfig, StepHint};
use crate::propagation::{build_reference, propagate_state, ReferenceTrajectory};
use crate::{Error, Mat63, Result, Vec3, Vec6};

/// Primer norms below this cannot define a steering direction.
pub const PRIMER_FLOOR: f64 = 1e-30;
/// Unit-norm tolerance for recorded steering vectors.
pub const CONTROL_UNIT_TOL: f64 = 1e-10;

/// Costate split into position and velocity blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostateVec {
    pub lambda_r: Vec3,
    pub lambda_v: Vec3,
}

impl CostateVec {
    pub fn new(lambda_r: Vec3, lambda_v: Vec3) -> Self {
        CostateVec { lambda_r, lambda_v }
    }

    pub fn from_vector(l: &Vec6) -> Self {
        CostateVec {
            lambda_r: l.fixed_rows::<3>(0).into(),
            lambda_v: l.fixed_rows::<3>(3).into(),
        }
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(
            self.lambda_r.x,
            self.lambda_r.y,
            self.lambda_r.z,
            self.lambda_v.x,
            self.lambda_v.y,
            self.lambda_v.z,
        )
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }
}

/// Per-stage unit steering vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSchedule(Vec<Vec3>);

impl ControlSchedule {
    pub fn new(controls: Vec<Vec3>) -> Result<Self> {
        for c in &controls {
            let n = c.norm();
            if !((n - 1.0).abs() <= CONTROL_UNIT_TOL) {
                return Err(Error::NonUnitControl(n));
            }
        }
        Ok(ControlSchedule(controls))
    }

    pub fn as_slice(&self) -> &[Vec3] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Terminal costate for sample `j`: a normalized 6-D standard Gaussian draw
/// from the ChaCha stream `j` of `seed`.
pub fn terminal_costate(seed: u64, j: u64) -> CostateVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    loop {
        let mut l = Vec6::zeros();
        for c in l.iter_mut() {
            *c = StandardNormal.sample(&mut rng);
        }
        let n = l.norm();
        if n > 1e-150 {
            return CostateVec::from_vector(&(l / n));
        }
    }
}

/// `count` terminal costates uniformly distributed on the unit 5-sphere.
pub fn sample_terminal_costates(count: usize, seed: u64) -> Vec<CostateVec> {
    (0..count as u64).map(|j| terminal_costate(seed, j)).collect()
}

/// `λ⁰ … λᴺ` from `λⁱ = Φᵢᵀ λⁱ⁺¹`, without normalization.
pub fn backward_costates(lambda_n: &CostateVec, reference: &ReferenceTrajectory) -> Vec<CostateVec> {
    let n = reference.num_stages();
    let mut out = alloc::vec![*lambda_n; n + 1];
    let mut l = lambda_n.to_vector();
    for i in (0..n).rev() {
        l = reference.stages[i].f_x.transpose() * l;
        out[i] = CostateVec::from_vector(&l);
    }
    out
}

/// Primer-vector steering `−Ωᵀλ / ‖Ωᵀλ‖` for one stage.
pub fn stage_control(f_u: &Mat63, lambda_next: &CostateVec) -> Result<Vec3> {
    let p = f_u.transpose() * lambda_next.to_vector();
    let n = p.norm();
    if !(n > PRIMER_FLOOR) || !n.is_finite() {
        return Err(Error::DegeneratePrimer { stage: 0 });
    }
    Ok(-p / n)
}

/// Steering schedule and stage-0 costate for a terminal costate, in a single
/// backward sweep.
pub fn recover_controls(
    reference: &ReferenceTrajectory,
    lambda_n: &CostateVec,
) -> Result<(ControlSchedule, CostateVec)> {
    let n = reference.num_stages();
    let mut controls = alloc::vec![Vec3::zeros(); n];
    let mut l = lambda_n.to_vector();
    for i in (0..n).rev() {
        let stage = &reference.stages[i];
        controls[i] = stage_control(&stage.f_u, &CostateVec::from_vector(&l))
            .map_err(|_| Error::DegeneratePrimer { stage: i })?;
        l = stage.f_x.transpose() * l;
    }
    Ok((ControlSchedule(controls), CostateVec::from_vector(&l)))
}

/// Flies `controls` at full thrust from `x_init` with mass `m_init` at the
/// reference start time. Returns the `N + 1` stage-boundary states.
pub fn reconstruct_trajectory(
    reference: &ReferenceTrajectory,
    controls: &ControlSchedule,
    x_init: &StateVec,
    m_init: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<StateVec>> {
    let n = reference.num_stages();
    if controls.len() != n {
        return Err(Error::invalid("controls", "length must equal the stage count"));
    }
    if !(m_init > 0.0) {
        return Err(Error::NonpositiveMass(m_init));
    }
    let profile = reference.mass_profile().restarted(m_init, reference.t0);
    profile.check_horizon(reference.t_final())?;
    let thrust = reference.propulsion.thrust;
    let mut states = Vec::with_capacity(n + 1);
    states.push(*x_init);
    let mut x = *x_init;
    let mut hint = StepHint::default();
    for (i, alpha) in controls.as_slice().iter().enumerate() {
        let t0 = reference.stage_time(i);
        let t1 = reference.stage_time(i + 1);
        x = propagate_state(&reference.model, &x, alpha, thrust, &profile, t0, t1, cfg, &mut hint)?;
        states.push(x);
    }
    Ok(states)
}

/// One reconstructed reachable trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrajectory {
    pub id: usize,
    pub lambda_terminal: CostateVec,
    /// Kept only when histories are requested.
    pub controls: Option<ControlSchedule>,
    /// Steering on the first and last stage, kept in every mode.
    pub endpoint_controls: [Vec3; 2],
    /// All `N + 1` stage-boundary states with histories on, otherwise just
    /// the initial and terminal states.
    pub states: Vec<StateVec>,
    pub terminal: StateVec,
    pub terminal_mass: f64,
    pub boundary: Option<BoundaryResult>,
}

impl SampledTrajectory {
    pub fn initial(&self) -> StateVec {
        self.states[0]
    }

    pub fn has_history(&self) -> bool {
        self.controls.is_some()
    }
}

/// Batch parameters for the sampling and reconstruction passes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReachConfig {
    pub samples: usize,
    pub seed: u64,
    pub boundary: BoundarySpec,
    pub integrator: IntegratorConfig,
    pub keep_history: bool,
    /// A batch fails when more than this fraction of samples is discarded.
    pub max_failure_fraction: f64,
}

impl Default for ReachConfig {
    fn default() -> Self {
        ReachConfig {
            samples: 1000,
            seed: 0,
            boundary: BoundarySpec::default(),
            integrator: IntegratorConfig::default(),
            keep_history: false,
            max_failure_fraction: 0.01,
        }
    }
}

/// Steering and initial conditions for one sample, ready to be flown.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlan {
    pub id: usize,
    pub lambda_terminal: CostateVec,
    pub lambda_initial: CostateVec,
    pub controls: ControlSchedule,
    pub x_init: StateVec,
    pub m_init: f64,
    pub boundary: Option<BoundaryResult>,
}

/// A shared reference plus batch configuration; every method is a pure
/// function of its arguments, so samples can be evaluated in any order or in
/// parallel.
#[derive(Clone, Copy, Debug)]
pub struct ReachProblem<'a> {
    pub reference: &'a ReferenceTrajectory,
    pub config: &'a ReachConfig,
}

impl<'a> ReachProblem<'a> {
    pub fn new(reference: &'a ReferenceTrajectory, config: &'a ReachConfig) -> Self {
        ReachProblem { reference, config }
    }

    pub fn plan(&self, id: usize) -> Result<SamplePlan> {
        self.plan_with_costate(id, terminal_costate(self.config.seed, id as u64))
    }

    pub fn plan_with_costate(&self, id: usize, lambda_n: CostateVec) -> Result<SamplePlan> {
        let (controls, lambda0) = recover_controls(self.reference, &lambda_n)?;
        let x_ref0 = self.reference.initial_state();
        let propulsion = &self.reference.propulsion;
        let (x_init, m_init, boundary) = if self.config.boundary.is_empty() {
            (x_ref0, propulsion.initial_mass, None)
        } else {
            let (x, b) = apply_initial_conditions(&x_ref0, &lambda0, &self.config.boundary, propulsion)?;
            (x, b.m_star, Some(b))
        };
        Ok(SamplePlan {
            id,
            lambda_terminal: lambda_n,
            lambda_initial: lambda0,
            controls,
            x_init,
            m_init,
            boundary,
        })
    }

    pub fn reconstruct(&self, plan: SamplePlan) -> Result<SampledTrajectory> {
        let mut states = reconstruct_trajectory(
            self.reference,
            &plan.controls,
            &plan.x_init,
            plan.m_init,
            &self.config.integrator,
        )?;
        let terminal = *states.last().expect("at least one state");
        let terminal_mass = self
            .reference
            .mass_profile()
            .restarted(plan.m_init, self.reference.t0)
            .mass_at(self.reference.t_final())?;
        let steer = plan.controls.as_slice();
        let endpoint_controls = [steer[0], steer[steer.len() - 1]];
        let controls = if self.config.keep_history {
            Some(plan.controls)
        } else {
            let first = states[0];
            states = alloc::vec![first, terminal];
            None
        };
        Ok(SampledTrajectory {
            id: plan.id,
            lambda_terminal: plan.lambda_terminal,
            controls,
            endpoint_controls,
            states,
            terminal,
            terminal_mass,
            boundary: plan.boundary,
        })
    }

    pub fn run(&self, id: usize) -> Result<SampledTrajectory> {
        self.plan(id).and_then(|p| self.reconstruct(p))
    }

    pub fn run_with_costate(&self, id: usize, lambda_n: CostateVec) -> Result<SampledTrajectory> {
        self.plan_with_costate(id, lambda_n)
            .and_then(|p| self.reconstruct(p))
    }
}

/// A sample that could not be reconstructed.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscardedSample {
    pub id: usize,
    pub reason: Error,
}

/// Terminal states of a batch of minimum-time trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachableSet {
    pub reference: ReferenceTrajectory,
    pub samples: Vec<SampledTrajectory>,
    pub discarded: Vec<DiscardedSample>,
    pub attempted: usize,
    pub seed: u64,
    /// Seconds; filled in by callers that can read a clock.
    pub wall_time: f64,
}

impl ReachableSet {
    /// Gathers per-sample outcomes, in sample order, into a set. Fails if the
    /// discarded fraction exceeds `max_failure_fraction`.
    pub fn collect<I>(reference: ReferenceTrajectory, config: &ReachConfig, outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Result<SampledTrajectory>)>,
    {
        let mut samples = Vec::new();
        let mut discarded = Vec::new();
        for (id, outcome) in outcomes {
            match outcome {
                Ok(s) => samples.push(s),
                Err(reason) => discarded.push(DiscardedSample { id, reason }),
            }
        }
        let attempted = samples.len() + discarded.len();
        if discarded.len() as f64 > config.max_failure_fraction * attempted as f64 {
            return Err(Error::FailureThreshold {
                failed: discarded.len(),
                attempted,
            });
        }
        Ok(ReachableSet {
            reference,
            samples,
            discarded,
            attempted,
            seed: config.seed,
            wall_time: 0.0,
        })
    }

    /// Samples whose non-binding impulse was clamped into `[0, ΔV_max]`.
    pub fn clamped_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.boundary.is_some_and(|b| b.clamped))
            .count()
    }

    pub fn degenerate_boundary_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.boundary.is_some_and(|b| b.degenerate))
            .count()
    }
}

/// Reference pass followed by sequential sampling and reconstruction.
pub fn compute_reachable_set(
    model: &Model,
    x0: &StateVec,
    propulsion: &Propulsion,
    stages: usize,
    dt: f64,
    config: &ReachConfig,
) -> Result<ReachableSet> {
    if config.samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let reference = build_reference(model, x0, propulsion, stages, dt, 0.0, &config.integrator)?;
    let problem = ReachProblem::new(&reference, config);
    let outcomes: Vec<_> = (0..config.samples).map(|j| (j, problem.run(j))).collect();
    ReachableSet::collect(reference, config, outcomes)
}
