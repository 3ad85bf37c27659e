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

//! Minimum-time reachable sets for low-thrust spacecraft.
//!
//! The engine linearizes the dynamics about a ballistic reference trajectory
//! split into fixed-duration stages, samples terminal costate directions on
//! the unit sphere, maps each sample backward through the transposed
//! state-transition matrices, and recovers the primer-vector thrust direction
//! for every stage in closed form. Each sample is then re-flown once through
//! the full nonlinear dynamics at maximum thrust, so the terminal states trace
//! the boundary of the reachable set.
//!
//! Two dynamical models are supported: heliocentric two-body motion (km, s,
//! kg) and the Earth–Moon circular restricted three-body problem in
//! normalized synodic coordinates. Optional initial-condition shifts model
//! ellipsoidal position/velocity uncertainty and a bounded departure impulse.
//! For periodic orbits in the three-body problem the crate also computes the
//! monodromy matrix and seeds the stable/unstable invariant manifolds, and a
//! small geometry layer builds convex hulls over terminal clouds for
//! containment and extent queries.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! parallel batch runner and the command-line front end live in the `ltreach`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod boundary;
pub mod dynamics;
mod error;
pub mod hull;
pub mod integrator;
pub mod kepler;
pub mod manifolds;
pub mod propagation;
pub mod reachability;

pub use error::{Error, Result};

pub use analysis::{ContainmentReport, ExtentMetrics, Space, TerminalCloud};
pub use boundary::{BoundaryResult, BoundarySpec, EllipsoidSpec, ImpulseSpec};
pub use dynamics::{
    Cr3bpModel, Frame, MassProfile, Model, Propulsion, SpacecraftParams, StateVec, TwoBodyModel,
};
pub use hull::HullSummary;
pub use integrator::{IntegratorConfig, Method};
pub use manifolds::{ManifoldBranch, ManifoldKind, MonodromyDecomposition, PeriodicOrbitSpec};
pub use propagation::{ReferenceTrajectory, StageRecord};
pub use reachability::{
    ControlSchedule, CostateVec, ReachConfig, ReachProblem, ReachableSet, SampledTrajectory,
};

/// 3-vector of `f64`.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 6-vector of `f64`, `[r; v]` layout.
pub type Vec6 = nalgebra::Vector6<f64>;
/// 3×3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// 6×6 matrix of `f64`.
pub type Mat6 = nalgebra::Matrix6<f64>;
/// 6×3 matrix of `f64`.
pub type Mat63 = nalgebra::Matrix6x3<f64>;
