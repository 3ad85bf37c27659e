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

use crate::dynamics::Frame;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the reachability engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gravitational distance {distance:e} is below the singularity floor {floor:e}")]
    SingularState { distance: f64, floor: f64 },

    #[error("steering vector norm {0} is neither 0 nor 1")]
    NonUnitControl(f64),

    #[error("mass must be positive, got {0}")]
    NonpositiveMass(f64),

    #[error("propellant exhausted: mass {mass} at t = {t}")]
    MassDepleted { t: f64, mass: f64 },

    #[error("state tagged {found:?} evaluated under a {expected:?} model")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("state has non-finite components")]
    NonFiniteState,

    #[error("integrator step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("primer vector vanishes at stage {stage} (costate orthogonal to the controllable subspace)")]
    DegeneratePrimer { stage: usize },

    #[error("costate norm below the degeneracy floor")]
    DegenerateCostate,

    #[error("monodromy spectrum has no hyperbolic real eigenvalue")]
    ClassificationFailed,

    #[error("reachable set has no surviving samples")]
    EmptySet,

    #[error("point cloud spans only {rank} dimension(s)")]
    DegenerateCloud { rank: usize },

    #[error("{failed} of {attempted} samples failed, above the configured threshold")]
    FailureThreshold { failed: usize, attempted: usize },
}

impl Error {
    pub(crate) const fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
