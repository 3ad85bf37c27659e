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

//! Initial-condition shifts applied ahead of the first stage.
//!
//! The stage-0 costate selects, in closed form, where on an uncertainty
//! ellipsoid the trajectory starts and which departure impulse it receives:
//!
//! ```text
//! r* = r_ref + δr
//! v* = v_ref + δv₁ + δv₂
//! m* = m0 · exp(−ΔV / c)
//! ```

use nalgebra::Cholesky;

use crate::dynamics::{Propulsion, StateVec};
use crate::reachability::CostateVec;
use crate::{Error, Mat3, Result, Vec3};

/// Costate norms below this are treated as "no preference".
pub const COSTATE_FLOOR: f64 = 1e-30;

/// Ellipsoidal position and velocity uncertainty, `½δᵀEδ = ½s²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipsoidSpec {
    e_r: Mat3,
    e_v: Mat3,
    e_r_inv: Mat3,
    e_v_inv: Mat3,
    r_ref: f64,
    v_ref: f64,
}

impl EllipsoidSpec {
    pub fn new(e_r: Mat3, e_v: Mat3, r_ref: f64, v_ref: f64) -> Result<Self> {
        if !(r_ref >= 0.0 && r_ref.is_finite()) {
            return Err(Error::invalid("r_ref", "must be non-negative"));
        }
        if !(v_ref >= 0.0 && v_ref.is_finite()) {
            return Err(Error::invalid("v_ref", "must be non-negative"));
        }
        let e_r_inv = spd_inverse(&e_r, "e_r")?;
        let e_v_inv = spd_inverse(&e_v, "e_v")?;
        Ok(EllipsoidSpec {
            e_r,
            e_v,
            e_r_inv,
            e_v_inv,
            r_ref,
            v_ref,
        })
    }

    /// Builds the matrices from their upper triangles in row order
    /// `[e11, e12, e13, e22, e23, e33]`.
    pub fn from_upper(e_r: [f64; 6], e_v: [f64; 6], r_ref: f64, v_ref: f64) -> Result<Self> {
        Self::new(sym_from_upper(e_r), sym_from_upper(e_v), r_ref, v_ref)
    }

    pub fn e_r(&self) -> &Mat3 {
        &self.e_r
    }

    pub fn e_v(&self) -> &Mat3 {
        &self.e_v
    }

    pub fn r_ref(&self) -> f64 {
        self.r_ref
    }

    pub fn v_ref(&self) -> f64 {
        self.v_ref
    }
}

pub fn sym_from_upper(u: [f64; 6]) -> Mat3 {
    Mat3::new(u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5])
}

fn spd_inverse(e: &Mat3, name: &'static str) -> Result<Mat3> {
    if !e.iter().all(|v| v.is_finite()) || (e - e.transpose()).amax() > 1e-12 * e.amax() {
        return Err(Error::invalid(name, "must be a finite symmetric matrix"));
    }
    let chol = Cholesky::new(*e).ok_or(Error::invalid(name, "must be positive definite"))?;
    if e.symmetric_eigenvalues().min() <= 0.0 {
        return Err(Error::invalid(name, "must be positive definite"));
    }
    Ok(chol.inverse())
}

/// Bound on the departure impulse magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpulseSpec {
    dv_max: f64,
}

impl ImpulseSpec {
    pub fn new(dv_max: f64) -> Result<Self> {
        if !(dv_max >= 0.0 && dv_max.is_finite()) {
            return Err(Error::invalid("dv_max", "must be non-negative"));
        }
        Ok(ImpulseSpec { dv_max })
    }

    pub fn dv_max(&self) -> f64 {
        self.dv_max
    }
}

/// Optional boundary treatments; `None` fields contribute zero shift.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundarySpec {
    pub ellipsoid: Option<EllipsoidSpec>,
    pub impulse: Option<ImpulseSpec>,
}

impl BoundarySpec {
    pub fn is_empty(&self) -> bool {
        self.ellipsoid.is_none() && self.impulse.is_none()
    }
}

/// Outcome of the initial-condition shift for one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryResult {
    pub delta_r: Vec3,
    pub delta_v1: Vec3,
    pub delta_v2: Vec3,
    pub dv: f64,
    pub m_star: f64,
    /// The non-binding impulse magnitude fell outside `[0, ΔV_max]`.
    pub clamped: bool,
    /// A costate block was below the degeneracy floor; its shift was zeroed.
    pub degenerate: bool,
}

fn ellipsoid_shift(lambda: &Vec3, e_inv: &Mat3, scale: f64) -> Result<Vec3> {
    if !(lambda.norm() > COSTATE_FLOOR) {
        return Err(Error::DegenerateCostate);
    }
    let w = e_inv * lambda;
    let q = lambda.dot(&w);
    if !(q > 0.0) {
        return Err(Error::DegenerateCostate);
    }
    Ok(w * (-scale / q.sqrt()))
}

/// `δr = −r_ref · E_r⁻¹λ_r / √(λ_rᵀE_r⁻¹λ_r)`.
pub fn ellipsoid_position_shift(lambda_r: &Vec3, spec: &EllipsoidSpec) -> Result<Vec3> {
    ellipsoid_shift(lambda_r, &spec.e_r_inv, spec.r_ref)
}

/// `δv₁ = −v_ref · E_v⁻¹λ_v / √(λ_vᵀE_v⁻¹λ_v)`.
pub fn ellipsoid_velocity_shift(lambda_v: &Vec3, spec: &EllipsoidSpec) -> Result<Vec3> {
    ellipsoid_shift(lambda_v, &spec.e_v_inv, spec.v_ref)
}

/// Closed-form departure impulse for one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpulseSolution {
    pub delta_v2: Vec3,
    /// Applied magnitude, within `[0, ΔV_max]`.
    pub dv: f64,
    /// The magnitude bound is active (`ν₃ > 0`).
    pub binding: bool,
    /// Magnitude from the interior formula before clamping (equals `dv` on
    /// the binding branch).
    pub unclamped_dv: f64,
    pub clamped: bool,
}

/// Sign test on the impulse-bound multiplier scaled by a positive factor.
pub fn impulse_multiplier_sign(lambda_v_norm: f64, dv_max: f64, propulsion: &Propulsion) -> f64 {
    let c = propulsion.exhaust_velocity;
    let m_end = propulsion.initial_mass * (-dv_max / c).exp();
    lambda_v_norm * c * m_end - m_end * m_end
}

/// Departure impulse in model units (velocity as the state, mass and exhaust
/// velocity from `propulsion`).
pub fn impulse_shift(lambda_v: &Vec3, spec: &ImpulseSpec, propulsion: &Propulsion) -> ImpulseSolution {
    let norm = lambda_v.norm();
    if !(norm > COSTATE_FLOOR) {
        return ImpulseSolution {
            delta_v2: Vec3::zeros(),
            dv: 0.0,
            binding: false,
            unclamped_dv: 0.0,
            clamped: false,
        };
    }
    let dir = lambda_v / norm;
    let dv_max = spec.dv_max;
    if impulse_multiplier_sign(norm, dv_max, propulsion) > 0.0 {
        return ImpulseSolution {
            delta_v2: dir * (-dv_max),
            dv: dv_max,
            binding: true,
            unclamped_dv: dv_max,
            clamped: false,
        };
    }
    let c = propulsion.exhaust_velocity;
    // (‖λ‖c + √(‖λ‖²c²)) / 2m0 reduces to ‖λ‖c / m0.
    let interior = -c * (norm * c / propulsion.initial_mass).ln();
    let dv = interior.clamp(0.0, dv_max);
    ImpulseSolution {
        delta_v2: dir * (-dv),
        dv,
        binding: false,
        unclamped_dv: interior,
        clamped: dv != interior,
    }
}

/// Shifted initial state and mass for a sample with stage-0 costate `lambda0`.
pub fn apply_initial_conditions(
    x_ref0: &StateVec,
    lambda0: &CostateVec,
    spec: &BoundarySpec,
    propulsion: &Propulsion,
) -> Result<(StateVec, BoundaryResult)> {
    let mut result = BoundaryResult {
        delta_r: Vec3::zeros(),
        delta_v1: Vec3::zeros(),
        delta_v2: Vec3::zeros(),
        dv: 0.0,
        m_star: propulsion.initial_mass,
        clamped: false,
        degenerate: false,
    };
    if let Some(e) = &spec.ellipsoid {
        match ellipsoid_position_shift(&lambda0.lambda_r, e) {
            Ok(d) => result.delta_r = d,
            Err(Error::DegenerateCostate) => result.degenerate = true,
            Err(err) => return Err(err),
        }
        match ellipsoid_velocity_shift(&lambda0.lambda_v, e) {
            Ok(d) => result.delta_v1 = d,
            Err(Error::DegenerateCostate) => result.degenerate = true,
            Err(err) => return Err(err),
        }
    }
    if let Some(imp) = &spec.impulse {
        let sol = impulse_shift(&lambda0.lambda_v, imp, propulsion);
        result.delta_v2 = sol.delta_v2;
        result.dv = sol.dv;
        result.clamped = sol.clamped;
        result.m_star = propulsion.initial_mass * (-sol.dv / propulsion.exhaust_velocity).exp();
    }
    let shifted = StateVec::new(
        x_ref0.r + result.delta_r,
        x_ref0.v + result.delta_v1 + result.delta_v2,
        x_ref0.frame,
    )?;
    Ok((shifted, result))
}
