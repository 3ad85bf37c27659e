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

//! Equations of motion, their Jacobians and unit handling.
//!
//! Two models are provided. [`TwoBodyModel`] works in km, km/s, kg and
//! seconds around a single central body. [`Cr3bpModel`] works in the
//! normalized synodic frame of the circular restricted three-body problem,
//! where the spacecraft mass is additionally normalized by its initial mass.
//! Thrust enters both models as `thrust / m(t) · α̂` with `‖α̂‖ ∈ {0, 1}`.


use crate::{Error, Mat3, Mat6, Mat63, Result, Vec3, Vec6};

/// Gravitational parameter of the Sun, km³/s².
pub const MU_SUN: f64 = 1.327_124_400_18e11;
/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// Tolerance on `‖α̂‖` for a steering vector to count as unit (or zero).
pub const CONTROL_NORM_TOL: f64 = 1e-12;

/// Reference frame a state is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    HelioInertial,
    SynodicRotating,
}

/// Position/velocity state tagged with its frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec {
    pub r: Vec3,
    pub v: Vec3,
    pub frame: Frame,
}

impl StateVec {
    pub fn new(r: Vec3, v: Vec3, frame: Frame) -> Result<Self> {
        let state = StateVec { r, v, frame };
        if state.is_finite() {
            Ok(state)
        } else {
            Err(Error::NonFiniteState)
        }
    }

    pub fn from_vector(x: &Vec6, frame: Frame) -> Result<Self> {
        Self::new(x.fixed_rows::<3>(0).into(), x.fixed_rows::<3>(3).into(), frame)
    }

    pub fn from_array(x: [f64; 6], frame: Frame) -> Result<Self> {
        Self::from_vector(&Vec6::from(x), frame)
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(self.r.x, self.r.y, self.r.z, self.v.x, self.v.y, self.v.z)
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.v.iter()).all(|c| c.is_finite())
    }
}

/// Dimensional spacecraft and engine parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacecraftParams {
    t_max: f64,
    isp: f64,
    m0: f64,
    g0: f64,
    c: f64,
}

impl SpacecraftParams {
    /// Thrust in N, specific impulse in s, initial mass in kg; standard gravity.
    pub fn new(t_max: f64, isp: f64, m0: f64) -> Result<Self> {
        Self::with_g0(t_max, isp, m0, STANDARD_GRAVITY)
    }

    pub fn with_g0(t_max: f64, isp: f64, m0: f64, g0: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::invalid("t_max", "must be positive"));
        }
        if !(isp > 0.0 && isp.is_finite()) {
            return Err(Error::invalid("isp", "must be positive"));
        }
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::invalid("m0", "must be positive"));
        }
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::invalid("g0", "must be positive"));
        }
        Ok(SpacecraftParams {
            t_max,
            isp,
            m0,
            g0,
            c: isp * g0,
        })
    }

    /// Maximum thrust, N.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Specific impulse, s.
    pub fn isp(&self) -> f64 {
        self.isp
    }

    /// Initial mass, kg.
    pub fn m0(&self) -> f64 {
        self.m0
    }

    /// Standard gravity used for the exhaust velocity, m/s².
    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// Exhaust velocity `isp · g0`, m/s.
    pub fn exhaust_velocity(&self) -> f64 {
        self.c
    }
}

/// Engine description expressed in the units of a particular model.
///
/// For [`TwoBodyModel`] the thrust is in kg·km/s², the exhaust velocity in
/// km/s and masses in kg. For [`Cr3bpModel`] all three are nondimensional and
/// the initial mass is 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propulsion {
    pub thrust: f64,
    pub exhaust_velocity: f64,
    pub initial_mass: f64,
}

impl Propulsion {
    /// Mass flow at full throttle.
    pub fn mass_rate(&self) -> f64 {
        if self.thrust == 0.0 {
            0.0
        } else {
            self.thrust / self.exhaust_velocity
        }
    }

    /// Full-throttle mass profile starting from the initial mass at `t0`.
    pub fn mass_profile(&self, t0: f64) -> MassProfile {
        MassProfile {
            m0: self.initial_mass,
            mdot: self.mass_rate(),
            t0,
        }
    }

    /// `∂ẋ/∂u` for a unit steering control: zero on top, `thrust/m · I` below.
    pub fn control_influence(&self, mass: f64) -> Result<Mat63> {
        control_influence(self.thrust, mass)
    }
}

pub(crate) fn control_influence(thrust: f64, mass: f64) -> Result<Mat63> {
    if !(mass > 0.0) {
        return Err(Error::NonpositiveMass(mass));
    }
    let mut c = Mat63::zeros();
    c.fixed_view_mut::<3, 3>(3, 0)
        .fill_with_identity();
    c.fixed_view_mut::<3, 3>(3, 0).scale_mut(thrust / mass);
    Ok(c)
}

/// Linear mass depletion `m(t) = m0 − ṁ (t − t0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassProfile {
    pub m0: f64,
    pub mdot: f64,
    pub t0: f64,
}

impl MassProfile {
    pub fn constant(m0: f64) -> Self {
        MassProfile {
            m0,
            mdot: 0.0,
            t0: 0.0,
        }
    }

    pub fn mass_at(&self, t: f64) -> Result<f64> {
        if self.mdot != 0.0 && t < self.t0 {
            return Err(Error::invalid("t", "mass profile queried before its epoch"));
        }
        let m = self.m0 - self.mdot * (t - self.t0);
        if m > 0.0 {
            Ok(m)
        } else {
            Err(Error::MassDepleted { t, mass: m })
        }
    }

    /// Fails if the profile reaches zero mass on or before `t_end`.
    pub fn check_horizon(&self, t_end: f64) -> Result<()> {
        self.mass_at(t_end).map(|_| ())
    }

    /// Same mass flow, restarted from `m0` at `t0`.
    pub fn restarted(&self, m0: f64, t0: f64) -> Self {
        MassProfile {
            m0,
            mdot: self.mdot,
            t0,
        }
    }
}

/// Point-mass central body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoBodyModel {
    /// Gravitational parameter, km³/s².
    pub mu: f64,
    /// Closest approach to the center tolerated before failing, km.
    pub singular_floor: f64,
}

impl TwoBodyModel {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", "must be positive"));
        }
        Ok(TwoBodyModel {
            mu,
            singular_floor: 1.0,
        })
    }

    pub fn sun() -> Self {
        TwoBodyModel {
            mu: MU_SUN,
            singular_floor: 1.0,
        }
    }
}

/// Circular restricted three-body problem in normalized synodic coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cr3bpModel {
    /// Mass ratio `m2 / (m1 + m2)`.
    pub mu: f64,
    /// Characteristic length, km.
    pub l_star: f64,
    /// Characteristic time, s.
    pub t_star: f64,
    /// Characteristic mass, kg.
    pub m_star: f64,
    /// Closest approach to either primary tolerated before failing.
    pub singular_floor: f64,
}

impl Cr3bpModel {
    pub const EARTH_MOON_MU: f64 = 0.012_150_585_6;
    pub const EARTH_MOON_L_STAR: f64 = 3.844e5;
    pub const EARTH_MOON_T_STAR: f64 = 375_200.0;
    pub const EARTH_MOON_M_STAR: f64 = 6.0458e24;

    pub fn new(mu: f64, l_star: f64, t_star: f64, m_star: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 0.5) {
            return Err(Error::invalid("mu", "must lie in (0, 0.5)"));
        }
        for (name, value) in [("l_star", l_star), ("t_star", t_star), ("m_star", m_star)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(Cr3bpModel {
            mu,
            l_star,
            t_star,
            m_star,
            singular_floor: 1e-9,
        })
    }

    pub fn earth_moon() -> Self {
        Cr3bpModel {
            mu: Self::EARTH_MOON_MU,
            l_star: Self::EARTH_MOON_L_STAR,
            t_star: Self::EARTH_MOON_T_STAR,
            m_star: Self::EARTH_MOON_M_STAR,
            singular_floor: 1e-9,
        }
    }

    /// km/s per unit of nondimensional velocity.
    pub fn velocity_unit(&self) -> f64 {
        self.l_star / self.t_star
    }

    /// km/s² per unit of nondimensional acceleration.
    pub fn acceleration_unit(&self) -> f64 {
        self.l_star / (self.t_star * self.t_star)
    }

    pub fn seconds_to_time(&self, seconds: f64) -> f64 {
        seconds / self.t_star
    }

    pub fn time_to_seconds(&self, time: f64) -> f64 {
        time * self.t_star
    }

    /// Engine parameters normalized by the spacecraft's own initial mass.
    pub fn propulsion(&self, params: &SpacecraftParams) -> Propulsion {
        // N → kg·km/s² is a factor 1e-3; m/s → km/s likewise.
        Propulsion {
            thrust: params.t_max() * 1e-3 / (params.m0() * self.acceleration_unit()),
            exhaust_velocity: params.exhaust_velocity() * 1e-3 / self.velocity_unit(),
            initial_mass: 1.0,
        }
    }

    pub fn nondimensionalize_state(&self, x: &StateVec) -> StateVec {
        StateVec {
            r: x.r / self.l_star,
            v: x.v / self.velocity_unit(),
            frame: x.frame,
        }
    }

    pub fn dimensionalize_state(&self, x: &StateVec) -> StateVec {
        StateVec {
            r: x.r * self.l_star,
            v: x.v * self.velocity_unit(),
            frame: x.frame,
        }
    }

    /// Dimensional synodic state (km, km/s) and spacecraft parameters to
    /// normalized ones.
    pub fn nondimensionalize(
        &self,
        x: &StateVec,
        params: &SpacecraftParams,
    ) -> Result<(StateVec, Propulsion)> {
        check_frame(Frame::SynodicRotating, x.frame)?;
        Ok((self.nondimensionalize_state(x), self.propulsion(params)))
    }

    fn primary_distances(&self, r: &Vec3) -> Result<(f64, f64)> {
        let mu = self.mu;
        let r1 = Vec3::new(r.x + mu, r.y, r.z).norm();
        let r2 = Vec3::new(r.x + mu - 1.0, r.y, r.z).norm();
        let closest = r1.min(r2);
        if closest < self.singular_floor || !closest.is_finite() {
            return Err(Error::SingularState {
                distance: closest,
                floor: self.singular_floor,
            });
        }
        Ok((r1, r2))
    }

    fn natural_accel(&self, r: &Vec3, v: &Vec3) -> Result<Vec3> {
        let mu = self.mu;
        let (r1, r2) = self.primary_distances(r)?;
        let k1 = (1.0 - mu) / (r1 * r1 * r1);
        let k2 = mu / (r2 * r2 * r2);
        Ok(Vec3::new(
            r.x + 2.0 * v.y - k1 * (r.x + mu) - k2 * (r.x + mu - 1.0),
            r.y - 2.0 * v.x - k1 * r.y - k2 * r.y,
            -k1 * r.z - k2 * r.z,
        ))
    }

    fn gravity_gradient(&self, r: &Vec3) -> Result<Mat3> {
        let mu = self.mu;
        self.primary_distances(r)?;
        let d1 = Vec3::new(r.x + mu, r.y, r.z);
        let d2 = Vec3::new(r.x + mu - 1.0, r.y, r.z);
        let mut g = point_mass_gradient(1.0 - mu, &d1) + point_mass_gradient(mu, &d2);
        g[(0, 0)] += 1.0;
        g[(1, 1)] += 1.0;
        Ok(g)
    }

    /// Jacobi constant `x² + y² + 2(1−μ)/r1 + 2μ/r2 − ‖v‖²`.
    pub fn jacobi_constant(&self, x: &StateVec) -> Result<f64> {
        check_frame(Frame::SynodicRotating, x.frame)?;
        let (r1, r2) = self.primary_distances(&x.r)?;
        let mu = self.mu;
        Ok(x.r.x * x.r.x + x.r.y * x.r.y + 2.0 * (1.0 - mu) / r1 + 2.0 * mu / r2
            - x.v.norm_squared())
    }
}

/// `∂/∂r` of the acceleration `−k d/‖d‖³`.
fn point_mass_gradient(k: f64, d: &Vec3) -> Mat3 {
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    let r3 = r2 * r;
    let r5 = r3 * r2;
    (d * d.transpose()) * (3.0 * k / r5) - Mat3::identity() * (k / r3)
}

fn check_frame(expected: Frame, found: Frame) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::FrameMismatch { expected, found })
    }
}

/// The dynamical model a trajectory is propagated under.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    TwoBody(TwoBodyModel),
    Cr3bp(Cr3bpModel),
}

impl Model {
    pub fn frame(&self) -> Frame {
        match self {
            Model::TwoBody(_) => Frame::HelioInertial,
            Model::Cr3bp(_) => Frame::SynodicRotating,
        }
    }

    pub fn is_cr3bp(&self) -> bool {
        matches!(self, Model::Cr3bp(_))
    }

    /// Engine parameters in this model's units.
    pub fn propulsion(&self, params: &SpacecraftParams) -> Propulsion {
        match self {
            Model::TwoBody(_) => Propulsion {
                thrust: params.t_max() * 1e-3,
                exhaust_velocity: params.exhaust_velocity() * 1e-3,
                initial_mass: params.m0(),
            },
            Model::Cr3bp(m) => m.propulsion(params),
        }
    }

    pub fn check_state(&self, x: &StateVec) -> Result<()> {
        check_frame(self.frame(), x.frame)?;
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteState)
        }
    }

    /// `ẋ = [v; a_natural + thrust/m · α̂]`.
    pub fn rates(&self, x: &StateVec, alpha: &Vec3, thrust: f64, mass: f64) -> Result<Vec6> {
        self.check_state(x)?;
        let n = alpha.norm();
        if !(n <= CONTROL_NORM_TOL || (n - 1.0).abs() <= CONTROL_NORM_TOL) {
            return Err(Error::NonUnitControl(n));
        }
        if !(mass > 0.0) {
            return Err(Error::NonpositiveMass(mass));
        }
        self.rates_with_accel(&x.to_vector(), &(alpha * (thrust / mass)))
    }

    /// `∂ẋ/∂x`. The control term does not depend on the state.
    pub fn state_jacobian(&self, x: &StateVec) -> Result<Mat6> {
        self.check_state(x)?;
        self.jacobian_of(&x.to_vector())
    }

    pub(crate) fn rates_with_accel(&self, x: &Vec6, thrust_accel: &Vec3) -> Result<Vec6> {
        let r: Vec3 = x.fixed_rows::<3>(0).into();
        let v: Vec3 = x.fixed_rows::<3>(3).into();
        let a = match self {
            Model::TwoBody(m) => {
                let rn = r.norm();
                if rn < m.singular_floor || !rn.is_finite() {
                    return Err(Error::SingularState {
                        distance: rn,
                        floor: m.singular_floor,
                    });
                }
                r * (-m.mu / (rn * rn * rn))
            }
            Model::Cr3bp(m) => m.natural_accel(&r, &v)?,
        } + thrust_accel;
        Ok(Vec6::new(v.x, v.y, v.z, a.x, a.y, a.z))
    }

    pub(crate) fn jacobian_of(&self, x: &Vec6) -> Result<Mat6> {
        let r: Vec3 = x.fixed_rows::<3>(0).into();
        let mut jac = Mat6::zeros();
        jac.fixed_view_mut::<3, 3>(0, 3).fill_with_identity();
        match self {
            Model::TwoBody(m) => {
                let rn = r.norm();
                if rn < m.singular_floor || !rn.is_finite() {
                    return Err(Error::SingularState {
                        distance: rn,
                        floor: m.singular_floor,
                    });
                }
                jac.fixed_view_mut::<3, 3>(3, 0)
                    .copy_from(&point_mass_gradient(m.mu, &r));
            }
            Model::Cr3bp(m) => {
                jac.fixed_view_mut::<3, 3>(3, 0)
                    .copy_from(&m.gravity_gradient(&r)?);
                jac[(3, 4)] = 2.0;
                jac[(4, 3)] = -2.0;
            }
        }
        Ok(jac)
    }
}
