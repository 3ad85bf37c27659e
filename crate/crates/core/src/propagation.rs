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

//! Stage flow maps and the ballistic reference trajectory.
//!
//! Each stage is integrated together with its state-transition matrix
//! `Φ(t, tᵢ)` and control-sensitivity matrix `Ω(t, tᵢ)` as one augmented
//! 60-dimensional system (6 state + 36 + 18), so all three share the same
//! step selection. `Φ` starts at the identity and `Ω` at zero on every stage.

use alloc::vec::Vec;

use nalgebra::SVector;

use crate::dynamics::{control_influence, MassProfile, Model, Propulsion, StateVec, CONTROL_NORM_TOL};
use crate::integrator::{integrate, IntegratorConfig, StepHint};
use crate::{Error, Mat6, Mat63, Result, Vec3, Vec6};

/// Linearization data for one stage of the reference trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub index: usize,
    /// Stage start time.
    pub t: f64,
    pub dt: f64,
    /// Reference state at the stage start.
    pub x_ref: StateVec,
    /// Full-throttle mass at the stage start.
    pub m_ref: f64,
    /// `Φ(t + dt, t)`.
    pub f_x: Mat6,
    /// `Ω(t + dt, t)`.
    pub f_u: Mat63,
}

/// Ballistic reference trajectory with per-stage sensitivities.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTrajectory {
    pub model: Model,
    pub propulsion: Propulsion,
    pub t0: f64,
    pub dt: f64,
    pub stages: Vec<StageRecord>,
    pub x_terminal: StateVec,
}

impl ReferenceTrajectory {
    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn initial_state(&self) -> StateVec {
        self.stages[0].x_ref
    }

    pub fn t_final(&self) -> f64 {
        self.stage_time(self.stages.len())
    }

    /// Start time of stage `i` (`i = N` gives the final time).
    pub fn stage_time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn mass_profile(&self) -> MassProfile {
        self.propulsion.mass_profile(self.t0)
    }

    /// Reference states at all `N + 1` stage boundaries.
    pub fn boundary_states(&self) -> Vec<StateVec> {
        let mut out: Vec<StateVec> = self.stages.iter().map(|s| s.x_ref).collect();
        out.push(self.x_terminal);
        out
    }
}

fn check_control(alpha: &Vec3) -> Result<()> {
    let n = alpha.norm();
    if n <= CONTROL_NORM_TOL || (n - 1.0).abs() <= CONTROL_NORM_TOL {
        Ok(())
    } else {
        Err(Error::NonUnitControl(n))
    }
}

/// Nonlinear flow under a constant steering direction from `t0` to `t1`
/// (either direction in time).
#[allow(clippy::too_many_arguments)]
pub(crate) fn propagate_state(
    model: &Model,
    x0: &StateVec,
    alpha: &Vec3,
    thrust: f64,
    profile: &MassProfile,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    hint: &mut StepHint,
) -> Result<StateVec> {
    model.check_state(x0)?;
    check_control(alpha)?;
    let powered = thrust != 0.0 && alpha.norm() > CONTROL_NORM_TOL;
    let y = if powered {
        profile.check_horizon(t0.max(t1))?;
        let rhs = |t: f64, y: &Vec6| {
            let m = profile.mass_at(t)?;
            model.rates_with_accel(y, &(alpha * (thrust / m)))
        };
        integrate(&rhs, t0, &x0.to_vector(), t1, cfg, hint)?
    } else {
        let rhs = |_t: f64, y: &Vec6| model.rates_with_accel(y, &Vec3::zeros());
        integrate(&rhs, t0, &x0.to_vector(), t1, cfg, hint)?
    };
    StateVec::from_vector(&y, x0.frame)
}

/// Endpoint of one stage flown at constant steering `alpha` and thrust
/// magnitude `thrust`, with the mass following `profile`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_stage(
    model: &Model,
    x0: &StateVec,
    alpha: &Vec3,
    thrust: f64,
    profile: &MassProfile,
    t0: f64,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<StateVec> {
    propagate_state(
        model,
        x0,
        alpha,
        thrust,
        profile,
        t0,
        t0 + dt,
        cfg,
        &mut StepHint::default(),
    )
}

/// Ballistic flow from `t0` to `t1`.
pub fn flow(model: &Model, x0: &StateVec, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<StateVec> {
    propagate_state(
        model,
        x0,
        &Vec3::zeros(),
        0.0,
        &MassProfile::constant(1.0),
        t0,
        t1,
        cfg,
        &mut StepHint::default(),
    )
}

const AUG: usize = 60;

fn unpack_aug(y: &SVector<f64, AUG>) -> (Vec6, Mat6, Mat63) {
    let s = y.as_slice();
    (
        Vec6::from_column_slice(&s[0..6]),
        Mat6::from_column_slice(&s[6..42]),
        Mat63::from_column_slice(&s[42..60]),
    )
}

fn pack_aug(x: &Vec6, phi: &Mat6, omega: &Mat63) -> SVector<f64, AUG> {
    let mut y = SVector::<f64, AUG>::zeros();
    let s = y.as_mut_slice();
    s[0..6].copy_from_slice(x.as_slice());
    s[6..42].copy_from_slice(phi.as_slice());
    s[42..60].copy_from_slice(omega.as_slice());
    y
}

#[allow(clippy::too_many_arguments)]
fn propagate_with_variations(
    model: &Model,
    x0: &StateVec,
    thrust: f64,
    profile: &MassProfile,
    t0: f64,
    dt: f64,
    cfg: &IntegratorConfig,
    hint: &mut StepHint,
) -> Result<(StateVec, Mat6, Mat63)> {
    model.check_state(x0)?;
    if thrust != 0.0 {
        profile.check_horizon(t0.max(t0 + dt))?;
    }
    let rhs = |t: f64, y: &SVector<f64, AUG>| {
        let (x, phi, omega) = unpack_aug(y);
        let a = model.jacobian_of(&x)?;
        let xdot = model.rates_with_accel(&x, &Vec3::zeros())?;
        let c = if thrust == 0.0 {
            Mat63::zeros()
        } else {
            control_influence(thrust, profile.mass_at(t)?)?
        };
        Ok(pack_aug(&xdot, &(a * phi), &(a * omega + c)))
    };
    let y0 = pack_aug(&x0.to_vector(), &Mat6::identity(), &Mat63::zeros());
    let y1 = integrate(&rhs, t0, &y0, t0 + dt, cfg, hint)?;
    let (x1, phi, omega) = unpack_aug(&y1);
    Ok((StateVec::from_vector(&x1, x0.frame)?, phi, omega))
}

/// Ballistic stage endpoint together with `Φ(t0 + dt, t0)` and
/// `Ω(t0 + dt, t0)`; `Ω` uses thrust `thrust` over the mass in `profile`.
pub fn integrate_stage_with_variations(
    model: &Model,
    x0: &StateVec,
    thrust: f64,
    profile: &MassProfile,
    t0: f64,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<(StateVec, Mat6, Mat63)> {
    propagate_with_variations(model, x0, thrust, profile, t0, dt, cfg, &mut StepHint::default())
}

const STM: usize = 42;

/// Ballistic flow and state-transition matrix from `t0` to `t1`.
pub fn state_transition(
    model: &Model,
    x0: &StateVec,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<(StateVec, Mat6)> {
    model.check_state(x0)?;
    let rhs = |_t: f64, y: &SVector<f64, STM>| {
        let s = y.as_slice();
        let x = Vec6::from_column_slice(&s[0..6]);
        let phi = Mat6::from_column_slice(&s[6..42]);
        let a = model.jacobian_of(&x)?;
        let xdot = model.rates_with_accel(&x, &Vec3::zeros())?;
        let mut out = SVector::<f64, STM>::zeros();
        out.as_mut_slice()[0..6].copy_from_slice(xdot.as_slice());
        out.as_mut_slice()[6..42].copy_from_slice((a * phi).as_slice());
        Ok(out)
    };
    let mut y0 = SVector::<f64, STM>::zeros();
    y0.as_mut_slice()[0..6].copy_from_slice(x0.to_vector().as_slice());
    y0.as_mut_slice()[6..42].copy_from_slice(Mat6::identity().as_slice());
    let y1 = integrate(&rhs, t0, &y0, t1, cfg, &mut StepHint::default())?;
    let s = y1.as_slice();
    Ok((
        StateVec::from_vector(&Vec6::from_column_slice(&s[0..6]), x0.frame)?,
        Mat6::from_column_slice(&s[6..42]),
    ))
}

/// Integrates the unpowered reference over `n` stages of length `dt`,
/// recording `Φ` and `Ω` for each. `Ω` is built with the full-throttle mass
/// profile since minimum-time mass does not depend on the steering.
pub fn build_reference(
    model: &Model,
    x0: &StateVec,
    propulsion: &Propulsion,
    n: usize,
    dt: f64,
    t0: f64,
    cfg: &IntegratorConfig,
) -> Result<ReferenceTrajectory> {
    if n == 0 {
        return Err(Error::invalid("stages", "must be at least 1"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    cfg.validate()?;
    model.check_state(x0)?;
    let profile = propulsion.mass_profile(t0);
    profile.check_horizon(t0 + n as f64 * dt)?;

    let mut stages = Vec::with_capacity(n);
    let mut x = *x0;
    let mut hint = StepHint::default();
    for index in 0..n {
        let t = t0 + index as f64 * dt;
        let m_ref = profile.mass_at(t)?;
        let (x_next, f_x, f_u) =
            propagate_with_variations(model, &x, propulsion.thrust, &profile, t, dt, cfg, &mut hint)?;
        stages.push(StageRecord {
            index,
            t,
            dt,
            x_ref: x,
            m_ref,
            f_x,
            f_u,
        });
        x = x_next;
    }
    Ok(ReferenceTrajectory {
        model: *model,
        propulsion: *propulsion,
        t0,
        dt,
        stages,
        x_terminal: x,
    })
}

/// Ballistic history sampled at `segments + 1` equally spaced times over
/// `[t0, t0 + duration]`; `duration` may be negative.
pub fn sample_ballistic(
    model: &Model,
    x0: &StateVec,
    t0: f64,
    duration: f64,
    segments: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, StateVec)>> {
    model.check_state(x0)?;
    let mut out = Vec::with_capacity(segments + 1);
    out.push((t0, *x0));
    if duration == 0.0 || segments == 0 {
        return Ok(out);
    }
    let h = duration / segments as f64;
    let mut x = *x0;
    let mut hint = StepHint::default();
    let ballistic = MassProfile::constant(1.0);
    for k in 0..segments {
        let ta = t0 + k as f64 * h;
        let tb = t0 + (k + 1) as f64 * h;
        x = propagate_state(model, &x, &Vec3::zeros(), 0.0, &ballistic, ta, tb, cfg, &mut hint)?;
        out.push((tb, x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{SpacecraftParams, TwoBodyModel, MU_SUN};
    use crate::Frame;

    fn circular(a: f64) -> StateVec {
        StateVec::new(
            Vec3::new(a, 0.0, 0.0),
            Vec3::new(0.0, (MU_SUN / a).sqrt(), 0.0),
            Frame::HelioInertial,
        )
        .unwrap()
    }

    #[test]
    fn zero_duration_stage_is_identity() {
        let model = Model::TwoBody(TwoBodyModel::sun());
        let x0 = circular(1.5e8);
        let p = MassProfile::constant(1000.0);
        let cfg = IntegratorConfig::default();
        let x = integrate_stage(&model, &x0, &Vec3::x(), 5e-4, &p, 0.0, 0.0, &cfg).unwrap();
        assert_eq!(x, x0);
        let (x, fx, fu) = integrate_stage_with_variations(&model, &x0, 5e-4, &p, 0.0, 0.0, &cfg).unwrap();
        assert_eq!(x, x0);
        assert_eq!(fx, Mat6::identity());
        assert_eq!(fu, Mat63::zeros());
    }

    #[test]
    fn single_stage_reference() {
        let model = Model::TwoBody(TwoBodyModel::sun());
        let params = SpacecraftParams::new(0.5, 3000.0, 1000.0).unwrap();
        let prop = model.propulsion(&params);
        let cfg = IntegratorConfig::default();
        let x0 = circular(1.5e8);
        let reference = build_reference(&model, &x0, &prop, 1, 86400.0, 0.0, &cfg).unwrap();
        assert_eq!(reference.num_stages(), 1);
        let end = integrate_stage(&model, &x0, &Vec3::zeros(), prop.thrust, &prop.mass_profile(0.0), 0.0, 86400.0, &cfg)
            .unwrap();
        assert!((end.to_vector() - reference.x_terminal.to_vector()).amax() < 1e-6);
    }

    #[test]
    fn reference_rejects_bad_horizons() {
        let model = Model::TwoBody(TwoBodyModel::sun());
        let prop = model.propulsion(&SpacecraftParams::new(0.5, 3000.0, 1000.0).unwrap());
        let cfg = IntegratorConfig::default();
        let x0 = circular(1.5e8);
        assert!(build_reference(&model, &x0, &prop, 0, 86400.0, 0.0, &cfg).is_err());
        assert!(build_reference(&model, &x0, &prop, 10, 0.0, 0.0, &cfg).is_err());
        // 1000 kg at 1.7e-5 kg/s lasts about 670 days
        assert!(matches!(
            build_reference(&model, &x0, &prop, 1000, 86400.0, 0.0, &cfg),
            Err(Error::MassDepleted { .. })
        ));
    }

    #[test]
    fn ballistic_samples_include_endpoints() {
        let model = Model::TwoBody(TwoBodyModel::sun());
        let cfg = IntegratorConfig::default();
        let x0 = circular(1.5e8);
        let h = sample_ballistic(&model, &x0, 0.0, -86400.0 * 4.0, 4, &cfg).unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(h[0].1, x0);
        assert_eq!(h[4].0, -4.0 * 86400.0);
        assert_eq!(sample_ballistic(&model, &x0, 0.0, 0.0, 10, &cfg).unwrap().len(), 1);
    }
}
