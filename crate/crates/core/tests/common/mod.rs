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

#![allow(dead_code)]

use ltreach_core::dynamics::MU_SUN;
use ltreach_core::*;

pub const HOUR: f64 = 3600.0;
pub const DAY: f64 = 86400.0;

pub fn earth_departure() -> StateVec {
    StateVec::new(
        Vec3::new(-140_699_693.0, -51_614_428.0, 980.0),
        Vec3::new(9.774596, -28.07828, 4.337725e-4),
        Frame::HelioInertial,
    )
    .unwrap()
}

pub fn sun() -> Model {
    Model::TwoBody(TwoBodyModel::sun())
}

pub fn earth_mars_engine(t_max_newton: f64) -> Propulsion {
    sun().propulsion(&SpacecraftParams::new(t_max_newton, 3000.0, 1000.0).unwrap())
}

pub fn earth_moon() -> Cr3bpModel {
    Cr3bpModel::earth_moon()
}

pub fn cr3bp() -> Model {
    Model::Cr3bp(earth_moon())
}

pub fn halo_state() -> StateVec {
    StateVec::from_array(
        [1.17204419281306, 0.0, -0.0862093101977581, 0.0, -0.188009087163036, 0.0],
        Frame::SynodicRotating,
    )
    .unwrap()
}

pub fn halo_period() -> f64 {
    earth_moon().seconds_to_time(346.322857 * HOUR)
}

pub fn nrho_state() -> StateVec {
    StateVec::from_array([1.0221, 0.0, -0.1821, 0.0, -0.1033, 0.0], Frame::SynodicRotating).unwrap()
}

pub fn nrho_period() -> f64 {
    earth_moon().seconds_to_time(157.500622 * HOUR)
}

pub fn circular(a: f64) -> StateVec {
    StateVec::new(
        Vec3::new(a, 0.0, 0.0),
        Vec3::new(0.0, (MU_SUN / a).sqrt(), 0.0),
        Frame::HelioInertial,
    )
    .unwrap()
}

/// Collinear point between the primaries found by bisection on the x-axis
/// force balance, kept independent of the library's Newton solver.
pub fn l1_by_bisection(mu: f64) -> f64 {
    let f = |x: f64| x - (1.0 - mu) / (x + mu).powi(2) + mu / (x - 1.0 + mu).powi(2);
    let (mut lo, mut hi) = (0.5, 1.0 - mu - 1e-6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Relative error of `a` against `b` after scaling both componentwise by
/// `scale`.
pub fn scaled_rel(a: &Vec6, b: &Vec6, scale: &Vec6) -> f64 {
    let d = (a - b).component_div(scale).norm();
    d / b.component_div(scale).norm()
}

pub fn two_body_scale() -> Vec6 {
    Vec6::new(1.5e8, 1.5e8, 1.5e8, 30.0, 30.0, 30.0)
}

pub fn unit_scale() -> Vec6 {
    Vec6::repeat(1.0)
}
