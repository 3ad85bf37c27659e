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

mod common;

use common::*;
use ltreach_core::boundary::*;
use ltreach_core::reachability::CostateVec;
use ltreach_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spd(rng: &mut ChaCha8Rng) -> Mat3 {
    let a = Mat3::from_fn(|_, _| rng.random_range(-1.0..1.0));
    a * a.transpose() + Mat3::identity() * rng.random_range(1e-3..1.0)
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

#[test]
fn ellipsoid_shifts_satisfy_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10_000 {
        let e_r = random_spd(&mut rng);
        let e_v = random_spd(&mut rng);
        let r_ref = rng.random_range(0.1..1e4);
        let v_ref = rng.random_range(1e-4..1.0);
        let spec = EllipsoidSpec::new(e_r, e_v, r_ref, v_ref).unwrap();
        let lr = random_vec(&mut rng);
        let lv = random_vec(&mut rng);
        let dr = ellipsoid_position_shift(&lr, &spec).unwrap();
        let dv = ellipsoid_velocity_shift(&lv, &spec).unwrap();
        assert!((dr.dot(&(e_r * dr)) / (r_ref * r_ref) - 1.0).abs() < 1e-12);
        assert!((dv.dot(&(e_v * dv)) / (v_ref * v_ref) - 1.0).abs() < 1e-12);
        // the shift opposes the costate in the E⁻¹ metric
        assert!(dr.dot(&lr) < 0.0);
    }
}

#[test]
fn ellipsoid_examples() {
    let spec = EllipsoidSpec::new(Mat3::identity(), Mat3::identity(), 1.0, 2.0).unwrap();
    assert_eq!(ellipsoid_position_shift(&Vec3::x(), &spec).unwrap(), -Vec3::x());
    assert_eq!(ellipsoid_velocity_shift(&Vec3::z(), &spec).unwrap(), -Vec3::z() * 2.0);
    let l = Vec3::new(0.3, -2.0, 0.7);
    let a = ellipsoid_position_shift(&l, &spec).unwrap();
    let b = ellipsoid_position_shift(&(l * 5.0), &spec).unwrap();
    assert!((a - b).norm() < 1e-15);
}

#[test]
fn impulse_outputs_are_consistent() {
    let engine = earth_mars_engine(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut branches = [0usize; 2];
    for _ in 0..10_000 {
        let dv_max = rng.random_range(0.0..5.0);
        // span both sides of the branch switch |λ_v| c = m0 e^{-ΔV_max/c}
        let mag = 10f64.powf(rng.random_range(-3.0..3.0)) * engine.initial_mass / engine.exhaust_velocity;
        let lv = random_vec(&mut rng).normalize() * mag;
        let s = impulse_shift(&lv, &ImpulseSpec::new(dv_max).unwrap(), &engine);
        branches[s.binding as usize] += 1;
        assert!(s.dv >= 0.0 && s.dv <= dv_max);
        assert!((s.delta_v2.norm() - s.dv).abs() <= 1e-12 * dv_max.max(1e-300));
        if s.dv > 0.0 {
            assert!((s.delta_v2.normalize() + lv.normalize()).norm() < 1e-12);
        }
    }
    assert!(branches[0] > 0 && branches[1] > 0);
}

#[test]
fn no_specs_leave_state_alone() {
    let x = earth_departure();
    let l = CostateVec::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 0.0));
    let (y, b) = apply_initial_conditions(&x, &l, &BoundarySpec::default(), &earth_mars_engine(0.5)).unwrap();
    assert_eq!(y, x);
    assert_eq!(b.m_star, 1000.0);
    assert_eq!(b.dv, 0.0);
    assert_eq!(b.delta_r, Vec3::zeros());
}

#[test]
fn full_shift_composition() {
    let engine = earth_mars_engine(0.5);
    let c = engine.exhaust_velocity;
    let spec = BoundarySpec {
        ellipsoid: Some(EllipsoidSpec::from_upper([1.0, 0.0, 0.0, 4.0, 0.0, 9.0], [1.0, 0.0, 0.0, 1.0, 0.0, 1.0], 1e4, 0.1).unwrap()),
        impulse: Some(ImpulseSpec::new(c * std::f64::consts::LN_2).unwrap()),
    };
    // |λ_v| c well above m0 e^{-ln 2} forces the binding branch
    let l = CostateVec::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1e3));
    let x = earth_departure();
    let (y, b) = apply_initial_conditions(&x, &l, &spec, &engine).unwrap();
    assert!((b.m_star - 500.0).abs() < 1e-9);
    assert!((y.r - x.r - b.delta_r).norm() == 0.0);
    assert!((y.v - (x.v + b.delta_v1 + b.delta_v2)).norm() < 1e-12);
    assert!((b.delta_r - Vec3::new(0.0, -1e4 / 2.0, 0.0)).norm() < 1e-9);
    assert!((b.delta_v1 - Vec3::new(0.0, 0.0, -0.1)).norm() < 1e-15);
}

#[test]
fn degenerate_costates_flagged_not_fatal() {
    let spec = BoundarySpec {
        ellipsoid: Some(EllipsoidSpec::new(Mat3::identity(), Mat3::identity(), 1.0, 1.0).unwrap()),
        impulse: Some(ImpulseSpec::new(1.0).unwrap()),
    };
    let l = CostateVec::new(Vec3::zeros(), Vec3::zeros());
    let (y, b) = apply_initial_conditions(&earth_departure(), &l, &spec, &earth_mars_engine(0.5)).unwrap();
    assert!(b.degenerate);
    assert_eq!(y, earth_departure());
    assert_eq!(b.m_star, 1000.0);
}
