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

//! Closed-form two-body motion for elliptic orbits, used to place target
//! bodies at arbitrary epochs without an ephemeris.

use core::f64::consts::PI;


use crate::{Error, Result, Vec3};

const TWO_PI: f64 = 2.0 * PI;

/// Classical elements of an elliptic orbit. Angles in radians, `a` in the
/// length unit of the gravitational parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitalElements {
    pub a: f64,
    pub e: f64,
    pub inc: f64,
    pub raan: f64,
    pub argp: f64,
    pub mean_anomaly: f64,
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x % TWO_PI;
    if r < 0.0 {
        r + TWO_PI
    } else {
        r
    }
}

/// Eccentric anomaly from mean anomaly by Newton iteration.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::invalid("e", "must lie in [0, 1)"));
    }
    let m = wrap_angle(mean_anomaly);
    let mut ea = if e < 0.8 { m } else { PI };
    for _ in 0..100 {
        let f = ea - e * ea.sin() - m;
        let step = f / (1.0 - e * ea.cos());
        ea -= step;
        if step.abs() < 1e-15 {
            return Ok(ea);
        }
    }
    Err(Error::invalid("mean_anomaly", "Kepler iteration did not converge"))
}

impl OrbitalElements {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::invalid("a", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(Error::invalid("e", "must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn mean_motion(&self, mu: f64) -> f64 {
        (mu / (self.a * self.a * self.a)).sqrt()
    }

    pub fn period(&self, mu: f64) -> f64 {
        TWO_PI / self.mean_motion(mu)
    }

    /// Position and velocity in the reference plane of the elements.
    pub fn to_state(&self, mu: f64) -> Result<(Vec3, Vec3)> {
        self.validate()?;
        let e = self.e;
        let ea = solve_kepler(self.mean_anomaly, e)?;
        let (se, ce) = ea.sin_cos();
        let b = (1.0 - e * e).sqrt();
        let r = self.a * (1.0 - e * ce);
        let rdot_scale = (mu * self.a).sqrt() / r;
        let p = Vec3::new(self.a * (ce - e), self.a * b * se, 0.0);
        let v = Vec3::new(-rdot_scale * se, rdot_scale * b * ce, 0.0);
        let rot = perifocal_to_reference(self.raan, self.inc, self.argp);
        Ok((rot * p, rot * v))
    }

    /// Elements of a bound orbit from a state vector.
    pub fn from_state(r: &Vec3, v: &Vec3, mu: f64) -> Result<Self> {
        let rn = r.norm();
        let h = r.cross(v);
        let hn = h.norm();
        if !(rn > 0.0) || !(hn > 0.0) {
            return Err(Error::invalid("state", "needs nonzero position and angular momentum"));
        }
        let energy = 0.5 * v.norm_squared() - mu / rn;
        if !(energy < 0.0) {
            return Err(Error::invalid("state", "orbit is not bound"));
        }
        let a = -mu / (2.0 * energy);
        let ev = v.cross(&h) / mu - r / rn;
        let e = ev.norm();
        let inc = (h.z / hn).clamp(-1.0, 1.0).acos();
        let node = Vec3::z().cross(&h);
        let nn = node.norm();
        let raan = if nn > 1e-12 * hn { wrap_angle(node.y.atan2(node.x)) } else { 0.0 };
        // Perifocal basis; for circular orbits the periapsis is put on the node line.
        let p_hat = if e > 1e-12 {
            ev / e
        } else if nn > 1e-12 * hn {
            node / nn
        } else {
            Vec3::x()
        };
        let q_hat = h.cross(&p_hat) / hn;
        let nu = r.dot(&q_hat).atan2(r.dot(&p_hat));
        let ea = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt() * (nu / 2.0).tan()).atan();
        let mean_anomaly = wrap_angle(ea - e * ea.sin());
        // argument of periapsis measured from the ascending node inside the orbit plane
        let n_hat = if nn > 1e-12 * hn { node / nn } else { Vec3::x() };
        let m_hat = h.cross(&n_hat) / hn;
        let argp = wrap_angle(p_hat.dot(&m_hat).atan2(p_hat.dot(&n_hat)));
        Ok(OrbitalElements {
            a,
            e,
            inc,
            raan,
            argp,
            mean_anomaly,
        })
    }

    /// Elements after `dt` of unperturbed motion.
    pub fn advanced(&self, dt: f64, mu: f64) -> Self {
        OrbitalElements {
            mean_anomaly: wrap_angle(self.mean_anomaly + self.mean_motion(mu) * dt),
            ..*self
        }
    }
}

fn perifocal_to_reference(raan: f64, inc: f64, argp: f64) -> crate::Mat3 {
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    let (sw, cw) = argp.sin_cos();
    crate::Mat3::new(
        co * cw - so * sw * ci,
        -co * sw - so * cw * ci,
        so * si,
        so * cw + co * sw * ci,
        -so * sw + co * cw * ci,
        -co * si,
        sw * si,
        cw * si,
        ci,
    )
}

/// Two-body propagation of a bound state by `dt`.
pub fn propagate(r: &Vec3, v: &Vec3, dt: f64, mu: f64) -> Result<(Vec3, Vec3)> {
    OrbitalElements::from_state(r, v, mu)?.advanced(dt, mu).to_state(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MU_SUN;

    #[test]
    fn circular_quarter_period() {
        let a = 1.5e8;
        let vc = (MU_SUN / a).sqrt();
        let (r, v) = propagate(&Vec3::new(a, 0.0, 0.0), &Vec3::new(0.0, vc, 0.0), 0.25 * TWO_PI * (a * a * a / MU_SUN).sqrt(), MU_SUN).unwrap();
        assert!((r - Vec3::new(0.0, a, 0.0)).norm() < 1e-6 * a);
        assert!((v - Vec3::new(-vc, 0.0, 0.0)).norm() < 1e-9 * vc);
    }

    #[test]
    fn state_element_round_trip() {
        let el = OrbitalElements {
            a: 2.279e8,
            e: 0.0934,
            inc: 0.0323,
            raan: 0.865,
            argp: 5.0,
            mean_anomaly: 0.3,
        };
        let (r, v) = el.to_state(MU_SUN).unwrap();
        let back = OrbitalElements::from_state(&r, &v, MU_SUN).unwrap();
        let (r2, v2) = back.to_state(MU_SUN).unwrap();
        assert!((r - r2).norm() < 1e-6);
        assert!((v - v2).norm() < 1e-12);
        assert!((back.a / el.a - 1.0).abs() < 1e-12);
        assert!((back.e - el.e).abs() < 1e-12);
    }

    #[test]
    fn energy_and_momentum_conserved() {
        let el = OrbitalElements {
            a: 1.0,
            e: 0.6,
            inc: 0.4,
            raan: 1.0,
            argp: 2.0,
            mean_anomaly: 0.0,
        };
        let (r0, v0) = el.to_state(1.0).unwrap();
        let (r1, v1) = propagate(&r0, &v0, 1.234, 1.0).unwrap();
        let en = |r: &Vec3, v: &Vec3| 0.5 * v.norm_squared() - 1.0 / r.norm();
        assert!((en(&r0, &v0) - en(&r1, &v1)).abs() < 1e-12);
        assert!((r0.cross(&v0) - r1.cross(&v1)).norm() < 1e-12);
    }

    #[test]
    fn kepler_solver_rejects_hyperbolic() {
        assert!(solve_kepler(1.0, 1.2).is_err());
        let ea = solve_kepler(2.0, 0.95).unwrap();
        assert!((ea - 0.95 * ea.sin() - 2.0).abs() < 1e-14);
    }
}
