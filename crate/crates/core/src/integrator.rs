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

//! Explicit Runge–Kutta integrators over fixed-size state vectors.
//!
//! [`Method::Dp54`] is the Dormand–Prince 5(4) embedded pair with per-step
//! error control; [`Method::Rk4`] is classical fourth-order Runge–Kutta with a
//! fixed number of substeps per call. Both hit the requested end time exactly
//! and integrate in either time direction.

use nalgebra::SVector;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Classical RK4, `substeps` equal steps per integration call.
    Rk4,
    /// Adaptive Dormand–Prince 5(4).
    Dp54,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Steps per call in fixed-step mode.
    pub substeps: usize,
    /// Upper bound on accepted plus rejected steps per call.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Dp54,
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            substeps: 10,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(substeps: usize) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            substeps,
            ..Default::default()
        }
    }

    pub fn dp54(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig {
            method: Method::Dp54,
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("integrator tolerances", "must be positive"));
        }
        if self.substeps == 0 {
            return Err(Error::invalid("substeps", "must be at least 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Step-size carry-over between consecutive calls on the same trajectory.
///
/// Passing the hint returned by one call into the next avoids re-estimating
/// the initial step at every stage boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepHint(pub Option<f64>);

/// Integrates `ẏ = f(t, y)` from `t0` to `t1`.
pub fn integrate<const D: usize, F>(
    f: &F,
    t0: f64,
    y0: &SVector<f64, D>,
    t1: f64,
    cfg: &IntegratorConfig,
    hint: &mut StepHint,
) -> Result<SVector<f64, D>>
where
    F: Fn(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    if t1 == t0 {
        return Ok(*y0);
    }
    match cfg.method {
        Method::Rk4 => rk4(f, t0, y0, t1, cfg.substeps.max(1)),
        Method::Dp54 => dp54(f, t0, y0, t1, cfg, hint),
    }
}

fn rk4<const D: usize, F>(
    f: &F,
    t0: f64,
    y0: &SVector<f64, D>,
    t1: f64,
    n: usize,
) -> Result<SVector<f64, D>>
where
    F: Fn(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    let h = (t1 - t0) / n as f64;
    let mut y = *y0;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &(y + k1 * (0.5 * h)))?;
        let k3 = f(t + 0.5 * h, &(y + k2 * (0.5 * h)))?;
        let k4 = f(t + h, &(y + k3 * h))?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn error_norm<const D: usize>(
    err: &SVector<f64, D>,
    y: &SVector<f64, D>,
    y_new: &SVector<f64, D>,
    cfg: &IntegratorConfig,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..D {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        let q = err[i] / sc;
        acc += q * q;
    }
    (acc / D as f64).sqrt()
}

fn initial_step<const D: usize, F>(
    f: &F,
    t0: f64,
    y0: &SVector<f64, D>,
    f0: &SVector<f64, D>,
    dir: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<f64>
where
    F: Fn(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    let scaled_norm = |v: &SVector<f64, D>| {
        let mut acc = 0.0;
        for i in 0..D {
            let q = v[i] / (cfg.abs_tol + cfg.rel_tol * y0[i].abs());
            acc += q * q;
        }
        (acc / D as f64).sqrt()
    };
    let d0 = scaled_norm(y0);
    let d1 = scaled_norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span);
    let f1 = f(t0 + dir * h0, &(y0 + f0 * (dir * h0)))?;
    let d2 = scaled_norm(&(f1 - f0)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

fn dp54<const D: usize, F>(
    f: &F,
    t0: f64,
    y0: &SVector<f64, D>,
    t1: f64,
    cfg: &IntegratorConfig,
    hint: &mut StepHint,
) -> Result<SVector<f64, D>>
where
    F: Fn(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = *y0;
    let mut k1 = f(t, &y)?;
    let mut h = match hint.0 {
        Some(h) if h.is_finite() && h > 0.0 => h.min(span),
        _ => initial_step(f, t0, y0, &k1, dir, span, cfg)?,
    };
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::StepFailure { t });
        }
        let min_step = 16.0 * f64::EPSILON * t.abs().max(span);
        if h < min_step {
            return Err(Error::StepFailure { t });
        }
        // Land exactly on t1; stretch slightly rather than leave a sliver.
        let last = h >= remaining || h * 1.01 >= remaining;
        let step = if last { remaining } else { h };
        let hs = dir * step;

        let k2 = f(t + C2 * hs, &(y + k1 * (A21 * hs)))?;
        let k3 = f(t + C3 * hs, &(y + (k1 * A31 + k2 * A32) * hs))?;
        let k4 = f(t + C4 * hs, &(y + (k1 * A41 + k2 * A42 + k3 * A43) * hs))?;
        let k5 = f(
            t + C5 * hs,
            &(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * hs),
        )?;
        let k6 = f(
            t + hs,
            &(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * hs),
        )?;
        let y_new = y + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * hs;
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new)?;
        let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * hs;
        let err = error_norm(&err_vec, &y, &y_new, cfg);

        if err.is_finite() && err <= 1.0 {
            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if last_rejected {
                fac = fac.min(1.0);
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            last_rejected = false;
            if last {
                // A final step shortened to land on t1 says nothing about the
                // natural step size; carry the unshortened one forward.
                hint.0 = Some(if step < h { h } else { step * fac });
                break;
            }
            h = step * fac;
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            } else {
                FAC_MIN
            };
            h = step * fac;
            last_rejected = true;
        }
    }
    Ok(y)
}
