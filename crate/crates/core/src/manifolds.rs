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

//! Periodic orbits in the three-body problem: monodromy matrices, spectrum
//! classification and the stable/unstable invariant manifolds seeded from
//! points around the orbit.

use alloc::vec::Vec;

use nalgebra::Complex;

use crate::dynamics::{Cr3bpModel, Frame, Model, StateVec};
use crate::integrator::IntegratorConfig;
use crate::propagation::{flow, sample_ballistic, state_transition};
use crate::{Error, Mat6, Result, Vec3, Vec6};

/// Modulus margin above one for an eigenvalue to count as hyperbolic.
pub const HYPERBOLIC_MARGIN: f64 = 1e-4;
/// Default seed offset along the eigenvectors (nondimensional).
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Default number of seed points spread in time around the orbit.
pub const DEFAULT_FIXED_POINTS: usize = 50;

/// Initial state and period of a periodic orbit, in normalized units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicOrbitSpec {
    pub x0: StateVec,
    pub period: f64,
    pub n_fixed_points: usize,
}

impl PeriodicOrbitSpec {
    pub fn new(x0: StateVec, period: f64, n_fixed_points: usize) -> Result<Self> {
        if x0.frame != Frame::SynodicRotating {
            return Err(Error::FrameMismatch {
                expected: Frame::SynodicRotating,
                found: x0.frame,
            });
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid("period", "must be positive"));
        }
        if n_fixed_points == 0 {
            return Err(Error::invalid("n_fixed_points", "must be at least 1"));
        }
        Ok(PeriodicOrbitSpec {
            x0,
            period,
            n_fixed_points,
        })
    }
}

/// A point on the orbit with its time offset from `x0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub t: f64,
    pub state: StateVec,
}

/// Monodromy matrix with its hyperbolic eigen-pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyDecomposition {
    pub m: Mat6,
    /// All six eigenvalues as `(re, im)`, by descending modulus.
    pub eigenvalues: [(f64, f64); 6],
    pub lambda_unstable: f64,
    pub lambda_stable: f64,
    pub xi_unstable: Vec6,
    pub xi_stable: Vec6,
}

impl MonodromyDecomposition {
    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    /// Largest `min_k |λᵢ λₖ − 1|` over the spectrum; zero for an exactly
    /// reciprocal-paired spectrum.
    pub fn reciprocal_pairing_error(&self) -> f64 {
        let z: Vec<Complex<f64>> = self.eigenvalues.iter().map(|&(re, im)| Complex::new(re, im)).collect();
        let mut worst = 0.0f64;
        for (i, a) in z.iter().enumerate() {
            let best = z
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, b)| cabs(a * b - 1.0))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        worst
    }

    pub fn eigenvector(&self, kind: ManifoldKind) -> Vec6 {
        match kind {
            ManifoldKind::Stable => self.xi_stable,
            ManifoldKind::Unstable => self.xi_unstable,
        }
    }
}

fn cabs(c: Complex<f64>) -> f64 {
    c.re.hypot(c.im)
}

fn cr3bp(model: &Cr3bpModel) -> Model {
    Model::Cr3bp(*model)
}

/// `n_fixed_points` states spread evenly in time over one period.
pub fn fixed_points(model: &Cr3bpModel, orbit: &PeriodicOrbitSpec, cfg: &IntegratorConfig) -> Result<Vec<FixedPoint>> {
    let mut pts = sample_ballistic(
        &cr3bp(model),
        &orbit.x0,
        0.0,
        orbit.period,
        orbit.n_fixed_points,
        cfg,
    )?;
    pts.truncate(orbit.n_fixed_points);
    Ok(pts.into_iter().map(|(t, state)| FixedPoint { t, state }).collect())
}

/// `Φ(t₀ + T, t₀)` along the ballistic flow through `fixed_point`.
pub fn monodromy(
    model: &Cr3bpModel,
    orbit: &PeriodicOrbitSpec,
    fixed_point: &StateVec,
    cfg: &IntegratorConfig,
) -> Result<Mat6> {
    Ok(state_transition(&cr3bp(model), fixed_point, 0.0, orbit.period, cfg)?.1)
}

/// Unit null vector of `a` (right singular vector of the smallest singular
/// value), with its largest-magnitude component made positive.
fn null_vector(a: &Mat6) -> Vec6 {
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let k = svd.singular_values.imin();
    let mut v: Vec6 = v_t.row(k).transpose();
    v /= v.norm();
    let big = v.iamax();
    if v[big] < 0.0 {
        v = -v;
    }
    v
}

/// Splits the spectrum of a monodromy matrix and extracts the real
/// eigenvectors of its dominant hyperbolic pair.
pub fn classify_spectrum(m: &Mat6) -> Result<MonodromyDecomposition> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFiniteState);
    }
    let mut z: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    z.sort_by(|a, b| cabs(*b).total_cmp(&cabs(*a)).then(b.im.total_cmp(&a.im)));
    let real_tol = |c: &Complex<f64>| c.im.abs() <= 1e-8 * cabs(*c).max(1.0);
    let lambda_u = z
        .iter()
        .filter(|c| real_tol(c) && c.re.abs() > 1.0 + HYPERBOLIC_MARGIN)
        .map(|c| c.re)
        .next()
        .ok_or(Error::ClassificationFailed)?;
    let lambda_s = z
        .iter()
        .filter(|c| real_tol(c))
        .map(|c| c.re)
        .min_by(|a, b| (a * lambda_u - 1.0).abs().total_cmp(&(b * lambda_u - 1.0).abs()))
        .ok_or(Error::ClassificationFailed)?;
    let xi_unstable = null_vector(&(m - Mat6::identity() * lambda_u));
    // the stable direction is better conditioned as the dominant direction of M⁻¹
    let m_inv = m.try_inverse().ok_or(Error::ClassificationFailed)?;
    let xi_stable = null_vector(&(m_inv - Mat6::identity() * lambda_u));
    let mut eigenvalues = [(0.0, 0.0); 6];
    for (slot, c) in eigenvalues.iter_mut().zip(&z) {
        *slot = (c.re, c.im);
    }
    Ok(MonodromyDecomposition {
        m: *m,
        eigenvalues,
        lambda_unstable: lambda_u,
        lambda_stable: lambda_s,
        xi_unstable,
        xi_stable,
    })
}

/// Fixed points together with the decomposition of the monodromy matrix
/// based at each.
pub fn decompose_orbit(
    model: &Cr3bpModel,
    orbit: &PeriodicOrbitSpec,
    cfg: &IntegratorConfig,
) -> Result<Vec<(FixedPoint, MonodromyDecomposition)>> {
    fixed_points(model, orbit, cfg)?
        .into_iter()
        .map(|fp| Ok((fp, classify_spectrum(&monodromy(model, orbit, &fp.state, cfg)?)?)))
        .collect()
}

/// Manifold family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ManifoldKind {
    Stable,
    Unstable,
}

impl ManifoldKind {
    /// Stable manifolds are traced backward in time, unstable ones forward.
    pub fn time_direction(self) -> f64 {
        match self {
            ManifoldKind::Stable => -1.0,
            ManifoldKind::Unstable => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ManifoldKind::Stable => "stable",
            ManifoldKind::Unstable => "unstable",
        }
    }
}

/// `fixed_point + s·ε·ξ`.
pub fn manifold_seed(
    decomp: &MonodromyDecomposition,
    kind: ManifoldKind,
    fixed_point: &StateVec,
    epsilon: f64,
    s: f64,
) -> Result<StateVec> {
    if epsilon == 0.0 {
        return Ok(*fixed_point);
    }
    let x = fixed_point.to_vector() + decomp.eigenvector(kind) * (s * epsilon);
    StateVec::from_vector(&x, fixed_point.frame)
}

/// One sampled ballistic history, `(t, state)` pairs.
pub type History = Vec<(f64, StateVec)>;

/// All trajectories of one manifold family and side.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldBranch {
    pub kind: ManifoldKind,
    /// `+1` or `−1`.
    pub s: f64,
    pub epsilon: f64,
    pub trajectories: Vec<History>,
}

impl ManifoldBranch {
    pub fn label(&self) -> &'static str {
        match (self.kind, self.s > 0.0) {
            (ManifoldKind::Stable, true) => "stable+",
            (ManifoldKind::Stable, false) => "stable-",
            (ManifoldKind::Unstable, true) => "unstable+",
            (ManifoldKind::Unstable, false) => "unstable-",
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &StateVec> + '_ {
        self.trajectories.iter().flat_map(|h| h.iter().map(|(_, x)| x))
    }
}

/// Ballistic history of one manifold seed over `horizon` (always positive;
/// the family decides the time direction), sampled at `segments + 1` points.
#[allow(clippy::too_many_arguments)]
pub fn manifold_trajectory(
    model: &Cr3bpModel,
    point: &(FixedPoint, MonodromyDecomposition),
    kind: ManifoldKind,
    s: f64,
    epsilon: f64,
    horizon: f64,
    segments: usize,
    cfg: &IntegratorConfig,
) -> Result<History> {
    let (fp, decomp) = point;
    let seed = manifold_seed(decomp, kind, &fp.state, epsilon, s)?;
    sample_ballistic(&cr3bp(model), &seed, 0.0, kind.time_direction() * horizon, segments, cfg)
}

/// One branch seeded from every decomposed fixed point.
#[allow(clippy::too_many_arguments)]
pub fn propagate_manifold(
    model: &Cr3bpModel,
    points: &[(FixedPoint, MonodromyDecomposition)],
    kind: ManifoldKind,
    s: f64,
    epsilon: f64,
    horizon: f64,
    segments: usize,
    cfg: &IntegratorConfig,
) -> Result<ManifoldBranch> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid("epsilon", "must be nonnegative"));
    }
    if !(horizon >= 0.0) {
        return Err(Error::invalid("horizon", "must be nonnegative"));
    }
    let trajectories = points
        .iter()
        .map(|p| manifold_trajectory(model, p, kind, s, epsilon, horizon, segments, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ManifoldBranch {
        kind,
        s,
        epsilon,
        trajectories,
    })
}

/// The four branch identities in output order.
pub const BRANCHES: [(ManifoldKind, f64); 4] = [
    (ManifoldKind::Stable, 1.0),
    (ManifoldKind::Stable, -1.0),
    (ManifoldKind::Unstable, 1.0),
    (ManifoldKind::Unstable, -1.0),
];

/// `‖flow(x₀, T) − x₀‖` in normalized units.
pub fn orbit_closure_check(model: &Cr3bpModel, orbit: &PeriodicOrbitSpec, cfg: &IntegratorConfig) -> Result<f64> {
    let x1 = flow(&cr3bp(model), &orbit.x0, 0.0, orbit.period, cfg)?;
    Ok((x1.to_vector() - orbit.x0.to_vector()).norm())
}

/// Which collinear libration point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Collinear {
    L1,
    L2,
    L3,
}

/// x-coordinate of a collinear libration point, by Newton iteration on the
/// x-axis force balance.
pub fn collinear_point(mu: f64, which: Collinear) -> Result<f64> {
    if !(mu > 0.0 && mu < 0.5) {
        return Err(Error::invalid("mu", "must lie in (0, 0.5)"));
    }
    let gamma = (mu / 3.0).cbrt();
    let mut x = match which {
        Collinear::L1 => 1.0 - mu - gamma,
        Collinear::L2 => 1.0 - mu + gamma,
        Collinear::L3 => -1.0 - mu + 7.0 * mu / 12.0,
    };
    let f = |x: f64| {
        let d1 = x + mu;
        let d2 = x - 1.0 + mu;
        x - (1.0 - mu) * d1 / d1.abs().powi(3) - mu * d2 / d2.abs().powi(3)
    };
    let df = |x: f64| 1.0 + 2.0 * (1.0 - mu) / (x + mu).abs().powi(3) + 2.0 * mu / (x - 1.0 + mu).abs().powi(3);
    for _ in 0..100 {
        let step = f(x) / df(x);
        x -= step;
        if step.abs() < 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// Result of a symmetric periodic-orbit correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedOrbit {
    pub x0: StateVec,
    pub period: f64,
    pub iterations: usize,
    /// Half-period residual `‖[y, vx, vz]‖` after the last iteration.
    pub residual: f64,
}

/// Newton correction of an xz-plane-symmetric orbit (`y = vx = vz = 0` at
/// `t = 0`) so that the same holds at half period.
///
/// Planar guesses adjust `vy` and the half period; spatial guesses also
/// adjust `x`, holding `z` fixed.
pub fn correct_symmetric_orbit(
    model: &Cr3bpModel,
    guess: &StateVec,
    period_guess: f64,
    tol: f64,
    cfg: &IntegratorConfig,
) -> Result<CorrectedOrbit> {
    let sys = cr3bp(model);
    let mut x0 = guess.to_vector();
    x0[1] = 0.0;
    x0[3] = 0.0;
    x0[5] = 0.0;
    let planar = x0[2] == 0.0;
    let mut half = 0.5 * period_guess;
    for it in 0..50 {
        let s0 = StateVec::from_vector(&x0, Frame::SynodicRotating)?;
        let (xh, phi) = state_transition(&sys, &s0, 0.0, half, cfg)?;
        let xh_v = xh.to_vector();
        let rate = sys.rates(&xh, &Vec3::zeros(), 0.0, 1.0)?;
        let residual = if planar {
            Vec3::new(xh_v[1], xh_v[3], 0.0).norm()
        } else {
            Vec3::new(xh_v[1], xh_v[3], xh_v[5]).norm()
        };
        if residual < tol {
            return Ok(CorrectedOrbit {
                x0: s0,
                period: 2.0 * half,
                iterations: it,
                residual,
            });
        }
        if planar {
            let j = nalgebra::Matrix2::new(phi[(1, 4)], rate[1], phi[(3, 4)], rate[3]);
            let d = j
                .try_inverse()
                .ok_or(Error::invalid("guess", "singular correction Jacobian"))?
                * nalgebra::Vector2::new(xh_v[1], xh_v[3]);
            x0[4] -= d[0];
            half -= d[1];
        } else {
            let j = crate::Mat3::new(
                phi[(1, 0)],
                phi[(1, 4)],
                rate[1],
                phi[(3, 0)],
                phi[(3, 4)],
                rate[3],
                phi[(5, 0)],
                phi[(5, 4)],
                rate[5],
            );
            let d = j
                .try_inverse()
                .ok_or(Error::invalid("guess", "singular correction Jacobian"))?
                * Vec3::new(xh_v[1], xh_v[3], xh_v[5]);
            x0[0] -= d[0];
            x0[4] -= d[1];
            half -= d[2];
        }
        if !(half > 0.0) {
            return Err(Error::invalid("period_guess", "correction drove the period negative"));
        }
    }
    Err(Error::invalid("guess", "differential correction did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_not_hyperbolic() {
        assert_eq!(classify_spectrum(&Mat6::identity()), Err(Error::ClassificationFailed));
    }

    #[test]
    fn synthetic_block_spectrum() {
        let (s, c) = 0.7f64.sin_cos();
        let mut m = Mat6::zeros();
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 0.5;
        m[(2, 2)] = c;
        m[(2, 3)] = -s;
        m[(3, 2)] = s;
        m[(3, 3)] = c;
        m[(4, 4)] = 1.0;
        m[(5, 5)] = 1.0;
        let d = classify_spectrum(&m).unwrap();
        assert!((d.lambda_unstable - 2.0).abs() < 1e-12);
        assert!((d.lambda_stable - 0.5).abs() < 1e-12);
        assert!((d.xi_unstable - Vec6::x()).norm() < 1e-10);
        assert!((d.xi_stable - Vec6::y()).norm() < 1e-10);
        assert!(d.reciprocal_pairing_error() < 1e-12);
    }

    #[test]
    fn eigenvectors_under_similarity() {
        let mut d = Mat6::identity();
        d[(0, 0)] = 50.0;
        d[(1, 1)] = 0.02;
        let mut p = Mat6::identity();
        for i in 0..6 {
            for k in 0..6 {
                p[(i, k)] += 0.1 * ((i * 7 + k * 3) % 5) as f64 - 0.2;
            }
        }
        let m = p * d * p.try_inverse().unwrap();
        let dec = classify_spectrum(&m).unwrap();
        assert!((m * dec.xi_unstable - dec.xi_unstable * 50.0).norm() < 1e-9);
        assert!((m * dec.xi_stable - dec.xi_stable * 0.02).norm() < 1e-9);
    }

    #[test]
    fn collinear_points_balance() {
        let mu = Cr3bpModel::EARTH_MOON_MU;
        let l1 = collinear_point(mu, Collinear::L1).unwrap();
        let l2 = collinear_point(mu, Collinear::L2).unwrap();
        assert!((l1 - 0.836915125819).abs() < 1e-9);
        assert!((l2 - 1.155682165408).abs() < 1e-9);
        assert!(collinear_point(mu, Collinear::L3).unwrap() < -0.99);
    }

    #[test]
    fn seeds_are_symmetric() {
        let mut m = Mat6::identity();
        m[(0, 0)] = 4.0;
        m[(1, 1)] = 0.25;
        let d = classify_spectrum(&m).unwrap();
        let fp = StateVec::new(Vec3::new(1.1, 0.0, 0.0), Vec3::zeros(), Frame::SynodicRotating).unwrap();
        assert_eq!(manifold_seed(&d, ManifoldKind::Unstable, &fp, 0.0, 1.0).unwrap(), fp);
        let a = manifold_seed(&d, ManifoldKind::Unstable, &fp, 1e-3, 1.0).unwrap();
        let b = manifold_seed(&d, ManifoldKind::Unstable, &fp, 1e-3, -1.0).unwrap();
        assert!(((a.r + b.r) * 0.5 - fp.r).norm() < 1e-15);
    }
}
