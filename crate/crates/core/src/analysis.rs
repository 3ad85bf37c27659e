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

//! Post-processing of reachable sets: terminal clouds, hull containment,
//! extent metrics and proximity of terminal points to manifold trajectories.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{Quaternion, UnitQuaternion};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hull::{convex_hull, HullSummary};
use crate::reachability::ReachableSet;
use crate::{Error, Mat3, Result, Vec3};

/// Which half of the terminal state a cloud holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    Position,
    Velocity,
}

impl Space {
    pub fn label(self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Velocity => "velocity",
        }
    }

    pub fn parse(s: &str) -> Option<Space> {
        match s {
            "position" => Some(Space::Position),
            "velocity" => Some(Space::Velocity),
            _ => None,
        }
    }
}

/// Terminal positions or velocities of the surviving samples of a set.
#[derive(Clone, Debug, PartialEq)]
pub struct TerminalCloud {
    pub space: Space,
    pub points: Vec<Vec3>,
    /// Sample id of each point.
    pub ids: Vec<usize>,
    pub horizon: f64,
}

pub fn terminal_cloud(set: &ReachableSet, space: Space) -> Result<TerminalCloud> {
    if set.samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let points = set
        .samples
        .iter()
        .map(|s| match space {
            Space::Position => s.terminal.r,
            Space::Velocity => s.terminal.v,
        })
        .collect();
    Ok(TerminalCloud {
        space,
        points,
        ids: set.samples.iter().map(|s| s.id).collect(),
        horizon: set.reference.t_final() - set.reference.t0,
    })
}

impl TerminalCloud {
    pub fn hull(&self) -> Result<HullSummary> {
        convex_hull(&self.points)
    }
}

/// Verdict for one query point against a hull.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContainmentReport {
    pub query: Vec3,
    pub inside: bool,
    /// Negative inside.
    pub signed_distance: f64,
    /// `signed_distance` divided by the hull's bounding radius.
    pub relative_distance: f64,
    pub nearest_facet: usize,
}

pub fn contains(hull: &HullSummary, query: &Vec3) -> ContainmentReport {
    let (d, k) = hull.signed_distance(query);
    ContainmentReport {
        query: *query,
        inside: d <= 0.0,
        signed_distance: d,
        relative_distance: if hull.scale > 0.0 { d / hull.scale } else { d },
        nearest_facet: k,
    }
}

/// Size descriptors of a cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtentMetrics {
    /// Largest distance between any two points.
    pub max_extent: f64,
    /// `2√3·σ` along each principal axis, descending. For a uniform solid
    /// segment this recovers its full length.
    pub principal_lengths: [f64; 3],
    pub volume: f64,
    pub centroid: Vec3,
}

/// Sample mean and covariance (divisor `n`).
pub fn mean_covariance(points: &[Vec3]) -> (Vec3, Mat3) {
    let n = points.len() as f64;
    let mean = points.iter().sum::<Vec3>() / n;
    let mut cov = Mat3::zeros();
    for p in points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    (mean, cov / n)
}

pub fn set_extent_metrics(points: &[Vec3]) -> Result<ExtentMetrics> {
    let hull = convex_hull(points)?;
    let verts: Vec<Vec3> = hull.vertices.iter().map(|&i| points[i]).collect();
    let mut max_extent = 0.0f64;
    for (i, a) in verts.iter().enumerate() {
        for b in &verts[i + 1..] {
            max_extent = max_extent.max((a - b).norm());
        }
    }
    let (mean, cov) = mean_covariance(points);
    let mut ev: Vec<f64> = cov.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let len = |x: f64| 2.0 * (3.0 * x.max(0.0)).sqrt();
    Ok(ExtentMetrics {
        max_extent,
        principal_lengths: [len(ev[0]), len(ev[1]), len(ev[2])],
        volume: hull.volume,
        centroid: mean,
    })
}

/// Fraction of `terminals` within `threshold` of at least one of
/// `manifold_points`, using a uniform grid of cell size `threshold`.
pub fn manifold_proximity(terminals: &[Vec3], manifold_points: &[Vec3], threshold: f64) -> f64 {
    if terminals.is_empty() || manifold_points.is_empty() || !(threshold >= 0.0) {
        return 0.0;
    }
    if threshold.is_infinite() {
        return 1.0;
    }
    if threshold == 0.0 {
        let hits = terminals.iter().filter(|t| manifold_points.contains(t)).count();
        return hits as f64 / terminals.len() as f64;
    }
    let cell = |p: &Vec3| -> (i64, i64, i64) {
        let f = |c: f64| (c / threshold).floor() as i64;
        (f(p.x), f(p.y), f(p.z))
    };
    let mut grid: BTreeMap<(i64, i64, i64), Vec<Vec3>> = BTreeMap::new();
    for p in manifold_points {
        grid.entry(cell(p)).or_default().push(*p);
    }
    let t2 = threshold * threshold;
    let near = |q: &Vec3| {
        let (cx, cy, cz) = cell(q);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        if bucket.iter().any(|p| (p - q).norm_squared() <= t2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    };
    terminals.iter().filter(|q| near(q)).count() as f64 / terminals.len() as f64
}

/// Uniformly distributed rotation number `k` of the ChaCha stream keyed by
/// `seed`.
pub fn random_rotation(seed: u64, k: u64) -> Mat3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let mut q = [0.0f64; 4];
    for c in q.iter_mut() {
        *c = StandardNormal.sample(&mut rng);
    }
    UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]))
        .to_rotation_matrix()
        .into_inner()
}

/// Rigidly rotates `points` about `center`.
pub fn rotate_about(points: &[Vec3], center: &Vec3, rot: &Mat3) -> Vec<Vec3> {
    points.iter().map(|p| center + rot * (p - center)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn proximity_edge_cases() {
        let t = vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0)];
        assert_eq!(manifold_proximity(&t, &[], 1.0), 0.0);
        assert_eq!(manifold_proximity(&t, &[Vec3::new(100.0, 0.0, 0.0)], f64::INFINITY), 1.0);
        assert_eq!(manifold_proximity(&t, &[Vec3::new(0.0, 0.9, 0.0)], 1.0), 0.5);
        assert_eq!(manifold_proximity(&t, &[Vec3::new(-0.0, 1.1, 0.0)], 1.0), 0.0);
        // neighbour cell across a negative boundary
        assert_eq!(manifold_proximity(&[Vec3::new(0.05, 0.0, 0.0)], &[Vec3::new(-0.05, 0.0, 0.0)], 0.2), 1.0);
    }

    #[test]
    fn rotations_are_orthonormal() {
        for k in 0..5 {
            let r = random_rotation(3, k);
            assert!((r.transpose() * r - Mat3::identity()).norm() < 1e-14);
            assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
        assert_ne!(random_rotation(3, 0), random_rotation(3, 1));
    }

    #[test]
    fn segment_length_from_principal_axis() {
        let pts: Vec<Vec3> = (0..=1000)
            .flat_map(|i| {
                let x = i as f64 / 1000.0 * 4.0 - 2.0;
                [Vec3::new(x, 1e-3, 0.0), Vec3::new(x, 0.0, 1e-3), Vec3::new(x, -1e-3, -1e-3)]
            })
            .collect();
        let m = set_extent_metrics(&pts).unwrap();
        assert!((m.principal_lengths[0] - 4.0).abs() < 0.01);
        assert!((m.max_extent - 4.0).abs() < 1e-2);
    }
}
