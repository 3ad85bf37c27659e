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

//! Three-dimensional convex hulls by quickhull.
//!
//! Visibility uses a distance tolerance proportional to the cloud's bounding
//! radius so that nearly coplanar points do not spawn sliver facets. Facets
//! are stored counter-clockwise seen from outside, so every plane normal
//! points away from the interior.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;


use crate::{Error, Result, Vec3};

/// Relative tolerance for visibility and degeneracy tests.
pub const HULL_REL_TOL: f64 = 1e-10;

/// Convex hull of a point cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct HullSummary {
    /// Indices of hull vertices in the input cloud, ascending.
    pub vertices: Vec<usize>,
    /// Outward-oriented triangles as indices into the input cloud.
    pub facets: Vec<[usize; 3]>,
    /// Unit outward normals, one per facet.
    pub normals: Vec<Vec3>,
    /// Plane offsets: a point `p` lies on facet `k`'s plane when `nₖ·p = dₖ`.
    pub offsets: Vec<f64>,
    pub volume: f64,
    /// Centroid of the enclosed solid.
    pub centroid: Vec3,
    /// Largest distance from the bounding-box center to any input point.
    pub scale: f64,
}

impl HullSummary {
    /// Signed distance of `q` to the hull (negative inside) as the maximum
    /// over facet planes, together with the facet attaining it.
    pub fn signed_distance(&self, q: &Vec3) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, (n, d)) in self.normals.iter().zip(&self.offsets).enumerate() {
            let s = n.dot(q) - d;
            if s > best.0 {
                best = (s, k);
            }
        }
        best
    }

    pub fn contains_point(&self, q: &Vec3) -> bool {
        self.signed_distance(q).0 <= 0.0
    }

    /// Maximum of `u·p` over the hull, for a direction `u`.
    pub fn support(&self, points: &[Vec3], u: &Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|&i| u.dot(&points[i]))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

struct Face {
    v: [usize; 3],
    n: Vec3,
    d: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Face {
        let [a, b, c] = v.map(|i| points[i]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let n = if len > 0.0 { n / len } else { n };
        Face {
            v,
            d: n.dot(&a),
            n,
            outside: Vec::new(),
            alive: true,
        }
    }

    fn dist(&self, p: &Vec3) -> f64 {
        self.n.dot(p) - self.d
    }
}

fn bounding_scale(points: &[Vec3]) -> f64 {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let mid = (lo + hi) * 0.5;
    points.iter().map(|p| (p - mid).norm()).fold(0.0, f64::max)
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<[usize; 4]> {
    // Farthest pair among the six axis extremes.
    let mut ext = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        for k in 0..3 {
            if p[k] < points[ext[2 * k]][k] {
                ext[2 * k] = i;
            }
            if p[k] > points[ext[2 * k + 1]][k] {
                ext[2 * k + 1] = i;
            }
        }
    }
    let mut best = (-1.0, 0, 0);
    for &i in &ext {
        for &j in &ext {
            let d = (points[i] - points[j]).norm();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (d01, i0, i1) = best;
    if !(d01 > eps) {
        return Err(Error::DegenerateCloud { rank: 0 });
    }
    let axis = (points[i1] - points[i0]) / d01;
    let (d2, i2) = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let w = p - points[i0];
            ((w - axis * axis.dot(&w)).norm(), i)
        })
        .fold((-1.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    if !(d2 > eps) {
        return Err(Error::DegenerateCloud { rank: 1 });
    }
    let n = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
    let (d3, i3) = points
        .iter()
        .enumerate()
        .map(|(i, p)| (n.dot(&(p - points[i0])).abs(), i))
        .fold((-1.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    if !(d3 > eps) {
        return Err(Error::DegenerateCloud { rank: 2 });
    }
    Ok([i0, i1, i2, i3])
}

/// Convex hull of at least four affinely independent points.
pub fn convex_hull(points: &[Vec3]) -> Result<HullSummary> {
    if points.len() < 4 {
        return Err(Error::DegenerateCloud { rank: points.len().saturating_sub(1).min(2) });
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::NonFiniteState);
    }
    let scale = bounding_scale(points);
    let eps = HULL_REL_TOL * scale;
    let simplex = initial_simplex(points, eps)?;
    let interior = simplex.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;

    let mut faces: Vec<Face> = Vec::new();
    for skip in 0..4 {
        let mut tri = [0usize; 3];
        let mut k = 0;
        for (m, &i) in simplex.iter().enumerate() {
            if m != skip {
                tri[k] = i;
                k += 1;
            }
        }
        let mut f = Face::new(points, tri);
        if f.dist(&interior) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }
    for (i, p) in points.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(f) = faces.iter_mut().find(|f| f.dist(p) > eps) {
            f.outside.push(i);
        }
    }

    let mut pending: Vec<usize> = (0..4).collect();
    while let Some(fi) = pending.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let face = &faces[fi];
        let eye = *face
            .outside
            .iter()
            .max_by(|&&a, &&b| face.dist(&points[a]).total_cmp(&face.dist(&points[b])))
            .expect("nonempty outside set");
        let ep = points[eye];

        let visible: Vec<usize> = (0..faces.len())
            .filter(|&k| faces[k].alive && faces[k].dist(&ep) > eps)
            .collect();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &k in &visible {
            let [a, b, c] = faces[k].v;
            edges.insert((a, b));
            edges.insert((b, c));
            edges.insert((c, a));
        }
        let mut orphans = Vec::new();
        for &k in &visible {
            faces[k].alive = false;
            orphans.append(&mut faces[k].outside);
        }
        let first_new = faces.len();
        for &(a, b) in edges.iter().filter(|(a, b)| !edges.contains(&(*b, *a))) {
            faces.push(Face::new(points, [a, b, eye]));
        }
        for i in orphans {
            if i == eye {
                continue;
            }
            let p = points[i];
            if let Some(f) = faces[first_new..].iter_mut().find(|f| f.dist(&p) > eps) {
                f.outside.push(i);
            }
        }
        pending.extend(first_new..faces.len());
    }

    let faces: Vec<Face> = faces.into_iter().filter(|f| f.alive).collect();
    let mut volume = 0.0;
    let mut moment = Vec3::zeros();
    for f in &faces {
        let [a, b, c] = f.v.map(|i| points[i] - interior);
        let v6 = a.dot(&b.cross(&c));
        volume += v6 / 6.0;
        moment += (a + b + c) * (v6 / 24.0);
    }
    let centroid = if volume > 0.0 { interior + moment / volume } else { interior };
    let vertices: BTreeSet<usize> = faces.iter().flat_map(|f| f.v).collect();
    Ok(HullSummary {
        vertices: vertices.into_iter().collect(),
        facets: faces.iter().map(|f| f.v).collect(),
        normals: faces.iter().map(|f| f.n).collect(),
        offsets: faces.iter().map(|f| f.d).collect(),
        volume,
        centroid,
        scale,
    })
}

/// Number of facets sharing each undirected edge; a closed triangulated
/// surface has every count equal to two.
pub fn edge_multiplicities(h: &HullSummary) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for f in &h.facets {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cube() -> Vec<Vec3> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        v.push(Vec3::new(0.5, 0.5, 0.5));
        v.push(Vec3::new(0.2, 0.9, 0.4));
        v
    }

    #[test]
    fn unit_cube() {
        let h = convex_hull(&cube()).unwrap();
        assert!((h.volume - 1.0).abs() < 1e-14);
        assert_eq!(h.vertices, (0..8).collect::<Vec<_>>());
        assert!((h.centroid - Vec3::new(0.5, 0.5, 0.5)).norm() < 1e-14);
        assert!(edge_multiplicities(&h).values().all(|&c| c == 2));
    }

    #[test]
    fn regular_tetrahedron() {
        let s = 1.0 / 2f64.sqrt();
        let pts = vec![
            Vec3::new(1.0, 0.0, -s) * 0.5,
            Vec3::new(-1.0, 0.0, -s) * 0.5,
            Vec3::new(0.0, 1.0, s) * 0.5,
            Vec3::new(0.0, -1.0, s) * 0.5,
        ];
        let h = convex_hull(&pts).unwrap();
        assert!((h.volume - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(h.facets.len(), 4);
    }

    #[test]
    fn degenerate_inputs() {
        let flat: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, (i * i) as f64, 0.0)).collect();
        assert_eq!(convex_hull(&flat), Err(Error::DegenerateCloud { rank: 2 }));
        let line: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert_eq!(convex_hull(&line), Err(Error::DegenerateCloud { rank: 1 }));
        assert!(convex_hull(&line[..3]).is_err());
    }

    #[test]
    fn containment_queries() {
        let h = convex_hull(&cube()).unwrap();
        assert!(h.contains_point(&h.centroid));
        assert!(!h.contains_point(&Vec3::new(10.0, 10.0, 10.0)));
        let (d, _) = h.signed_distance(&Vec3::new(0.5, 0.5, 1.25));
        assert!((d - 0.25).abs() < 1e-14);
        let (d, _) = h.signed_distance(&Vec3::new(0.5, 0.5, 0.4));
        assert!((d + 0.4).abs() < 1e-14);
    }
}
