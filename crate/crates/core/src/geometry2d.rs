//! Model strong solutions of planar multiphase mean curvature flow on the
//! periodic box: a static flat slab, a shrinking circle, and a stationary
//! triple-junction network. All evaluators are analytic; nothing is
//! discretized on the geometry side.
//!
//! Periodicity dictates two departures from the idealized half-space
//! pictures. The flat scenario carries a pair of parallel interfaces (a
//! slab). For triple junctions, Euler's formula on the torus forces a
//! trivalent network with F = V/2 faces, so three phases need at least six
//! junctions; the minimal configuration compatible with a rectangular
//! period cell is the 3-colored regular honeycomb (twelve 120-degree
//! junctions on a cell of aspect sqrt(3)), which is stationary under
//! multiphase mean curvature flow because every edge is straight and every
//! junction balanced.

use crate::error::{Error, Result};
use crate::util::{periodic_diff, V2};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    Flat,
    Circle { r0: f64 },
    TripleY,
}

/// One straight interface segment, running junction to junction.
#[derive(Debug, Clone)]
pub struct EdgeSeg {
    pub start: V2,
    pub dir: V2,
    pub len: f64,
    /// Phases separated: (i, j) with i < j.
    pub pair: (usize, usize),
    /// Unit normal pointing from phase i into phase j.
    pub normal: V2,
    /// Indices of the junctions at the two ends (start, end).
    pub junctions: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct StrongSolution {
    pub kind: ScenarioKind,
    pub n_phases: usize,
    pub lx: f64,
    pub ly: f64,
    pub t_end: f64,
    /// Hexagon edge length of the honeycomb network (TripleY only).
    pub cell_a: f64,
    edges: Vec<EdgeSeg>,
    pub junctions: Vec<V2>,
    center: V2,
}

pub fn make_scenario(kind: ScenarioKind, l: f64, t_end: f64) -> Result<StrongSolution> {
    if l <= 0.0 || t_end < 0.0 {
        return Err(Error::config("box size and horizon must be positive"));
    }
    match kind {
        ScenarioKind::Flat => {
            let center = V2::new(0.5 * l, 0.5 * l);
            // slab of phase 1 between y = L/4 and y = 3L/4; phase 0 outside,
            // phase 2 empty (two-phase problem embedded into N = 3)
            let lower = EdgeSeg {
                start: V2::new(0.0, 0.25 * l),
                dir: V2::new(1.0, 0.0),
                len: l,
                pair: (0, 1),
                normal: V2::new(0.0, 1.0),
                junctions: (usize::MAX, usize::MAX),
            };
            let upper = EdgeSeg {
                start: V2::new(0.0, 0.75 * l),
                dir: V2::new(1.0, 0.0),
                len: l,
                pair: (0, 1),
                normal: V2::new(0.0, -1.0),
                junctions: (usize::MAX, usize::MAX),
            };
            Ok(StrongSolution {
                kind,
                n_phases: 3,
                lx: l,
                ly: l,
                t_end,
                cell_a: 0.0,
                edges: vec![lower, upper],
                junctions: vec![],
                center,
            })
        }
        ScenarioKind::Circle { r0 } => {
            if t_end >= 0.5 * r0 * r0 {
                return Err(Error::config(format!(
                    "circle extinction at t = {}; requested horizon {t_end}",
                    0.5 * r0 * r0
                )));
            }
            if r0 >= 0.5 * l {
                return Err(Error::config("circle does not fit in the box"));
            }
            Ok(StrongSolution {
                kind,
                n_phases: 3,
                lx: l,
                ly: l,
                t_end,
                cell_a: 0.0,
                edges: vec![],
                junctions: vec![],
                center: V2::new(0.5 * l, 0.5 * l),
            })
        }
        ScenarioKind::TripleY => build_honeycomb(l, t_end),
    }
}

/// Construct the 3-colored honeycomb on the rectangle (L, L / sqrt 3).
/// Hexagon edge a = L / (3 sqrt 3); pointy-top hexagons, centers on the
/// triangular lattice, colors (i - j) mod 3.
fn build_honeycomb(l: f64, t_end: f64) -> Result<StrongSolution> {
    let lx = l;
    let ly = l / SQRT3;
    let a = l / (3.0 * SQRT3);
    let mut junctions: Vec<V2> = Vec::new();
    let mut edges: Vec<EdgeSeg> = Vec::new();

    let wrap2 = |p: V2| V2::new(crate::util::wrap(p.x, lx), crate::util::wrap(p.y, ly));
    let color = |i: i64, j: i64| -> usize { (((i - j) % 3 + 3) % 3) as usize };
    let center_of = |i: i64, j: i64| -> V2 {
        V2::new(
            SQRT3 * a * (i as f64 + 0.5 * j as f64),
            1.5 * a * j as f64,
        )
    };

    let push_junction = |junctions: &mut Vec<V2>, p: V2| -> usize {
        let p = wrap2(p);
        for (k, q) in junctions.iter().enumerate() {
            let d = V2::new(periodic_diff(p.x, q.x, lx), periodic_diff(p.y, q.y, ly));
            if d.norm() < 1e-9 * a {
                return k;
            }
        }
        junctions.push(p);
        junctions.len() - 1
    };

    // enumerate hexagons covering the cell with margin, collect unique edges
    let mut seen: Vec<(V2, V2)> = Vec::new();
    for j in -2..4i64 {
        for i in -2..5i64 {
            let c = center_of(i, j);
            let col = color(i, j);
            // neighbor across each of the six edges; vertex angles 30 + 60k
            let neighbors = [
                (i + 1, j),     // edge between vertices 30 and -30 (east)
                (i, j + 1),     // north-east
                (i - 1, j + 1), // north-west
                (i - 1, j),     // west
                (i, j - 1),     // south-west
                (i + 1, j - 1), // south-east
            ];
            // vertex angles bounding each neighbor edge, in degrees
            let vert_pairs: [(f64, f64); 6] = [
                (-30.0, 30.0),
                (30.0, 90.0),
                (90.0, 150.0),
                (150.0, 210.0),
                (210.0, 270.0),
                (270.0, 330.0),
            ];
            for (nb, vp) in neighbors.iter().zip(vert_pairs.iter()) {
                let ncol = color(nb.0, nb.1);
                if ncol == col {
                    return Err(Error::numeric("honeycomb coloring failed"));
                }
                let v0 = c.add(V2::from_angle(vp.0.to_radians()).scale(a));
                let v1 = c.add(V2::from_angle(vp.1.to_radians()).scale(a));
                // only record each geometric edge once (from the lower color)
                if col > ncol {
                    continue;
                }
                let mid = wrap2(v0.add(v1).scale(0.5));
                // inside the fundamental cell?
                if !(mid.x >= -1e-12 && mid.x < lx - 1e-12 && mid.y >= -1e-12 && mid.y < ly - 1e-12)
                {
                    continue;
                }
                let dup = seen.iter().any(|&(m, _)| {
                    let d = V2::new(
                        periodic_diff(mid.x, m.x, lx),
                        periodic_diff(mid.y, m.y, ly),
                    );
                    d.norm() < 1e-9 * a
                });
                if dup {
                    continue;
                }
                seen.push((mid, v0));
                let dir = v1.sub(v0).normalized();
                // normal from col side into ncol side: the neighbor center
                // direction from the edge midpoint
                let nvec = center_of(nb.0, nb.1).sub(c).normalized();
                let j0 = push_junction(&mut junctions, v0);
                let j1 = push_junction(&mut junctions, v1);
                edges.push(EdgeSeg {
                    start: wrap2(v0),
                    dir,
                    len: a,
                    pair: (col, ncol),
                    normal: nvec,
                    junctions: (j0, j1),
                });
            }
        }
    }

    if edges.len() != 18 || junctions.len() != 12 {
        return Err(Error::numeric(format!(
            "honeycomb enumeration produced {} edges, {} junctions (expected 18, 12)",
            edges.len(),
            junctions.len()
        )));
    }

    Ok(StrongSolution {
        kind: ScenarioKind::TripleY,
        n_phases: 3,
        lx,
        ly,
        t_end,
        cell_a: a,
        edges,
        junctions,
        center: V2::new(0.5 * lx, 0.5 * ly),
    })
}

impl StrongSolution {
    pub fn edges(&self) -> &[EdgeSeg] {
        &self.edges
    }

    /// Circle radius R(t) = sqrt(R0^2 - 2t).
    pub fn circle_radius(&self, t: f64) -> f64 {
        match self.kind {
            ScenarioKind::Circle { r0 } => (r0 * r0 - 2.0 * t).max(0.0).sqrt(),
            _ => 0.0,
        }
    }

    pub fn center(&self) -> V2 {
        self.center
    }

    /// Periodic displacement from a to x.
    pub fn pdiff(&self, x: V2, a: V2) -> V2 {
        V2::new(
            periodic_diff(x.x, a.x, self.lx),
            periodic_diff(x.y, a.y, self.ly),
        )
    }

    /// Distance from x to an edge segment (over periodic images), foot
    /// parameter along the edge, and side sign (+1 on the normal side).
    pub fn edge_dist(&self, x: V2, e: &EdgeSeg) -> (f64, f64, f64) {
        // reduce x - start periodically, then project onto the segment;
        // edges are shorter than half the box, so one reduction plus the
        // eight neighbors of the *start* covers all relevant images
        let base = self.pdiff(x, e.start);
        let eval = |img: V2| -> (f64, f64, f64) {
            let t = img.dot(e.dir).clamp(0.0, e.len);
            let dv = img.sub(e.dir.scale(t));
            let side = dv.dot(e.normal);
            (dv.norm(), t, if side >= 0.0 { 1.0 } else { -1.0 })
        };
        let mut best = eval(base);
        for ix in -1..=1i32 {
            for iy in -1..=1i32 {
                if ix == 0 && iy == 0 {
                    continue;
                }
                let img = V2::new(base.x + ix as f64 * self.lx, base.y + iy as f64 * self.ly);
                // cheap reject: the segment fits in a box [0, len] x {0}
                // rotated by dir; bound the distance from below first
                let along = img.dot(e.dir);
                let lower = if along < 0.0 {
                    -along
                } else if along > e.len {
                    along - e.len
                } else {
                    0.0
                };
                if lower >= best.0 {
                    continue;
                }
                let cand = eval(img);
                if cand.0 < best.0 {
                    best = cand;
                }
            }
        }
        best
    }

    /// Phase indicator chi_i at (x, t).
    pub fn chi(&self, x: V2, t: f64, i: usize) -> f64 {
        if self.phase_of(x, t) == i {
            1.0
        } else {
            0.0
        }
    }

    pub fn phase_of(&self, x: V2, t: f64) -> usize {
        match self.kind {
            ScenarioKind::Flat => {
                let dy = periodic_diff(x.y, 0.5 * self.ly, self.ly).abs();
                if dy < 0.25 * self.ly {
                    1
                } else {
                    0
                }
            }
            ScenarioKind::Circle { .. } => {
                let r = self.pdiff(x, self.center).norm();
                if r < self.circle_radius(t) {
                    0
                } else {
                    1
                }
            }
            ScenarioKind::TripleY => {
                let mut best = (f64::INFINITY, 0usize);
                for e in &self.edges {
                    let (d, _, side) = self.edge_dist(x, e);
                    if d < best.0 {
                        let ph = if side >= 0.0 { e.pair.1 } else { e.pair.0 };
                        best = (d, ph);
                    }
                }
                best.1
            }
        }
    }

    /// Signed distance to I_{i,j}, positive on the j side; +inf when the
    /// pair carries no interface in this scenario.
    pub fn sdist(&self, x: V2, t: f64, i: usize, j: usize) -> f64 {
        if i == j {
            return f64::INFINITY;
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let v = match self.kind {
            ScenarioKind::Flat => {
                if (a, b) != (0, 1) {
                    return f64::INFINITY;
                }
                let dy = periodic_diff(x.y, 0.5 * self.ly, self.ly).abs();
                0.25 * self.ly - dy
            }
            ScenarioKind::Circle { .. } => {
                if (a, b) != (0, 1) {
                    return f64::INFINITY;
                }
                self.pdiff(x, self.center).norm() - self.circle_radius(t)
            }
            ScenarioKind::TripleY => {
                let mut best = f64::INFINITY;
                let mut sd = f64::INFINITY;
                for e in &self.edges {
                    if e.pair == (a, b) {
                        let (d, _, side) = self.edge_dist(x, e);
                        if d < best {
                            best = d;
                            sd = side * d;
                        }
                    }
                }
                sd
            }
        };
        sign * v
    }

    /// Unit normal field of I_{i,j} (from phase i into phase j at the
    /// nearest interface point of the pair).
    pub fn normal(&self, x: V2, _t: f64, i: usize, j: usize) -> V2 {
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let n = match self.kind {
            ScenarioKind::Flat => {
                let dy = periodic_diff(x.y, 0.5 * self.ly, self.ly);
                if dy < 0.0 {
                    V2::new(0.0, 1.0)
                } else {
                    V2::new(0.0, -1.0)
                }
            }
            ScenarioKind::Circle { .. } => self.pdiff(x, self.center).normalized(),
            ScenarioKind::TripleY => {
                let mut best = f64::INFINITY;
                let mut nrm = V2::ZERO;
                for e in &self.edges {
                    if e.pair == (a, b) {
                        let (d, _, _) = self.edge_dist(x, e);
                        if d < best {
                            best = d;
                            nrm = e.normal;
                        }
                    }
                }
                nrm
            }
        };
        n.scale(sign)
    }

    /// Mean curvature vector at the interface point nearest to x.
    pub fn curvature(&self, x: V2, t: f64, _i: usize, _j: usize) -> V2 {
        match self.kind {
            ScenarioKind::Circle { .. } => {
                let r = self.circle_radius(t);
                let n = self.normal(x, t, 0, 1);
                n.scale(-1.0 / r)
            }
            _ => V2::ZERO,
        }
    }

    /// Scalar normal speed V_{i,j}.
    pub fn normal_speed(&self, _x: V2, t: f64, _i: usize, _j: usize) -> f64 {
        match self.kind {
            ScenarioKind::Circle { .. } => -1.0 / self.circle_radius(t),
            _ => 0.0,
        }
    }

    /// Distance to the whole interface network at time t.
    pub fn dist_to_network(&self, x: V2, t: f64) -> f64 {
        match self.kind {
            ScenarioKind::Flat | ScenarioKind::TripleY => {
                let mut best = f64::INFINITY;
                for e in &self.edges {
                    best = best.min(self.edge_dist(x, e).0);
                }
                best
            }
            ScenarioKind::Circle { .. } => {
                (self.pdiff(x, self.center).norm() - self.circle_radius(t)).abs()
            }
        }
    }

    /// Distance to the boundary of the support of phase i.
    pub fn dist_to_phase_boundary(&self, x: V2, t: f64, i: usize) -> f64 {
        match self.kind {
            ScenarioKind::Flat | ScenarioKind::Circle { .. } => {
                if i <= 1 {
                    self.sdist(x, t, 0, 1).abs()
                } else {
                    f64::INFINITY
                }
            }
            ScenarioKind::TripleY => {
                let mut best = f64::INFINITY;
                for e in &self.edges {
                    if e.pair.0 == i || e.pair.1 == i {
                        best = best.min(self.edge_dist(x, e).0);
                    }
                }
                best
            }
        }
    }

    /// Pairs that actually carry an interface.
    pub fn active_pairs(&self) -> Vec<(usize, usize)> {
        match self.kind {
            ScenarioKind::Flat | ScenarioKind::Circle { .. } => vec![(0, 1)],
            ScenarioKind::TripleY => vec![(0, 1), (0, 2), (1, 2)],
        }
    }

    /// Total interface length (sharp-interface energy at unit tension).
    pub fn interface_length(&self, t: f64) -> f64 {
        match self.kind {
            ScenarioKind::Flat => 2.0 * self.lx,
            ScenarioKind::Circle { .. } => 2.0 * std::f64::consts::PI * self.circle_radius(t),
            ScenarioKind::TripleY => self.edges.iter().map(|e| e.len).sum(),
        }
    }

    /// Ray directions (pointing away from the junction) and the pair labels
    /// of the three edges meeting at junction k.
    pub fn junction_rays(&self, k: usize) -> Vec<(V2, (usize, usize), usize)> {
        let mut rays = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if e.junctions.0 == k {
                rays.push((e.dir, e.pair, ei));
            }
            if e.junctions.1 == k {
                rays.push((e.dir.scale(-1.0), e.pair, ei));
            }
        }
        rays
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_radius_oracle() {
        let s = make_scenario(ScenarioKind::Circle { r0: 0.3 }, 1.0, 0.02).unwrap();
        assert!((s.circle_radius(0.02) - 0.05f64.sqrt()).abs() < 1e-15);
        let h = 1e-7;
        let area = |t: f64| std::f64::consts::PI * s.circle_radius(t) * s.circle_radius(t);
        let rate = (area(0.01 + h) - area(0.01 - h)) / (2.0 * h);
        assert!((rate + 2.0 * std::f64::consts::PI).abs() < 1e-6);
        assert!(make_scenario(ScenarioKind::Circle { r0: 0.1 }, 1.0, 0.01).is_err());
    }

    #[test]
    fn circle_sdist_and_normal() {
        let s = make_scenario(ScenarioKind::Circle { r0: 0.3 }, 1.0, 0.02).unwrap();
        let x = V2::new(0.9, 0.5);
        let sd = s.sdist(x, 0.0, 0, 1);
        assert!((sd - 0.1).abs() < 1e-14);
        assert!((s.sdist(x, 0.0, 1, 0) + sd).abs() < 1e-15);
        let n = s.normal(x, 0.0, 0, 1);
        assert!((n.x - 1.0).abs() < 1e-14 && n.y.abs() < 1e-14);
        // V n = H on the interface
        let xi = V2::new(0.8, 0.5);
        let v = s.normal_speed(xi, 0.0, 0, 1);
        let h = s.curvature(xi, 0.0, 0, 1);
        let n = s.normal(xi, 0.0, 0, 1);
        assert!((n.scale(v).sub(h)).norm() < 1e-12);
        assert!(
            (s.interface_length(0.0) - 2.0 * std::f64::consts::PI * 0.3).abs() < 1e-12
        );
    }

    #[test]
    fn flat_is_static_with_unit_normal() {
        let s = make_scenario(ScenarioKind::Flat, 1.0, 0.1).unwrap();
        assert_eq!(s.normal_speed(V2::new(0.3, 0.25), 0.0, 0, 1), 0.0);
        assert_eq!(s.curvature(V2::new(0.3, 0.25), 0.0, 0, 1), V2::ZERO);
        let n = s.normal(V2::new(0.1, 0.1), 0.0, 0, 1);
        assert_eq!(n, V2::new(0.0, 1.0));
        assert_eq!(s.phase_of(V2::new(0.1, 0.5), 0.0), 1);
        assert_eq!(s.phase_of(V2::new(0.1, 0.05), 0.0), 0);
        assert!((s.sdist(V2::new(0.0, 0.5), 0.0, 0, 1) - 0.25).abs() < 1e-14);
        assert!((s.interface_length(0.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn honeycomb_combinatorics_and_angles() {
        let l = 0.6 * SQRT3;
        let s = make_scenario(ScenarioKind::TripleY, l, 0.01).unwrap();
        assert_eq!(s.edges().len(), 18);
        assert_eq!(s.junctions.len(), 12);
        assert!((s.cell_a - 0.2).abs() < 1e-12);
        assert!((s.ly - 0.6).abs() < 1e-12);
        // every junction is trivalent with rays at 120 degrees and all three
        // phases present
        for k in 0..12 {
            let rays = s.junction_rays(k);
            assert_eq!(rays.len(), 3, "junction {k} not trivalent");
            for p in 0..3 {
                for q in p + 1..3 {
                    let c = rays[p].0.dot(rays[q].0);
                    assert!((c + 0.5).abs() < 1e-12, "rays at junction {k}");
                }
            }
            let mut pairs: Vec<(usize, usize)> = rays.iter().map(|r| r.1).collect();
            pairs.sort();
            assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        }
        // total length: 18 edges of length a
        assert!((s.interface_length(0.0) - 18.0 * s.cell_a).abs() < 1e-12);
        // every edge normal is perpendicular to the edge direction
        for e in s.edges() {
            assert!(e.dir.dot(e.normal).abs() < 1e-12);
        }
        // stationary
        assert_eq!(s.normal_speed(V2::new(0.1, 0.1), 0.0, 0, 1), 0.0);
    }

    #[test]
    fn honeycomb_phases_consistent_with_sides() {
        let l = 0.6 * SQRT3;
        let s = make_scenario(ScenarioKind::TripleY, l, 0.01).unwrap();
        // walk along each edge and probe both sides at mid-edge
        for e in s.edges() {
            let mid = e.start.add(e.dir.scale(0.5 * e.len));
            let off = 0.02 * s.cell_a;
            let pj = V2::new(mid.x + e.normal.x * off, mid.y + e.normal.y * off);
            let pi = V2::new(mid.x - e.normal.x * off, mid.y - e.normal.y * off);
            assert_eq!(s.phase_of(pj, 0.0), e.pair.1, "j side of {:?}", e.pair);
            assert_eq!(s.phase_of(pi, 0.0), e.pair.0, "i side of {:?}", e.pair);
            let sd_j = s.sdist(pj, 0.0, e.pair.0, e.pair.1);
            assert!((sd_j - off).abs() < 1e-12);
            let sd_i = s.sdist(pi, 0.0, e.pair.0, e.pair.1);
            assert!((sd_i + off).abs() < 1e-12);
        }
    }

    #[test]
    fn honeycomb_sdist_antisymmetry() {
        let l = 0.6 * SQRT3;
        let s = make_scenario(ScenarioKind::TripleY, l, 0.01).unwrap();
        let x = V2::new(0.33, 0.41);
        for &(i, j) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            assert!((s.sdist(x, 0.0, i, j) + s.sdist(x, 0.0, j, i)).abs() < 1e-14);
        }
    }
}
