//! Geometry of the unit-edge simplex: vertices, the closest-edge sector
//! partition, vertex balls, edge tubes, projections and angles. Everything
//! downstream (potential, indicators, initial data) is phrased in terms of
//! these primitives.

use crate::error::{Error, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SimplexGeometry {
    pub n_phases: usize,
    /// Ambient dimension N-1.
    pub dim: usize,
    /// Vertices alpha_i, each of length `dim`, pairwise distance 1.
    pub vertices: Vec<Vec<f64>>,
    pub r_u: f64,
    pub beta_n: f64,
    /// Lexicographically ordered pairs (i, j), i < j.
    pairs: Vec<(usize, usize)>,
    /// Unit edge direction alpha_j - alpha_i per pair.
    edge_dirs: Vec<Vec<f64>>,
    /// Inverse of the matrix [alpha_2-alpha_1 | ... | alpha_N-alpha_1],
    /// row-major, for barycentric coordinates.
    binv: Vec<f64>,
    barycenter: Vec<f64>,
}

/// Result of classifying a phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLabel {
    /// Sector T_{i,j} the point belongs to (closest edge, lex tie-break).
    pub sector: (usize, usize),
    /// Nearer endpoint of the sector edge: T^i_j membership (midline goes to
    /// the lower index).
    pub half_vertex: usize,
    /// Vertex ball U_i containing the point, if any.
    pub in_vertex_ball: Option<usize>,
    /// Edge tube N_{i,j} of the assigned sector, if the point is inside it.
    pub in_edge_tube: Option<(usize, usize)>,
}

impl SimplexGeometry {
    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().position(|&p| p == (a, b)).unwrap()
    }

    pub fn edge_dir(&self, i: usize, j: usize) -> Vec<f64> {
        let idx = self.pair_index(i.min(j), i.max(j));
        let d = &self.edge_dirs[idx];
        if i < j {
            d.clone()
        } else {
            d.iter().map(|x| -x).collect()
        }
    }

    pub fn barycenter(&self) -> &[f64] {
        &self.barycenter
    }

    /// Half-width of the edge tubes N_{i,j}.
    pub fn tube_width(&self) -> f64 {
        self.r_u * self.beta_n.sin()
    }

    /// Point on the edge gamma_{i,j} at arclength r from alpha_i.
    pub fn point_on_edge(&self, i: usize, j: usize, r: f64) -> Vec<f64> {
        let e = self.edge_dir(i, j);
        self.vertices[i]
            .iter()
            .zip(e.iter())
            .map(|(a, d)| a + r * d)
            .collect()
    }

    /// (arclength of foot point from alpha_i clamped to [0,1],
    ///  unclamped arclength, distance to the segment).
    pub fn edge_projection(&self, u: &[f64], i: usize, j: usize) -> (f64, f64, f64) {
        let e = self.edge_dir(i, j);
        let a = &self.vertices[i];
        let mut t = 0.0;
        let mut n2 = 0.0;
        for k in 0..self.dim {
            let w = u[k] - a[k];
            t += w * e[k];
            n2 += w * w;
        }
        let tc = t.clamp(0.0, 1.0);
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let w = u[k] - a[k] - tc * e[k];
            d2 += w * w;
        }
        let _ = n2;
        (tc, t, d2.max(0.0).sqrt())
    }

    /// Distance to the closed edge segment gamma_{i,j}.
    pub fn dist_to_edge(&self, u: &[f64], i: usize, j: usize) -> f64 {
        self.edge_projection(u, i, j).2
    }

    pub fn dist_to_vertex(&self, u: &[f64], i: usize) -> f64 {
        let a = &self.vertices[i];
        u.iter()
            .zip(a.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// Barycentric coordinates of u.
    pub fn barycentric(&self, u: &[f64]) -> Vec<f64> {
        let mut lambda = vec![0.0; self.n_phases];
        self.barycentric_into(u, &mut lambda);
        lambda
    }

    /// Allocation-free barycentric coordinates.
    pub fn barycentric_into(&self, u: &[f64], lambda: &mut [f64]) {
        let d = self.dim;
        let mut sum = 0.0;
        for r in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += self.binv[r * d + k] * (u[k] - self.vertices[0][k]);
            }
            lambda[r + 1] = s;
            sum += s;
        }
        lambda[0] = 1.0 - sum;
    }

    /// Point from barycentric coordinates.
    pub fn from_barycentric(&self, lambda: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.dim];
        for (i, &l) in lambda.iter().enumerate() {
            for k in 0..self.dim {
                u[k] += l * self.vertices[i][k];
            }
        }
        u
    }

    /// Distance from u to the closed simplex (0 when inside).
    pub fn dist_to_simplex(&self, u: &[f64]) -> f64 {
        let mut lambda = [0.0f64; 8];
        self.barycentric_into(u, &mut lambda[..self.n_phases]);
        if lambda[..self.n_phases].iter().all(|&l| l >= -1e-14) {
            return 0.0;
        }
        let p = self.project_to_simplex(u);
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let w = u[k] - p[k];
            d2 += w * w;
        }
        d2.sqrt()
    }

    /// Nearest point of the closed simplex, by active-set enumeration over
    /// vertex subsets (N is tiny, so brute force is exact and cheap).
    pub fn project_to_simplex(&self, u: &[f64]) -> Vec<f64> {
        let lambda = self.barycentric(u);
        if lambda.iter().all(|&l| l >= 0.0) {
            return u.to_vec();
        }
        let n = self.n_phases;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if let Some(p) = self.project_to_face(u, &idx) {
                let mut d2 = 0.0;
                for k in 0..self.dim {
                    let w = u[k] - p[k];
                    d2 += w * w;
                }
                if best.as_ref().map_or(true, |(bd, _)| d2 < *bd) {
                    best = Some((d2, p));
                }
            }
        }
        best.unwrap().1
    }

    /// Projection onto the affine hull of a vertex subset, if the barycentric
    /// solution is feasible (all coefficients nonnegative).
    fn project_to_face(&self, u: &[f64], idx: &[usize]) -> Option<Vec<f64>> {
        let m = idx.len();
        if m == 1 {
            return Some(self.vertices[idx[0]].clone());
        }
        let d = self.dim;
        let a0 = &self.vertices[idx[0]];
        // Gram system for coefficients of the m-1 spanning vectors.
        let mut g = vec![0.0; (m - 1) * (m - 1)];
        let mut b = vec![0.0; m - 1];
        for r in 0..m - 1 {
            let vr: Vec<f64> = (0..d)
                .map(|k| self.vertices[idx[r + 1]][k] - a0[k])
                .collect();
            for c in 0..m - 1 {
                let vc: Vec<f64> = (0..d)
                    .map(|k| self.vertices[idx[c + 1]][k] - a0[k])
                    .collect();
                g[r * (m - 1) + c] = vr.iter().zip(vc.iter()).map(|(x, y)| x * y).sum();
            }
            b[r] = (0..d).map(|k| (u[k] - a0[k]) * vr[k]).sum();
        }
        let coef = solve_dense(&mut g, &mut b, m - 1)?;
        let mut lam0 = 1.0;
        for &c in &coef {
            if c < -1e-13 {
                return None;
            }
            lam0 -= c;
        }
        if lam0 < -1e-13 {
            return None;
        }
        let mut p = a0.clone();
        for (r, &c) in coef.iter().enumerate() {
            for k in 0..d {
                p[k] += c * (self.vertices[idx[r + 1]][k] - a0[k]);
            }
        }
        Some(p)
    }

    /// Apply the isometry of the simplex realizing a phase permutation.
    pub fn permute_point(&self, u: &[f64], perm: &[usize]) -> Vec<f64> {
        let lambda = self.barycentric(u);
        let mut out = vec![0.0; self.n_phases];
        for (i, &l) in lambda.iter().enumerate() {
            out[perm[i]] = l;
        }
        self.from_barycentric(&out)
    }
}

/// Build the simplex with the deterministic embedding: alpha_1 at the origin,
/// alpha_2 on the first axis, subsequent vertices completed orthogonally.
pub fn build_simplex(n: usize, r_u: f64, beta_n: f64) -> Result<SimplexGeometry> {
    if n < 2 {
        return Err(Error::config(format!("need at least 2 phases, got {n}")));
    }
    if !(r_u > 0.0 && r_u <= 0.25) {
        return Err(Error::config(format!(
            "vertex ball radius r_U must lie in (0, 1/4], got {r_u}"
        )));
    }
    if n >= 3 {
        let cap = std::f64::consts::PI / (12.0 * (n as f64 - 2.0));
        if !(beta_n > 0.0 && beta_n <= cap + 1e-15) {
            return Err(Error::config(format!(
                "neighborhood angle beta_N must lie in (0, {cap}], got {beta_n}"
            )));
        }
    }
    let dim = n - 1;
    let mut vertices = vec![vec![0.0; dim]; n];
    // Iterative construction. With v_m := alpha_{m+1}-alpha_1 we need
    // |v_m| = 1 and v_m . v_k = 1/2 for k != m.
    for m in 1..n {
        for k in 0..m - 1 {
            // components determined by dot products with previous vertices
            let mut s = 0.5;
            for t in 0..k {
                s -= vertices[m][t] * vertices[k + 1][t];
            }
            vertices[m][k] = s / vertices[k + 1][k];
        }
        let norm2: f64 = vertices[m][..m - 1].iter().map(|x| x * x).sum();
        let h2 = 1.0 - norm2;
        if h2 <= 0.0 {
            return Err(Error::numeric("simplex embedding degenerate"));
        }
        vertices[m][m - 1] = h2.sqrt();
    }

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let edge_dirs: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| {
            (0..dim)
                .map(|k| vertices[j][k] - vertices[i][k])
                .collect()
        })
        .collect();

    // invert B = [alpha_2-alpha_1 | ...] (columns); stored row-major
    let mut bmat = vec![0.0; dim * dim];
    for c in 0..dim {
        for r in 0..dim {
            bmat[r * dim + c] = vertices[c + 1][r] - vertices[0][r];
        }
    }
    let binv = invert_dense(&bmat, dim)
        .ok_or_else(|| Error::numeric("simplex basis not invertible"))?;

    let mut barycenter = vec![0.0; dim];
    for v in &vertices {
        for k in 0..dim {
            barycenter[k] += v[k] / n as f64;
        }
    }

    Ok(SimplexGeometry {
        n_phases: n,
        dim,
        vertices,
        r_u,
        beta_n,
        pairs,
        edge_dirs,
        binv,
        barycenter,
    })
}

impl SimplexGeometry {
    /// Assign u to its sector T_{i,j} (closest edge, lowest (i,j) on ties),
    /// the half T^i_j, and record ball/tube membership.
    pub fn classify(&self, u: &[f64]) -> Result<RegionLabel> {
        if self.dist_to_simplex(u) > MEMBERSHIP_TOL {
            return Err(Error::domain(format!(
                "point outside the inflated simplex (dist {:.3e})",
                self.dist_to_simplex(u)
            )));
        }
        Ok(self.classify_clamped(u))
    }

    /// Classification without the domain check; callers that hold values from
    /// the dynamics (which may overshoot the simplex by the solver tolerance)
    /// use this directly.
    pub fn classify_clamped(&self, u: &[f64]) -> RegionLabel {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for &(i, j) in &self.pairs {
            let d = self.dist_to_edge(u, i, j);
            if d < best_d {
                best_d = d;
                best = (i, j);
            }
        }
        let (i, j) = best;
        let di = self.dist_to_vertex(u, i);
        let dj = self.dist_to_vertex(u, j);
        // midline assigned to the lower index
        let half_vertex = if di <= dj { i } else { j };
        let mut in_vertex_ball = None;
        for v in 0..self.n_phases {
            if self.dist_to_vertex(u, v) <= self.r_u {
                in_vertex_ball = Some(v);
                break;
            }
        }
        let in_edge_tube = if self.n_phases >= 3 && best_d <= self.tube_width() {
            Some((i, j))
        } else if self.n_phases == 2 {
            Some((i, j))
        } else {
            None
        };
        RegionLabel {
            sector: (i, j),
            half_vertex,
            in_vertex_ball,
            in_edge_tube,
        }
    }

    /// Orthogonal projection P_{i,j} onto the closed edge segment.
    pub fn project_edge(&self, u: &[f64], i: usize, j: usize) -> Vec<f64> {
        let (tc, _, _) = self.edge_projection(u, i, j);
        self.point_on_edge(i, j, tc)
    }

    /// Radial projection P^{rad,i}_{i,j}: the edge point at the same distance
    /// from alpha_i as u. Returns the point and whether clamping occurred
    /// (|u - alpha_i| > 1 clamps to alpha_j).
    pub fn project_radial(&self, u: &[f64], i: usize, j: usize) -> (Vec<f64>, bool) {
        let rho = self.dist_to_vertex(u, i);
        if rho > 1.0 {
            (self.vertices[j].clone(), true)
        } else {
            (self.point_on_edge(i, j, rho), false)
        }
    }

    /// Angle beta^i_j(u) between u - alpha_i and the edge direction, in [0, pi].
    pub fn angle_beta(&self, u: &[f64], i: usize, j: usize) -> Result<f64> {
        let rho = self.dist_to_vertex(u, i);
        if rho == 0.0 {
            return Err(Error::domain("angle undefined at the vertex itself"));
        }
        Ok(self.angle_beta_raw(u, i, j))
    }

    /// Angle with the convention beta = 0 at the vertex itself (used by the
    /// evaluators, where every angular factor carries a vanishing prefactor).
    pub fn angle_beta_raw(&self, u: &[f64], i: usize, j: usize) -> f64 {
        let e = self.edge_dir(i, j);
        let a = &self.vertices[i];
        let mut t = 0.0;
        let mut n2 = 0.0;
        for k in 0..self.dim {
            let w = u[k] - a[k];
            t += w * e[k];
            n2 += w * w;
        }
        let d2 = (n2 - t * t).max(0.0);
        if n2 == 0.0 {
            return 0.0;
        }
        d2.sqrt().atan2(t)
    }
}

fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    // Gaussian elimination with partial pivoting.
    let mut idx: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[idx[col] * n + col].abs();
        for r in col + 1..n {
            let v = a[idx[r] * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-14 {
            return None;
        }
        idx.swap(col, piv);
        let prow = idx[col];
        for r in col + 1..n {
            let row = idx[r];
            let f = a[row * n + col] / a[prow * n + col];
            for c in col..n {
                a[row * n + c] -= f * a[prow * n + c];
            }
            b[row] -= f * b[prow];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let row = idx[col];
        let mut s = b[row];
        for c in col + 1..n {
            s -= a[row * n + c] * x[c];
        }
        x[col] = s / a[row * n + col];
    }
    Some(x)
}

fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut m = a.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(&mut m, &mut e, n)?;
        for r in 0..n {
            inv[r * n + col] = x[r];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{unit_cube_to_barycentric, Halton};

    fn geom3() -> SimplexGeometry {
        build_simplex(3, 0.25, std::f64::consts::PI / 12.0).unwrap()
    }

    #[test]
    fn n2_is_unit_segment() {
        let g = build_simplex(2, 0.25, 0.1).unwrap();
        assert_eq!(g.vertices[0], vec![0.0]);
        assert_eq!(g.vertices[1], vec![1.0]);
    }

    #[test]
    fn n3_is_equilateral() {
        let g = geom3();
        assert!((g.vertices[1][0] - 1.0).abs() < 1e-15);
        assert!((g.vertices[2][0] - 0.5).abs() < 1e-15);
        assert!((g.vertices[2][1] - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_pairwise_distances_up_to_n6() {
        for n in 2..=6 {
            let g = build_simplex(n, 0.2, 0.9 * std::f64::consts::PI / (12.0 * (n.max(3) as f64 - 2.0))).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    let d = g.dist_to_vertex(g.vertex(i), j);
                    assert!((d - 1.0).abs() < 1e-12, "n={n} i={i} j={j} d={d}");
                }
            }
            // barycenter equidistant from all vertices
            let g0 = g.dist_to_vertex(g.barycenter(), 0);
            for i in 1..n {
                assert!((g.dist_to_vertex(g.barycenter(), i) - g0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(build_simplex(3, 0.3, 0.1).is_err());
        assert!(build_simplex(3, 0.25, 0.3).is_err());
        assert!(build_simplex(1, 0.25, 0.1).is_err());
    }

    #[test]
    fn classify_examples() {
        let g = geom3();
        // vertex: half-vertex is the vertex itself, ball membership
        let lbl = g.classify(g.vertex(0)).unwrap();
        assert_eq!(lbl.half_vertex, 0);
        assert_eq!(lbl.in_vertex_ball, Some(0));
        // barycenter ties among all edges -> lowest pair (0,1)
        let lbl = g.classify(g.barycenter()).unwrap();
        assert_eq!(lbl.sector, (0, 1));
        // near the bottom edge: sector (0,1), tube membership when close
        let u = [0.5, 0.01];
        let lbl = g.classify(&u).unwrap();
        assert_eq!(lbl.sector, (0, 1));
        assert!(0.01 <= g.tube_width());
        assert_eq!(lbl.in_edge_tube, Some((0, 1)));
        // far outside: domain error
        assert!(g.classify(&[5.0, 5.0]).is_err());
    }

    #[test]
    fn partition_is_a_function_and_counts_once() {
        let g = geom3();
        let mut h = Halton::new(2, 7);
        let mut cube = [0.0; 2];
        let mut bar = [0.0; 3];
        for _ in 0..10_000 {
            h.next_point(&mut cube);
            unit_cube_to_barycentric(&cube, &mut bar);
            let u = g.from_barycentric(&bar);
            let lbl = g.classify(&u).unwrap();
            // exactly one sector: classify returns exactly one pair; verify
            // its distance is the minimum
            let d_assigned = g.dist_to_edge(&u, lbl.sector.0, lbl.sector.1);
            for &(i, j) in g.pairs() {
                assert!(d_assigned <= g.dist_to_edge(&u, i, j) + 1e-15);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let g = geom3();
        // point on edge projects to itself
        let p = g.point_on_edge(0, 1, 0.3);
        assert_eq!(g.project_edge(&p, 0, 1), p);
        // perpendicular drop
        let u = [0.5, 0.1];
        let pr = g.project_edge(&u, 0, 1);
        assert!((pr[0] - 0.5).abs() < 1e-15 && pr[1].abs() < 1e-15);
        // perpendicular offset at the endpoint clamps to the endpoint
        let e = g.edge_dir(0, 1);
        let n = [-e[1], e[0]];
        let u = [g.vertex(0)[0] + 0.1 * n[0], g.vertex(0)[1] + 0.1 * n[1]];
        let pr = g.project_edge(&u, 0, 1);
        assert!(g.dist_to_vertex(&pr, 0) < 1e-14);
    }

    #[test]
    fn radial_projection_examples() {
        let g = geom3();
        let ang = 20f64.to_radians();
        let u = [0.2 * ang.cos(), 0.2 * ang.sin()];
        let (p, clamped) = g.project_radial(&u, 0, 1);
        assert!(!clamped);
        assert!((p[0] - 0.2).abs() < 1e-14 && p[1].abs() < 1e-14);
        // degenerate: the vertex maps to itself
        let (p, _) = g.project_radial(g.vertex(0), 0, 1);
        assert_eq!(p, g.vertex(0).to_vec());
        // beyond unit radius clamps to the far vertex with a flag
        let (p, clamped) = g.project_radial(&[1.2, 0.9], 0, 1);
        assert!(clamped);
        assert_eq!(p, g.vertex(1).to_vec());
    }

    #[test]
    fn angle_examples() {
        let g = geom3();
        let u = g.point_on_edge(0, 1, 0.4);
        assert!(g.angle_beta(&u, 0, 1).unwrap().abs() < 1e-12);
        let ang = 15f64.to_radians();
        let u = [0.2 * ang.cos(), 0.2 * ang.sin()];
        assert!((g.angle_beta(&u, 0, 1).unwrap() - ang).abs() < 1e-12);
        assert!(g.angle_beta(g.vertex(0), 0, 1).is_err());
    }

    #[test]
    fn radial_consistency_and_projection_gap_bound() {
        // |P^rad u - alpha_i| = |u - alpha_i| and the analogue of the
        // displayed bound above (6.9):
        // |P^rad u - P u| <= dist^2(u, edge)/(2 |P u - alpha_i|).
        let g = geom3();
        let mut h = Halton::new(2, 3);
        let mut cube = [0.0; 2];
        let mut bar = [0.0; 3];
        let mut tested = 0;
        for _ in 0..30_000 {
            h.next_point(&mut cube);
            unit_cube_to_barycentric(&cube, &mut bar);
            let u = g.from_barycentric(&bar);
            let lbl = g.classify(&u).unwrap();
            let (i, j) = lbl.sector;
            let (vi, vj) = if lbl.half_vertex == i { (i, j) } else { (j, i) };
            let rho = g.dist_to_vertex(&u, vi);
            if rho > 1.0 || rho == 0.0 {
                continue;
            }
            let (pr, _) = g.project_radial(&u, vi, vj);
            assert!((g.dist_to_vertex(&pr, vi) - rho).abs() < 1e-12);
            // restrict to the tube minus the ball as in the paper's estimate
            let d = g.dist_to_edge(&u, i, j);
            if d <= g.tube_width() && lbl.in_vertex_ball.is_none() {
                let pe = g.project_edge(&u, vi, vj);
                let r = g.dist_to_vertex(&pe, vi);
                if r > 1e-6 {
                    let gap: f64 = pr
                        .iter()
                        .zip(pe.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    assert!(gap <= d * d / (2.0 * r) + 1e-10);
                    tested += 1;
                }
            }
        }
        assert!(tested > 100);
    }

    #[test]
    fn simplex_projection_roundtrip() {
        let g = geom3();
        // inside points project to themselves
        let u = g.barycenter().to_vec();
        assert_eq!(g.project_to_simplex(&u), u);
        assert_eq!(g.dist_to_simplex(&u), 0.0);
        // far point projects onto the nearest edge/vertex
        let p = g.project_to_simplex(&[-1.0, -1.0]);
        assert!(g.dist_to_vertex(&p, 0) < 1e-12);
        let p = g.project_to_simplex(&[0.5, -1.0]);
        assert!((p[0] - 0.5).abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn permutation_isometry() {
        let g = geom3();
        let u = [0.3, 0.2];
        let perm = [1usize, 2, 0];
        let v = g.permute_point(&u, &perm);
        // distances to permuted vertices preserved
        for i in 0..3 {
            let d0 = g.dist_to_vertex(&u, i);
            let d1 = g.dist_to_vertex(&v, perm[i]);
            assert!((d0 - d1).abs() < 1e-12);
        }
    }
}
