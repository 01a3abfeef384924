//! Well-prepared initial fields: rescaled one-dimensional equilibrium
//! profiles across every interface, pure phases in the bulk, and the full
//! wedge interpolation at triple junctions.
//!
//! A junction ball of radius r is split into three interface cones (opening
//! pi/2, centered on the rays) and three phase cones (opening pi/6). Inside
//! the eps-ball the field interpolates between the boundary traces of the
//! surrounding regions through the three orthogonal projections of each
//! wedge; between the eps-ball and the full ball, interface cones carry the
//! plain profile and phase cones blend the two adjacent rescaled profiles
//! in the (s, h) wedge coordinates. All region formulas are sampled
//! directly on the grid (they are already continuous up to profile-tail
//! seams of the order of the truncation mass).

use crate::calibration::CalibrationField;
use crate::error::{Error, Result};
use crate::geometry2d::{ScenarioKind, StrongSolution};
use crate::potential::PotentialSpec;
use crate::profiles::{solve_profile, Profile1D};
use crate::solver::GridField;
use crate::util::V2;
use rayon::prelude::*;

pub const FRAC_PI_12: f64 = std::f64::consts::PI / 12.0;

/// Provenance of each grid cell in the initial construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    Profile = 0,
    InterfaceWedge = 1,
    PhaseWedge = 2,
    OuterBlend = 3,
}

/// Wedge decomposition of one junction ball.
#[derive(Debug, Clone)]
pub struct WedgeDecomposition {
    pub center: V2,
    pub r: f64,
    pub rho: f64,
    pub eps: f64,
    /// Interface rays: direction, pair, and the two +-45 degree boundary
    /// directions, ordered so that `bound[0]` lies on the positive sdist
    /// side of the pair.
    pub rays: Vec<RaySpec>,
    /// Phase cones between consecutive rays.
    pub gaps: Vec<GapSpec>,
}

#[derive(Debug, Clone)]
pub struct RaySpec {
    pub dir: V2,
    pub pair: (usize, usize),
    /// boundary direction on the sdist-positive side
    pub bound_pos: V2,
    /// boundary direction on the sdist-negative side
    pub bound_neg: V2,
}

#[derive(Debug, Clone)]
pub struct GapSpec {
    /// phase filling this cone
    pub phase: usize,
    /// bounding rays (indices into `rays`) on either side
    pub ray_a: usize,
    pub ray_b: usize,
    /// boundary directions (shared with the interface cones)
    pub dir_a: V2,
    pub dir_b: V2,
    /// cone axis (bisector)
    pub axis: V2,
    /// unit vector perpendicular to the axis pointing from b toward a
    pub axis_perp: V2,
    /// profile arguments at the two eps-corners (signed, in units of eps)
    pub corner_arg_a: f64,
    pub corner_arg_b: f64,
}

fn rotate(v: V2, ang: f64) -> V2 {
    let (s, c) = ang.sin_cos();
    V2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Build the wedge decomposition of junction `jk` of a junction scenario.
pub fn wedge_decompose(
    sol: &StrongSolution,
    jk: usize,
    r: f64,
    rho: f64,
    eps: f64,
) -> Result<WedgeDecomposition> {
    if !(eps < rho && rho < r) {
        return Err(Error::config(format!(
            "wedge scales must satisfy eps < rho < r (got {eps}, {rho}, {r})"
        )));
    }
    let t = sol.junctions[jk];
    let rays_raw = sol.junction_rays(jk);
    if rays_raw.len() != 3 {
        return Err(Error::config("junction is not trivalent"));
    }
    let q = std::f64::consts::FRAC_PI_4;
    let mut rays = Vec::new();
    for (dir, pair, _) in &rays_raw {
        let bp = rotate(*dir, q);
        let bm = rotate(*dir, -q);
        // which boundary lies on the positive-sdist side of the pair
        let probe = V2::new(t.x + 0.5 * eps * bp.x, t.y + 0.5 * eps * bp.y);
        let sd = sol.sdist(probe, 0.0, pair.0, pair.1);
        let (bound_pos, bound_neg) = if sd >= 0.0 { (bp, bm) } else { (bm, bp) };
        rays.push(RaySpec {
            dir: *dir,
            pair: *pair,
            bound_pos,
            bound_neg,
        });
    }
    // phase cones: for each pair of rays, the shared phase and the gap
    let mut gaps = Vec::new();
    for a in 0..3 {
        for b in a + 1..3 {
            let pa = rays[a].pair;
            let pb = rays[b].pair;
            let shared = if pa.0 == pb.0 || pa.0 == pb.1 {
                pa.0
            } else {
                pa.1
            };
            // boundary of cone a facing cone b: the one whose direction has
            // larger dot with ray b
            let (da, db);
            if rays[a].bound_pos.dot(rays[b].dir) > rays[a].bound_neg.dot(rays[b].dir) {
                da = rays[a].bound_pos;
            } else {
                da = rays[a].bound_neg;
            }
            if rays[b].bound_pos.dot(rays[a].dir) > rays[b].bound_neg.dot(rays[a].dir) {
                db = rays[b].bound_pos;
            } else {
                db = rays[b].bound_neg;
            }
            let axis = da.add(db).normalized();
            let mut axis_perp = axis.perp();
            if axis_perp.dot(da) < 0.0 {
                axis_perp = axis_perp.scale(-1.0);
            }
            // corner profile arguments: signed distance of the corner point
            // to the interface line, in units of eps: +- sin(45 deg)
            let corner = |bound: V2, pair: (usize, usize)| -> f64 {
                let p = V2::new(t.x + eps * bound.x, t.y + eps * bound.y);
                let sd = sol.sdist(p, 0.0, pair.0, pair.1);
                sd / eps
            };
            gaps.push(GapSpec {
                phase: shared,
                ray_a: a,
                ray_b: b,
                dir_a: da,
                dir_b: db,
                axis,
                axis_perp,
                corner_arg_a: corner(da, pa),
                corner_arg_b: corner(db, pb),
            });
        }
    }
    Ok(WedgeDecomposition {
        center: t,
        r,
        rho,
        eps,
        rays,
        gaps,
    })
}

/// Profiles for every active pair of the scenario (same shape for the
/// symmetric potential, mapped onto each edge).
pub fn profiles_for(spec: &PotentialSpec, sol: &StrongSolution, rho_profile: f64) -> Result<Vec<Profile1D>> {
    let mut out = Vec::new();
    for &(i, j) in &[(0usize, 1usize), (0, 2), (1, 2)] {
        if i < sol.n_phases && j < sol.n_phases {
            out.push(solve_profile(spec, i, j, rho_profile)?);
        }
    }
    Ok(out)
}

fn pair_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => unreachable!(),
    }
}

pub struct InitialData {
    pub field: GridField,
    pub tags: Vec<u8>,
}

/// Assemble the well-prepared initial field on an nx x ny grid.
pub fn build_initial(
    sol: &StrongSolution,
    spec: &PotentialSpec,
    profiles: &[Profile1D],
    eps: f64,
    nx: usize,
    ny: usize,
) -> Result<InitialData> {
    let hx = sol.lx / nx as f64;
    let hy = sol.ly / ny as f64;
    if eps / hx < 4.0 || eps / hy < 4.0 {
        return Err(Error::config(format!(
            "grid too coarse: {:.2} cells per eps",
            (eps / hx).min(eps / hy)
        )));
    }
    let mut field = GridField::new(nx, ny, sol.lx, sol.ly, eps, spec.geom.dim);
    let mut tags = vec![0u8; nx * ny];

    // junction wedges
    let wedges: Vec<WedgeDecomposition> = match sol.kind {
        ScenarioKind::TripleY => {
            let r = 0.45 * sol.cell_a;
            let rho = 0.5 * r;
            (0..sol.junctions.len())
                .map(|k| wedge_decompose(sol, k, r, rho, eps))
                .collect::<Result<_>>()?
        }
        _ => Vec::new(),
    };

    let dim = spec.geom.dim;
    let bary = spec.geom.barycenter().to_vec();

    // evaluate row-parallel
    let rows: Vec<(Vec<f64>, Vec<u8>)> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            let mut row = vec![0.0; nx * dim];
            let mut rtags = vec![0u8; nx];
            let mut u = vec![0.0; dim];
            for ix in 0..nx {
                let x = V2::new((ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy);
                let tag = eval_initial(sol, profiles, &wedges, &bary, eps, x, &mut u);
                for c in 0..dim {
                    row[ix * dim + c] = u[c];
                }
                rtags[ix] = tag as u8;
            }
            (row, rtags)
        })
        .collect();
    for (iy, (row, rtags)) in rows.into_iter().enumerate() {
        for ix in 0..nx {
            for c in 0..dim {
                field.data[c][iy * nx + ix] = row[ix * dim + c];
            }
        }
        tags[iy * nx..(iy + 1) * nx].copy_from_slice(&rtags);
    }
    Ok(InitialData { field, tags })
}

/// Evaluate the initial datum at a point (also used directly by tests).
pub fn eval_initial(
    sol: &StrongSolution,
    profiles: &[Profile1D],
    wedges: &[WedgeDecomposition],
    bary: &[f64],
    eps: f64,
    x: V2,
    out: &mut [f64],
) -> RegionTag {
    match sol.kind {
        ScenarioKind::Flat | ScenarioKind::Circle { .. } => {
            let sd = sol.sdist(x, 0.0, 0, 1);
            profiles[0].value(sd / eps, out);
            RegionTag::Profile
        }
        ScenarioKind::TripleY => {
            // nearest junction
            let mut best = (usize::MAX, f64::INFINITY);
            for (k, w) in wedges.iter().enumerate() {
                let d = sol.pdiff(x, w.center).norm();
                if d < best.1 {
                    best = (k, d);
                }
            }
            let (jk, s) = best;
            let w = &wedges[jk];
            if s < w.r {
                return eval_wedge(sol, profiles, w, bary, eps, x, s, out);
            }
            // generic region: profile across the nearest edge (saturates to
            // the pure phases away from the network)
            let mut bd = f64::INFINITY;
            let mut pair = (0usize, 1usize);
            let mut side = 1.0;
            for e in sol.edges() {
                let (d, _, sg) = sol.edge_dist(x, e);
                if d < bd {
                    bd = d;
                    pair = e.pair;
                    side = sg;
                }
            }
            profiles[pair_index(pair.0, pair.1)].value(side * bd / eps, out);
            RegionTag::Profile
        }
    }
}

fn eval_wedge(
    sol: &StrongSolution,
    profiles: &[Profile1D],
    w: &WedgeDecomposition,
    bary: &[f64],
    eps: f64,
    x: V2,
    s: f64,
    out: &mut [f64],
) -> RegionTag {
    let v = sol.pdiff(x, w.center);
    if s < 1e-14 {
        out.copy_from_slice(bary);
        return RegionTag::PhaseWedge;
    }
    let vhat = v.scale(1.0 / s);
    // interface cone?
    let mut kbest = 0;
    let mut cbest = -2.0;
    for (k, ray) in w.rays.iter().enumerate() {
        let c = vhat.dot(ray.dir);
        if c > cbest {
            cbest = c;
            kbest = k;
        }
    }
    let cos45 = std::f64::consts::FRAC_1_SQRT_2;
    if cbest >= cos45 - 1e-12 {
        let ray = &w.rays[kbest];
        let prof = &profiles[pair_index(ray.pair.0, ray.pair.1)];
        let sd = sol.sdist(x, 0.0, ray.pair.0, ray.pair.1);
        if s > eps {
            prof.value(sd / eps, out);
            return RegionTag::Profile;
        }
        // inner interface wedge: traces on I, H (arc), R (side boundary)
        let bound = if sd >= 0.0 { ray.bound_pos } else { ray.bound_neg };
        let corner_arg = {
            let p = V2::new(
                w.center.x + eps * bound.x,
                w.center.y + eps * bound.y,
            );
            sol.sdist(p, 0.0, ray.pair.0, ray.pair.1) / eps
        };
        let dim = out.len();
        let mut u_i = vec![0.0; dim];
        let mut u_h = vec![0.0; dim];
        let mut u_r = vec![0.0; dim];
        let mut mid = vec![0.0; dim];
        let mut cornerv = vec![0.0; dim];
        prof.value(0.0, &mut mid);
        prof.value(corner_arg, &mut cornerv);
        // u_I at the foot on the interface ray
        let ell = v.dot(ray.dir).clamp(0.0, eps);
        for c in 0..dim {
            u_i[c] = (ell / eps) * mid[c] + (1.0 - ell / eps) * bary[c];
        }
        // u_R at the foot on the boundary ray
        let zr = v.dot(bound).clamp(0.0, eps);
        for c in 0..dim {
            u_r[c] = (zr / eps) * cornerv[c] + (1.0 - zr / eps) * bary[c];
        }
        // u_H at the radial projection onto the arc
        let phi = vhat.dot(ray.dir).clamp(-1.0, 1.0).acos();
        let wh = (phi / std::f64::consts::FRAC_PI_4).clamp(0.0, 1.0);
        for c in 0..dim {
            u_h[c] = wh * cornerv[c] + (1.0 - wh) * mid[c];
        }
        // distances to the three boundaries
        let d_i = seg_dist(v, ray.dir, eps);
        let d_r = seg_dist(v, bound, eps);
        let d_h = (eps - s).max(0.0);
        let (wi, whh, wr) = product_weights(d_i, d_h, d_r);
        for c in 0..dim {
            out[c] = wi * u_i[c] + whh * u_h[c] + wr * u_r[c];
        }
        RegionTag::InterfaceWedge
    } else {
        // phase cone: find the gap whose cone contains the direction
        let mut gi = 0;
        let mut gbest = -2.0;
        for (k, gap) in w.gaps.iter().enumerate() {
            let c = vhat.dot(gap.axis);
            if c > gbest {
                gbest = c;
                gi = k;
            }
        }
        let gap = &w.gaps[gi];
        let dim = out.len();
        let prof_a = &profiles[pair_index(
            w.rays[gap.ray_a].pair.0,
            w.rays[gap.ray_a].pair.1,
        )];
        let prof_b = &profiles[pair_index(
            w.rays[gap.ray_b].pair.0,
            w.rays[gap.ray_b].pair.1,
        )];
        let axis_c = v.dot(gap.axis);
        let chord = eps * FRAC_PI_12.cos();
        if axis_c <= chord {
            // inner phase wedge: traces on the two boundary rays and the
            // chord S
            let mut ca = vec![0.0; dim];
            let mut cb = vec![0.0; dim];
            prof_a.value(gap.corner_arg_a, &mut ca);
            prof_b.value(gap.corner_arg_b, &mut cb);
            let za = v.dot(gap.dir_a).clamp(0.0, eps);
            let zb = v.dot(gap.dir_b).clamp(0.0, eps);
            let mut u_a = vec![0.0; dim];
            let mut u_b = vec![0.0; dim];
            let mut u_s = vec![0.0; dim];
            for c in 0..dim {
                u_a[c] = (za / eps) * ca[c] + (1.0 - za / eps) * bary[c];
                u_b[c] = (zb / eps) * cb[c] + (1.0 - zb / eps) * bary[c];
            }
            // position along the chord from the b corner
            let half_w = eps * FRAC_PI_12.sin();
            let sc = ((v.dot(gap.axis_perp) + half_w) / (2.0 * half_w)).clamp(0.0, 1.0);
            for c in 0..dim {
                u_s[c] = sc * ca[c] + (1.0 - sc) * cb[c];
            }
            let d_a = seg_dist(v, gap.dir_a, eps);
            let d_b = seg_dist(v, gap.dir_b, eps);
            let d_s = chord_dist(v, gap, eps);
            let (wa, ws, wb) = product_weights(d_a, d_s, d_b);
            for c in 0..dim {
                out[c] = wa * u_a[c] + ws * u_s[c] + wb * u_b[c];
            }
            RegionTag::PhaseWedge
        } else {
            // outer blend between the two rescaled profiles in (s, h)
            // coordinates
            let htilde = axis_c / FRAC_PI_12.cos();
            let half_w = htilde * FRAC_PI_12.sin();
            let lam = ((v.dot(gap.axis_perp) + half_w) / (2.0 * half_w)).clamp(0.0, 1.0);
            // projections along the s-axis onto the boundary rays
            let pa = w
                .center
                .add(gap.dir_a.scale(htilde));
            let pb = w
                .center
                .add(gap.dir_b.scale(htilde));
            let ra = &w.rays[gap.ray_a];
            let rb = &w.rays[gap.ray_b];
            let sda = sol.sdist(pa, 0.0, ra.pair.0, ra.pair.1);
            let sdb = sol.sdist(pb, 0.0, rb.pair.0, rb.pair.1);
            let mut ua = vec![0.0; dim];
            let mut ub = vec![0.0; dim];
            prof_a.value(sda / eps, &mut ua);
            prof_b.value(sdb / eps, &mut ub);
            for c in 0..dim {
                out[c] = lam * ua[c] + (1.0 - lam) * ub[c];
            }
            RegionTag::OuterBlend
        }
    }
}

/// Distance from v (junction frame) to the segment t * dir, t in [0, len].
fn seg_dist(v: V2, dir: V2, len: f64) -> f64 {
    let t = v.dot(dir).clamp(0.0, len);
    v.sub(dir.scale(t)).norm()
}

/// Distance to the chord segment of a phase cone.
fn chord_dist(v: V2, gap: &GapSpec, eps: f64) -> f64 {
    let chord = eps * FRAC_PI_12.cos();
    let half_w = eps * FRAC_PI_12.sin();
    let a = v.dot(gap.axis) - chord;
    let p = v.dot(gap.axis_perp).clamp(-half_w, half_w);
    let dp = v.dot(gap.axis_perp) - p;
    (a * a + dp * dp).sqrt()
}

/// Transfinite product weights: each boundary's weight is the normalized
/// product of the distances to the other two, so every boundary trace is
/// reproduced exactly.
fn product_weights(d1: f64, d2: f64, d3: f64) -> (f64, f64, f64) {
    let p1 = d2 * d3;
    let p2 = d1 * d3;
    let p3 = d1 * d2;
    let sum = p1 + p2 + p3;
    if sum <= 0.0 {
        // at a corner: split between the two touching boundaries
        if d1 <= 1e-300 && d2 <= 1e-300 {
            return (0.5, 0.5, 0.0);
        }
        if d1 <= 1e-300 && d3 <= 1e-300 {
            return (0.5, 0.0, 0.5);
        }
        return (0.0, 0.5, 0.5);
    }
    (p1 / sum, p2 / sum, p3 / sum)
}

/// Initial relative entropy and the weighted L1 phase errors of a field.
pub fn certify_preparedness(
    data: &InitialData,
    sol: &StrongSolution,
    calib: &CalibrationField,
    spec: &PotentialSpec,
    ind: &crate::indicators::IndicatorSet,
) -> (f64, Vec<f64>) {
    let e_rel = crate::diagnostics::relative_entropy(&data.field, calib, spec, ind, 0.0);
    let (_, weighted) = crate::diagnostics::bulk_errors(&data.field, sol, calib, ind, 0.0);
    (e_rel, weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry2d::{make_scenario, ScenarioKind, SQRT3};
    use crate::simplex::build_simplex;

    fn setup(kind: ScenarioKind, l: f64, t_end: f64) -> (StrongSolution, PotentialSpec, Vec<Profile1D>) {
        let sol = make_scenario(kind, l, t_end).unwrap();
        let spec = PotentialSpec::new(build_simplex(3, 0.25, std::f64::consts::PI / 12.0).unwrap());
        let profiles = profiles_for(&spec, &sol, 2.0).unwrap();
        (sol, spec, profiles)
    }

    #[test]
    fn flat_layer_matches_profile_formula() {
        let (sol, spec, profiles) = setup(ScenarioKind::Flat, 1.28, 0.004);
        let eps = 0.04;
        let data = build_initial(&sol, &spec, &profiles, eps, 256, 256).unwrap();
        let mut expect = vec![0.0; 2];
        for iy in 0..256 {
            let (x, y) = data.field.cell_center(7, iy);
            let sd = sol.sdist(V2::new(x, y), 0.0, 0, 1);
            profiles[0].value(sd / eps, &mut expect);
            let idx = iy * 256 + 7;
            assert!((data.field.data[0][idx] - expect[0]).abs() < 1e-14);
            assert!((data.field.data[1][idx] - expect[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn junction_center_is_the_barycenter_and_far_field_is_pure() {
        let (sol, spec, profiles) = setup(ScenarioKind::TripleY, 0.6 * SQRT3, 0.01);
        let eps = 0.02;
        let r = 0.45 * sol.cell_a;
        let wedges: Vec<_> = (0..sol.junctions.len())
            .map(|k| wedge_decompose(&sol, k, r, 0.5 * r, eps).unwrap())
            .collect();
        let bary = spec.geom.barycenter().to_vec();
        let mut u = vec![0.0; 2];
        // exactly at a junction: the barycenter
        eval_initial(&sol, &profiles, &wedges, &bary, eps, sol.junctions[0], &mut u);
        assert!((u[0] - bary[0]).abs() < 1e-12 && (u[1] - bary[1]).abs() < 1e-12);
        // far field: the pure phase of the region
        let probe = V2::new(0.23, 0.125);
        let ph = sol.phase_of(probe, 0.0);
        let d = sol.dist_to_network(probe, 0.0);
        if d > 2.5 * eps {
            eval_initial(&sol, &profiles, &wedges, &bary, eps, probe, &mut u);
            let alpha = spec.geom.vertex(ph);
            assert!((u[0] - alpha[0]).abs() < 1e-12 && (u[1] - alpha[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn wedge_decomposition_scales_and_partition() {
        let (sol, _, _) = setup(ScenarioKind::TripleY, 0.6 * SQRT3, 0.01);
        let r = 0.45 * sol.cell_a;
        assert!(wedge_decompose(&sol, 0, r, 0.5 * r, 0.06).is_err()); // eps >= rho
        let w = wedge_decompose(&sol, 0, r, 0.5 * r, 0.02).unwrap();
        assert_eq!(w.rays.len(), 3);
        assert_eq!(w.gaps.len(), 3);
        // boundary rays sit at 45 degrees from the interface rays
        for ray in &w.rays {
            assert!((ray.dir.dot(ray.bound_pos) - (0.5f64).sqrt()).abs() < 1e-12);
            assert!((ray.dir.dot(ray.bound_neg) - (0.5f64).sqrt()).abs() < 1e-12);
        }
        // disjoint cover of the ball: each direction lands in exactly one
        // cone (interface cone when within 45 deg of a ray, else one gap)
        let cos45 = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..1000 {
            let ang = std::f64::consts::TAU * k as f64 / 1000.0;
            let d = V2::from_angle(ang);
            let n_iface = w
                .rays
                .iter()
                .filter(|r| d.dot(r.dir) >= cos45 - 1e-12)
                .count();
            let n_gap = w
                .gaps
                .iter()
                .filter(|g| {
                    d.dot(g.axis) >= (FRAC_PI_12).cos() - 1e-12
                })
                .count();
            assert!(
                n_iface + n_gap >= 1,
                "direction {ang} not covered: {n_iface} {n_gap}"
            );
            assert!(n_iface <= 1);
        }
        // junction phases: all three present in the gaps
        let mut phases: Vec<usize> = w.gaps.iter().map(|g| g.phase).collect();
        phases.sort();
        assert_eq!(phases, vec![0, 1, 2]);
    }

    #[test]
    fn area_of_eps_wedge_scales_like_eps_squared() {
        let (sol, _, _) = setup(ScenarioKind::TripleY, 0.6 * SQRT3, 0.01);
        let r = 0.45 * sol.cell_a;
        // count grid samples inside the eps-ball of a junction, ratio to
        // eps^2 stable across eps
        let mut ratios = Vec::new();
        for &eps in &[0.04, 0.02, 0.01] {
            let w = wedge_decompose(&sol, 0, r, 0.5 * r, eps * 0.9).unwrap();
            let m = 400;
            let mut count = 0usize;
            for iy in 0..m {
                for ix in 0..m {
                    let p = V2::new(
                        w.center.x - 1.5 * eps + 3.0 * eps * (ix as f64 + 0.5) / m as f64,
                        w.center.y - 1.5 * eps + 3.0 * eps * (iy as f64 + 0.5) / m as f64,
                    );
                    if sol.pdiff(p, w.center).norm() <= eps {
                        count += 1;
                    }
                }
            }
            let cell = (3.0 * eps / m as f64) * (3.0 * eps / m as f64);
            ratios.push(count as f64 * cell / (eps * eps));
        }
        for w in ratios.windows(2) {
            assert!((w[0] - w[1]).abs() / w[0] < 0.01, "ratios {ratios:?}");
        }
    }

    #[test]
    fn initial_values_stay_in_the_simplex_with_bounded_gradient() {
        let (sol, spec, profiles) = setup(ScenarioKind::TripleY, 0.6 * SQRT3, 0.01);
        let eps = 0.04;
        let nx = 208;
        let ny = 120;
        let data = build_initial(&sol, &spec, &profiles, eps, nx, ny).unwrap();
        let mut u = vec![0.0; 2];
        let mut max_grad: f64 = 0.0;
        for iy in 0..ny {
            for ix in 0..nx {
                let idx = iy * nx + ix;
                data.field.value(idx, &mut u);
                assert!(
                    spec.geom.dist_to_simplex(&u) < 1e-12,
                    "value outside simplex at {idx}"
                );
                for c in 0..2 {
                    let (gx, gy) = data.field.grad_channel(c, ix, iy);
                    max_grad = max_grad.max(gx.abs().max(gy.abs()));
                }
            }
        }
        // Lipschitz bound of order 1/eps
        assert!(
            max_grad < 3.0 / eps,
            "gradient {max_grad} exceeds C/eps"
        );
        // continuity: no jump exceeding 10 h max|grad u|
        let hx = data.field.hx();
        let bound = 10.0 * hx * max_grad;
        for iy in 0..ny {
            for ix in 0..nx {
                let idx = iy * nx + ix;
                let idx_r = iy * nx + (ix + 1) % nx;
                for c in 0..2 {
                    let jump = (data.field.data[c][idx] - data.field.data[c][idx_r]).abs();
                    assert!(jump <= bound.max(1e-9), "jump {jump} at {ix},{iy}");
                }
            }
        }
    }

    #[test]
    fn pure_phase_field_has_zero_entropy() {
        let (sol, spec, _) = setup(ScenarioKind::Flat, 1.28, 0.004);
        let ind = crate::indicators::IndicatorSet::new(spec.clone());
        let cal = crate::calibration::build_calibration(&sol).unwrap();
        let mut field = GridField::new(64, 64, 1.28, 1.28, 0.04, 2);
        let a = spec.geom.vertex(0).to_vec();
        for c in 0..2 {
            field.data[c].fill(a[c]);
        }
        let e = crate::diagnostics::relative_entropy(&field, &cal, &spec, &ind, 0.0);
        assert!(e.abs() < 1e-12, "pure phase entropy {e}");
    }
}
