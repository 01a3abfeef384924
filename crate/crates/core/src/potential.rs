//! Strongly coercive symmetric N-well potential on the unit-edge simplex.
//!
//! The potential is assembled as a global sum of localized nonnegative terms,
//! one per edge and one per (vertex, incident edge) pair, plus an interior
//! floor. On every edge the gates form an exact partition of unity, so the
//! edge trace is exactly the double-well profile 18 r^2 (1-r)^2 (surface
//! tension 1); off the edges each term dominates one of the required growth
//! bounds:
//!
//!   * vertex terms carry the angular growth (1 + omega(beta)) relative to
//!     the radial projection,
//!   * edge terms carry the tube growth (1 + C_N dist^2) relative to the
//!     orthogonal projection,
//!   * the floor enforces the interior lower bound C_int * max_edge W.
//!
//! All gates are flat where a neighboring structure needs exact values, which
//! makes the sum C^{1,1} without any per-sector case split. A sampling
//! verifier certifies the final inequalities.

use crate::error::{Error, Result};
use crate::simplex::SimplexGeometry;
use crate::util::{gate_down, gate_down_d, gate_up, gate_up_d, unit_cube_to_barycentric, Halton};
use serde::Serialize;

pub const MAX_DIM: usize = 5;

/// Edge double-well profile at arclength r in [0,1]: 18 r^2 (1-r)^2.
#[inline]
pub fn edge_profile(r: f64) -> f64 {
    let s = r * (1.0 - r);
    18.0 * s * s
}

#[inline]
pub fn edge_profile_d(r: f64) -> f64 {
    36.0 * r * (1.0 - r) * (1.0 - 2.0 * r)
}

/// sqrt(2 W) along an edge: 6 r (1-r).
#[inline]
pub fn sqrt2w_edge(r: f64) -> f64 {
    6.0 * r * (1.0 - r)
}

/// Geodesic distance from a vertex along its edge: int_0^r sqrt(2W) = 3r^2 - 2r^3.
#[inline]
pub fn dist_w_closed_form(r: f64) -> f64 {
    r * r * (3.0 - 2.0 * r)
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub geom: SimplexGeometry,
    /// Growth exponent at the wells (quadratic).
    pub q: u32,
    /// Coefficient of the edge profile, forced by the unit surface tension.
    pub edge_coeff: f64,
    /// Angular growth plateau constant (Def 6.1(3)).
    pub c_omega: f64,
    /// Tube growth constant (6.5).
    pub c_n: f64,
    /// Interior floor constant (6.6).
    pub c_int: f64,
    /// Nonconvexity path-length factor entering the C_int budget.
    pub c_m: f64,
    /// Lipschitz slope of the exterior gradient extension.
    pub lipschitz_ext: f64,
    /// Edge growth constants on the edges (6.4a) and Lipschitz constant of
    /// sqrt(2W) along edges (6.4b); exact for this profile.
    pub c_gamma: f64,
    pub big_c_gamma: f64,
    pub l_gamma: f64,
    // cached gate parameters
    tube_w: f64,
    r_gate: f64,
    f_max: f64,
    // flattened vertex/pair tables for the hot path
    dim: usize,
    n: usize,
    verts: Vec<f64>,
    /// unit direction alpha_m - alpha_l for each ordered incidence (l, m)
    dirs: Vec<f64>,
}

impl PotentialSpec {
    /// Build the default potential for a given simplex geometry.
    pub fn new(geom: SimplexGeometry) -> Self {
        let n = geom.n_phases;
        let nm2 = (n as f64 - 2.0).max(0.0);
        let c_omega = 16.0 * nm2 * nm2 + 8.0;
        let r_u = geom.r_u;
        let beta_n = geom.beta_n;
        let l_gamma: f64 = 6.0;
        let c_gamma: f64 = 18.0;
        let (c_n, tube_w) = if n >= 3 {
            let sb = beta_n.sin();
            let cb = beta_n.cos();
            let tb = beta_n.tan();
            let c1 = 5.0 / (2.0 * r_u * (1.0 - r_u))
                + 25.0 * sb * sb / (16.0 * (1.0 - r_u) * (1.0 - r_u));
            let c2 = 2.0 * l_gamma / (2.0 * c_gamma).sqrt()
                + tb * tb * l_gamma * l_gamma / (2.0 * c_gamma);
            // safety factor 2 on the closed-form sufficient constant
            (
                2.0 * (c1 + c2 / (r_u * r_u * cb * cb) + c1 * c2 * tb * tb),
                r_u * sb,
            )
        } else {
            (0.0, 0.0)
        };
        let c_m = 4.0;
        let m_fac = 1.0 + 4.0 * nm2 * r_u;
        let c_int = 2.0 * (4.0 / 3.0) * c_m * c_m * m_fac * m_fac;
        let f_max = c_int * 9.0 / 8.0;

        let dim = geom.dim;
        let mut verts = vec![0.0; n * dim];
        for i in 0..n {
            verts[i * dim..(i + 1) * dim].copy_from_slice(geom.vertex(i));
        }
        let mut dirs = vec![0.0; n * n * dim];
        for l in 0..n {
            for m in 0..n {
                if l != m {
                    let d = geom.edge_dir(l, m);
                    dirs[(l * n + m) * dim..(l * n + m + 1) * dim].copy_from_slice(&d);
                }
            }
        }

        PotentialSpec {
            q: 2,
            edge_coeff: 18.0,
            c_omega,
            c_n,
            c_int,
            c_m,
            lipschitz_ext: 10.0,
            c_gamma,
            big_c_gamma: c_gamma,
            l_gamma,
            tube_w,
            r_gate: 0.49,
            f_max,
            dim,
            n,
            verts,
            dirs,
            geom,
        }
    }

    pub fn tube_width(&self) -> f64 {
        self.tube_w
    }

    pub fn floor_height(&self) -> f64 {
        self.f_max
    }

    /// Maximum of W over the edges (attained at edge midpoints).
    pub fn edge_max(&self) -> f64 {
        9.0 / 8.0
    }

    /// Angular growth function omega (Def 6.1(3)); ramps 0 -> C_omega on
    /// [0, beta_N] and stays saturated.
    #[inline]
    pub fn omega(&self, beta: f64) -> f64 {
        self.c_omega * crate::util::smoothstep5(beta / self.geom.beta_n)
    }

    #[inline]
    fn omega_d(&self, beta: f64) -> f64 {
        self.c_omega * crate::util::smoothstep5_d(beta / self.geom.beta_n) / self.geom.beta_n
    }

    /// Constant-speed edge potential on [-1, 1]: (9/8)(1 - s^2)^2.
    pub fn edge_potential(&self, s: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::domain(format!("edge parameter {s} outside [-1,1]")));
        }
        let t = 1.0 - s * s;
        Ok(9.0 / 8.0 * t * t)
    }

    /// Geodesic distance from alpha_i along the edge, arclength r in [0,1].
    pub fn dist_w_edge(&self, _i: usize, _j: usize, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(format!("edge arclength {r} outside [0,1]")));
        }
        Ok(dist_w_closed_form(r))
    }

    /// Evaluate W anywhere in phase space (exterior extension included).
    pub fn eval_w(&self, u: &[f64]) -> f64 {
        let d_out = self.geom.dist_to_simplex(u);
        if d_out == 0.0 {
            return self.w_dw_raw(u, None);
        }
        // extension anchored at the boundary projection, consistent with the
        // radially clamped gradient field
        let b = self.geom.project_to_simplex(u);
        let mut dw = [0.0; MAX_DIM];
        let wb = self.w_dw_raw(&b, Some(&mut dw));
        let mut lin = 0.0;
        for k in 0..self.dim {
            lin += dw[k] * (u[k] - b[k]);
        }
        wb + lin + 0.5 * self.lipschitz_ext * d_out * d_out
    }

    /// Gradient of W with the inward-restoring Lipschitz extension outside
    /// the simplex: dW(u) = dW(pi(u)) + L_ext (u - pi(u)).
    pub fn eval_dw(&self, u: &[f64], out: &mut [f64]) {
        let d_out = self.geom.dist_to_simplex(u);
        if d_out == 0.0 {
            self.w_dw_raw(u, Some(out));
            return;
        }
        let b = self.geom.project_to_simplex(u);
        let mut dwb = [0.0; MAX_DIM];
        self.w_dw_raw(&b, Some(&mut dwb));
        for k in 0..self.dim {
            out[k] = dwb[k] + self.lipschitz_ext * (u[k] - b[k]);
        }
    }

    /// Core evaluation: value, and gradient when `grad` is given.
    fn w_dw_raw(&self, u: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let dim = self.dim;
        let n = self.n;
        if let Some(g) = grad.as_deref_mut() {
            g[..dim].fill(0.0);
        }
        let beta_n = if n >= 3 { self.geom.beta_n } else { 1.0 };
        let r_u = self.geom.r_u;
        let w_t = self.tube_w;
        let r_g = self.r_gate;
        let pi6 = std::f64::consts::FRAC_PI_6;
        let pi3 = std::f64::consts::FRAC_PI_3;

        let mut total = 0.0;

        // scratch
        let mut du = [0.0; MAX_DIM]; // u - alpha_l
        let mut dperp = [0.0; MAX_DIM]; // u - alpha_l - r e

        // distances to vertices (squared), reused by the floor
        let mut rho2 = [0.0f64; 8];
        for (l, item) in rho2.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for k in 0..dim {
                let w = u[k] - self.verts[l * dim + k];
                s += w * w;
            }
            *item = s;
        }

        // pure phase fast path
        for l in 0..n {
            if rho2[l] < 1e-28 {
                return 0.0;
            }
        }

        // ---- edge tube terms and vertex terms, per ordered incidence ----
        for l in 0..n {
            for m in 0..n {
                if m == l {
                    continue;
                }
                let e = &self.dirs[(l * n + m) * dim..(l * n + m + 1) * dim];
                let a = &self.verts[l * dim..(l + 1) * dim];
                let mut r = 0.0;
                for k in 0..dim {
                    du[k] = u[k] - a[k];
                    r += du[k] * e[k];
                }
                let rho_sq = rho2[l];
                let d2 = (rho_sq - r * r).max(0.0);
                let rho = rho_sq.sqrt();
                let beta = if n >= 3 { d2.sqrt().atan2(r) } else { 0.0 };

                // ---- edge term Phi_{l,m}, counted once per pair (l < m) ----
                if l < m {
                    let theta = if n >= 3 {
                        gate_down(d2, w_t * w_t, 4.0 * w_t * w_t)
                    } else {
                        1.0
                    };
                    let rmin = r.min(1.0 - r);
                    let xi = gate_up(rmin, r_u, r_g);
                    if theta > 0.0 && xi > 0.0 {
                        let er = edge_profile(r);
                        let fac = 1.0 + self.c_n * d2;
                        total += er * fac * theta * xi;
                        if let Some(g) = grad.as_deref_mut() {
                            let der = edge_profile_d(r);
                            let xi_d = {
                                let s = gate_up_d(rmin, r_u, r_g);
                                if r <= 1.0 - r {
                                    s
                                } else {
                                    -s
                                }
                            };
                            let coeff_r = der * fac * theta * xi + er * fac * theta * xi_d;
                            let theta_d = if n >= 3 {
                                gate_down_d(d2, w_t * w_t, 4.0 * w_t * w_t)
                            } else {
                                0.0
                            };
                            let coeff_d2 = er * (self.c_n * theta + fac * theta_d) * xi;
                            for k in 0..dim {
                                dperp[k] = du[k] - r * e[k];
                                g[k] += coeff_r * e[k] + coeff_d2 * 2.0 * dperp[k];
                            }
                        }
                    }
                }

                // ---- vertex term V^m_l ----
                if n == 2 {
                    let ka = gate_down(r, r_u, r_g);
                    if ka > 0.0 {
                        let erho = edge_profile(rho);
                        total += erho * ka;
                        if let Some(g) = grad.as_deref_mut() {
                            let derho = edge_profile_d(rho);
                            let ka_d = gate_down_d(r, r_u, r_g);
                            for k in 0..dim {
                                g[k] += derho * ka * du[k] / rho + erho * ka_d * e[k];
                            }
                        }
                    }
                } else {
                    let ka = gate_down(r, r_u, r_g);
                    let aa = gate_down(beta, pi6, pi3);
                    if ka > 0.0 && aa > 0.0 {
                        let om = self.omega(beta);
                        let kap = gate_down(beta, beta_n, 2.0 * beta_n);
                        let f = 1.0 + om + self.c_n * d2 * kap;
                        let erho = edge_profile(rho);
                        total += erho * f * ka * aa;
                        if let Some(g) = grad.as_deref_mut() {
                            let derho = edge_profile_d(rho);
                            let ka_d = gate_down_d(r, r_u, r_g);
                            let aa_d = gate_down_d(beta, pi6, pi3);
                            let om_d = self.omega_d(beta);
                            let kap_d = gate_down_d(beta, beta_n, 2.0 * beta_n);
                            let d = d2.sqrt();
                            let c_rho = derho * f * ka * aa;
                            let c_beta = erho * (om_d + self.c_n * d2 * kap_d) * ka * aa
                                + erho * f * ka * aa_d;
                            let c_d2 = erho * self.c_n * kap * ka * aa;
                            let c_r = erho * f * ka_d * aa;
                            if d > 1e-14 {
                                let ib = 1.0 / rho_sq;
                                for k in 0..dim {
                                    let pk = du[k] - r * e[k];
                                    let gbeta = (r * pk / d - d * e[k]) * ib;
                                    g[k] += c_rho * du[k] / rho
                                        + c_beta * gbeta
                                        + c_d2 * 2.0 * pk
                                        + c_r * e[k];
                                }
                            } else {
                                // on the edge axis every angular gate is flat
                                for k in 0..dim {
                                    g[k] += c_rho * du[k] / rho + c_r * e[k];
                                }
                            }
                        }
                    }
                }
            }
        }

        // ---- interior floor ----
        if n >= 3 {
            let w_in = 0.55 * w_t;
            let pairs = self.geom.pairs();
            let nf = pairs.len() + n;
            let mut factors = [0.0f64; 24];
            debug_assert!(nf <= 24);
            let mut prod = 1.0;
            let mut zeros = 0usize;
            for (pi, &(i, j)) in pairs.iter().enumerate() {
                let e = &self.dirs[(i * n + j) * dim..(i * n + j + 1) * dim];
                let a = &self.verts[i * dim..(i + 1) * dim];
                let mut r = 0.0;
                let mut n2 = 0.0;
                for k in 0..dim {
                    let w = u[k] - a[k];
                    r += w * e[k];
                    n2 += w * w;
                }
                let d2 = (n2 - r * r).max(0.0);
                let f = gate_up(d2, w_in * w_in, w_t * w_t);
                factors[pi] = f;
                if f == 0.0 {
                    zeros += 1;
                }
                prod *= f;
            }
            for l in 0..n {
                let f = gate_up(rho2[l], 0.64 * r_u * r_u, r_u * r_u);
                factors[pairs.len() + l] = f;
                if f == 0.0 {
                    zeros += 1;
                }
                prod *= f;
            }
            total += self.f_max * prod;
            if zeros <= 1 {
                if let Some(g) = grad.as_deref_mut() {
                    for t in 0..nf {
                        let mut rest = 1.0;
                        for s in 0..nf {
                            if s != t {
                                rest *= factors[s];
                            }
                        }
                        if rest == 0.0 {
                            continue;
                        }
                        if t < pairs.len() {
                            let (i, j) = pairs[t];
                            let e = &self.dirs[(i * n + j) * dim..(i * n + j + 1) * dim];
                            let a = &self.verts[i * dim..(i + 1) * dim];
                            let mut r = 0.0;
                            for k in 0..dim {
                                du[k] = u[k] - a[k];
                                r += du[k] * e[k];
                            }
                            let d2 = (rho2[i] - r * r).max(0.0);
                            let fd = gate_up_d(d2, w_in * w_in, w_t * w_t);
                            if fd != 0.0 {
                                for k in 0..dim {
                                    let pk = du[k] - r * e[k];
                                    g[k] += self.f_max * rest * fd * 2.0 * pk;
                                }
                            }
                        } else {
                            let l = t - pairs.len();
                            let fd = gate_up_d(rho2[l], 0.64 * r_u * r_u, r_u * r_u);
                            if fd != 0.0 {
                                for k in 0..dim {
                                    let w = u[k] - self.verts[l * dim + k];
                                    g[k] += self.f_max * rest * fd * 2.0 * w;
                                }
                            }
                        }
                    }
                }
            }
        }

        total
    }
}

/// One verified inequality: its minimum sampled margin and the witness point.
#[derive(Debug, Clone, Serialize)]
pub struct MarginEntry {
    pub name: String,
    pub min_margin: f64,
    pub witness: Vec<f64>,
    /// Fitted constant where the inequality has a free constant.
    pub fitted: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub entries: Vec<MarginEntry>,
    pub pass: bool,
}

pub const MARGIN_TOL: f64 = -1e-10;

impl AssumptionReport {
    pub fn failed(&self) -> Vec<&MarginEntry> {
        self.entries
            .iter()
            .filter(|e| e.min_margin < MARGIN_TOL)
            .collect()
    }
}

pub(crate) struct MarginAcc {
    name: &'static str,
    min: f64,
    witness: Vec<f64>,
    pub fitted: Option<f64>,
    samples: usize,
}

impl MarginAcc {
    pub fn new(name: &'static str) -> Self {
        MarginAcc {
            name,
            min: f64::INFINITY,
            witness: Vec::new(),
            fitted: None,
            samples: 0,
        }
    }
    pub fn push(&mut self, margin: f64, witness: &[f64]) {
        self.samples += 1;
        if margin < self.min {
            self.min = margin;
            self.witness = witness.to_vec();
        }
    }
    pub fn into_entry(self) -> MarginEntry {
        MarginEntry {
            name: self.name.to_string(),
            min_margin: if self.samples == 0 { 0.0 } else { self.min },
            witness: self.witness,
            fitted: self.fitted,
            samples: self.samples,
        }
    }
}

impl PotentialSpec {
    /// Sampling certification of (A1)-(A3) and the Def 6.1 growth items.
    /// `n_samples` quasi-random simplex points are classified and each
    /// applicable inequality margin is recorded; pass = all margins >= -1e-10.
    pub fn verify_assumptions(&self, n_samples: usize, seed: u64) -> Result<AssumptionReport> {
        if n_samples < 10_000 {
            return Err(Error::config(
                "verify_assumptions needs at least 1e4 samples",
            ));
        }
        self.verify_with_constants(n_samples, seed, self.c_n, self.c_int)
    }

    /// Same checks with externally supplied constants (used by falsification
    /// tests that deliberately overstate a constant).
    pub fn verify_with_constants(
        &self,
        n_samples: usize,
        seed: u64,
        c_n_check: f64,
        c_int_check: f64,
    ) -> Result<AssumptionReport> {
        let g = &self.geom;
        let n = g.n_phases;
        let dim = g.dim;
        let mut acc_a1_low = MarginAcc::new("a1_lower_quadratic");
        let mut acc_a1_up = MarginAcc::new("a1_upper_quadratic");
        let mut acc_a2 = MarginAcc::new("a2_restoring_on_boundary_ring");
        let mut acc_rad = MarginAcc::new("def61_3_radial_angular_growth");
        let mut acc_edge_lo = MarginAcc::new("def61_4a_edge_growth_lower");
        let mut acc_edge_hi = MarginAcc::new("def61_4a_edge_growth_upper");
        let mut acc_lip = MarginAcc::new("def61_4b_edge_sqrt2w_lipschitz");
        let mut acc_tube = MarginAcc::new("def61_5_tube_growth");
        let mut acc_floor = MarginAcc::new("def61_6_interior_floor");
        let mut acc_sym = MarginAcc::new("symmetry_under_phase_permutations");
        let mut acc_action = MarginAcc::new("a3_edge_action_normalization");
        let mut acc_omega = MarginAcc::new("def61_3_omega_exceeds_c_omega");
        let mut acc_minpath = MarginAcc::new("a3_no_cheaper_path_spot_check");

        // fitted A1 constants recorded alongside fixed conservative ones
        let c_low = 9.0;
        let mut fit_low = f64::INFINITY;
        let mut fit_high: f64 = 0.0;

        let mut halton = Halton::new(dim.min(6), seed);
        let mut cube = vec![0.0; dim];
        let mut bar = vec![0.0; n];

        // permutations to test symmetry: adjacent transpositions + a cycle
        let mut perms: Vec<Vec<usize>> = Vec::new();
        for i in 0..n - 1 {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, i + 1);
            perms.push(p);
        }
        let cyc: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        perms.push(cyc);

        for _ in 0..n_samples {
            halton.next_point(&mut cube);
            unit_cube_to_barycentric(&cube, &mut bar);
            let u = g.from_barycentric(&bar);
            let wu = self.eval_w(&u);
            let lbl = g.classify_clamped(&u);
            let (i, j) = lbl.sector;

            // (A1) two-sided quadratic bounds hold in a neighborhood of each
            // well; we certify them on the inner ball portion where the
            // interior floor has not yet engaged.
            if let Some(v) = lbl.in_vertex_ball {
                let rho = g.dist_to_vertex(&u, v);
                let q2 = rho * rho;
                if q2 > 1e-20 && rho <= 0.8 * g.r_u {
                    acc_a1_low.push(wu - c_low * q2, &u);
                    let ratio = wu / q2;
                    fit_low = fit_low.min(ratio);
                    fit_high = fit_high.max(ratio);
                    acc_a1_up.push(2000.0 * q2 - wu, &u);
                }
            }

            // Def 6.1(3): radial growth inside the ball, per the assigned half
            if n >= 3 {
                if let Some(v) = lbl.in_vertex_ball {
                    if v == lbl.half_vertex {
                        let other = if v == i { j } else { i };
                        let rho = g.dist_to_vertex(&u, v);
                        if rho > 1e-12 {
                            let beta = g.angle_beta_raw(&u, v, other);
                            let w_rad = edge_profile(rho);
                            acc_rad.push(wu - (1.0 + self.omega(beta)) * w_rad, &u);
                        }
                    }
                }
                // (6.5) in the tube outside the balls
                if lbl.in_vertex_ball.is_none() {
                    let d = g.dist_to_edge(&u, i, j);
                    if d <= self.tube_w {
                        let (rc, _, _) = g.edge_projection(&u, i, j);
                        let w_pr = edge_profile(rc);
                        acc_tube.push(wu - (1.0 + c_n_check * d * d) * w_pr, &u);
                    } else {
                        // (6.6) interior floor region
                        let mut in_any_tube = false;
                        for &(a, b) in g.pairs() {
                            if g.dist_to_edge(&u, a, b) <= self.tube_w {
                                in_any_tube = true;
                                break;
                            }
                        }
                        if !in_any_tube {
                            acc_floor.push(wu - c_int_check * self.edge_max(), &u);
                        }
                    }
                }
            }

            // symmetry under the isometries realizing phase permutations
            let pidx = acc_sym.samples % perms.len();
            let v = g.permute_point(&u, &perms[pidx]);
            let wv = self.eval_w(&v);
            acc_sym.push(1e-12 - (wu - wv).abs(), &u);
        }

        // (A2): restoring gradient on a ring outside the simplex
        {
            let h_ring = 0.02;
            let mut halton2 = Halton::new(dim.min(6), seed + 1);
            let mut dw = vec![0.0; dim];
            for _ in 0..2000 {
                halton2.next_point(&mut cube);
                unit_cube_to_barycentric(&cube, &mut bar);
                let p = g.from_barycentric(&bar);
                let bc = g.barycenter();
                let mut dir = vec![0.0; dim];
                let mut nn = 0.0;
                for k in 0..dim {
                    dir[k] = p[k] - bc[k];
                    nn += dir[k] * dir[k];
                }
                if nn < 1e-20 {
                    continue;
                }
                let nn = nn.sqrt();
                // exterior point far beyond the boundary, pulled back to a ring
                let far: Vec<f64> = (0..dim).map(|k| bc[k] + dir[k] / nn * 3.0).collect();
                let bpt = g.project_to_simplex(&far);
                let mut out = vec![0.0; dim];
                let mut on = 0.0;
                for k in 0..dim {
                    out[k] = far[k] - bpt[k];
                    on += out[k] * out[k];
                }
                let on = on.sqrt();
                if on < 1e-12 {
                    continue;
                }
                let ring: Vec<f64> = (0..dim).map(|k| bpt[k] + out[k] / on * h_ring).collect();
                self.eval_dw(&ring, &mut dw);
                let mut dot = 0.0;
                for k in 0..dim {
                    dot += dw[k] * out[k] / on;
                }
                acc_a2.push(dot, &ring);
            }
        }

        // on-edge checks: growth constants, Lipschitz bound, action quadrature
        {
            let m = 4000;
            for &(i, j) in g.pairs() {
                for t in 0..=m {
                    let r = t as f64 / m as f64;
                    let u = g.point_on_edge(i, j, r);
                    let wu = self.eval_w(&u);
                    let prod = (r * r) * (1.0 - r) * (1.0 - r);
                    acc_edge_lo.push(wu - self.c_gamma * prod + 1e-13, &u);
                    acc_edge_hi.push(self.big_c_gamma * prod - wu + 1e-13, &u);
                    if t > 0 {
                        let r0 = (t - 1) as f64 / m as f64;
                        let u0 = g.point_on_edge(i, j, r0);
                        let q = ((2.0 * wu).sqrt() - (2.0 * self.eval_w(&u0)).sqrt()).abs()
                            / (r - r0);
                        acc_lip.push(self.l_gamma - q + 1e-9, &u);
                    }
                }
                // action integral by composite Simpson
                let mut simpson = 0.0;
                for t in 0..m / 2 {
                    let r0 = (2 * t) as f64 / m as f64;
                    let r1 = (2 * t + 1) as f64 / m as f64;
                    let r2 = (2 * t + 2) as f64 / m as f64;
                    let f0 = (2.0 * self.eval_w(&g.point_on_edge(i, j, r0))).sqrt();
                    let f1 = (2.0 * self.eval_w(&g.point_on_edge(i, j, r1))).sqrt();
                    let f2 = (2.0 * self.eval_w(&g.point_on_edge(i, j, r2))).sqrt();
                    simpson += (f0 + 4.0 * f1 + f2) / (3.0 * m as f64);
                }
                acc_action.push(1e-8 - (simpson - 1.0).abs(), &g.point_on_edge(i, j, 0.5));
            }
        }

        // omega exceeds C_omega on the saturated range
        if n >= 3 {
            let top = std::f64::consts::FRAC_PI_6 / (n as f64 - 2.0);
            for t in 0..=200 {
                let beta = g.beta_n + (top - g.beta_n) * t as f64 / 200.0;
                acc_omega.push(self.omega(beta) - self.c_omega, &[beta]);
            }
        }

        // necessary condition for (A3): random perturbed paths are not cheaper
        {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let segs = 200;
            let trials_per_pair = (100 / g.pairs().len()).max(10);
            for &(i, j) in g.pairs() {
                for _ in 0..trials_per_pair {
                    let amp = 0.02 + 0.08 * rng.gen::<f64>();
                    let modes: Vec<(f64, f64)> = (0..3)
                        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
                        .collect();
                    let e = g.edge_dir(i, j);
                    let bc = g.barycenter();
                    let mid = g.point_on_edge(i, j, 0.5);
                    let mut perp = vec![0.0; dim];
                    let mut pn = 0.0;
                    for k in 0..dim {
                        perp[k] = bc[k] - mid[k];
                        pn += perp[k] * perp[k];
                    }
                    if pn < 1e-20 {
                        continue;
                    }
                    for p in perp.iter_mut() {
                        *p /= pn.sqrt();
                    }
                    let mut action = 0.0;
                    let mut prev: Option<Vec<f64>> = None;
                    for s in 0..=segs {
                        let t = s as f64 / segs as f64;
                        let mut bump = 0.0;
                        for (mi, &(a, ph)) in modes.iter().enumerate() {
                            bump +=
                                a * (std::f64::consts::PI * (mi as f64 + 1.0) * t + ph).sin();
                        }
                        bump *= amp * (std::f64::consts::PI * t).sin();
                        let mut p: Vec<f64> = (0..dim)
                            .map(|k| g.vertex(i)[k] + t * e[k] + bump * perp[k])
                            .collect();
                        p = g.project_to_simplex(&p);
                        if let Some(q) = prev {
                            let mut ds = 0.0;
                            for k in 0..dim {
                                ds += (p[k] - q[k]) * (p[k] - q[k]);
                            }
                            let ds = ds.sqrt();
                            let wmid: Vec<f64> =
                                (0..dim).map(|k| 0.5 * (p[k] + q[k])).collect();
                            action += (2.0 * self.eval_w(&wmid)).sqrt() * ds;
                        }
                        prev = Some(p);
                    }
                    acc_minpath.push(action - 1.0 + 1e-8, &g.point_on_edge(i, j, 0.5));
                }
            }
        }

        let mut a1l = acc_a1_low.into_entry();
        a1l.fitted = Some(fit_low);
        let mut a1u = acc_a1_up.into_entry();
        a1u.fitted = Some(fit_high);

        let entries = vec![
            a1l,
            a1u,
            acc_a2.into_entry(),
            acc_rad.into_entry(),
            acc_edge_lo.into_entry(),
            acc_edge_hi.into_entry(),
            acc_lip.into_entry(),
            acc_tube.into_entry(),
            acc_floor.into_entry(),
            acc_sym.into_entry(),
            acc_action.into_entry(),
            acc_omega.into_entry(),
            acc_minpath.into_entry(),
        ];
        let pass = entries.iter().all(|e| e.min_margin >= MARGIN_TOL);
        Ok(AssumptionReport { entries, pass })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::build_simplex;
    use crate::util::{unit_cube_to_barycentric, Halton};

    fn spec3() -> PotentialSpec {
        PotentialSpec::new(build_simplex(3, 0.25, std::f64::consts::PI / 12.0).unwrap())
    }

    #[test]
    fn edge_potential_values() {
        let p = spec3();
        assert_eq!(p.edge_potential(1.0).unwrap(), 0.0);
        assert_eq!(p.edge_potential(-1.0).unwrap(), 0.0);
        assert!((p.edge_potential(0.0).unwrap() - 9.0 / 8.0).abs() < 1e-15);
        assert!(p.edge_potential(1.2).is_err());
        // (A3) normalization in the [-1,1] parametrization:
        // int sqrt(2 W(s)) * |gamma'| ds with |gamma'| = 1/2
        let m = 20000;
        let mut acc = 0.0;
        for t in 0..m {
            let s = -1.0 + 2.0 * (t as f64 + 0.5) / m as f64;
            acc += (2.0 * p.edge_potential(s).unwrap()).sqrt() * 0.5 * (2.0 / m as f64);
        }
        assert!((acc - 1.0).abs() < 1e-6);
    }

    #[test]
    fn w_vanishes_exactly_at_vertices_and_matches_edge_profile() {
        let p = spec3();
        let g = p.geom.clone();
        for i in 0..3 {
            assert_eq!(p.eval_w(g.vertex(i)), 0.0);
        }
        for &(i, j) in g.pairs() {
            for t in 0..=100 {
                let r = t as f64 / 100.0;
                let u = g.point_on_edge(i, j, r);
                let w = p.eval_w(&u);
                assert!(
                    (w - edge_profile(r)).abs() < 1e-12,
                    "edge ({i},{j}) r={r}: {w} vs {}",
                    edge_profile(r)
                );
            }
        }
        let u = g.point_on_edge(0, 1, 0.5);
        assert!(p.eval_w(&u) > 1.0);
    }

    #[test]
    fn dist_w_closed_form_values() {
        let p = spec3();
        assert_eq!(p.dist_w_edge(0, 1, 0.0).unwrap(), 0.0);
        assert!((p.dist_w_edge(0, 1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.dist_w_edge(0, 1, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(p.dist_w_edge(0, 1, 1.5).is_err());
    }

    #[test]
    fn barycenter_sits_on_the_floor() {
        let p = spec3();
        let w = p.eval_w(p.geom.barycenter());
        assert!(w >= p.c_int * p.edge_max());
        // frozen regression value for the default construction: full floor
        // plus the three residual tube/vertex contributions (all gated off at
        // the barycenter), i.e. exactly F_max.
        assert!(
            (w - p.floor_height()).abs() < 1e-9,
            "barycenter value {w} vs frozen {}",
            p.floor_height()
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = spec3();
        let g = p.geom.clone();
        let mut h = Halton::new(2, 11);
        let mut cube = [0.0; 2];
        let mut bar = [0.0; 3];
        let mut dw = [0.0; 2];
        let fd_h = 1e-6;
        let mut checked = 0;
        for _ in 0..10_000 {
            h.next_point(&mut cube);
            unit_cube_to_barycentric(&cube, &mut bar);
            let u = g.from_barycentric(&bar);
            if g.dist_to_simplex(&u) > 0.0 {
                continue;
            }
            p.eval_dw(&u, &mut dw);
            for k in 0..2 {
                let mut up = u.clone();
                let mut um = u.clone();
                up[k] += fd_h;
                um[k] -= fd_h;
                let fd = (p.eval_w(&up) - p.eval_w(&um)) / (2.0 * fd_h);
                let scale = 1.0 + dw[0].abs() + dw[1].abs();
                assert!(
                    (fd - dw[k]).abs() <= 1e-4 * scale,
                    "grad mismatch at {u:?}: fd={fd} analytic={}",
                    dw[k]
                );
            }
            checked += 1;
        }
        assert!(checked > 5000);
    }

    #[test]
    fn gradient_zero_at_vertices_and_tangent_on_edges() {
        let p = spec3();
        let g = p.geom.clone();
        let mut dw = [0.0; 2];
        p.eval_dw(g.vertex(0), &mut dw);
        assert!(dw[0].abs() < 1e-14 && dw[1].abs() < 1e-14);
        for t in 1..20 {
            let r = t as f64 / 20.0;
            let u = g.point_on_edge(0, 1, r);
            p.eval_dw(&u, &mut dw);
            let e = g.edge_dir(0, 1);
            let transverse = -dw[0] * e[1] + dw[1] * e[0];
            assert!(transverse.abs() < 1e-10, "r={r} transverse={transverse}");
        }
    }

    #[test]
    fn exterior_extension_restores() {
        let p = spec3();
        let u = [0.5, -0.05];
        let mut dw = [0.0; 2];
        p.eval_dw(&u, &mut dw);
        // the gradient points outward (here: -y), so -dW restores toward
        // the simplex
        assert!(dw[1] < 0.0);
        assert!(p.eval_w(&u) > p.eval_w(&[0.5, 0.0]));
    }

    #[test]
    fn second_difference_quotients_bounded() {
        let p = spec3();
        let g = p.geom.clone();
        let dirs = [
            [1.0, 0.0],
            [0.0, 1.0],
            [0.7071067811865476, 0.7071067811865476],
        ];
        let pts = [
            g.point_on_edge(0, 1, 0.3),
            vec![0.3, 0.1],
            vec![0.5, 0.2],
            g.barycenter().to_vec(),
        ];
        let mut overall: f64 = 0.0;
        for pt in &pts {
            for d in &dirs {
                for &h in &[1e-3, 1e-4, 1e-5] {
                    let up: Vec<f64> = (0..2).map(|k| pt[k] + h * d[k]).collect();
                    let um: Vec<f64> = (0..2).map(|k| pt[k] - h * d[k]).collect();
                    let q = (p.eval_w(&up) - 2.0 * p.eval_w(pt) + p.eval_w(&um)) / (h * h);
                    overall = overall.max(q.abs());
                }
            }
        }
        assert!(overall < 5e6, "second difference quotient too large: {overall}");
    }

    #[test]
    fn verifier_passes_for_default_n3() {
        let p = spec3();
        let rep = p.verify_assumptions(20_000, 42).unwrap();
        for e in &rep.entries {
            assert!(
                e.min_margin >= MARGIN_TOL,
                "{} failed with margin {} at {:?}",
                e.name,
                e.min_margin,
                e.witness
            );
        }
        assert!(rep.pass);
    }

    #[test]
    fn verifier_detects_overstated_tube_constant() {
        let p = spec3();
        let rep = p
            .verify_with_constants(20_000, 42, 100.0 * p.c_n, p.c_int)
            .unwrap();
        assert!(!rep.pass);
        let tube = rep
            .entries
            .iter()
            .find(|e| e.name == "def61_5_tube_growth")
            .unwrap();
        assert!(tube.min_margin < MARGIN_TOL);
        let g = &p.geom;
        let w = &tube.witness;
        let mind = g
            .pairs()
            .iter()
            .map(|&(i, j)| g.dist_to_edge(w, i, j))
            .fold(f64::INFINITY, f64::min);
        assert!(mind <= p.tube_width() + 1e-12);
    }

    #[test]
    fn n2_collapses_to_the_scalar_double_well() {
        let g = build_simplex(2, 0.25, 0.1).unwrap();
        let p = PotentialSpec::new(g);
        for t in 0..=20 {
            let r = t as f64 / 20.0;
            assert!((p.eval_w(&[r]) - edge_profile(r)).abs() < 1e-13);
        }
        let mut dw = [0.0];
        p.eval_dw(&[0.3], &mut dw);
        assert!((dw[0] - edge_profile_d(0.3)).abs() < 1e-8);
    }
}
