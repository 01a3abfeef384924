//! Gradient-flow calibration fields for the model strong solutions.
//!
//! Away from junctions each interface carries a tube field
//! xi_{i,j} = n zeta(dist) with the compactly supported profile
//! zeta(d) = (1 - (d/r_cal)^2)_+^2, split antisymmetrically between the two
//! phases. Near a junction the three tube fields blend into the Mercedes
//! star xi_i = r_hat_opposite / sqrt(3), which extends all three unit
//! normals simultaneously while keeping the third field exactly tangential
//! on each interface. A small pair-wise quadratic length taper makes
//! |xi_{i,j}| dip strictly below 1 off the interfaces, which is what the
//! length bracket and the compatibility between delta_cal, c_perp and c_len
//! require. The only time-dependent scenario is the shrinking circle, whose
//! velocity field B is the normal speed extended with a plateau cutoff.

use crate::error::{Error, Result};
use crate::geometry2d::{ScenarioKind, StrongSolution};
use crate::potential::{MarginAcc, MarginEntry, MARGIN_TOL};
use crate::util::{gate_down, V2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct CalibrationField {
    pub sol: StrongSolution,
    pub n_phases: usize,
    /// Tube radius of the zeta profile.
    pub r_cal: f64,
    /// Margin constant of the perpendicularity condition; pinned.
    pub delta_cal: f64,
    /// Fitted constants (recorded by `fit_constants`).
    pub c_perp: f64,
    pub c_len: f64,
    pub big_c_len: f64,
    pub c_transport: f64,
    /// Quadratic taper amplitude near junctions.
    c_taper: f64,
    /// Star blend radii around each junction.
    s1: f64,
    s2: f64,
}

pub fn build_calibration(sol: &StrongSolution) -> Result<CalibrationField> {
    let r_cal = match sol.kind {
        ScenarioKind::Flat => sol.lx / 8.0,
        ScenarioKind::Circle { .. } => (sol.lx / 8.0).min(0.5 * sol.circle_radius(sol.t_end)),
        ScenarioKind::TripleY => 0.3 * sol.cell_a,
    };
    let (s1, s2) = (0.35 * sol.cell_a, 0.45 * sol.cell_a);
    let mut field = CalibrationField {
        sol: sol.clone(),
        n_phases: sol.n_phases,
        r_cal,
        delta_cal: 1e-7,
        c_perp: 1e-9,
        c_len: 0.0,
        big_c_len: 0.0,
        c_transport: 0.0,
        c_taper: 2e-6,
        s1,
        s2,
    };
    field.fit_constants(2024);
    Ok(field)
}

#[inline]
fn zeta(d: f64, r: f64) -> f64 {
    let q = (d / r) * (d / r);
    if q >= 1.0 {
        0.0
    } else {
        (1.0 - q) * (1.0 - q)
    }
}

impl CalibrationField {
    /// All calibration vectors xi_i at (x, t).
    pub fn xi(&self, x: V2, t: f64) -> Vec<V2> {
        let mut out = vec![V2::ZERO; self.n_phases];
        self.xi_into(x, t, &mut out);
        out
    }

    pub fn xi_into(&self, x: V2, t: f64, out: &mut [V2]) {
        let sol = &self.sol;
        for o in out.iter_mut() {
            *o = V2::ZERO;
        }
        match sol.kind {
            ScenarioKind::Flat | ScenarioKind::Circle { .. } => {
                let d = sol.sdist(x, t, 0, 1);
                let z = zeta(d.abs(), self.r_cal);
                if z > 0.0 {
                    let n = sol.normal(x, t, 0, 1);
                    out[0] = n.scale(0.5 * z);
                    out[1] = n.scale(-0.5 * z);
                }
            }
            ScenarioKind::TripleY => {
                // tube superposition
                let mut tube = [V2::ZERO; 3];
                for e in sol.edges() {
                    let (d, _, _) = sol.edge_dist(x, e);
                    let z = zeta(d, self.r_cal);
                    if z > 0.0 {
                        let v = e.normal.scale(0.5 * z);
                        tube[e.pair.0] = tube[e.pair.0].add(v);
                        tube[e.pair.1] = tube[e.pair.1].sub(v);
                    }
                }
                // nearest junction and its star
                let (jk, s) = self.nearest_junction(x);
                let w = gate_down(s, self.s1, self.s2);
                if w > 0.0 {
                    let star = self.junction_star(jk);
                    for i in 0..3 {
                        out[i] = star[i].scale(w).add(tube[i].scale(1.0 - w));
                    }
                } else {
                    out[..3].copy_from_slice(&tube);
                }
                // Tangential shrink: for each pair e, scale every field's
                // component along e's local edge direction by (1 - u_e) with
                // u_e = c m(d_f) m(d_g) built from the other two pairs'
                // interface distances. It vanishes on every ray (keeping the
                // normals and the third-field tangentiality exact), respects
                // the zero sum identically, and gives each |xi_{i,j}| the
                // strict quadratic dip the length bracket requires.
                let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
                let mcap = self.r_cal;
                let msm = |d: f64| -> f64 { d / (1.0 + (d / mcap) * (d / mcap)).sqrt() };
                let mut dpair = [0.0f64; 3];
                for (pi, &(i, j)) in pairs.iter().enumerate() {
                    dpair[pi] = sol.sdist(x, t, i, j).abs();
                }
                for (pi, &(i, j)) in pairs.iter().enumerate() {
                    let (f, g) = match pi {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let u = self.c_taper * msm(dpair[f]) * msm(dpair[g]);
                    if u <= 0.0 {
                        continue;
                    }
                    // local edge direction of the nearest edge of this pair
                    let mut tdir = V2::ZERO;
                    let mut best = f64::INFINITY;
                    for e in sol.edges() {
                        if e.pair == (i, j) {
                            let (d, _, _) = sol.edge_dist(x, e);
                            if d < best {
                                best = d;
                                tdir = e.dir;
                            }
                        }
                    }
                    for o in out.iter_mut() {
                        let tcomp = o.dot(tdir);
                        *o = o.sub(tdir.scale(u * tcomp));
                    }
                }
            }
        }
    }

    fn nearest_junction(&self, x: V2) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (k, j) in self.sol.junctions.iter().enumerate() {
            let d = self.sol.pdiff(x, *j).norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }

    /// Star vectors at junction k: xi_i = (1/sqrt 3) * direction of the ray
    /// opposite to phase i (the ray whose pair does not contain i).
    fn junction_star(&self, k: usize) -> [V2; 3] {
        let rays = self.sol.junction_rays(k);
        let mut star = [V2::ZERO; 3];
        for i in 0..3 {
            for (dir, pair, _) in &rays {
                if pair.0 != i && pair.1 != i {
                    star[i] = dir.scale(1.0 / crate::geometry2d::SQRT3);
                }
            }
        }
        star
    }

    /// xi_{i,j} = xi_i - xi_j.
    pub fn xi_pair(&self, x: V2, t: f64, i: usize, j: usize) -> V2 {
        let xs = self.xi(x, t);
        xs[i].sub(xs[j])
    }

    /// Velocity field B.
    pub fn b_field(&self, x: V2, t: f64) -> V2 {
        match self.sol.kind {
            ScenarioKind::Circle { .. } => {
                let d = self.sol.sdist(x, t, 0, 1).abs();
                let plateau = gate_down(d, 0.5 * self.r_cal, self.r_cal);
                if plateau <= 0.0 {
                    return V2::ZERO;
                }
                let n = self.sol.normal(x, t, 0, 1);
                n.scale(-plateau / self.sol.circle_radius(t))
            }
            _ => V2::ZERO,
        }
    }

    /// Distance weights vartheta_i: negative inside phase i, positive
    /// outside, |vartheta_i| = cap(dist to the phase boundary).
    pub fn vartheta(&self, x: V2, t: f64, i: usize) -> f64 {
        let d = self.sol.dist_to_phase_boundary(x, t, i);
        if !d.is_finite() {
            // phase absent from the scenario: weight saturates
            return cap_fn(1.0);
        }
        let s = if self.sol.phase_of(x, t) == i { -1.0 } else { 1.0 };
        s * cap_fn(d)
    }

    pub fn vartheta_all(&self, x: V2, t: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n_phases) {
            *o = self.vartheta(x, t, i);
        }
    }

    /// Fit c_perp (then c_len = c_perp^2 / delta_cal), the upper length
    /// constant C_len and the transport constant, by sampling the tubes.
    fn fit_constants(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c_perp: f64 = 0.0;
        let mut big_c: f64 = 0.0;
        let mut c_tr: f64 = 0.0;
        let n_samp = 4000;
        for _ in 0..n_samp {
            let (x, t, pair, d) = self.sample_tube_point(&mut rng, 1e-4, self.r_cal);
            let xs = self.xi(x, t);
            let xij = xs[pair.0].sub(xs[pair.1]);
            let len2 = xij.norm2();
            if d > 1e-6 {
                big_c = big_c.max((1.0 - len2) / (d * d));
                for (k, xk) in xs.iter().enumerate() {
                    if k != pair.0 && k != pair.1 {
                        let cross = (crate::geometry2d::SQRT3 * xij.dot(*xk)).abs();
                        c_perp = c_perp.max(cross / d);
                    }
                }
            }
            // transport constant for the distance weights
            let th = |xx: V2, tt: f64| self.vartheta(xx, tt, pair.0);
            let v = th(x, t).abs();
            if v > 1e-4 {
                let lhs = self.theta_transport_lhs(x, t, pair.0, th);
                c_tr = c_tr.max(lhs.abs() / v);
            }
        }
        self.c_perp = (c_perp * 1.05).max(1e-9);
        self.c_len = self.c_perp * self.c_perp / self.delta_cal;
        self.big_c_len = (big_c * 1.05).max(1e-6);
        self.c_transport = (c_tr * 1.05).max(1e-6);
    }

    fn theta_transport_lhs(&self, x: V2, t: f64, _i: usize, th: impl Fn(V2, f64) -> f64) -> f64 {
        let h = 1e-5;
        let dt = if self.sol.t_end > 0.0 {
            (th(x, (t + h).min(self.sol.t_end)) - th(x, (t - h).max(0.0)))
                / ((t + h).min(self.sol.t_end) - (t - h).max(0.0))
        } else {
            0.0
        };
        let b = self.b_field(x, t);
        let gx = (th(V2::new(x.x + h, x.y), t) - th(V2::new(x.x - h, x.y), t)) / (2.0 * h);
        let gy = (th(V2::new(x.x, x.y + h), t) - th(V2::new(x.x, x.y - h), t)) / (2.0 * h);
        dt + b.x * gx + b.y * gy
    }

    /// Random point at distance d in [lo, hi] from a random interface point,
    /// at a random admissible time.
    fn sample_tube_point(
        &self,
        rng: &mut ChaCha8Rng,
        lo: f64,
        hi: f64,
    ) -> (V2, f64, (usize, usize), f64) {
        let sol = &self.sol;
        let t = if sol.t_end > 0.0 {
            rng.gen::<f64>() * sol.t_end
        } else {
            0.0
        };
        let d = lo + (hi - lo) * rng.gen::<f64>();
        let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        match sol.kind {
            ScenarioKind::Flat => {
                let xpos = rng.gen::<f64>() * sol.lx;
                let base_y = if rng.gen::<bool>() {
                    0.25 * sol.ly
                } else {
                    0.75 * sol.ly
                };
                let x = V2::new(xpos, crate::util::wrap(base_y + side * d, sol.ly));
                (x, t, (0, 1), d)
            }
            ScenarioKind::Circle { .. } => {
                let ang = rng.gen::<f64>() * std::f64::consts::TAU;
                let r = sol.circle_radius(t) + side * d;
                let c = sol.center();
                let x = V2::new(
                    crate::util::wrap(c.x + r * ang.cos(), sol.lx),
                    crate::util::wrap(c.y + r * ang.sin(), sol.ly),
                );
                (x, t, (0, 1), d)
            }
            ScenarioKind::TripleY => {
                let edges = sol.edges();
                let e = &edges[rng.gen_range(0..edges.len())];
                let s = rng.gen::<f64>() * e.len;
                let foot = e.start.add(e.dir.scale(s));
                let x = V2::new(
                    crate::util::wrap(foot.x + e.normal.x * side * d, sol.lx),
                    crate::util::wrap(foot.y + e.normal.y * side * d, sol.ly),
                );
                // the actual distance to the pair interface may be smaller
                // near junctions; report the true one
                let dtrue = sol.sdist(x, t, e.pair.0, e.pair.1).abs();
                (x, t, e.pair, dtrue.min(d))
            }
        }
    }
}

/// C^{1,1} cap: identity up to 1/2, then flattening, constant 3/4 beyond 1.
#[inline]
pub fn cap_fn(d: f64) -> f64 {
    let dc = d.min(1.0);
    let excess = (dc - 0.5).max(0.0);
    d.min(1.0) - excess * excess
}

#[derive(Debug, Clone, Serialize)]
pub struct BandEntry {
    pub name: String,
    /// Sup of |LHS| / dist^p per dyadic band, outermost first.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub exact: Vec<MarginEntry>,
    pub bands: Vec<BandEntry>,
    pub c_perp: f64,
    pub c_len: f64,
    pub big_c_len: f64,
    pub c_transport: f64,
    pub pass: bool,
}

impl CalibrationField {
    /// Verify the calibration conditions: exact inequalities as margins,
    /// Landau conditions as dyadic band-ratio tables.
    pub fn verify_calibration(
        &self,
        n_samples: usize,
        n_bands: usize,
        seed: u64,
    ) -> Result<CalibrationReport> {
        if n_samples < 1000 {
            return Err(Error::config("verify_calibration needs at least 1e3 samples"));
        }
        let sol = &self.sol;
        let s3 = crate::geometry2d::SQRT3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut acc_sum = MarginAcc::new("zero_sum");
        let mut acc_h = MarginAcc::new("length_bound_sqrt3_xi_i");
        let mut acc_g = MarginAcc::new("normal_on_interface");
        let mut acc_flo = MarginAcc::new("length_bracket_lower");
        let mut acc_fup = MarginAcc::new("length_bracket_upper");
        let mut acc_perp = MarginAcc::new("perpendicularity_cap");
        let mut acc_36 = MarginAcc::new("combined_length_condition_36");
        let mut acc_th_in = MarginAcc::new("theta_sign_inside");
        let mut acc_th_out = MarginAcc::new("theta_sign_outside");
        let mut acc_th_mag = MarginAcc::new("theta_magnitude");
        let mut acc_th_tr = MarginAcc::new("theta_transport");
        let mut acc_dc = MarginAcc::new("delta_cal_consistency");

        acc_dc.push(self.delta_cal - self.c_perp * self.c_perp / self.c_len, &[]);

        let names = [
            ("timeev_xi_25a", 1u32),
            ("length_transport_25b", 2),
            ("normal_velocity_25c", 1),
            ("gradb_normal_25d", 1),
            ("gradb_mixed_25e", 1),
        ];
        let mut band_sups = vec![vec![0.0f64; n_bands]; names.len()];

        let per_band = n_samples / n_bands.max(1);
        for band in 0..n_bands {
            let hi = self.r_cal * 0.5f64.powi(band as i32);
            let lo = 0.5 * hi;
            for _ in 0..per_band {
                let (x, t, pair, d) = self.sample_tube_point(&mut rng, lo, hi, );
                let (i, j) = pair;
                let xs = self.xi(x, t);
                // exact conditions
                let mut sum = V2::ZERO;
                let mut maxlen: f64 = 0.0;
                for v in &xs {
                    sum = sum.add(*v);
                    maxlen = maxlen.max(s3 * v.norm());
                }
                acc_sum.push(1e-12 - sum.norm(), &[x.x, x.y, t]);
                acc_h.push(1.0 - maxlen + 1e-13, &[x.x, x.y, t]);
                let xij = xs[i].sub(xs[j]);
                let len2 = xij.norm2();
                acc_flo.push(len2 - (1.0 - self.big_c_len * d * d) + 1e-12, &[x.x, x.y, t]);
                let upper = (1.0 - self.c_len * d * d).max(0.0);
                acc_fup.push(upper - len2 + 1e-12, &[x.x, x.y, t]);
                let mut cross_sq = 0.0;
                for (k, xk) in xs.iter().enumerate() {
                    if k != i && k != j {
                        let cross = (s3 * xij.dot(*xk)).abs();
                        let capv = (self.c_perp * d).min(self.delta_cal.sqrt());
                        acc_perp.push(capv - cross + 1e-12, &[x.x, x.y, t]);
                        cross_sq += cross * cross;
                    }
                }
                acc_36.push(
                    1.0 - (len2 + cross_sq / self.delta_cal) + 1e-12,
                    &[x.x, x.y, t],
                );

                // Landau conditions via FD derivatives
                let lhs_a = self.lhs_25a(x, t, i, j);
                let lhs_b = self.lhs_25b(x, t, i, j);
                let lhs_c = self.lhs_25c(x, t, i, j);
                let (lhs_d, lhs_e) = self.lhs_25de(x, t, i, j);
                let den1 = d.max(1e-6);
                let den2 = (d * d).max(1e-12);
                let vals = [
                    lhs_a / den1,
                    lhs_b.abs() / den2,
                    lhs_c / den1,
                    lhs_d.abs() / den1,
                    lhs_e.abs() / den1,
                ];
                for (bi, v) in vals.iter().enumerate() {
                    if *v > band_sups[bi][band] {
                        band_sups[bi][band] = *v;
                    }
                }
            }
        }

        // on-interface exactness of the normals (2.5g)
        for _ in 0..2000 {
            let (x, t, pair, _) = self.sample_tube_point(&mut rng, 0.0, 0.0);
            let xij = self.xi_pair(x, t, pair.0, pair.1);
            let n = sol.normal(x, t, pair.0, pair.1);
            acc_g.push(1e-10 - xij.sub(n).norm(), &[x.x, x.y, t]);
        }

        // distance weight conditions on global samples
        for _ in 0..4000 {
            let x = V2::new(rng.gen::<f64>() * sol.lx, rng.gen::<f64>() * sol.ly);
            let t = if sol.t_end > 0.0 {
                rng.gen::<f64>() * sol.t_end
            } else {
                0.0
            };
            for i in 0..self.n_phases {
                let d = sol.dist_to_phase_boundary(x, t, i);
                if !d.is_finite() {
                    continue;
                }
                let th = self.vartheta(x, t, i);
                let md = d.min(1.0);
                if sol.phase_of(x, t) == i {
                    acc_th_in.push(-th - 0.5 * md + 1e-12, &[x.x, x.y]);
                } else {
                    acc_th_out.push(th - 0.5 * md + 1e-12, &[x.x, x.y]);
                }
                acc_th_mag.push(md - th.abs() + 1e-12, &[x.x, x.y]);
                if th.abs() > 1e-3 {
                    let lhs =
                        self.theta_transport_lhs(x, t, i, |xx, tt| self.vartheta(xx, tt, i));
                    acc_th_tr.push(self.c_transport * th.abs() - lhs.abs() + 1e-9, &[x.x, x.y]);
                }
            }
        }

        let mut bands = Vec::new();
        for (bi, (name, _p)) in names.iter().enumerate() {
            let r = &band_sups[bi];
            // A Landau condition O(dist^p) holds when the per-band sup
            // ratios stay bounded toward the interface. Compact cutoffs make
            // the outer ratios smaller, so the falsifiable reading is that
            // the ratios stop growing: each inner-band step may grow by at
            // most the tolerance factor (a genuine O(dist^{p-1}) violation
            // doubles per band).
            let global_max = r.iter().cloned().fold(0.0f64, f64::max);
            let floor = (1e-4 * global_max).max(1e-7);
            let all_tiny = global_max < 1e-6;
            let mut pass = true;
            for k in 1..r.len() {
                if r[k] > 1.7 * r[k - 1].max(floor) {
                    // allow growth while still converging from the cutoff
                    // region, but not on the innermost two steps
                    if k >= r.len().saturating_sub(2) {
                        pass = false;
                    }
                }
            }
            bands.push(BandEntry {
                name: name.to_string(),
                ratios: r.clone(),
                pass: all_tiny || pass,
            });
        }

        let exact = vec![
            acc_sum.into_entry(),
            acc_h.into_entry(),
            acc_g.into_entry(),
            acc_flo.into_entry(),
            acc_fup.into_entry(),
            acc_perp.into_entry(),
            acc_36.into_entry(),
            acc_th_in.into_entry(),
            acc_th_out.into_entry(),
            acc_th_mag.into_entry(),
            acc_th_tr.into_entry(),
            acc_dc.into_entry(),
        ];
        let pass =
            exact.iter().all(|e| e.min_margin >= MARGIN_TOL) && bands.iter().all(|b| b.pass);
        Ok(CalibrationReport {
            exact,
            bands,
            c_perp: self.c_perp,
            c_len: self.c_len,
            big_c_len: self.big_c_len,
            c_transport: self.c_transport,
            pass,
        })
    }

    fn xi_pair_fd(&self, x: V2, t: f64, i: usize, j: usize) -> V2 {
        self.xi_pair(x, t, i, j)
    }

    /// 4th order central difference of a vector field component-wise.
    fn grad_xi(&self, x: V2, t: f64, i: usize, j: usize) -> [[f64; 2]; 2] {
        let h = 1e-5;
        let mut out = [[0.0; 2]; 2];
        for (axis, out_col) in [(0usize, 0usize), (1, 1)] {
            let shift = |s: f64| {
                let p = if axis == 0 {
                    V2::new(x.x + s, x.y)
                } else {
                    V2::new(x.x, x.y + s)
                };
                self.xi_pair_fd(p, t, i, j)
            };
            let fp2 = shift(2.0 * h);
            let fp1 = shift(h);
            let fm1 = shift(-h);
            let fm2 = shift(-2.0 * h);
            let dx = V2::new(
                (-fp2.x + 8.0 * fp1.x - 8.0 * fm1.x + fm2.x) / (12.0 * h),
                (-fp2.y + 8.0 * fp1.y - 8.0 * fm1.y + fm2.y) / (12.0 * h),
            );
            out[0][out_col] = dx.x;
            out[1][out_col] = dx.y;
        }
        out
    }

    fn dt_xi(&self, x: V2, t: f64, i: usize, j: usize) -> V2 {
        if self.sol.t_end <= 0.0 || matches!(self.sol.kind, ScenarioKind::Flat | ScenarioKind::TripleY)
        {
            return V2::ZERO;
        }
        let h = 1e-6f64.min(0.25 * self.sol.t_end);
        if t - h < 0.0 {
            // second-order one-sided stencil at the left end
            let f0 = self.xi_pair(x, t, i, j);
            let f1 = self.xi_pair(x, t + h, i, j);
            let f2 = self.xi_pair(x, t + 2.0 * h, i, j);
            return f0.scale(-3.0).add(f1.scale(4.0)).sub(f2).scale(1.0 / (2.0 * h));
        }
        if t + h > self.sol.t_end {
            let f0 = self.xi_pair(x, t, i, j);
            let f1 = self.xi_pair(x, t - h, i, j);
            let f2 = self.xi_pair(x, t - 2.0 * h, i, j);
            return f0.scale(3.0).sub(f1.scale(4.0)).add(f2).scale(1.0 / (2.0 * h));
        }
        let fp = self.xi_pair(x, t + h, i, j);
        let fm = self.xi_pair(x, t - h, i, j);
        fp.sub(fm).scale(1.0 / (2.0 * h))
    }

    fn grad_b(&self, x: V2, t: f64) -> [[f64; 2]; 2] {
        if matches!(self.sol.kind, ScenarioKind::Flat | ScenarioKind::TripleY) {
            return [[0.0; 2]; 2];
        }
        let h = 1e-5;
        let mut out = [[0.0; 2]; 2];
        for axis in 0..2 {
            let shift = |s: f64| {
                let p = if axis == 0 {
                    V2::new(x.x + s, x.y)
                } else {
                    V2::new(x.x, x.y + s)
                };
                self.b_field(p, t)
            };
            let fp2 = shift(2.0 * h);
            let fp1 = shift(h);
            let fm1 = shift(-h);
            let fm2 = shift(-2.0 * h);
            out[0][axis] = (-fp2.x + 8.0 * fp1.x - 8.0 * fm1.x + fm2.x) / (12.0 * h);
            out[1][axis] = (-fp2.y + 8.0 * fp1.y - 8.0 * fm1.y + fm2.y) / (12.0 * h);
        }
        out
    }

    pub fn debug_lhs_25a(&self, x: V2, t: f64, i: usize, j: usize) -> f64 {
        self.lhs_25a(x, t, i, j)
    }

    /// |dt xi + (B.grad) xi + (grad B)^T xi|.
    fn lhs_25a(&self, x: V2, t: f64, i: usize, j: usize) -> f64 {
        if matches!(self.sol.kind, ScenarioKind::Flat | ScenarioKind::TripleY) {
            return 0.0;
        }
        let xij = self.xi_pair(x, t, i, j);
        let dt = self.dt_xi(x, t, i, j);
        let g = self.grad_xi(x, t, i, j);
        let b = self.b_field(x, t);
        let gb = self.grad_b(x, t);
        let adv = V2::new(
            g[0][0] * b.x + g[0][1] * b.y,
            g[1][0] * b.x + g[1][1] * b.y,
        );
        let gbt = V2::new(
            gb[0][0] * xij.x + gb[1][0] * xij.y,
            gb[0][1] * xij.x + gb[1][1] * xij.y,
        );
        dt.add(adv).add(gbt).norm()
    }

    /// (1/2) xi . (dt xi + (B.grad) xi).
    fn lhs_25b(&self, x: V2, t: f64, i: usize, j: usize) -> f64 {
        if matches!(self.sol.kind, ScenarioKind::Flat | ScenarioKind::TripleY) {
            return 0.0;
        }
        let xij = self.xi_pair(x, t, i, j);
        let dt = self.dt_xi(x, t, i, j);
        let g = self.grad_xi(x, t, i, j);
        let b = self.b_field(x, t);
        let adv = V2::new(
            g[0][0] * b.x + g[0][1] * b.y,
            g[1][0] * b.x + g[1][1] * b.y,
        );
        0.5 * xij.dot(dt.add(adv))
    }

    /// |(B . xi) xi + (div xi) xi|.
    fn lhs_25c(&self, x: V2, t: f64, i: usize, j: usize) -> f64 {
        let xij = self.xi_pair(x, t, i, j);
        let g = self.grad_xi(x, t, i, j);
        let div = g[0][0] + g[1][1];
        let b = self.b_field(x, t);
        xij.scale(b.dot(xij) + div).norm()
    }

    /// grad B : xi (x) xi and the mixed perpendicular contraction.
    fn lhs_25de(&self, x: V2, t: f64, i: usize, j: usize) -> (f64, f64) {
        if matches!(self.sol.kind, ScenarioKind::Flat | ScenarioKind::TripleY) {
            return (0.0, 0.0);
        }
        let xij = self.xi_pair(x, t, i, j);
        let perp = xij.perp();
        let gb = self.grad_b(x, t);
        let contract = |a: V2, b: V2| -> f64 {
            gb[0][0] * a.x * b.x + gb[0][1] * a.x * b.y + gb[1][0] * a.y * b.x
                + gb[1][1] * a.y * b.y
        };
        let d = contract(xij, xij);
        let e = contract(perp, xij) + contract(xij, perp);
        (d, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry2d::make_scenario;

    #[test]
    fn flat_field_on_interface() {
        let sol = make_scenario(ScenarioKind::Flat, 1.0, 0.004).unwrap();
        let cal = build_calibration(&sol).unwrap();
        let x = V2::new(0.3, 0.25);
        let xij = cal.xi_pair(x, 0.0, 0, 1);
        assert!((xij.sub(V2::new(0.0, 1.0))).norm() < 1e-14);
        assert_eq!(cal.b_field(x, 0.0), V2::ZERO);
        // zero sum everywhere
        let xs = cal.xi(V2::new(0.77, 0.18), 0.0);
        let s = xs[0].add(xs[1]).add(xs[2]);
        assert!(s.norm() < 1e-14);
    }

    #[test]
    fn circle_zeta_profile_value() {
        let sol = make_scenario(ScenarioKind::Circle { r0: 0.3 }, 1.0, 0.02).unwrap();
        let cal = build_calibration(&sol).unwrap();
        // at distance r_cal/2 the squared length is (3/4)^4
        let d = 0.5 * cal.r_cal;
        let x = V2::new(0.5 + 0.3 + d, 0.5);
        let xij = cal.xi_pair(x, 0.0, 0, 1);
        assert!((xij.norm2() - 0.75f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn triple_star_and_tangentials() {
        let sol = make_scenario(ScenarioKind::TripleY, 0.6 * crate::geometry2d::SQRT3, 0.01)
            .unwrap();
        let cal = build_calibration(&sol).unwrap();
        // at each junction, xi_i - xi_j equals the pair normal and the third
        // field is tangential
        for k in 0..sol.junctions.len() {
            let jx = sol.junctions[k];
            let xs = cal.xi(jx, 0.0);
            let s = xs[0].add(xs[1]).add(xs[2]);
            assert!(s.norm() < 1e-12);
            for (dir, pair, ei) in sol.junction_rays(k) {
                let e = &sol.edges()[ei];
                // normal orientation: from pair.0 into pair.1
                let xij = xs[pair.0].sub(xs[pair.1]);
                assert!(
                    xij.sub(e.normal).norm() < 1e-12,
                    "junction {k} pair {:?}",
                    pair
                );
                let third: usize = (0..3).find(|p| *p != pair.0 && *p != pair.1).unwrap();
                assert!(xij.dot(xs[third]).abs() < 1e-12);
                let _ = dir;
            }
        }
        // on a mid-edge interface point the normal is exact
        let e = &sol.edges()[0];
        let mid = e.start.add(e.dir.scale(0.5 * e.len));
        let xij = cal.xi_pair(mid, 0.0, e.pair.0, e.pair.1);
        assert!(xij.sub(e.normal).norm() < 1e-12);
    }

    #[test]
    fn verify_flat_and_circle() {
        for (kind, l, te) in [
            (ScenarioKind::Flat, 1.0, 0.004),
            (ScenarioKind::Circle { r0: 0.3 }, 1.0, 0.02),
        ] {
            let sol = make_scenario(kind, l, te).unwrap();
            let cal = build_calibration(&sol).unwrap();
            let rep = cal.verify_calibration(4000, 5, 7).unwrap();
            for e in &rep.exact {
                assert!(
                    e.min_margin >= MARGIN_TOL,
                    "{:?} {} margin {} at {:?}",
                    kind,
                    e.name,
                    e.min_margin,
                    e.witness
                );
            }
            for b in &rep.bands {
                assert!(b.pass, "{:?} band {} ratios {:?}", kind, b.name, b.ratios);
            }
            assert!(rep.pass);
        }
    }

    #[test]
    fn verify_triple_y() {
        let sol = make_scenario(ScenarioKind::TripleY, 0.6 * crate::geometry2d::SQRT3, 0.01)
            .unwrap();
        let cal = build_calibration(&sol).unwrap();
        let rep = cal.verify_calibration(6000, 5, 13).unwrap();
        for e in &rep.exact {
            assert!(
                e.min_margin >= MARGIN_TOL,
                "{} margin {} at {:?}",
                e.name,
                e.min_margin,
                e.witness
            );
        }
        for b in &rep.bands {
            assert!(b.pass, "band {} ratios {:?}", b.name, b.ratios);
        }
        assert!(rep.pass);
    }

    #[test]
    fn theta_weights_vanish_on_boundary_and_satisfy_caps() {
        let sol = make_scenario(ScenarioKind::Flat, 1.0, 0.004).unwrap();
        let cal = build_calibration(&sol).unwrap();
        // on the interface
        let x = V2::new(0.4, 0.25);
        assert!(cal.vartheta(x, 0.0, 0).abs() < 1e-14);
        // inside phase 1 (the slab): negative for i = 1
        let x = V2::new(0.4, 0.5);
        assert!(cal.vartheta(x, 0.0, 1) < 0.0);
        assert!(cal.vartheta(x, 0.0, 0) > 0.0);
        // cap shape
        assert!((cap_fn(0.3) - 0.3).abs() < 1e-15);
        assert!((cap_fn(2.0) - 0.75).abs() < 1e-15);
    }
}
