//! Approximate phase indicator functions on the simplex.
//!
//! On each sector T_{i,j} the pair (psi_i, psi_j) is given by a single
//! formula built from the edge geodesic distance phi(r) = 3r^2 - 2r^3, the
//! eta-weighted combination of the two radial projections, and the angular
//! interpolant lambda applied to the minority phase:
//!
//!   psi_i = (1 - lambda(beta^j_i)) * [eta(r) (1 - phi(rho_i)) + eta(1-r) phi(rho_j)]
//!   psi_j = (1 - lambda(beta^i_j)) * [eta(r) phi(rho_i) + eta(1-r) (1 - phi(rho_j))]
//!
//! with r the arclength of the orthogonal projection onto the edge. Inside
//! the vertex balls the eta plateau and the vanishing of lambda reduce this
//! to the radial-projection formulas; inside the edge tubes eta reproduces
//! the two-sided combination; the same expression serves as the C^{1,1}
//! extension elsewhere, with gradient kinks confined to the classification
//! seams (midlines and sector boundaries). All remaining psi_k vanish on
//! T_{i,j} identically and psi_0 is the complement.

use crate::error::{Error, Result};
use crate::potential::{dist_w_closed_form, MarginAcc, MarginEntry, PotentialSpec, MARGIN_TOL};
use crate::util::{unit_cube_to_barycentric, Halton, TrapezoidRamp};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct IndicatorSet {
    pub spec: PotentialSpec,
    /// Margin delta in the (A4) inequality.
    pub delta_a4: f64,
    /// Pinned constant in |dpsi_i| <= C sqrt(2W).
    pub c_grad: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    lambda_ramp: TrapezoidRamp,
    eta_plateau: f64,
    eta_ramp: TrapezoidRamp,
}

impl IndicatorSet {
    pub fn new(spec: PotentialSpec) -> Self {
        let g = &spec.geom;
        let n = g.n_phases;
        let (lambda_lo, lambda_hi, lambda_ramp) = if n >= 3 {
            let hi = std::f64::consts::FRAC_PI_6 / (n as f64 - 2.0);
            let lo = g.beta_n;
            let width = hi - lo;
            let budget = 4.0 * (n as f64 - 2.0);
            // widest shoulder keeping the peak slope within the budget
            let shoulder = (1.0 - 1.0 / (budget * width)).clamp(0.01, 0.2);
            (lo, hi, TrapezoidRamp::new(shoulder))
        } else {
            (0.0, 1.0, TrapezoidRamp::new(0.2))
        };
        let eta_plateau = g.r_u * g.beta_n.cos();
        let eta_ramp = TrapezoidRamp::new(0.2);
        IndicatorSet {
            spec,
            delta_a4: 1e-3,
            c_grad: 4.0,
            lambda_lo,
            lambda_hi,
            lambda_ramp,
            eta_plateau,
            eta_ramp,
        }
    }

    /// Interpolant lambda: 0 with flat derivative on [0, beta_N], 1 at the
    /// sector boundary angle, |lambda'| <= 4(N-2).
    pub fn lambda_fn(&self, beta: f64) -> Result<f64> {
        if beta < -1e-12 || beta > self.lambda_hi + 1e-12 {
            return Err(Error::domain(format!("lambda argument {beta} out of range")));
        }
        Ok(self.lambda_raw(beta))
    }

    #[inline]
    fn lambda_raw(&self, beta: f64) -> f64 {
        if self.spec.geom.n_phases < 3 {
            return 0.0;
        }
        self.lambda_ramp
            .eval((beta - self.lambda_lo) / (self.lambda_hi - self.lambda_lo))
    }

    #[inline]
    fn lambda_d(&self, beta: f64) -> f64 {
        if self.spec.geom.n_phases < 3 {
            return 0.0;
        }
        self.lambda_ramp
            .deriv((beta - self.lambda_lo) / (self.lambda_hi - self.lambda_lo))
            / (self.lambda_hi - self.lambda_lo)
    }

    /// Interpolant eta: 1 on [0, r_U cos beta_N], 0 on the mirrored plateau,
    /// eta(s) + eta(1-s) = 1, |eta'| <= 5/2.
    pub fn eta_fn(&self, s: f64) -> Result<f64> {
        if !(-1e-12..=1.0 + 1e-12).contains(&s) {
            return Err(Error::domain(format!("eta argument {s} out of range")));
        }
        Ok(self.eta_raw(s))
    }

    #[inline]
    fn eta_raw(&self, s: f64) -> f64 {
        let a = self.eta_plateau;
        1.0 - self.eta_ramp.eval((s - a) / (1.0 - 2.0 * a))
    }

    #[inline]
    fn eta_d(&self, s: f64) -> f64 {
        let a = self.eta_plateau;
        let x = (s - a) / (1.0 - 2.0 * a);
        -self.eta_ramp.deriv(x) / (1.0 - 2.0 * a)
    }

    pub fn max_lambda_slope_budget(&self) -> f64 {
        4.0 * (self.spec.geom.n_phases as f64 - 2.0).max(1.0)
    }

    /// Evaluate all indicators at u: output [psi_1 .. psi_N, psi_0].
    pub fn psi(&self, u: &[f64]) -> Vec<f64> {
        let n = self.spec.geom.n_phases;
        let mut out = vec![0.0; n + 1];
        self.psi_into(u, &mut out);
        out
    }

    pub fn psi_into(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.spec.geom;
        let n = g.n_phases;
        out[..=n].fill(0.0);
        let lbl = g.classify_clamped(u);
        let (i, j) = lbl.sector;
        let (pi, pj) = self.pair_values(u, i, j);
        out[i] = pi;
        out[j] = pj;
        out[n] = (1.0 - pi - pj).max(0.0);
    }

    /// psi_i and psi_j on the sector of (i, j).
    fn pair_values(&self, u: &[f64], i: usize, j: usize) -> (f64, f64) {
        let g = &self.spec.geom;
        let (rc, _, _) = g.edge_projection(u, i, j);
        let rho_i = g.dist_to_vertex(u, i).min(1.0);
        let rho_j = g.dist_to_vertex(u, j).min(1.0);
        let eta_r = self.eta_raw(rc);
        let eta_rm = self.eta_raw(1.0 - rc);
        let phi_i = dist_w_closed_form(rho_i);
        let phi_j = dist_w_closed_form(rho_j);
        let b_i = eta_r * (1.0 - phi_i) + eta_rm * phi_j;
        let b_j = eta_r * phi_i + eta_rm * (1.0 - phi_j);
        let (lam_i, lam_j) = if g.n_phases >= 3 {
            (
                self.lambda_raw(g.angle_beta_raw(u, j, i)),
                self.lambda_raw(g.angle_beta_raw(u, i, j)),
            )
        } else {
            (0.0, 0.0)
        };
        ((1.0 - lam_i) * b_i, (1.0 - lam_j) * b_j)
    }

    /// Analytic Jacobian: rows psi_1..psi_N, psi_0 by columns of phase space.
    pub fn dpsi(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let g = &self.spec.geom;
        let n = g.n_phases;
        let dim = g.dim;
        let mut rows = vec![vec![0.0; dim]; n + 1];
        let lbl = g.classify_clamped(u);
        let (i, j) = lbl.sector;
        let (gi, gj) = self.pair_gradients(u, i, j);
        for k in 0..dim {
            rows[i][k] = gi[k];
            rows[j][k] = gj[k];
            rows[n][k] = -(gi[k] + gj[k]);
        }
        rows
    }

    /// Jacobian written into a flat (N+1) x dim buffer, row-major.
    pub fn dpsi_into(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.spec.geom;
        let n = g.n_phases;
        let dim = g.dim;
        out[..(n + 1) * dim].fill(0.0);
        let lbl = g.classify_clamped(u);
        let (i, j) = lbl.sector;
        let (gi, gj) = self.pair_gradients(u, i, j);
        for k in 0..dim {
            out[i * dim + k] = gi[k];
            out[j * dim + k] = gj[k];
            out[n * dim + k] = -(gi[k] + gj[k]);
        }
    }

    fn pair_gradients(&self, u: &[f64], i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
        let g = &self.spec.geom;
        let dim = g.dim;
        let n = g.n_phases;
        let e = g.edge_dir(i, j);
        let ai = g.vertex(i);
        let aj = g.vertex(j);
        let mut r_raw = 0.0;
        let mut rho_i2 = 0.0;
        let mut rho_j2 = 0.0;
        for k in 0..dim {
            let wi = u[k] - ai[k];
            let wj = u[k] - aj[k];
            r_raw += wi * e[k];
            rho_i2 += wi * wi;
            rho_j2 += wj * wj;
        }
        let rc = r_raw.clamp(0.0, 1.0);
        let rho_i = rho_i2.sqrt();
        let rho_j = rho_j2.sqrt();
        let rho_ic = rho_i.min(1.0);
        let rho_jc = rho_j.min(1.0);
        let eta_r = self.eta_raw(rc);
        let eta_rm = self.eta_raw(1.0 - rc);
        let eta_r_d = if (0.0..=1.0).contains(&r_raw) {
            self.eta_d(rc)
        } else {
            0.0
        };
        let phi_i = dist_w_closed_form(rho_ic);
        let phi_j = dist_w_closed_form(rho_jc);
        let dphi_i = if rho_i < 1.0 {
            6.0 * rho_ic * (1.0 - rho_ic)
        } else {
            0.0
        };
        let dphi_j = if rho_j < 1.0 {
            6.0 * rho_jc * (1.0 - rho_jc)
        } else {
            0.0
        };
        let b_i = eta_r * (1.0 - phi_i) + eta_rm * phi_j;
        let b_j = eta_r * phi_i + eta_rm * (1.0 - phi_j);

        let (lam_i, lam_j, dlam_i, dlam_j) = if n >= 3 {
            let beta_ji = g.angle_beta_raw(u, j, i); // angle at alpha_j (for psi_i)
            let beta_ij = g.angle_beta_raw(u, i, j); // angle at alpha_i (for psi_j)
            (
                self.lambda_raw(beta_ji),
                self.lambda_raw(beta_ij),
                self.lambda_d(beta_ji),
                self.lambda_d(beta_ij),
            )
        } else {
            (0.0, 0.0, 0.0, 0.0)
        };

        let mut grad_i = vec![0.0; dim];
        let mut grad_j = vec![0.0; dim];
        for k in 0..dim {
            let wi = u[k] - ai[k];
            let wj = u[k] - aj[k];
            let grho_i = if rho_i > 1e-14 { wi / rho_i } else { 0.0 };
            let grho_j = if rho_j > 1e-14 { wj / rho_j } else { 0.0 };
            let db_i = eta_r_d * e[k] * ((1.0 - phi_i) - phi_j) - eta_r * dphi_i * grho_i
                + eta_rm * dphi_j * grho_j;
            let db_j = eta_r_d * e[k] * (phi_i - (1.0 - phi_j)) + eta_r * dphi_i * grho_i
                - eta_rm * dphi_j * grho_j;
            grad_i[k] = (1.0 - lam_i) * db_i;
            grad_j[k] = (1.0 - lam_j) * db_j;
        }
        if n >= 3 {
            // lambda' vanishes wherever the angle gradient degenerates (on
            // the edge axis), so the guarded gradients below are exact.
            if dlam_i != 0.0 {
                let gb = angle_gradient(u, aj, &g.edge_dir(j, i), rho_j2);
                for k in 0..dim {
                    grad_i[k] -= dlam_i * gb[k] * b_i;
                }
            }
            if dlam_j != 0.0 {
                let gb = angle_gradient(u, ai, &e, rho_i2);
                for k in 0..dim {
                    grad_j[k] -= dlam_j * gb[k] * b_j;
                }
            }
        }
        (grad_i, grad_j)
    }

    /// Pointwise (A4) margin at u: 2W - [ |dpsi_{i,j}/2|^2
    /// + (1+delta) |dpsi_0/(2 sqrt3)|^2 + delta |dpsi_{i,j} . dpsi_0| ],
    /// combined with the gradient-bound margin in the same squared units.
    pub fn verify_a4(&self, u: &[f64]) -> f64 {
        let g = &self.spec.geom;
        let dim = g.dim;
        let lbl = g.classify_clamped(u);
        let (i, j) = lbl.sector;
        let (gi, gj) = self.pair_gradients(u, i, j);
        let w2 = 2.0 * self.spec.eval_w(u);
        let mut dij2 = 0.0;
        let mut d02 = 0.0;
        let mut dot = 0.0;
        for k in 0..dim {
            let dij = gj[k] - gi[k];
            let d0 = -(gi[k] + gj[k]);
            dij2 += dij * dij;
            d02 += d0 * d0;
            dot += dij * d0;
        }
        let delta = self.delta_a4;
        let lhs = 0.25 * dij2 + (1.0 + delta) * d02 / 12.0 + delta * dot.abs();
        let m1 = w2 - lhs;
        let gmax2 = {
            let gi2: f64 = gi.iter().map(|x| x * x).sum();
            let gj2: f64 = gj.iter().map(|x| x * x).sum();
            gi2.max(gj2)
        };
        let m2 = self.c_grad * self.c_grad * w2 - gmax2;
        m1.min(m2)
    }

    /// Distance (in phase space) to the nearest classification seam, used by
    /// finite-difference tests to relax tolerances near gradient kinks.
    pub fn seam_distance(&self, u: &[f64]) -> f64 {
        let g = &self.spec.geom;
        if g.n_phases < 3 {
            return f64::INFINITY;
        }
        let lbl = g.classify_clamped(u);
        let (i, j) = lbl.sector;
        let d_assigned = g.dist_to_edge(u, i, j);
        let mut second = f64::INFINITY;
        for &(a, b) in g.pairs() {
            if (a, b) != (i, j) {
                second = second.min(g.dist_to_edge(u, a, b));
            }
        }
        let sector_margin = (second - d_assigned) * 0.5;
        let midline = (g.dist_to_vertex(u, i) - g.dist_to_vertex(u, j)).abs() * 0.5;
        sector_margin.min(midline)
    }
}

#[inline]
fn angle_gradient(u: &[f64], a: &[f64], e: &[f64], rho2: f64) -> Vec<f64> {
    // gradient of beta = atan2(d, r) with r = (u-a).e, d = |u-a-re|
    let dim = u.len();
    let mut r = 0.0;
    for k in 0..dim {
        r += (u[k] - a[k]) * e[k];
    }
    let mut d2 = 0.0;
    for k in 0..dim {
        let p = u[k] - a[k] - r * e[k];
        d2 += p * p;
    }
    let d = d2.sqrt();
    let mut out = vec![0.0; dim];
    if d < 1e-14 || rho2 < 1e-28 {
        return out;
    }
    for k in 0..dim {
        let p = u[k] - a[k] - r * e[k];
        out[k] = (r * p / d - d * e[k]) / rho2;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct IndicatorReport {
    pub entries: Vec<MarginEntry>,
    pub fitted_c_grad: f64,
    pub pass: bool,
}

impl IndicatorSet {
    /// Sampling certification of (A4) plus the structural invariants of the
    /// construction (partition of unity, ranges, supports, derivative budgets
    /// of lambda/eta, Jacobian consistency against finite differences).
    pub fn verify_indicators(&self, n_samples: usize, seed: u64) -> Result<IndicatorReport> {
        if n_samples < 10_000 {
            return Err(Error::config(
                "verify_indicators needs at least 1e4 samples",
            ));
        }
        let g = self.spec.geom.clone();
        let n = g.n_phases;
        let dim = g.dim;
        let mut acc_a4 = MarginAcc::new("a4_pointwise_inequality");
        let mut acc_range = MarginAcc::new("psi_range_and_partition");
        let mut acc_support = MarginAcc::new("psi_support_off_sector");
        let mut acc_lam = MarginAcc::new("lambda_derivative_budget");
        let mut acc_eta = MarginAcc::new("eta_derivative_budget_and_symmetry");
        let mut acc_fd = MarginAcc::new("jacobian_fd_consistency");
        let mut fitted_c: f64 = 0.0;

        let mut halton = Halton::new(dim.min(6), seed);
        let mut cube = vec![0.0; dim];
        let mut bar = vec![0.0; n];
        for s in 0..n_samples {
            halton.next_point(&mut cube);
            unit_cube_to_barycentric(&cube, &mut bar);
            let u = g.from_barycentric(&bar);
            acc_a4.push(self.verify_a4(&u), &u);

            let psi = self.psi(&u);
            let mut sum = 0.0;
            let mut min_v = f64::INFINITY;
            let mut max_v: f64 = 0.0;
            for &p in psi.iter().take(n) {
                sum += p;
                min_v = min_v.min(p);
                max_v = max_v.max(p);
            }
            let total = sum + psi[n];
            acc_range.push(
                (1e-12 - (total - 1.0).abs())
                    .min(min_v)
                    .min(1.0 - max_v)
                    .min(psi[n])
                    .min(1.0 - psi[n]),
                &u,
            );
            let lbl = g.classify_clamped(&u);
            let mut off = 0.0f64;
            for (k, &p) in psi.iter().take(n).enumerate() {
                if k != lbl.sector.0 && k != lbl.sector.1 {
                    off = off.max(p.abs());
                }
            }
            acc_support.push(-off, &u);

            let w2 = 2.0 * self.spec.eval_w(&u);
            if w2 > 1e-16 {
                let rows = self.dpsi(&u);
                for row in rows.iter().take(n) {
                    let g2: f64 = row.iter().map(|x| x * x).sum();
                    fitted_c = fitted_c.max((g2 / w2).sqrt());
                }
            }

            if s % 37 == 0 {
                let rows = self.dpsi(&u);
                let h = 1e-6;
                let seam = self.seam_distance(&u);
                let tol = if seam < 10.0 * h { 1e-2 } else { 1e-4 };
                let mut worst = f64::INFINITY;
                for k in 0..dim {
                    let mut up = u.clone();
                    let mut um = u.clone();
                    up[k] += h;
                    um[k] -= h;
                    if g.dist_to_simplex(&up) > 0.0 || g.dist_to_simplex(&um) > 0.0 {
                        continue;
                    }
                    let pp = self.psi(&up);
                    let pm = self.psi(&um);
                    for r in 0..=n {
                        let fd = (pp[r] - pm[r]) / (2.0 * h);
                        worst = worst.min(tol - (fd - rows[r][k]).abs());
                    }
                }
                if worst.is_finite() {
                    acc_fd.push(worst, &u);
                }
            }
        }

        // lambda / eta budgets on dense 1D grids
        {
            let budget = self.max_lambda_slope_budget();
            let m = 10_000;
            for t in 0..=m {
                let beta = self.lambda_hi * t as f64 / m as f64;
                acc_lam.push(budget - self.lambda_d(beta).abs() + 1e-12, &[beta]);
                let s = t as f64 / m as f64;
                let sym = self.eta_raw(s) + self.eta_raw(1.0 - s) - 1.0;
                acc_eta.push(
                    (2.5 - self.eta_d(s).abs() + 1e-12).min(1e-12 - sym.abs()),
                    &[s],
                );
            }
            acc_lam.push(-(self.lambda_raw(0.0)).abs(), &[0.0]);
            acc_lam.push(
                -(self.lambda_raw(self.lambda_hi) - 1.0).abs(),
                &[self.lambda_hi],
            );
        }

        let entries = vec![
            acc_a4.into_entry(),
            acc_range.into_entry(),
            acc_support.into_entry(),
            acc_lam.into_entry(),
            acc_eta.into_entry(),
            acc_fd.into_entry(),
        ];
        let pass = entries.iter().all(|e| e.min_margin >= MARGIN_TOL);
        Ok(IndicatorReport {
            entries,
            fitted_c_grad: fitted_c,
            pass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::edge_profile;
    use crate::simplex::build_simplex;

    fn ind3() -> IndicatorSet {
        let g = build_simplex(3, 0.25, std::f64::consts::PI / 12.0).unwrap();
        IndicatorSet::new(PotentialSpec::new(g))
    }

    #[test]
    fn lambda_eta_pinned_values() {
        let ind = ind3();
        assert_eq!(ind.lambda_fn(0.0).unwrap(), 0.0);
        let hi = std::f64::consts::FRAC_PI_6;
        assert!((ind.lambda_fn(hi).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ind.lambda_fn(ind.spec.geom.beta_n * 0.99).unwrap(), 0.0);
        let s = 0.37;
        assert!((ind.eta_fn(s).unwrap() + ind.eta_fn(1.0 - s).unwrap() - 1.0).abs() < 1e-12);
        assert!(ind.lambda_fn(-0.5).is_err());
        assert!(ind.eta_fn(1.5).is_err());
    }

    #[test]
    fn derivative_budgets_hold() {
        let ind = ind3();
        let mut max_l: f64 = 0.0;
        let mut max_e: f64 = 0.0;
        for t in 0..10_000 {
            let beta = std::f64::consts::FRAC_PI_6 * t as f64 / 10_000.0;
            max_l = max_l.max(ind.lambda_d(beta).abs());
            let s = t as f64 / 10_000.0;
            max_e = max_e.max(ind.eta_d(s).abs());
        }
        assert!(max_l <= 4.0 + 1e-9, "lambda slope {max_l}");
        assert!(max_e <= 2.5 + 1e-9, "eta slope {max_e}");
    }

    #[test]
    fn psi_at_vertices_and_on_edges() {
        let ind = ind3();
        let g = ind.spec.geom.clone();
        for i in 0..3 {
            let psi = ind.psi(g.vertex(i));
            for (k, &p) in psi.iter().take(3).enumerate() {
                let expect = if k == i { 1.0 } else { 0.0 };
                assert!((p - expect).abs() < 1e-12, "psi_{k} at vertex {i}: {p}");
            }
            assert!(psi[3].abs() < 1e-12);
        }
        for &(i, j) in g.pairs() {
            for t in 0..=50 {
                let r = t as f64 / 50.0;
                let u = g.point_on_edge(i, j, r);
                let psi = ind.psi(&u);
                let phi = dist_w_closed_form(r);
                assert!((psi[i] - (1.0 - phi)).abs() < 1e-12);
                assert!((psi[j] - phi).abs() < 1e-12);
                assert!(psi[3].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn minority_phase_vanishes_at_sector_boundary_angle() {
        let ind = ind3();
        let g = ind.spec.geom.clone();
        let e01 = g.edge_dir(0, 1);
        let ang = std::f64::consts::FRAC_PI_6;
        let rho = 0.2;
        let dir = [
            e01[0] * ang.cos() - e01[1] * ang.sin(),
            e01[0] * ang.sin() + e01[1] * ang.cos(),
        ];
        let u = [rho * dir[0], rho * dir[1]];
        let (_, pj) = ind.pair_values(&u, 0, 1);
        assert!(pj.abs() < 1e-12, "psi_j at the sector boundary: {pj}");
    }

    #[test]
    fn edge_directional_derivative_identity() {
        // along the edge: d/ds psi_{i,j} = 2 sqrt(2W)
        let ind = ind3();
        let g = ind.spec.geom.clone();
        for t in 1..20 {
            let r = t as f64 / 20.0;
            let u = g.point_on_edge(0, 1, r);
            let rows = ind.dpsi(&u);
            let e = g.edge_dir(0, 1);
            let mut dd = 0.0;
            for k in 0..2 {
                dd += (rows[1][k] - rows[0][k]) * e[k];
            }
            let target = 2.0 * (2.0 * edge_profile(r)).sqrt();
            assert!((dd - target).abs() < 1e-10, "r={r}: {dd} vs {target}");
        }
    }

    #[test]
    fn dpsi_rows_zero_at_vertices() {
        let ind = ind3();
        let g = ind.spec.geom.clone();
        let rows = ind.dpsi(g.vertex(1));
        for row in rows {
            for v in row {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn a4_margin_zero_on_edges_and_certification_passes() {
        let ind = ind3();
        let g = ind.spec.geom.clone();
        let u = g.point_on_edge(0, 1, 0.5);
        let m = ind.verify_a4(&u);
        assert!(m.abs() < 1e-10, "edge midpoint margin {m}");
        let rep = ind.verify_indicators(20_000, 17).unwrap();
        for e in &rep.entries {
            assert!(
                e.min_margin >= MARGIN_TOL,
                "{} margin {} at {:?}",
                e.name,
                e.min_margin,
                e.witness
            );
        }
        assert!(rep.pass);
        assert!(rep.fitted_c_grad <= ind.c_grad);
    }

    #[test]
    fn n2_indicators() {
        let g = build_simplex(2, 0.25, 0.1).unwrap();
        let ind = IndicatorSet::new(PotentialSpec::new(g));
        let psi = ind.psi(&[0.3]);
        let phi = dist_w_closed_form(0.3);
        assert!((psi[0] - (1.0 - phi)).abs() < 1e-12);
        assert!((psi[1] - phi).abs() < 1e-12);
        assert!(psi[2].abs() < 1e-12);
    }
}
