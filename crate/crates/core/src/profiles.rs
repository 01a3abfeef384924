//! One-dimensional equilibrium profiles across an edge: the heteroclinic ODE
//! solution, its truncation to a compact transition layer, and the rescaled
//! profile taking values on the edge segment.

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Tabulated solution of theta'(s) = |gamma'|^{-1} sqrt(2 W(gamma(theta)))
/// with theta(0) = 0, truncated at +-rho and rescaled so the profile reaches
/// the wells exactly.
#[derive(Debug, Clone)]
pub struct Profile1D {
    pub edge: (usize, usize),
    pub rho: f64,
    /// Centering shift (zero for the symmetric potential).
    pub s0: f64,
    /// Truncation level theta(rho); equal on both sides by symmetry.
    pub theta_bar: f64,
    /// Uniform table of theta on [0, t_max] (odd extension for t < 0).
    table: Vec<f64>,
    dt: f64,
    // edge frame
    base: Vec<f64>,
    dir: Vec<f64>,
    dim: usize,
}

/// Integrate the profile ODE for the edge (i, j) of the given potential.
///
/// In the constant-speed [-1,1] edge parametrization |gamma'| = 1/2, so the
/// right-hand side is 2 sqrt(2 W_edge(theta)).
pub fn solve_profile(spec: &PotentialSpec, i: usize, j: usize, rho: f64) -> Result<Profile1D> {
    if rho <= 0.0 {
        return Err(Error::config(format!(
            "profile truncation rho={rho} must be positive"
        )));
    }
    let t_max = (rho + 4.0).max(6.0);
    let h = 5e-5;
    let steps = (t_max / h).ceil() as usize;
    let rhs = |theta: f64| -> f64 {
        let th = theta.clamp(-1.0, 1.0);
        let w = 9.0 / 8.0 * (1.0 - th * th) * (1.0 - th * th);
        2.0 * (2.0 * w).sqrt()
    };
    // classic RK4 from theta(0) = 0; the equilibrium at +1 is approached
    // monotonically, so a fixed fine step suffices
    let mut theta = 0.0f64;
    let stride = 20; // table step 1e-3
    let mut table = Vec::with_capacity(steps / stride + 2);
    table.push(0.0);
    for s in 0..steps {
        let k1 = rhs(theta);
        let k2 = rhs(theta + 0.5 * h * k1);
        let k3 = rhs(theta + 0.5 * h * k2);
        let k4 = rhs(theta + h * k3);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !theta.is_finite() {
            return Err(Error::numeric(format!(
                "profile ODE diverged at step {s} (t={})",
                s as f64 * h
            )));
        }
        theta = theta.min(1.0);
        if (s + 1) % stride == 0 {
            table.push(theta);
        }
    }
    let dt = h * stride as f64;
    let theta_bar = sample_table(&table, dt, rho);
    let g = &spec.geom;
    Ok(Profile1D {
        edge: (i, j),
        rho,
        s0: 0.0,
        theta_bar,
        table,
        dt,
        base: g.vertex(i).to_vec(),
        dir: g.edge_dir(i, j),
        dim: g.dim,
    })
}

fn ode_rhs(theta: f64) -> f64 {
    let th = theta.clamp(-1.0, 1.0);
    let w = 9.0 / 8.0 * (1.0 - th * th) * (1.0 - th * th);
    2.0 * (2.0 * w).sqrt()
}

/// Cubic Hermite interpolation with slopes taken from the ODE right-hand
/// side, so tabulated values and derivatives are exactly consistent.
fn sample_table(table: &[f64], dt: f64, t: f64) -> f64 {
    let x = t / dt;
    let k = x.floor() as usize;
    if k + 1 >= table.len() {
        return *table.last().unwrap();
    }
    let s = x - k as f64;
    let y0 = table[k];
    let y1 = table[k + 1];
    let m0 = ode_rhs(y0) * dt;
    let m1 = ode_rhs(y1) * dt;
    let s2 = s * s;
    let s3 = s2 * s;
    y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + m0 * (s3 - 2.0 * s2 + s)
        + y1 * (-2.0 * s3 + 3.0 * s2)
        + m1 * (s3 - s2)
}

impl Profile1D {
    /// Untruncated ODE solution theta(t) (odd in t).
    pub fn theta_tilde(&self, t: f64) -> f64 {
        let v = sample_table(&self.table, self.dt, t.abs());
        if t < 0.0 {
            -v
        } else {
            v
        }
    }

    /// Derivative of theta_tilde from the ODE right-hand side (exact
    /// consistency with the tabulated solution).
    pub fn theta_tilde_prime(&self, t: f64) -> f64 {
        let th = self.theta_tilde(t).clamp(-1.0, 1.0);
        let w = 9.0 / 8.0 * (1.0 - th * th) * (1.0 - th * th);
        2.0 * (2.0 * w).sqrt()
    }

    /// Edge parameter sigma(s) in [-1, 1] of the truncated rescaled profile.
    #[inline]
    pub fn sigma(&self, s: f64) -> f64 {
        let sc = s.clamp(-self.rho, self.rho);
        (self.theta_tilde(sc) / self.theta_bar).clamp(-1.0, 1.0)
    }

    /// Arclength coordinate along the edge in [0, 1].
    #[inline]
    pub fn arclength(&self, s: f64) -> f64 {
        0.5 * (1.0 + self.sigma(s))
    }

    /// Profile value in phase space; equals alpha_i for s <= -rho and
    /// alpha_j for s >= rho.
    pub fn value(&self, s: f64, out: &mut [f64]) {
        let a = self.arclength(s);
        for k in 0..self.dim {
            out[k] = self.base[k] + a * self.dir[k];
        }
    }

    pub fn value_vec(&self, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.value(s, &mut v);
        v
    }

    /// |d theta / ds| of the truncated rescaled profile (zero outside
    /// [-rho, rho]). The edge has unit length, so this equals
    /// (1/2) theta_tilde'(s) / theta_bar.
    pub fn speed(&self, s: f64) -> f64 {
        if s.abs() >= self.rho {
            return 0.0;
        }
        0.5 * self.theta_tilde_prime(s) / self.theta_bar
    }

    /// Energy of the layer: int (eps/2)|d/dx theta(x/eps)|^2
    /// + W(theta(x/eps))/eps dx, which is epsilon-free after substitution.
    pub fn energy_check(&self, spec: &PotentialSpec, _eps: f64) -> f64 {
        // composite Simpson on [-rho-1, rho+1]
        let m = 40_000; // even
        let lo = -self.rho - 1.0;
        let hi = self.rho + 1.0;
        let dt = (hi - lo) / m as f64;
        let mut u = vec![0.0; self.dim];
        let f = |t: f64, u: &mut [f64]| -> f64 {
            let sp = self.speed(t);
            self.value(t, u);
            0.5 * sp * sp + spec.eval_w(u)
        };
        let mut acc = f(lo, &mut u) + f(hi, &mut u);
        for k in 1..m {
            let t = lo + k as f64 * dt;
            acc += f(t, &mut u) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * dt / 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::build_simplex;

    fn spec3() -> PotentialSpec {
        PotentialSpec::new(build_simplex(3, 0.25, std::f64::consts::PI / 12.0).unwrap())
    }

    #[test]
    fn ode_matches_tanh_oracle() {
        let spec = spec3();
        let p = solve_profile(&spec, 0, 1, 2.0).unwrap();
        let mut sup: f64 = 0.0;
        for k in 0..=1000 {
            let t = -5.0 + 10.0 * k as f64 / 1000.0;
            sup = sup.max((p.theta_tilde(t) - (3.0 * t).tanh()).abs());
        }
        assert!(sup < 1e-6, "sup deviation from tanh(3t): {sup}");
        assert!((p.theta_tilde_prime(0.0) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn truncation_is_exact() {
        let spec = spec3();
        let p = solve_profile(&spec, 0, 1, 2.0).unwrap();
        let g = &spec.geom;
        assert_eq!(p.value_vec(2.0), g.vertex(1).to_vec());
        assert_eq!(p.value_vec(5.0), g.vertex(1).to_vec());
        assert_eq!(p.value_vec(-2.0), g.vertex(0).to_vec());
        assert_eq!(p.speed(2.0), 0.0);
    }

    #[test]
    fn antisymmetry_for_the_symmetric_potential() {
        let spec = spec3();
        let p = solve_profile(&spec, 0, 1, 2.0).unwrap();
        for &t in &[0.5, 1.0, 2.0] {
            assert!((p.theta_tilde(-t) + p.theta_tilde(t)).abs() < 1e-8);
        }
        assert_eq!(p.s0, 0.0);
    }

    #[test]
    fn layer_energy_near_unit_surface_tension() {
        let spec = spec3();
        let p = solve_profile(&spec, 0, 1, 2.0).unwrap();
        let e1 = p.energy_check(&spec, 0.05);
        assert!((e1 - 1.0).abs() < 0.01, "energy {e1}");
        // epsilon independence is exact by construction
        let e2 = p.energy_check(&spec, 0.1);
        let e3 = p.energy_check(&spec, 0.025);
        assert!((e1 - e2).abs() < 1e-6 && (e1 - e3).abs() < 1e-6);
        // wide truncation restores the unit action
        let pw = solve_profile(&spec, 0, 1, 5.5).unwrap();
        assert!((pw.energy_check(&spec, 0.05) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn speed_bound_and_exponential_tail() {
        let spec = spec3();
        let p = solve_profile(&spec, 0, 1, 2.0).unwrap();
        let mut prev = -1.0;
        for k in 0..=400 {
            let t = -2.5 + 5.0 * k as f64 / 400.0;
            let a = p.arclength(t);
            assert!(a >= prev - 1e-12, "arclength not monotone at t={t}");
            prev = a;
            // |theta'| <= (1/theta_bar) sqrt(2 W(gamma(theta_tilde))), with a
            // small allowance at the truncation points
            let th = p.theta_tilde(t).clamp(-1.0, 1.0);
            let w = 9.0 / 8.0 * (1.0 - th * th) * (1.0 - th * th);
            assert!(p.speed(t) <= (2.0 * w).sqrt() / p.theta_bar + 1e-4);
            if t.abs() >= 1.0 {
                let tail = 1.0 - p.theta_tilde(t).abs();
                assert!(tail <= 2.0 * (-6.0 * (t.abs() - 1.0)).exp() + 1e-12);
            }
        }
    }

    #[test]
    fn invalid_rho_rejected() {
        let spec = spec3();
        assert!(solve_profile(&spec, 0, 1, -1.0).is_err());
    }
}
