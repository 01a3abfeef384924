//! Evaluation of the energy, the relative entropy, the coercivity
//! functionals, the curvature-dissipation proxies and the bulk phase errors
//! on grid snapshots. All integrals use the midpoint rule on the solver grid
//! with the same centered gradient stencil as the discrete energy, and all
//! reductions run tile-local compensated sums combined in index order so
//! repeated runs are byte-identical.

use crate::calibration::CalibrationField;
use crate::geometry2d::StrongSolution;
use crate::indicators::IndicatorSet;
use crate::potential::PotentialSpec;
use crate::solver::GridField;
use crate::util::{Kahan, V2};
use rayon::prelude::*;

pub const N_COER: usize = 12;

pub const COER_NAMES: [&str; N_COER] = [
    "equipartition_32a",
    "tilt_psi_32b",
    "distw_interface_32c",
    "distw_energy_32d",
    "tangential_32e",
    "psi0_grad_sq_33a",
    "psi_cross_33b",
    "grad_psi0_33c",
    "tilt_gradu_41a",
    "surface_measure_41b",
    "surface_tensor_41c",
    "xi_projection_41d",
];

#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    /// Energy with the gradient part measured spectrally; this is the
    /// monotone quantity of the spectral integrator.
    pub energy_spectral: f64,
    pub e_rel: f64,
    pub l1_err: Vec<f64>,
    pub weighted_err: Vec<f64>,
    pub coercivity: [f64; N_COER],
    pub sum_residual: f64,
    pub h_eps_norm: f64,
    /// The three dissipation-shaped integrals of the entropy inequality:
    /// calibrated motion defect, Cauchy-Schwarz defect, curvature defect.
    pub diss: [f64; 3],
    pub max_excursion: f64,
    /// Minimum of the pointwise relative entropy integrand.
    pub min_integrand: f64,
}

impl DiagnosticsRecord {
    pub fn csv_header(n_phases: usize) -> String {
        let mut cols = vec![
            "t".to_string(),
            "energy".into(),
            "energy_spectral".into(),
            "e_rel".into(),
        ];
        for i in 1..=n_phases {
            cols.push(format!("l1_err_{i}"));
        }
        for i in 1..=n_phases {
            cols.push(format!("weighted_err_{i}"));
        }
        for name in COER_NAMES {
            cols.push(name.to_string());
        }
        cols.push("sum_residual".into());
        cols.push("h_eps_norm".into());
        cols.push("diss_motion".into());
        cols.push("diss_cauchy_schwarz".into());
        cols.push("diss_curvature".into());
        cols.push("max_excursion".into());
        cols.push("min_integrand".into());
        format!("# mcf-lab diagnostics v1\n{}", cols.join(","))
    }

    pub fn csv_row(&self) -> String {
        let mut vals = vec![self.t, self.energy, self.energy_spectral, self.e_rel];
        vals.extend_from_slice(&self.l1_err);
        vals.extend_from_slice(&self.weighted_err);
        vals.extend_from_slice(&self.coercivity);
        vals.push(self.sum_residual);
        vals.push(self.h_eps_norm);
        vals.extend_from_slice(&self.diss);
        vals.push(self.max_excursion);
        vals.push(self.min_integrand);
        vals.iter()
            .map(|v| format!("{v:.17e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Near-vacuum gradient threshold: below it the unit-vector factors are
/// undefined and the integrands they multiply vanish.
fn vac_threshold(field: &GridField) -> f64 {
    1e-12 / field.hx().min(field.hy())
}

/// Plain Allen-Cahn energy.
pub fn energy(field: &GridField, spec: &PotentialSpec) -> f64 {
    let dim = field.dim();
    let nx = field.nx;
    let area = field.cell_area();
    let eps = field.eps;
    let rows: Vec<f64> = (0..field.ny)
        .into_par_iter()
        .map(|iy| {
            let mut acc = Kahan::new();
            let mut u = vec![0.0; dim];
            for ix in 0..nx {
                let idx = iy * nx + ix;
                field.value(idx, &mut u);
                let mut g2 = 0.0;
                for c in 0..dim {
                    let (gx, gy) = field.grad_channel(c, ix, iy);
                    g2 += gx * gx + gy * gy;
                }
                acc.add((0.5 * eps * g2 + spec.eval_w(&u) / eps) * area);
            }
            acc.value()
        })
        .collect();
    let mut total = Kahan::new();
    for r in rows {
        total.add(r);
    }
    total.value()
}

/// Relative entropy E[u | xi].
pub fn relative_entropy(
    field: &GridField,
    calib: &CalibrationField,
    spec: &PotentialSpec,
    ind: &IndicatorSet,
    t: f64,
) -> f64 {
    let rec = compute_record_inner(field, None, calib, spec, ind, t, None);
    rec.e_rel
}

/// The curvature proxy field H_eps (a spatial vector per cell), built from
/// the spectral Laplacian of the snapshot.
pub fn h_epsilon(field: &GridField, spec: &PotentialSpec) -> (Vec<f64>, Vec<f64>) {
    let dim = field.dim();
    let nx = field.nx;
    let ny = field.ny;
    let eps = field.eps;
    let thresh = vac_threshold(field);
    let lap = crate::solver::spectral_laplacian(field);
    let mut hx = vec![0.0; nx * ny];
    let mut hy = vec![0.0; nx * ny];
    let mut u = vec![0.0; dim];
    let mut dw = vec![0.0; dim];
    for iy in 0..ny {
        for ix in 0..nx {
            let idx = iy * nx + ix;
            field.value(idx, &mut u);
            spec.eval_dw(&u, &mut dw);
            let mut g = vec![(0.0, 0.0); dim];
            let mut gn2 = 0.0;
            for c in 0..dim {
                g[c] = field.grad_channel(c, ix, iy);
                gn2 += g[c].0 * g[c].0 + g[c].1 * g[c].1;
            }
            let gn = gn2.sqrt();
            if gn < thresh {
                continue;
            }
            let mut hxv = 0.0;
            let mut hyv = 0.0;
            for c in 0..dim {
                let res = lap[c][idx] - dw[c] / (eps * eps);
                hxv -= eps * res * g[c].0 / gn;
                hyv -= eps * res * g[c].1 / gn;
            }
            hx[idx] = hxv;
            hy[idx] = hyv;
        }
    }
    (hx, hy)
}

/// Plain and distance-weighted L1 phase errors.
pub fn bulk_errors(
    field: &GridField,
    sol: &StrongSolution,
    calib: &CalibrationField,
    ind: &IndicatorSet,
    t: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = sol.n_phases;
    let nx = field.nx;
    let area = field.cell_area();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..field.ny)
        .into_par_iter()
        .map(|iy| {
            let mut plain = vec![Kahan::new(); n];
            let mut weighted = vec![Kahan::new(); n];
            let mut u = vec![0.0; field.dim()];
            let mut psi = vec![0.0; n + 1];
            for ix in 0..nx {
                let idx = iy * nx + ix;
                field.value(idx, &mut u);
                ind.psi_into(&u, &mut psi);
                let (cx, cy) = field.cell_center(ix, iy);
                let x = V2::new(cx, cy);
                for i in 0..n {
                    let chi = sol.chi(x, t, i);
                    let diff = (psi[i] - chi).abs();
                    plain[i].add(diff * area);
                    weighted[i].add(diff * calib.vartheta(x, t, i).abs() * area);
                }
            }
            (
                plain.iter().map(|k| k.value()).collect(),
                weighted.iter().map(|k| k.value()).collect(),
            )
        })
        .collect();
    let mut plain = vec![Kahan::new(); n];
    let mut weighted = vec![Kahan::new(); n];
    for (p, w) in rows {
        for i in 0..n {
            plain[i].add(p[i]);
            weighted[i].add(w[i]);
        }
    }
    (
        plain.iter().map(|k| k.value()).collect(),
        weighted.iter().map(|k| k.value()).collect(),
    )
}

/// Maximum Frobenius residual of the sector sum identity, optionally with a
/// perturbation added to xi_1 (falsification control).
pub fn sum_identity_residual(
    field: &GridField,
    calib: &CalibrationField,
    ind: &IndicatorSet,
    t: f64,
    perturb_xi1: f64,
) -> f64 {
    let dim = field.dim();
    let n = ind.spec.geom.n_phases;
    let nx = field.nx;
    let rows: Vec<f64> = (0..field.ny)
        .into_par_iter()
        .map(|iy| {
            let mut worst: f64 = 0.0;
            let mut u = vec![0.0; dim];
            let mut dpsi = vec![0.0; (n + 1) * dim];
            let mut xi = vec![V2::ZERO; n];
            for ix in 0..nx {
                let idx = iy * nx + ix;
                field.value(idx, &mut u);
                let lbl = ind.spec.geom.classify_clamped(&u);
                let (i, j) = lbl.sector;
                ind.dpsi_into(&u, &mut dpsi);
                let (cx, cy) = field.cell_center(ix, iy);
                calib.xi_into(V2::new(cx, cy), t, &mut xi);
                xi[0].x += perturb_xi1;
                let mut g = vec![(0.0, 0.0); dim];
                for c in 0..dim {
                    g[c] = field.grad_channel(c, ix, iy);
                }
                // gradients of psi_l o u for l = 1..N and psi_0
                let gpsi = |row: usize| -> (f64, f64) {
                    let mut gx = 0.0;
                    let mut gy = 0.0;
                    for c in 0..dim {
                        gx += dpsi[row * dim + c] * g[c].0;
                        gy += dpsi[row * dim + c] * g[c].1;
                    }
                    (gx, gy)
                };
                // LHS: sum_l xi_l (x) grad(psi_l o u)
                let mut lhs = [[0.0f64; 2]; 2];
                for (l, xl) in xi.iter().enumerate().take(n) {
                    let (gx, gy) = gpsi(l);
                    lhs[0][0] += xl.x * gx;
                    lhs[0][1] += xl.x * gy;
                    lhs[1][0] += xl.y * gx;
                    lhs[1][1] += xl.y * gy;
                }
                // RHS: -1/2 xi_{i,j} (x) grad(psi_{i,j} o u)
                //      + sum_{k not in {i,j}} 1/2 xi_k (x) grad(psi_0 o u)
                let xij = xi[i].sub(xi[j]);
                let (gi, gj) = (gpsi(i), gpsi(j));
                let gij = (gj.0 - gi.0, gj.1 - gi.1);
                let g0 = gpsi(n);
                let mut rhs = [[0.0f64; 2]; 2];
                rhs[0][0] -= 0.5 * xij.x * gij.0;
                rhs[0][1] -= 0.5 * xij.x * gij.1;
                rhs[1][0] -= 0.5 * xij.y * gij.0;
                rhs[1][1] -= 0.5 * xij.y * gij.1;
                for (k, xk) in xi.iter().enumerate().take(n) {
                    if k != i && k != j {
                        rhs[0][0] += 0.5 * xk.x * g0.0;
                        rhs[0][1] += 0.5 * xk.x * g0.1;
                        rhs[1][0] += 0.5 * xk.y * g0.0;
                        rhs[1][1] += 0.5 * xk.y * g0.1;
                    }
                }
                let mut fro = 0.0;
                for r in 0..2 {
                    for cc in 0..2 {
                        let d = lhs[r][cc] - rhs[r][cc];
                        fro += d * d;
                    }
                }
                worst = worst.max(fro.sqrt());
            }
            worst
        })
        .collect();
    rows.into_iter().fold(0.0, f64::max)
}

/// Per-cell divergence of every calibration field, used by the curvature
/// dissipation term. For static scenarios this is computed once per run.
pub fn div_xi_fields(field: &GridField, calib: &CalibrationField, t: f64) -> Vec<Vec<f64>> {
    let n = calib.n_phases;
    let nx = field.nx;
    let fd_h = 1e-5;
    let rows: Vec<Vec<f64>> = (0..field.ny)
        .into_par_iter()
        .map(|iy| {
            let mut out = vec![0.0; nx * n];
            let mut xi_p = vec![V2::ZERO; n];
            let mut xi_m = vec![V2::ZERO; n];
            for ix in 0..nx {
                let (cx, cy) = field.cell_center(ix, iy);
                calib.xi_into(V2::new(cx + fd_h, cy), t, &mut xi_p);
                calib.xi_into(V2::new(cx - fd_h, cy), t, &mut xi_m);
                for l in 0..n {
                    out[ix * n + l] = (xi_p[l].x - xi_m[l].x) / (2.0 * fd_h);
                }
                calib.xi_into(V2::new(cx, cy + fd_h), t, &mut xi_p);
                calib.xi_into(V2::new(cx, cy - fd_h), t, &mut xi_m);
                for l in 0..n {
                    out[ix * n + l] += (xi_p[l].y - xi_m[l].y) / (2.0 * fd_h);
                }
            }
            out
        })
        .collect();
    let mut div = vec![vec![0.0; nx * field.ny]; n];
    for (iy, row) in rows.into_iter().enumerate() {
        for ix in 0..nx {
            for l in 0..n {
                div[l][iy * nx + ix] = row[ix * n + l];
            }
        }
    }
    div
}

/// Full diagnostics record at one time.
pub fn record(
    field: &GridField,
    sol: &StrongSolution,
    calib: &CalibrationField,
    spec: &PotentialSpec,
    ind: &IndicatorSet,
    t: f64,
) -> DiagnosticsRecord {
    let div = div_xi_fields(field, calib, t);
    record_with_div(field, sol, calib, spec, ind, t, &div)
}

/// Record using a precomputed divergence cache.
pub fn record_with_div(
    field: &GridField,
    sol: &StrongSolution,
    calib: &CalibrationField,
    spec: &PotentialSpec,
    ind: &IndicatorSet,
    t: f64,
    div: &[Vec<f64>],
) -> DiagnosticsRecord {
    compute_record_inner(field, Some(sol), calib, spec, ind, t, Some(div))
}

fn compute_record_inner(
    field: &GridField,
    sol: Option<&StrongSolution>,
    calib: &CalibrationField,
    spec: &PotentialSpec,
    ind: &IndicatorSet,
    t: f64,
    div_cache: Option<&[Vec<f64>]>,
) -> DiagnosticsRecord {
    let full = div_cache.is_some();
    let dim = field.dim();
    let n = spec.geom.n_phases;
    let nx = field.nx;
    let eps = field.eps;
    let area = field.cell_area();
    let thresh = vac_threshold(field);
    let lap = if full {
        crate::solver::spectral_laplacian(field)
    } else {
        Vec::new()
    };
    let lap = &lap;

    struct RowAcc {
        energy: Kahan,
        energy_spec: Kahan,
        e_rel: Kahan,
        coer: [Kahan; N_COER],
        h_eps: Kahan,
        diss: [Kahan; 3],
        max_exc: f64,
        min_integrand: f64,
    }

    let rows: Vec<RowAcc> = (0..field.ny)
        .into_par_iter()
        .map(|iy| {
            let mut acc = RowAcc {
                energy: Kahan::new(),
                energy_spec: Kahan::new(),
                e_rel: Kahan::new(),
                coer: Default::default(),
                h_eps: Kahan::new(),
                diss: Default::default(),
                max_exc: 0.0,
                min_integrand: f64::INFINITY,
            };
            let mut u = vec![0.0; dim];
            let mut dw = vec![0.0; dim];
            let mut psi = vec![0.0; n + 1];
            let mut dpsi = vec![0.0; (n + 1) * dim];
            let mut xi = vec![V2::ZERO; n];
            for ix in 0..nx {
                let idx = iy * nx + ix;
                field.value(idx, &mut u);
                let (cx, cy) = field.cell_center(ix, iy);
                let x = V2::new(cx, cy);
                let w = spec.eval_w(&u);
                spec.eval_dw(&u, &mut dw);
                let mut g = [(0.0, 0.0); crate::potential::MAX_DIM];
                let mut g2 = 0.0;
                for c in 0..dim {
                    g[c] = field.grad_channel(c, ix, iy);
                    g2 += g[c].0 * g[c].0 + g[c].1 * g[c].1;
                }
                let gn = g2.sqrt();
                let e_density = 0.5 * eps * g2 + w / eps;
                acc.energy.add(e_density * area);
                if full {
                    let mut ulap = 0.0;
                    for c in 0..dim {
                        ulap += u[c] * lap[c][idx];
                    }
                    acc.energy_spec.add((-0.5 * eps * ulap + w / eps) * area);
                }
                acc.max_exc = acc.max_exc.max(spec.geom.dist_to_simplex(&u));

                // indicator machinery
                ind.psi_into(&u, &mut psi);
                ind.dpsi_into(&u, &mut dpsi);
                let lbl = spec.geom.classify_clamped(&u);
                let (pi, pj) = lbl.sector;
                calib.xi_into(x, t, &mut xi);
                let xij = xi[pi].sub(xi[pj]);

                let gpsi = |row: usize, g: &[(f64, f64)]| -> (f64, f64) {
                    let mut gx = 0.0;
                    let mut gy = 0.0;
                    for c in 0..dim {
                        gx += dpsi[row * dim + c] * g[c].0;
                        gy += dpsi[row * dim + c] * g[c].1;
                    }
                    (gx, gy)
                };
                // relative entropy integrand
                let mut cal_term = 0.0;
                for (l, xl) in xi.iter().enumerate().take(n) {
                    let (gx, gy) = gpsi(l, &g[..dim]);
                    cal_term += xl.x * gx + xl.y * gy;
                }
                let integrand = e_density + cal_term;
                acc.e_rel.add(integrand * area);
                acc.min_integrand = acc.min_integrand.min(integrand);

                if !full {
                    continue;
                }

                // geometry distances
                let dist_ij = sol
                    .map(|s| {
                        let sd = s.sdist(x, t, pi, pj);
                        if sd.is_finite() {
                            sd.abs()
                        } else {
                            1.0
                        }
                    })
                    .unwrap_or(1.0);
                let mind2 = (dist_ij * dist_ij).min(1.0);

                // gradients of composed indicators
                let gij = {
                    let a = gpsi(pi, &g[..dim]);
                    let b = gpsi(pj, &g[..dim]);
                    (b.0 - a.0, b.1 - a.1)
                };
                let g0 = gpsi(n, &g[..dim]);
                let gijn = (gij.0 * gij.0 + gij.1 * gij.1).sqrt();

                // (3.2a) equipartition defect
                let eq = eps.sqrt() * gn - (2.0 * w).sqrt() / eps.sqrt();
                acc.coer[0].add(eq * eq * area);
                // (3.2b) tilt wrt |grad psi_ij|
                if gijn >= thresh {
                    let nx_ = gij.0 / gijn;
                    let ny_ = gij.1 / gijn;
                    let dx = nx_ - xij.x;
                    let dy = ny_ - xij.y;
                    acc.coer[1].add((dx * dx + dy * dy) * gijn * area);
                    // (4.1b) surface measure vs gradient magnitude
                    if gn >= thresh {
                        let sm = 0.5 / eps.sqrt() * gijn / gn - eps.sqrt() * gn;
                        acc.coer[9].add(sm * sm * area);
                        // (4.1c) full tensor version
                        let mut fro = 0.0;
                        for c in 0..dim {
                            let dpij = dpsi[pj * dim + c] - dpsi[pi * dim + c];
                            let tx = 0.5 / eps.sqrt() * dpij * nx_ - eps.sqrt() * g[c].0;
                            let ty = 0.5 / eps.sqrt() * dpij * ny_ - eps.sqrt() * g[c].1;
                            fro += tx * tx + ty * ty;
                        }
                        acc.coer[10].add(fro * area);
                    }
                    // (4.1a) tilt wrt eps |grad u|^2
                    let dx2 = dx * dx + dy * dy;
                    acc.coer[8].add(dx2 * eps * g2 * area);
                }
                // (3.2c) distance-weighted interface measure
                acc.coer[2].add(mind2 * gijn * area);
                // (3.2d) distance-weighted energy
                acc.coer[3].add(mind2 * e_density * area);
                // (3.2e) tangential gradient
                {
                    let mut tsum = 0.0;
                    for c in 0..dim {
                        let dot = xij.x * g[c].0 + xij.y * g[c].1;
                        let tx = g[c].0 - xij.x * dot;
                        let ty = g[c].1 - xij.y * dot;
                        tsum += tx * tx + ty * ty;
                    }
                    acc.coer[4].add(eps * tsum * area);
                }
                // (3.3a) |d_u psi_0|^2 / eps
                let mut dpsi0_sq = 0.0;
                let mut cross = 0.0;
                for c in 0..dim {
                    let d0 = dpsi[n * dim + c];
                    dpsi0_sq += d0 * d0;
                    cross += (dpsi[pj * dim + c] - dpsi[pi * dim + c]) * d0;
                }
                acc.coer[5].add(dpsi0_sq / eps * area);
                // (3.3b) |d_u psi_ij . d_u psi_0| / eps
                acc.coer[6].add(cross.abs() / eps * area);
                // (3.3c) |grad(psi_0 o u)|
                acc.coer[7].add((g0.0 * g0.0 + g0.1 * g0.1).sqrt() * area);
                // (4.1d) xi projector vs gradient projector
                if gn >= thresh {
                    // spatial structure tensor grad u^T grad u / |grad u|^2
                    let mut sxx = 0.0;
                    let mut sxy = 0.0;
                    let mut syy = 0.0;
                    for c in 0..dim {
                        sxx += g[c].0 * g[c].0;
                        sxy += g[c].0 * g[c].1;
                        syy += g[c].1 * g[c].1;
                    }
                    sxx /= g2;
                    sxy /= g2;
                    syy /= g2;
                    let pxx = xij.x * xij.x - sxx;
                    let pxy = xij.x * xij.y - sxy;
                    let pyy = xij.y * xij.y - syy;
                    acc.coer[11]
                        .add((pxx * pxx + 2.0 * pxy * pxy + pyy * pyy) * eps * g2 * area);
                }

                // dissipation-shaped integrals and H_eps
                let mut res = [0.0; crate::potential::MAX_DIM];
                let mut res2 = 0.0;
                for c in 0..dim {
                    res[c] = eps * lap[c][idx] - dw[c] / eps;
                    res2 += res[c] * res[c];
                }
                let (hx_v, hy_v) = if gn >= thresh {
                    let mut hxv = 0.0;
                    let mut hyv = 0.0;
                    for c in 0..dim {
                        hxv -= res[c] * g[c].0 / gn;
                        hyv -= res[c] * g[c].1 / gn;
                    }
                    (hxv, hyv)
                } else {
                    (0.0, 0.0)
                };
                let h2 = hx_v * hx_v + hy_v * hy_v;
                acc.h_eps.add(h2 / (2.0 * eps) * area);
                // D1: | H - eps (B.xi) xi |grad u| |^2 / (2 eps)
                let b = calib.b_field(x, t);
                let bxi = b.x * xij.x + b.y * xij.y;
                let mx = hx_v - eps * bxi * xij.x * gn;
                let my = hy_v - eps * bxi * xij.y * gn;
                acc.diss[0].add((mx * mx + my * my) / (2.0 * eps) * area);
                // D2: (|eps lap u - dW/eps|^2 - |H|^2) / (2 eps)
                acc.diss[1].add((res2 - h2) / (2.0 * eps) * area);
                // D3: | res + sum_i (div xi_i) d_u psi_i |^2 / (4 eps)
                let divs = div_cache.unwrap();
                let mut d3 = 0.0;
                for c in 0..dim {
                    let mut v = res[c];
                    for (l, dl) in divs.iter().enumerate().take(n) {
                        v += dl[idx] * dpsi[l * dim + c];
                    }
                    d3 += v * v;
                }
                acc.diss[2].add(d3 / (4.0 * eps) * area);
            }
            acc
        })
        .collect();

    let mut energy_total = Kahan::new();
    let mut energy_spec = Kahan::new();
    let mut e_rel = Kahan::new();
    let mut coer = [0.0f64; N_COER];
    let mut coer_acc: Vec<Kahan> = (0..N_COER).map(|_| Kahan::new()).collect();
    let mut h_eps = Kahan::new();
    let mut diss_acc = [Kahan::new(), Kahan::new(), Kahan::new()];
    let mut max_exc = 0.0f64;
    let mut min_int = f64::INFINITY;
    for r in rows {
        energy_total.add(r.energy.value());
        energy_spec.add(r.energy_spec.value());
        e_rel.add(r.e_rel.value());
        for k in 0..N_COER {
            coer_acc[k].add(r.coer[k].value());
        }
        h_eps.add(r.h_eps.value());
        for k in 0..3 {
            diss_acc[k].add(r.diss[k].value());
        }
        max_exc = max_exc.max(r.max_exc);
        min_int = min_int.min(r.min_integrand);
    }
    for k in 0..N_COER {
        coer[k] = coer_acc[k].value();
    }

    let (l1, weighted) = if full {
        bulk_errors(field, sol.unwrap(), calib, ind, t)
    } else {
        (vec![0.0; n], vec![0.0; n])
    };
    let sum_res = if full {
        sum_identity_residual(field, calib, ind, t, 0.0)
    } else {
        0.0
    };

    DiagnosticsRecord {
        t,
        energy: energy_total.value(),
        energy_spectral: energy_spec.value(),
        e_rel: e_rel.value(),
        l1_err: l1,
        weighted_err: weighted,
        coercivity: coer,
        sum_residual: sum_res,
        h_eps_norm: h_eps.value(),
        diss: [
            diss_acc[0].value(),
            diss_acc[1].value(),
            diss_acc[2].value(),
        ],
        max_excursion: max_exc,
        min_integrand: min_int,
    }
}
