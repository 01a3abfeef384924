//! Configuration, run orchestration, epsilon sweeps and rate fitting.
//!
//! A run builds the whole stack (simplex, potential, indicators, scenario,
//! calibration, profiles, initial data), integrates to the horizon and
//! records diagnostics at a fixed cadence. A sweep repeats this over a
//! decreasing epsilon list with the grid refined proportionally, then fits
//! log-log convergence slopes of the tracked metrics.

use crate::calibration::{build_calibration, CalibrationField};
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::geometry2d::{make_scenario, ScenarioKind, StrongSolution, SQRT3};
use crate::indicators::IndicatorSet;
use crate::initdata::{build_initial, profiles_for, InitialData};
use crate::potential::PotentialSpec;
use crate::simplex::build_simplex;
use crate::solver::{GridField, Scheme, Solver, SolverConfig};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Config {
    pub scenario: String,
    pub n_phases: usize,
    pub l: f64,
    pub eps: f64,
    pub eps_list: Vec<f64>,
    pub cells_per_eps: f64,
    pub t_end: f64,
    pub dt_factor: f64,
    pub scheme: Scheme,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub r0: f64,
    pub snapshots: bool,
    pub rho_profile: f64,
    pub ticks: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scenario: "flat".into(),
            n_phases: 3,
            l: 0.0, // 0 -> per-scenario default
            eps: 0.04,
            eps_list: vec![],
            cells_per_eps: 8.0,
            t_end: 0.004,
            dt_factor: 64.0,
            scheme: Scheme::SemiImplicitSpectral,
            out_dir: PathBuf::from("out"),
            seed: 0,
            r0: 0.3,
            snapshots: false,
            rho_profile: 2.0,
            ticks: 24,
        }
    }
}

impl Config {
    /// Parse the flat key-value configuration (TOML grammar).
    pub fn parse(text: &str) -> Result<Config> {
        let value: toml::Value = text
            .parse()
            .map_err(|e| Error::config(format!("config parse error: {e}")))?;
        let table = value
            .as_table()
            .ok_or_else(|| Error::config("config must be a table"))?;
        let mut cfg = Config::default();
        for (key, v) in table {
            match key.as_str() {
                "scenario" => {
                    cfg.scenario = v
                        .as_str()
                        .ok_or_else(|| Error::config("scenario must be a string"))?
                        .to_string()
                }
                "n_phases" => cfg.n_phases = int_of(v, "n_phases")? as usize,
                "L" | "l" => cfg.l = num_of(v, "L")?,
                "eps" => cfg.eps = num_of(v, "eps")?,
                "eps_list" => {
                    let arr = v
                        .as_array()
                        .ok_or_else(|| Error::config("eps_list must be an array"))?;
                    cfg.eps_list = arr
                        .iter()
                        .map(|x| num_of(x, "eps_list entry"))
                        .collect::<Result<_>>()?;
                }
                "cells_per_eps" => cfg.cells_per_eps = num_of(v, "cells_per_eps")?,
                "t_end" => cfg.t_end = num_of(v, "t_end")?,
                "dt_factor" => cfg.dt_factor = num_of(v, "dt_factor")?,
                "scheme" => {
                    cfg.scheme = Scheme::parse(
                        v.as_str()
                            .ok_or_else(|| Error::config("scheme must be a string"))?,
                    )?
                }
                "out_dir" => {
                    cfg.out_dir = PathBuf::from(
                        v.as_str()
                            .ok_or_else(|| Error::config("out_dir must be a string"))?,
                    )
                }
                "seed" => cfg.seed = int_of(v, "seed")? as u64,
                "r0" => cfg.r0 = num_of(v, "r0")?,
                "snapshots" => {
                    cfg.snapshots = v
                        .as_bool()
                        .ok_or_else(|| Error::config("snapshots must be a bool"))?
                }
                "rho_profile" => cfg.rho_profile = num_of(v, "rho_profile")?,
                "ticks" => cfg.ticks = int_of(v, "ticks")? as usize,
                other => {
                    return Err(Error::config(format!("unknown config key '{other}'")));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_phases < 2 || self.n_phases > 4 {
            return Err(Error::config("n_phases must be 2, 3 or 4"));
        }
        if self.eps <= 0.0 || self.t_end < 0.0 {
            return Err(Error::config("eps and t_end must be positive"));
        }
        scenario_kind(&self.scenario, self.r0)?;
        Ok(())
    }

    pub fn box_size(&self) -> f64 {
        if self.l > 0.0 {
            return self.l;
        }
        match self.scenario.as_str() {
            "flat" => 1.28,
            "circle" => 1.28,
            _ => 0.6 * SQRT3,
        }
    }
}

fn num_of(v: &toml::Value, key: &str) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| Error::config(format!("{key} must be a number")))
}

fn int_of(v: &toml::Value, key: &str) -> Result<i64> {
    v.as_integer()
        .ok_or_else(|| Error::config(format!("{key} must be an integer")))
}

pub fn scenario_kind(name: &str, r0: f64) -> Result<ScenarioKind> {
    match name {
        "flat" => Ok(ScenarioKind::Flat),
        "circle" => Ok(ScenarioKind::Circle { r0 }),
        "triple_y" => Ok(ScenarioKind::TripleY),
        other => Err(Error::config(format!("unknown scenario '{other}'"))),
    }
}

/// Grid sizes with only small prime factors keep the transforms fast.
pub fn fft_friendly(n: usize) -> usize {
    fn smooth(mut m: usize) -> bool {
        for p in [2usize, 3, 5, 7] {
            while m % p == 0 {
                m /= p;
            }
        }
        m == 1
    }
    let mut m = n.max(8);
    while !smooth(m) {
        m += 1;
    }
    m
}

/// The full model stack shared by runs at different epsilon.
pub struct Stack {
    pub spec: Arc<PotentialSpec>,
    pub ind: IndicatorSet,
    pub sol: StrongSolution,
    pub calib: CalibrationField,
}

pub fn build_stack(cfg: &Config) -> Result<Stack> {
    let n = cfg.n_phases;
    let beta_n = if n >= 3 {
        std::f64::consts::PI / (12.0 * (n as f64 - 2.0))
    } else {
        0.1
    };
    let geom = build_simplex(n, 0.25, beta_n)?;
    let spec = Arc::new(PotentialSpec::new(geom));
    let ind = IndicatorSet::new((*spec).clone());
    let kind = scenario_kind(&cfg.scenario, cfg.r0)?;
    let sol = make_scenario(kind, cfg.box_size(), cfg.t_end)?;
    // interfaces must stay clear of their periodic images: the calibration
    // tube plus the profile support must fit in the gap to the boundary
    if let ScenarioKind::Circle { r0 } = kind {
        let eps_max = cfg
            .eps
            .max(cfg.eps_list.iter().cloned().fold(0.0, f64::max));
        let clearance = sol.lx / 2.0 - r0;
        let r_cal = (sol.lx / 8.0).min(0.5 * sol.circle_radius(cfg.t_end));
        if clearance < (0.999 * sol.lx / 4.0).min(r_cal + 2.0 * cfg.rho_profile * eps_max) {
            return Err(Error::config(
                "circle interface too close to the periodic boundary at this eps",
            ));
        }
    }
    let calib = build_calibration(&sol)?;
    Ok(Stack {
        spec,
        ind,
        sol,
        calib,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusSample {
    pub t: f64,
    pub measured: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub eps: f64,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub steps: usize,
    pub e_rel0: f64,
    pub sup_e_rel: f64,
    pub sup_l1: f64,
    pub weighted0: f64,
    pub weighted_final: f64,
    /// Gronwall growth constant: max over ticks of the discrete log slope.
    pub c_fit: f64,
    /// Max over ticks of each coercivity value divided by E_rel.
    pub coer_ratio: Vec<f64>,
    pub min_dissipation: f64,
    pub max_sum_residual: f64,
    pub max_excursion: f64,
    /// Max per-step energy increase relative to the initial energy.
    pub max_energy_uptick: f64,
    pub min_integrand: f64,
    pub radius_track: Vec<RadiusSample>,
}

pub struct RunResult {
    pub summary: RunSummary,
    pub records: Vec<DiagnosticsRecord>,
    pub field: GridField,
}

/// Measured circle radius from the psi_1 area.
fn psi_area_radius(field: &GridField, ind: &IndicatorSet) -> f64 {
    let mut area = crate::util::Kahan::new();
    let mut u = vec![0.0; field.dim()];
    let n = ind.spec.geom.n_phases;
    let mut psi = vec![0.0; n + 1];
    for idx in 0..field.nx * field.ny {
        field.value(idx, &mut u);
        ind.psi_into(&u, &mut psi);
        area.add(psi[0] * field.cell_area());
    }
    (area.value() / std::f64::consts::PI).max(0.0).sqrt()
}

/// Integrate one epsilon to the horizon, recording diagnostics.
pub fn run_single(cfg: &Config, stack: &Stack, eps: f64, write_csv: bool) -> Result<RunResult> {
    let sol = &stack.sol;
    let nx = fft_friendly((cfg.cells_per_eps * sol.lx / eps).ceil() as usize);
    let ny = fft_friendly((cfg.cells_per_eps * sol.ly / eps).ceil() as usize);
    let profiles = profiles_for(&stack.spec, sol, cfg.rho_profile)?;
    let data: InitialData = build_initial(sol, &stack.spec, &profiles, eps, nx, ny)?;
    let mut field = data.field;

    let scfg = SolverConfig {
        scheme: cfg.scheme,
        dt_factor: cfg.dt_factor,
        ..Default::default()
    };
    let mut solver = Solver::new(scfg, stack.spec.clone(), &field)?;
    let total_steps = (cfg.t_end / solver.dt).ceil() as usize;
    let cadence = (total_steps / cfg.ticks.max(1)).max(1);

    // divergence cache: static scenarios share it across ticks
    let static_fields = !matches!(sol.kind, ScenarioKind::Circle { .. });
    let mut div_cache: Option<Vec<Vec<f64>>> = None;

    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut radius_track = Vec::new();
    let circle = matches!(sol.kind, ScenarioKind::Circle { .. });
    {
        let stack_ref = stack;
        let mut tick = |f: &GridField, s: &Solver| -> Result<()> {
            let t = f.t;
            if div_cache.is_none() || !static_fields {
                div_cache = Some(diagnostics::div_xi_fields(f, &stack_ref.calib, t));
            }
            let mut rec = diagnostics::record_with_div(
                f,
                sol,
                &stack_ref.calib,
                &stack_ref.spec,
                &stack_ref.ind,
                t,
                div_cache.as_ref().unwrap(),
            );
            rec.max_excursion = rec.max_excursion.max(s.excursion_seen);
            if circle {
                radius_track.push(RadiusSample {
                    t,
                    measured: psi_area_radius(f, &stack_ref.ind),
                    exact: sol.circle_radius(t),
                });
            }
            records.push(rec);
            Ok(())
        };
        solver.run(&mut field, cfg.t_end, cadence, |f, s| tick(f, s))?;
    }

    // summarize
    let e0 = records[0].energy;
    let n = sol.n_phases;
    let mut sup_e_rel: f64 = 0.0;
    let mut sup_l1: f64 = 0.0;
    let mut c_fit: f64 = 0.0;
    let mut coer_ratio = vec![0.0f64; diagnostics::N_COER];
    let mut min_diss = f64::INFINITY;
    let mut max_res: f64 = 0.0;
    let mut max_exc: f64 = 0.0;
    let mut max_uptick: f64 = 0.0;
    let mut min_integrand = f64::INFINITY;
    for (k, rec) in records.iter().enumerate() {
        sup_e_rel = sup_e_rel.max(rec.e_rel);
        let l1max = rec
            .l1_err
            .iter()
            .take(n)
            .cloned()
            .fold(0.0f64, f64::max);
        sup_l1 = sup_l1.max(l1max);
        for (i, &v) in rec.coercivity.iter().enumerate() {
            if rec.e_rel > 1e-300 {
                coer_ratio[i] = coer_ratio[i].max(v / rec.e_rel);
            }
        }
        for d in rec.diss {
            min_diss = min_diss.min(d);
        }
        max_res = max_res.max(rec.sum_residual);
        max_exc = max_exc.max(rec.max_excursion);
        min_integrand = min_integrand.min(rec.min_integrand);
        if k > 0 {
            let prev = &records[k - 1];
            let steps_between = ((rec.t - prev.t) / solver.dt).round().max(1.0);
            let uptick = (rec.energy_spectral - prev.energy_spectral)
                / (steps_between * e0.max(1e-300));
            max_uptick = max_uptick.max(uptick);
            if rec.e_rel > 1e-300 && prev.e_rel > 1e-300 && rec.t > prev.t {
                let slope = (rec.e_rel.ln() - prev.e_rel.ln()) / (rec.t - prev.t);
                c_fit = c_fit.max(slope);
            }
        }
    }

    let weighted_max = |r: &DiagnosticsRecord| -> f64 {
        r.weighted_err.iter().take(n).cloned().fold(0.0f64, f64::max)
    };
    let summary = RunSummary {
        eps,
        nx,
        ny,
        dt: solver.dt,
        steps: solver.steps_taken,
        e_rel0: records[0].e_rel,
        sup_e_rel,
        sup_l1,
        weighted0: weighted_max(&records[0]),
        weighted_final: weighted_max(records.last().unwrap()),
        c_fit,
        coer_ratio,
        min_dissipation: min_diss,
        max_sum_residual: max_res,
        max_excursion: max_exc,
        max_energy_uptick: max_uptick,
        min_integrand,
        radius_track,
    };

    if write_csv {
        std::fs::create_dir_all(&cfg.out_dir)?;
        let path = cfg.out_dir.join(format!("diagnostics_{eps}.csv"));
        let mut out = String::new();
        out.push_str(&DiagnosticsRecord::csv_header(n));
        out.push('\n');
        for rec in &records {
            out.push_str(&rec.csv_row());
            out.push('\n');
        }
        std::fs::write(path, out)?;
        if cfg.snapshots {
            write_snapshot(cfg, &field, &stack.ind, field.t)?;
        }
    }

    Ok(RunResult {
        summary,
        records,
        field,
    })
}

/// Grid dump: x, y, order parameter channels and indicator values.
pub fn write_snapshot(
    cfg: &Config,
    field: &GridField,
    ind: &IndicatorSet,
    t: f64,
) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let n = ind.spec.geom.n_phases;
    let path = cfg.out_dir.join(format!("snapshot_{t:.6}.csv"));
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write!(
        w,
        "# mcf-lab snapshot v1 scenario={} N={} Lx={:.17e} Ly={:.17e} nx={} ny={} eps={:.17e} t={:.17e}\nx,y",
        cfg.scenario, n, field.lx, field.ly, field.nx, field.ny, field.eps, t
    )?;
    for c in 1..field.dim() + 1 {
        write!(w, ",u_{c}")?;
    }
    for i in 1..=n {
        write!(w, ",psi_{i}")?;
    }
    writeln!(w)?;
    let mut u = vec![0.0; field.dim()];
    let mut psi = vec![0.0; n + 1];
    for iy in 0..field.ny {
        for ix in 0..field.nx {
            let idx = iy * field.nx + ix;
            let (x, y) = field.cell_center(ix, iy);
            field.value(idx, &mut u);
            ind.psi_into(&u, &mut psi);
            write!(w, "{x:.17e},{y:.17e}")?;
            for c in 0..field.dim() {
                write!(w, ",{:.17e}", u[c])?;
            }
            for p in psi.iter().take(n) {
                write!(w, ",{p:.17e}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Initial-field dump with region tags.
pub fn write_initial_dump(
    cfg: &Config,
    data: &InitialData,
    eps: f64,
) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let field = &data.field;
    let path = cfg.out_dir.join(format!("initial_{eps}.csv"));
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write!(
        w,
        "# mcf-lab initial v1 scenario={} N={} Lx={:.17e} Ly={:.17e} nx={} ny={} eps={:.17e}\nx,y",
        cfg.scenario,
        cfg.n_phases,
        field.lx,
        field.ly,
        field.nx,
        field.ny,
        eps
    )?;
    for c in 1..field.dim() + 1 {
        write!(w, ",u_{c}")?;
    }
    writeln!(w, ",region")?;
    let mut u = vec![0.0; field.dim()];
    for iy in 0..field.ny {
        for ix in 0..field.nx {
            let idx = iy * field.nx + ix;
            let (x, y) = field.cell_center(ix, iy);
            field.value(idx, &mut u);
            write!(w, "{x:.17e},{y:.17e}")?;
            for c in 0..field.dim() {
                write!(w, ",{:.17e}", u[c])?;
            }
            writeln!(w, ",{}", data.tags[idx])?;
        }
    }
    Ok(())
}

/// Ordinary least squares on (log eps, log value).
pub fn fit_order(eps_list: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if eps_list.len() < 3 || eps_list.len() != values.len() {
        return Err(Error::config("rate fit needs at least 3 points"));
    }
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::numeric(
            "rate fit inconclusive: nonpositive metric value",
        ));
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok((slope, r2))
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricFit {
    pub name: String,
    pub values: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub scenario: String,
    pub eps_list: Vec<f64>,
    pub runs: Vec<RunSummary>,
    pub fits: Vec<MetricFit>,
    pub pass: bool,
}

/// Run the sweep and fit convergence orders.
pub fn run_sweep(cfg: &Config) -> Result<RateReport> {
    if cfg.eps_list.len() < 3 {
        return Err(Error::config(
            "a sweep needs at least three epsilon values",
        ));
    }
    let mut sorted = cfg.eps_list.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if sorted != cfg.eps_list {
        return Err(Error::config("eps_list must be strictly decreasing"));
    }
    if cfg.cells_per_eps < 8.0 {
        return Err(Error::config("sweeps require at least 8 cells per eps"));
    }
    let stack = build_stack(cfg)?;
    let mut runs = Vec::new();
    for &eps in &cfg.eps_list {
        let mut c = cfg.clone();
        c.eps = eps;
        let res = run_single(&c, &stack, eps, true)?;
        runs.push(res.summary);
    }

    let sup_l1: Vec<f64> = runs.iter().map(|r| r.sup_l1).collect();
    let sup_erel: Vec<f64> = runs.iter().map(|r| r.sup_e_rel).collect();
    let (s_l1, r2_l1) = fit_order(&cfg.eps_list, &sup_l1)?;
    let (s_er, r2_er) = fit_order(&cfg.eps_list, &sup_erel)?;
    let fits = vec![
        MetricFit {
            name: "sup_t_max_i_l1_err".into(),
            values: sup_l1,
            slope: s_l1,
            r2: r2_l1,
            threshold: 0.5,
            pass: s_l1 >= 0.5,
        },
        MetricFit {
            name: "sup_t_e_rel".into(),
            values: sup_erel,
            slope: s_er,
            r2: r2_er,
            threshold: 1.0,
            pass: s_er >= 1.0,
        },
    ];
    let pass = fits.iter().all(|f| f.pass);
    let report = RateReport {
        scenario: cfg.scenario.clone(),
        eps_list: cfg.eps_list.clone(),
        runs,
        fits,
        pass,
    };
    std::fs::create_dir_all(&cfg.out_dir)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::numeric(format!("report serialization failed: {e}")))?;
    std::fs::write(cfg.out_dir.join("rate_report.json"), json)?;
    Ok(report)
}

/// Convenience wrapper for single runs from the CLI.
pub fn run_simulate(cfg: &Config) -> Result<RunResult> {
    let stack = build_stack(cfg)?;
    let profiles = profiles_for(&stack.spec, &stack.sol, cfg.rho_profile)?;
    let nx = fft_friendly((cfg.cells_per_eps * stack.sol.lx / cfg.eps).ceil() as usize);
    let ny = fft_friendly((cfg.cells_per_eps * stack.sol.ly / cfg.eps).ceil() as usize);
    let data = build_initial(&stack.sol, &stack.spec, &profiles, cfg.eps, nx, ny)?;
    write_initial_dump(cfg, &data, cfg.eps)?;
    run_single(cfg, &stack, cfg.eps, true)
}

/// Paths of everything a sweep writes (used by the determinism check).
pub fn sweep_output_files(cfg: &Config) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = cfg
        .eps_list
        .iter()
        .map(|eps| cfg.out_dir.join(format!("diagnostics_{eps}.csv")))
        .collect();
    files.push(cfg.out_dir.join("rate_report.json"));
    files
}

pub fn read_config_file(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    Config::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_order_fixtures() {
        let eps = [0.04, 0.02, 0.01];
        let (s, r2) = fit_order(&eps, &eps).unwrap();
        assert!((s - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        let sq: Vec<f64> = eps.iter().map(|e| e.sqrt()).collect();
        let (s, _) = fit_order(&eps, &sq).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
        // hand-computed regression fixture
        let vals = [3.1e-2, 1.62e-2, 8.4e-3];
        let (s, r2) = fit_order(&eps, &vals).unwrap();
        assert!((s - 0.9418).abs() < 1e-3, "slope {s}");
        assert!(r2 > 0.999);
        // degenerate inputs
        assert!(fit_order(&eps[..2], &vals[..2]).is_err());
        assert!(fit_order(&eps, &[1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn config_parsing_and_validation() {
        let cfg = Config::parse(
            "scenario = \"circle\"\nn_phases = 3\nL = 1.0\neps = 0.02\nt_end = 0.02\nr0 = 0.3\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario, "circle");
        assert_eq!(cfg.seed, 7);
        assert!((cfg.r0 - 0.3).abs() < 1e-15);
        assert!(Config::parse("scenario = \"warp\"\n").is_err());
        assert!(Config::parse("bogus_key = 3\n").is_err());
        // single-epsilon sweep is a configuration error
        let mut c = Config::default();
        c.eps_list = vec![0.04];
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn fft_friendly_sizes() {
        assert_eq!(fft_friendly(128), 128);
        assert_eq!(fft_friendly(211), 216);
        assert_eq!(fft_friendly(831), 840);
    }

    #[test]
    fn flat_short_run_has_clean_invariants() {
        let cfg = Config {
            scenario: "flat".into(),
            eps: 0.08,
            t_end: 0.0008,
            ticks: 4,
            out_dir: std::env::temp_dir().join("mcf_harness_test"),
            ..Default::default()
        };
        let stack = build_stack(&cfg).unwrap();
        let res = run_single(&cfg, &stack, cfg.eps, false).unwrap();
        let s = &res.summary;
        assert!(s.e_rel0 > 0.0 && s.e_rel0 < 0.1);
        assert!(s.max_excursion <= 1e-6, "excursion {}", s.max_excursion);
        assert!(s.min_dissipation >= -1e-10);
        assert!(s.max_sum_residual <= 1e-10);
        assert!(
            s.max_energy_uptick <= 1e-8,
            "energy uptick {}",
            s.max_energy_uptick
        );
        assert!(s.min_integrand >= -1e-10);
        // diagnostics stream strictly increasing in t
        for w in res.records.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }
}
