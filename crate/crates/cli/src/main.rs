//! Command line front end: simulation runs, epsilon sweeps, construction
//! verifiers and profile dumps.
//!
//! Exit codes: 0 success, 2 verification failure, 3 numeric failure,
//! 4 configuration error.

use clap::{Parser, Subcommand};
use mcf_core::error::Error;
use mcf_core::harness::{self, Config};
use mcf_core::indicators::IndicatorSet;
use mcf_core::potential::PotentialSpec;
use mcf_core::profiles::solve_profile;
use mcf_core::simplex::build_simplex;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "mcf-lab",
    about = "Vectorial Allen-Cahn laboratory for multiphase mean curvature flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one configuration and write diagnostics CSV files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the epsilon sweep of a configuration and fit convergence rates.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Certify the potential construction (growth bounds, action, symmetry).
    VerifyPotential {
        #[arg(long, default_value_t = 3)]
        n_phases: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the indicator functions (pointwise inequality, budgets).
    VerifyIndicators {
        #[arg(long, default_value_t = 3)]
        n_phases: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the calibration fields of a scenario.
    VerifyCalibration {
        #[arg(long, default_value = "triple_y")]
        scenario: String,
        #[arg(long, default_value_t = 0.0)]
        l: f64,
        #[arg(long, default_value_t = 0.01)]
        t_end: f64,
        #[arg(long, default_value_t = 0.3)]
        r0: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        bands: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the one-dimensional equilibrium profile as CSV.
    Profile1d {
        /// Edge as "i,j" with 1-based phase indices.
        #[arg(long, default_value = "1,2")]
        edge: String,
        #[arg(long, default_value_t = 3)]
        n_phases: usize,
        #[arg(long, default_value_t = 2.0)]
        rho: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn default_spec(n_phases: usize) -> Result<PotentialSpec, Error> {
    let beta = if n_phases >= 3 {
        std::f64::consts::PI / (12.0 * (n_phases as f64 - 2.0))
    } else {
        0.1
    };
    Ok(PotentialSpec::new(build_simplex(n_phases, 0.25, beta)?))
}

fn emit(text: String, out: Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Cmd::Simulate { config } => {
            let cfg = harness::read_config_file(&config)?;
            let res = harness::run_simulate(&cfg)?;
            let json = serde_json::to_string_pretty(&res.summary)
                .map_err(|e| Error::Numeric(e.to_string()))?;
            std::fs::create_dir_all(&cfg.out_dir)?;
            std::fs::write(cfg.out_dir.join("run_summary.json"), &json)?;
            println!("{json}");
            Ok(0)
        }
        Cmd::Sweep { config } => {
            let cfg = harness::read_config_file(&config)?;
            let report = harness::run_sweep(&cfg)?;
            for fit in &report.fits {
                println!(
                    "{}: slope {:.4} (threshold {:.2}) r2 {:.4} -> {}",
                    fit.name,
                    fit.slope,
                    fit.threshold,
                    fit.r2,
                    if fit.pass { "pass" } else { "FAIL" }
                );
            }
            if report.pass {
                Ok(0)
            } else {
                Err(Error::verification("sweep rate thresholds not met"))
            }
        }
        Cmd::VerifyPotential {
            n_phases,
            samples,
            seed,
            out,
        } => {
            let spec = default_spec(n_phases)?;
            let report = spec.verify_assumptions(samples, seed)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numeric(e.to_string()))?;
            emit(json, out)?;
            if report.pass {
                Ok(0)
            } else {
                Err(Error::verification(format!(
                    "potential certification failed: {:?}",
                    report
                        .failed()
                        .iter()
                        .map(|e| e.name.clone())
                        .collect::<Vec<_>>()
                )))
            }
        }
        Cmd::VerifyIndicators {
            n_phases,
            samples,
            seed,
            out,
        } => {
            let spec = default_spec(n_phases)?;
            let ind = IndicatorSet::new(spec);
            let report = ind.verify_indicators(samples, seed)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numeric(e.to_string()))?;
            emit(json, out)?;
            if report.pass {
                Ok(0)
            } else {
                Err(Error::verification("indicator certification failed"))
            }
        }
        Cmd::VerifyCalibration {
            scenario,
            l,
            t_end,
            r0,
            samples,
            bands,
            seed,
            out,
        } => {
            let kind = harness::scenario_kind(&scenario, r0)?;
            let box_l = if l > 0.0 {
                l
            } else {
                Config {
                    scenario: scenario.clone(),
                    ..Default::default()
                }
                .box_size()
            };
            let sol = mcf_core::geometry2d::make_scenario(kind, box_l, t_end)?;
            let cal = mcf_core::calibration::build_calibration(&sol)?;
            let report = cal.verify_calibration(samples, bands, seed)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numeric(e.to_string()))?;
            emit(json, out)?;
            if report.pass {
                Ok(0)
            } else {
                Err(Error::verification("calibration certification failed"))
            }
        }
        Cmd::Profile1d {
            edge,
            n_phases,
            rho,
            out,
        } => {
            let parts: Vec<&str> = edge.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::config("edge must be of the form i,j"));
            }
            let i: usize = parts[0]
                .trim()
                .parse()
                .map_err(|_| Error::config("bad edge index"))?;
            let j: usize = parts[1]
                .trim()
                .parse()
                .map_err(|_| Error::config("bad edge index"))?;
            if i == 0 || j == 0 || i > n_phases || j > n_phases || i == j {
                return Err(Error::config("edge indices must be distinct, 1-based"));
            }
            let spec = default_spec(n_phases)?;
            let profile = solve_profile(&spec, i - 1, j - 1, rho)?;
            let mut csv = String::from("s,theta_tilde,theta_tilde_prime\n");
            let mut t = -(rho + 3.0);
            while t <= rho + 3.0 + 1e-12 {
                csv.push_str(&format!(
                    "{t:.6},{:.17e},{:.17e}\n",
                    profile.theta_tilde(t),
                    profile.theta_tilde_prime(t)
                ));
                t += 1e-2;
            }
            emit(csv, out)?;
            Ok(0)
        }
    }
}
