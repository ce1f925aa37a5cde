//! `kklab`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kklab_core::diagnostics::{
    convergence_study, invariant_region_check, EntropyLedger, Reference,
};
use kklab_core::entropy::check_entropy_pair;
use kklab_core::flux::validate_flux_law;
use kklab_core::hyperbolic::{demonstrate_identity_diffusion_failure, run_hyperbolic_observed};
use kklab_core::io::{convergence_csv, json_string, write_report_json, write_run};
use kklab_core::riemann::RiemannSolution;
use kklab_core::{
    parse_config, run_observed, solve_riemann, EntropyPair, Error, FluxLaw, MollifierWidth,
    Representation, ScenarioKind, SimConfig, State,
};

#[derive(Parser)]
#[command(
    name = "kklab",
    version,
    about = "Keyfitz-Kranzer thin-film numerical laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// `key=value`, applied after the file; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Shorthand for `--override epsilon=...`; 0 selects the inviscid solver.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Directory for snapshots, ledger and metadata.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Riemann solution: wave summary and sampled profile.
    Riemann {
        #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
        left: State,
        #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
        right: State,
        #[arg(long, default_value = "thin_film")]
        flux_law: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Sampling interval `a,b`; by default wide enough for every wave.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        x_range: Option<(f64, f64)>,
        /// Writes `profile.csv` and `waves.json` here instead of printing the summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vanishing-viscosity study over an epsilon ladder.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RefArg::Exact)]
        reference: RefArg,
        /// Error window `a,b`; defaults to the whole domain.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        window: Option<(f64, f64)>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Writes `convergence.csv` and `convergence.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convexity, compatibility and generator conditions of `E_{k,p}` on `[m, M]^2`.
    Check {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        m: f64,
        #[arg(long = "M", default_value_t = 4.0)]
        big_m: f64,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value = "thin_film")]
        flux_law: String,
    },
    /// Compares identity diffusion with the tailored viscosity on one datum.
    DemoIdentityDiffusion {
        /// Defaults to the jump (1,2) | (2,1) with epsilon = 0.1, unmollified.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples `phi'` and the genuine-nonlinearity factor over `[r_min, r_max]`.
    ValidateFlux {
        #[arg(long, default_value = "thin_film")]
        flux_law: String,
        #[arg(long, default_value_t = 0.25)]
        r_min: f64,
        #[arg(long, default_value_t = 16.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RefArg {
    Exact,
    Finest,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_state(s: &str) -> Result<State, String> {
    parse_pair(s).map(|(u, v)| State::new(u, v))
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Io { .. } => 3,
            r if r.is_numerical() => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

/// Writes to stdout; a closed pipe is not an error.
fn say(text: &str) -> CliResult {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure {
            code: 3,
            message: format!("writing to stdout: {e}"),
        }),
        _ => Ok(()),
    }
}

fn emit(text: String, out: Option<(&Path, &str)>) -> CliResult {
    match out {
        Some((dir, name)) => {
            create_dir(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(path, e))?;
        }
        None => say(&text)?,
    }
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).into())
}

fn load(config: &Path, overrides: &[String], epsilon: Option<f64>) -> Result<SimConfig, Failure> {
    let mut all = overrides.to_vec();
    if let Some(e) = epsilon {
        all.push(format!("epsilon={e:?}"));
    }
    Ok(parse_config(config, &all)?)
}

fn simulate(
    config: &Path,
    overrides: &[String],
    epsilon: Option<f64>,
    out: Option<&Path>,
) -> CliResult {
    let cfg = load(config, overrides, epsilon)?;
    let pair = EntropyPair::new(cfg.k, cfg.p, cfg.m)?;
    let mut ledger = EntropyLedger::new(pair, cfg.law.clone(), cfg.epsilon, cfg.grid);
    let start = Instant::now();
    let (solver, traj) = if cfg.epsilon == 0.0 {
        ("hyperbolic", run_hyperbolic_observed(&cfg, &mut ledger)?)
    } else {
        let name = match cfg.representation {
            Representation::Invariant => "viscous-invariant",
            Representation::Conservative => "viscous-conservative",
        };
        (name, run_observed(&cfg, &mut ledger)?)
    };
    let wall = start.elapsed().as_secs_f64();
    if let Some(dir) = out {
        write_run(dir, &cfg, solver, &traj, &ledger, wall)?;
    }
    let last = traj.last();
    let region = invariant_region_check(&last.fields, cfg.m, cfg.big_m, 1e-8);
    let record = ledger.last().expect("ledger holds the initial record");
    let summary = json!({
        "solver": solver,
        "steps": traj.steps,
        "final_time": last.time(),
        "snapshots": traj.snapshots.len(),
        "wall_time_s": wall,
        "region_pass": region.pass,
        "r": region.r,
        "xi": region.xi,
        "total_entropy": record.total_entropy,
        "ledger_residual": record.residual,
    });
    say(&format!("{summary:#}\n"))
}

/// Interval containing every wave of `sol` at time `t`, with a margin.
fn default_range(sol: &RiemannSolution, t: f64) -> (f64, f64) {
    use kklab_core::SecondWave;
    let mut lo = sol.contact_speed;
    let mut hi = sol.contact_speed;
    match sol.wave2 {
        SecondWave::Shock { speed } => {
            lo = lo.min(speed);
            hi = hi.max(speed);
        }
        SecondWave::Rarefaction { head, tail } => {
            lo = lo.min(head).min(tail);
            hi = hi.max(head).max(tail);
        }
        SecondWave::None => {}
    }
    let t = if t > 0.0 { t } else { 1.0 };
    let pad = 0.25 * (hi - lo).max(1.0);
    ((lo - pad) * t, (hi + pad) * t)
}

fn riemann(
    left: State,
    right: State,
    flux_law: &str,
    t: f64,
    samples: usize,
    x_range: Option<(f64, f64)>,
    out: Option<&Path>,
) -> CliResult {
    if samples < 2 {
        return Err(Failure {
            code: 1,
            message: "--samples must be at least 2".into(),
        });
    }
    let law = FluxLaw::by_name(flux_law)?;
    let sol = solve_riemann(&law, left, right)?;
    let summary = json_string(&sol.summary());
    let Some(dir) = out else {
        return say(&summary);
    };
    let (a, b) = x_range.unwrap_or_else(|| default_range(&sol, t));
    let xs: Vec<f64> = (0..samples)
        .map(|i| a + (b - a) * i as f64 / (samples - 1) as f64)
        .collect();
    let states = sol.sample_at(&xs, 0.0, t)?;
    let mut csv = String::from(kklab_core::io::SNAPSHOT_HEADER);
    csv.push('\n');
    for (x, s) in xs.iter().zip(&states) {
        csv.push_str(&format!(
            "{x:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.u,
            s.v,
            s.r(),
            s.xi()
        ));
    }
    emit(csv, Some((dir, "profile.csv")))?;
    emit(summary, Some((dir, "waves.json")))
}

#[allow(clippy::too_many_arguments)]
fn converge(
    config: &Path,
    overrides: &[String],
    eps: &[f64],
    reference: RefArg,
    window: Option<(f64, f64)>,
    jobs: usize,
    out: Option<&Path>,
) -> CliResult {
    let cfg = load(config, overrides, None)?;
    let reference = match reference {
        RefArg::Exact => Reference::Exact,
        RefArg::Finest => Reference::Finest,
    };
    let window = window.unwrap_or((cfg.grid.x_left, cfg.grid.x_right));
    let table = convergence_study(&cfg, eps, reference, window, jobs)?;
    match out {
        Some(dir) => {
            emit(convergence_csv(&table), Some((dir, "convergence.csv")))?;
            create_dir(dir)?;
            write_report_json(&table, &dir.join("convergence.json"))?;
            let brief = json!({
                "order_estimate": table.order_estimate,
                "strictly_decreasing": table.strictly_decreasing,
            });
            say(&format!("{brief:#}\n"))
        }
        None => say(&json_string(&table)),
    }
}

fn demo(config: Option<&Path>, overrides: &[String], out: Option<&Path>) -> CliResult {
    let cfg = match config {
        Some(path) => load(path, overrides, None)?,
        None => {
            let mut cfg = SimConfig::with_scenario(ScenarioKind::Riemann {
                left: State::new(1.0, 2.0),
                right: State::new(2.0, 1.0),
                x0: 0.0,
            })?;
            cfg.scenario = cfg.scenario.with_mollifier(MollifierWidth::Absolute(0.0));
            cfg
        }
    };
    if cfg.epsilon <= 0.0 {
        return Err(Error::Validation {
            key: "epsilon".into(),
            message: "the demonstration needs epsilon > 0".into(),
        }
        .into());
    }
    let report = demonstrate_identity_diffusion_failure(&cfg)?;
    emit(
        json_string(&report),
        out.map(|d| (d, "identity_diffusion.json")),
    )
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Simulate {
            config,
            overrides,
            epsilon,
            out,
        } => simulate(&config, &overrides, epsilon, out.as_deref()),
        Command::Riemann {
            left,
            right,
            flux_law,
            t,
            samples,
            x_range,
            out,
        } => riemann(left, right, &flux_law, t, samples, x_range, out.as_deref()),
        Command::Converge {
            config,
            overrides,
            eps,
            reference,
            window,
            jobs,
            out,
        } => converge(
            &config,
            &overrides,
            &eps,
            reference,
            window,
            jobs,
            out.as_deref(),
        ),
        Command::Check {
            k,
            p,
            m,
            big_m,
            grid,
            flux_law,
        } => {
            let law = FluxLaw::by_name(&flux_law)?;
            let report = check_entropy_pair(&law, k, p, m, big_m, grid)?;
            say(&json_string(&report))
        }
        Command::DemoIdentityDiffusion {
            config,
            overrides,
            out,
        } => demo(config.as_deref(), &overrides, out.as_deref()),
        Command::ValidateFlux {
            flux_law,
            r_min,
            r_max,
            samples,
        } => {
            let law = FluxLaw::by_name(&flux_law)?;
            let report = validate_flux_law(&law, r_min, r_max, samples)?;
            say(&json_string(&report))?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure {
                    code: 2,
                    message: format!("flux law '{flux_law}' failed validation"),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kklab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let io = Error::io("x", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(Failure::from(io).code, 3);
        let exit = Error::AtTime {
            time: 0.5,
            source: Box::new(Error::StateSpaceExit {
                index: 3,
                a: 9.0,
                b: 1.0,
            }),
        };
        assert_eq!(Failure::from(exit).code, 2);
        let cfg = Error::Validation {
            key: "epsilon".into(),
            message: "negative".into(),
        };
        assert_eq!(Failure::from(cfg).code, 1);
    }

    #[test]
    fn state_arguments() {
        assert_eq!(parse_state("2, 1.5").unwrap(), State::new(2.0, 1.5));
        assert!(parse_state("2").is_err());
        assert!(parse_state("a,b").is_err());
    }
}
