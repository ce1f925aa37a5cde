use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::mesh::{FieldPair, Grid1D, GHOSTS};
use crate::riemann::solve_riemann;
use crate::state::State;
use crate::viscous::{run_observed, StepEvent, StepObserver};

use super::norms::window_l1_distance;

pub const CONVERGENCE_SCHEMA: &str = "kklab.convergence/1";

/// Rungs used for the order fit, counted from the finest.
const FIT_RUNGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Exact Riemann solution of the scenario's two states.
    Exact,
    /// Final state of the smallest-`eps` rung, interpolated linearly.
    Finest,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub dx: f64,
    pub n_cells: usize,
    #[serde(rename = "L1_error")]
    pub l1_error: Option<f64>,
    /// `max eps |r_x|` over every step of the run.
    pub max_eps_rx: f64,
    pub wall_time: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub schema: &'static str,
    pub reference: Reference,
    pub window: [f64; 2],
    pub rows: Vec<ConvergenceRow>,
    pub order_estimate: Option<f64>,
    pub strictly_decreasing: bool,
}

/// Least-squares slope of `ln err` against `ln eps`.
pub fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(e, r)| (e.ln(), r.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct RxMonitor {
    epsilon: f64,
    grid: Grid1D,
    max: f64,
}

impl RxMonitor {
    fn observe(&mut self, fp: &FieldPair) {
        let dx = self.grid.dx();
        let r_ext = self.grid.with_ghosts(&fp.r_values());
        let m = r_ext[GHOSTS - 1..r_ext.len() - GHOSTS + 1]
            .windows(3)
            .map(|w| ((w[2] - w[0]) / (2.0 * dx)).abs())
            .fold(0.0, f64::max);
        self.max = self.max.max(self.epsilon * m);
    }
}

impl StepObserver for RxMonitor {
    fn start(&mut self, initial: &FieldPair) -> Result<()> {
        self.observe(initial);
        Ok(())
    }

    fn step(&mut self, event: &StepEvent<'_>) -> Result<()> {
        self.observe(event.after);
        Ok(())
    }
}

/// Rung configuration: `epsilon = eps` and the base grid refined until
/// `dx <= eps / 4`.
fn rung_config(base: &SimConfig, eps: f64) -> Result<SimConfig> {
    let mut cfg = base.clone();
    cfg.epsilon = eps;
    let g = base.grid;
    let needed = (g.width() / (eps / 4.0)).ceil() as usize;
    cfg.grid = Grid1D::new(g.x_left, g.x_right, g.n_cells.max(needed), g.boundary)?;
    cfg.output_every = 0;
    Ok(cfg)
}

struct RungOutcome {
    cfg: SimConfig,
    result: Result<(Vec<State>, f64)>,
    wall_time: f64,
}

fn run_rung(base: &SimConfig, eps: f64) -> Result<RungOutcome> {
    let cfg = rung_config(base, eps)?;
    let start = Instant::now();
    let mut monitor = RxMonitor {
        epsilon: eps,
        grid: cfg.grid,
        max: 0.0,
    };
    let result = run_observed(&cfg, &mut monitor).map(|t| (t.last().fields.states(), monitor.max));
    Ok(RungOutcome {
        cfg,
        result,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn interpolate(xs: &[f64], states: &[State], x: f64) -> State {
    let n = xs.len();
    if x <= xs[0] {
        return states[0];
    }
    if x >= xs[n - 1] {
        return states[n - 1];
    }
    let j = xs.partition_point(|&c| c <= x) - 1;
    let w = (x - xs[j]) / (xs[j + 1] - xs[j]);
    State::new(
        states[j].u + w * (states[j + 1].u - states[j].u),
        states[j].v + w * (states[j + 1].v - states[j].v),
    )
}

/// Runs the viscous solver for every `eps` in `ladder` (concurrently on
/// `jobs` workers) and measures the `L^1(window)` distance of each final
/// state to the reference.
pub fn convergence_study(
    base: &SimConfig,
    ladder: &[f64],
    reference: Reference,
    window: (f64, f64),
    jobs: usize,
) -> Result<ConvergenceTable> {
    if ladder.is_empty() || ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::invalid("eps", "ladder must hold positive values"));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("eps", "ladder must be strictly decreasing"));
    }
    let exact = match reference {
        Reference::Exact => {
            let (l, r, x0) = base.scenario.kind.riemann_states().ok_or_else(|| {
                Error::invalid("reference", "exact reference needs a two-state scenario")
            })?;
            Some((solve_riemann(&base.law, l, r)?, x0))
        }
        Reference::Finest => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    let outcomes: Vec<RungOutcome> = pool.install(|| {
        ladder
            .par_iter()
            .map(|&eps| run_rung(base, eps))
            .collect::<Result<_>>()
    })?;

    let finest = match reference {
        Reference::Finest => {
            let last = outcomes.last().expect("non-empty ladder");
            match &last.result {
                Ok((states, _)) => Some((last.cfg.grid.centers(), states.clone())),
                Err(_) => None,
            }
        }
        Reference::Exact => None,
    };

    let mut rows = Vec::with_capacity(outcomes.len());
    for (idx, out) in outcomes.iter().enumerate() {
        let grid = out.cfg.grid;
        let xs = grid.centers();
        let (l1_error, max_eps_rx, status) = match &out.result {
            Err(e) => (None, f64::NAN, format!("failed: {e}")),
            Ok((states, rx)) => {
                let target: Option<Vec<State>> = match (&exact, &finest) {
                    (Some((sol, x0)), _) => Some(sol.sample_at(&xs, *x0, out.cfg.t_end)?),
                    (None, Some((fx, fs))) if idx + 1 < outcomes.len() => {
                        Some(xs.iter().map(|&x| interpolate(fx, fs, x)).collect())
                    }
                    _ => None,
                };
                match target {
                    Some(t) => (
                        Some(window_l1_distance(&xs, states, &t, grid.dx(), window)?),
                        *rx,
                        "ok".to_string(),
                    ),
                    None if finest.is_some() => (None, *rx, "reference".to_string()),
                    None => (None, *rx, "no reference".to_string()),
                }
            }
        };
        rows.push(ConvergenceRow {
            eps: out.cfg.epsilon,
            dx: grid.dx(),
            n_cells: grid.n_cells,
            l1_error,
            max_eps_rx,
            wall_time: out.wall_time,
            status,
        });
    }

    let measured: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.l1_error.map(|e| (r.eps, e)))
        .collect();
    let all_measured = rows
        .iter()
        .all(|r| r.l1_error.is_some() || r.status == "reference");
    let strictly_decreasing =
        all_measured && measured.len() >= 2 && measured.windows(2).all(|w| w[1].1 < w[0].1);
    let fit: Vec<(f64, f64)> = measured
        .iter()
        .skip(measured.len().saturating_sub(FIT_RUNGS))
        .copied()
        .filter(|p| p.1 > 0.0)
        .collect();

    Ok(ConvergenceTable {
        schema: CONVERGENCE_SCHEMA,
        reference,
        window: [window.0, window.1],
        rows,
        order_estimate: fit_order(&fit),
        strictly_decreasing,
    })
}
