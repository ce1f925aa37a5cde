//! Explicit first-order integration of the structure-adapted viscous system
//!
//! ```text
//! u_t + (u phi(uv))_x = eps ((uv)_x / v)_x
//! v_t + (v phi(uv))_x = eps ((uv)_x / u)_x
//! ```
//!
//! in conservative `(u, v)` form and in the diagonal form
//! `theta_t + f(theta) theta_x = 2 eps theta_xx`, `xi_t + b xi_x = 0` with
//! `theta = sqrt(uv)`, `f(theta) = lambda2(theta^2)` and
//! `b = phi(r) - eps r_x / r`. Both invariant equations are advanced by
//! upwinding on the sign of the local speed, which makes each update a
//! convex combination of neighbouring values under the step bound.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::flux::FluxLaw;
use crate::mesh::{FieldPair, Grid1D, Representation, GHOSTS};
use crate::model::{flux_unchecked, max_abs_speed};
use crate::state::State;

/// Relative slack allowed when checking a requested step against
/// [`stable_dt`].
const DT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub fields: FieldPair,
}

impl Snapshot {
    pub fn time(&self) -> f64 {
        self.fields.time
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot>,
    /// Accepted steps.
    pub steps: usize,
}

impl Trajectory {
    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("trajectory holds the initial snapshot")
    }
}

/// One accepted step, handed to observers.
pub struct StepEvent<'a> {
    /// Index of the step just taken, starting at 1.
    pub step: usize,
    pub dt: f64,
    pub before: &'a FieldPair,
    pub after: &'a FieldPair,
}

pub trait StepObserver {
    fn start(&mut self, _initial: &FieldPair) -> Result<()> {
        Ok(())
    }

    fn step(&mut self, event: &StepEvent<'_>) -> Result<()>;
}

impl<F: FnMut(&StepEvent<'_>) -> Result<()>> StepObserver for F {
    fn step(&mut self, event: &StepEvent<'_>) -> Result<()> {
        self(event)
    }
}

/// Observer that ignores everything.
pub struct NoObserver;

impl StepObserver for NoObserver {
    fn step(&mut self, _event: &StepEvent<'_>) -> Result<()> {
        Ok(())
    }
}

/// Mollified initial data on the configured grid, in the configured
/// representation.
pub fn mollify_initial_data(cfg: &SimConfig) -> FieldPair {
    let states = cfg.scenario.initial_states(&cfg.grid);
    FieldPair::from_states(&states, 0.0, cfg.representation)
}

/// Centred `r_x` per interior cell from a ghosted `r`.
fn centred_rx(r_ext: &[f64], dx: f64) -> impl Iterator<Item = f64> + '_ {
    r_ext.windows(3).map(move |w| (w[2] - w[0]) / (2.0 * dx))
}

fn transport_speeds(law: &FluxLaw, epsilon: f64, grid: &Grid1D, theta: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = theta.iter().map(|t| t * t).collect();
    let r_ext = grid.with_ghosts(&r);
    centred_rx(&r_ext[GHOSTS - 1..r_ext.len() - GHOSTS + 1], grid.dx())
        .zip(&r)
        .map(|(rx, &ri)| law.phi(ri) - epsilon * rx / ri)
        .collect()
}

/// Largest admissible step for `fp` under both CFL limits.
pub fn stable_dt(fp: &FieldPair, cfg: &SimConfig) -> f64 {
    let dx = cfg.grid.dx();
    let mut speed = fp
        .r_values()
        .iter()
        .map(|&r| cfg.law.phi(r).abs().max(cfg.law.lambda2(r).abs()))
        .fold(0.0, f64::max);
    if fp.representation == Representation::Invariant && cfg.epsilon > 0.0 {
        let b = transport_speeds(&cfg.law, cfg.epsilon, &cfg.grid, &fp.a);
        speed = b.iter().fold(speed, |acc, x| acc.max(x.abs()));
    }
    let advective = if speed > 0.0 {
        cfg.cfl_adv * dx / speed
    } else {
        f64::INFINITY
    };
    let diffusive = if cfg.epsilon > 0.0 {
        cfg.cfl_diff * dx * dx / (2.0 * (2.0 * cfg.epsilon))
    } else {
        f64::INFINITY
    };
    advective.min(diffusive)
}

fn check_dt(fp: &FieldPair, cfg: &SimConfig, dt: f64) -> Result<()> {
    let limit = stable_dt(fp, cfg);
    if !(dt > 0.0) || dt > limit * (1.0 + DT_SLACK) {
        return Err(Error::StabilityViolation { dt, limit });
    }
    Ok(())
}

/// Checks every cell against the widened box `[m - 0.01(M-m), M + 0.01(M-m)]^2`.
fn check_box(fp: &FieldPair, cfg: &SimConfig) -> Result<()> {
    let pad = 0.01 * (cfg.big_m - cfg.m);
    let (lo, hi) = (cfg.m - pad, cfg.big_m + pad);
    for i in 0..fp.len() {
        let s = fp.state(i);
        if !(s.u >= lo && s.u <= hi && s.v >= lo && s.v <= hi) {
            return Err(Error::StateSpaceExit {
                index: i,
                a: s.u,
                b: s.v,
            });
        }
    }
    Ok(())
}

pub fn step_invariant(fp: &FieldPair, cfg: &SimConfig, dt: f64) -> Result<FieldPair> {
    if fp.representation != Representation::Invariant {
        return Err(Error::invalid(
            "representation",
            "expected (theta, xi) fields",
        ));
    }
    check_dt(fp, cfg, dt)?;
    let grid = &cfg.grid;
    let law = &cfg.law;
    let n = fp.len();
    let dx = grid.dx();
    let lam = dt / dx;
    let mu = 2.0 * cfg.epsilon * dt / (dx * dx);

    let th = grid.with_ghosts(&fp.a);
    let xi = grid.with_ghosts(&fp.b);
    let b = transport_speeds(law, cfg.epsilon, grid, &fp.a);

    let mut theta_new = Vec::with_capacity(n);
    let mut xi_new = Vec::with_capacity(n);
    for (i, &bi) in b.iter().enumerate() {
        let j = i + GHOSTS;
        let f = law.lambda2(th[j] * th[j]);
        let adv = if f > 0.0 {
            lam * f * (th[j] - th[j - 1])
        } else {
            lam * f * (th[j + 1] - th[j])
        };
        let diff = mu * (th[j + 1] - 2.0 * th[j] + th[j - 1]);
        theta_new.push(th[j] - adv + diff);
        let upd = if bi > 0.0 {
            bi * (xi[j] - xi[j - 1])
        } else {
            bi * (xi[j + 1] - xi[j])
        };
        xi_new.push(xi[j] - lam * upd);
    }
    let out = FieldPair {
        a: theta_new,
        b: xi_new,
        time: fp.time + dt,
        representation: Representation::Invariant,
    };
    check_box(&out, cfg)?;
    Ok(out)
}

/// Local Lax-Friedrichs interface flux with `alpha` the largest
/// characteristic speed of the two neighbours.
#[inline]
pub(crate) fn rusanov(law: &FluxLaw, l: State, r: State) -> [f64; 2] {
    let fl = flux_unchecked(law, l);
    let fr = flux_unchecked(law, r);
    let alpha = max_abs_speed(law, l).max(max_abs_speed(law, r));
    [
        0.5 * (fl[0] + fr[0]) - 0.5 * alpha * (r.u - l.u),
        0.5 * (fl[1] + fr[1]) - 0.5 * alpha * (r.v - l.v),
    ]
}

#[inline]
fn harmonic_mean(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Diffusion operator used by [`advance_conservative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Diffusion {
    /// `eps ((uv)_x / v)_x`, `eps ((uv)_x / u)_x`.
    Tailored,
    /// `eps u_xx`, `eps v_xx`.
    Identity,
}

pub(crate) fn advance_conservative(
    fp: &FieldPair,
    grid: &Grid1D,
    law: &FluxLaw,
    epsilon: f64,
    diffusion: Diffusion,
    dt: f64,
) -> FieldPair {
    let n = fp.len();
    let dx = grid.dx();
    let lam = dt / dx;
    let u = grid.with_ghosts(&fp.a);
    let v = grid.with_ghosts(&fp.b);

    let mut fu = Vec::with_capacity(n + 1);
    let mut fv = Vec::with_capacity(n + 1);
    for j in GHOSTS - 1..GHOSTS + n {
        let (l, r) = (State::new(u[j], v[j]), State::new(u[j + 1], v[j + 1]));
        let [hu, hv] = rusanov(law, l, r);
        let (du, dv) = if epsilon > 0.0 {
            match diffusion {
                Diffusion::Tailored => {
                    let rx = (u[j + 1] * v[j + 1] - u[j] * v[j]) / dx;
                    (
                        epsilon * rx / harmonic_mean(v[j], v[j + 1]),
                        epsilon * rx / harmonic_mean(u[j], u[j + 1]),
                    )
                }
                Diffusion::Identity => (
                    epsilon * (u[j + 1] - u[j]) / dx,
                    epsilon * (v[j + 1] - v[j]) / dx,
                ),
            }
        } else {
            (0.0, 0.0)
        };
        fu.push(hu - du);
        fv.push(hv - dv);
    }

    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        a.push(fp.a[i] - lam * (fu[i + 1] - fu[i]));
        b.push(fp.b[i] - lam * (fv[i + 1] - fv[i]));
    }
    FieldPair {
        a,
        b,
        time: fp.time + dt,
        representation: Representation::Conservative,
    }
}

pub fn step_conservative(fp: &FieldPair, cfg: &SimConfig, dt: f64) -> Result<FieldPair> {
    if fp.representation != Representation::Conservative {
        return Err(Error::invalid("representation", "expected (u, v) fields"));
    }
    check_dt(fp, cfg, dt)?;
    let out = advance_conservative(
        fp,
        &cfg.grid,
        &cfg.law,
        cfg.epsilon,
        Diffusion::Tailored,
        dt,
    );
    check_box(&out, cfg)?;
    Ok(out)
}

/// One step in whichever representation `fp` carries.
pub fn step(fp: &FieldPair, cfg: &SimConfig, dt: f64) -> Result<FieldPair> {
    match fp.representation {
        Representation::Invariant => step_invariant(fp, cfg, dt),
        Representation::Conservative => step_conservative(fp, cfg, dt),
    }
}

/// Time loop shared by every solver: adaptive `dt`, last step clipped onto
/// `t_end`, snapshots every `output_every` steps plus the final state.
pub(crate) fn drive(
    initial: FieldPair,
    grid: Grid1D,
    t_end: f64,
    output_every: usize,
    mut dt_of: impl FnMut(&FieldPair) -> f64,
    mut advance: impl FnMut(&FieldPair, f64) -> Result<FieldPair>,
    observer: &mut dyn StepObserver,
) -> Result<Trajectory> {
    observer.start(&initial)?;
    let mut snapshots = vec![Snapshot {
        step: 0,
        fields: initial.clone(),
    }];
    let mut current = initial;
    let mut steps = 0;
    while current.time < t_end {
        let at = |e: Error, time: f64| Error::AtTime {
            time,
            source: Box::new(e),
        };
        let limit = dt_of(&current);
        let remaining = t_end - current.time;
        let (dt, last) = if limit >= remaining {
            (remaining, true)
        } else {
            (limit, false)
        };
        let mut next = advance(&current, dt).map_err(|e| at(e, current.time))?;
        if last {
            next.time = t_end;
        }
        if let Some(index) =
            (0..next.len()).find(|&i| !(next.a[i].is_finite() && next.b[i].is_finite()))
        {
            let err = Error::StateSpaceExit {
                index,
                a: next.a[index],
                b: next.b[index],
            };
            return Err(at(err, current.time));
        }
        steps += 1;
        observer
            .step(&StepEvent {
                step: steps,
                dt,
                before: &current,
                after: &next,
            })
            .map_err(|e| at(e, next.time))?;
        current = next;
        let at_end = current.time >= t_end;
        if at_end || (output_every > 0 && steps % output_every == 0) {
            snapshots.push(Snapshot {
                step: steps,
                fields: current.clone(),
            });
        }
        if at_end {
            break;
        }
    }
    Ok(Trajectory {
        grid,
        snapshots,
        steps,
    })
}

pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    run_observed(cfg, &mut NoObserver)
}

pub fn run_observed(cfg: &SimConfig, observer: &mut dyn StepObserver) -> Result<Trajectory> {
    let initial = mollify_initial_data(cfg);
    drive(
        initial,
        cfg.grid,
        cfg.t_end,
        cfg.output_every,
        |fp| stable_dt(fp, cfg),
        |fp, dt| step(fp, cfg, dt),
        observer,
    )
}
