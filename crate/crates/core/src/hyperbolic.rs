//! Inviscid first-order finite volumes and the identity-diffusion
//! counterexample.

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::flux::FluxLaw;
use crate::mesh::{FieldPair, Representation};
use crate::state::State;
use crate::viscous::{
    advance_conservative, drive, mollify_initial_data, run_observed, stable_dt, Diffusion,
    NoObserver, StepEvent, StepObserver, Trajectory,
};

pub const IDENTITY_DEMO_SCHEMA: &str = "kklab.identity-diffusion/1";

/// `F = 1/2 (F(l) + F(r)) - 1/2 alpha (r - l)` with `alpha` the largest
/// `|lambda|` over both states.
pub fn numerical_flux_rusanov(law: &FluxLaw, left: State, right: State) -> Result<[f64; 2]> {
    left.require_positive()?;
    right.require_positive()?;
    Ok(crate::viscous::rusanov(law, left, right))
}

fn inviscid(cfg: &SimConfig) -> Result<SimConfig> {
    if cfg.epsilon != 0.0 {
        return Err(Error::invalid(
            "epsilon",
            format!("the inviscid solver needs epsilon = 0, got {}", cfg.epsilon),
        ));
    }
    let mut c = cfg.clone();
    c.representation = Representation::Conservative;
    Ok(c)
}

pub fn run_hyperbolic(cfg: &SimConfig) -> Result<Trajectory> {
    run_hyperbolic_observed(cfg, &mut NoObserver)
}

pub fn run_hyperbolic_observed(
    cfg: &SimConfig,
    observer: &mut dyn StepObserver,
) -> Result<Trajectory> {
    run_observed(&inviscid(cfg)?, observer)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityDiffusionReport {
    pub schema: &'static str,
    pub epsilon: f64,
    pub max_r_initial: f64,
    /// Largest `r` reached by the identity-diffusion system.
    pub max_r_peak: f64,
    pub overshoot: f64,
    pub overshoot_detected: bool,
    /// Largest `r` reached by the structure-adapted system on the same datum.
    pub tailored_max_r_peak: f64,
    pub tailored_overshoot: f64,
    pub steps: usize,
}

fn max_r(fp: &FieldPair) -> f64 {
    fp.r_values().into_iter().fold(f64::NEG_INFINITY, f64::max)
}

struct PeakR(f64);

impl StepObserver for PeakR {
    fn start(&mut self, initial: &FieldPair) -> Result<()> {
        self.0 = max_r(initial);
        Ok(())
    }

    fn step(&mut self, event: &StepEvent<'_>) -> Result<()> {
        self.0 = self.0.max(max_r(event.after));
        Ok(())
    }
}

/// Integrates `U_t + F(U)_x = eps U_xx` (centred diffusion, Rusanov
/// advection) and the structure-adapted system from the same datum, and
/// records the largest `r` each reaches. Informational: the identity
/// system is expected to overshoot `max r(0)` when `u_x v_x < 0`.
pub fn demonstrate_identity_diffusion_failure(cfg: &SimConfig) -> Result<IdentityDiffusionReport> {
    let mut conservative = cfg.clone();
    conservative.representation = Representation::Conservative;
    let initial = mollify_initial_data(&conservative);
    let max_r_initial = max_r(&initial);

    let mut peak = PeakR(max_r_initial);
    let traj = drive(
        initial,
        cfg.grid,
        cfg.t_end,
        0,
        |fp| stable_dt(fp, &conservative),
        |fp, dt| {
            Ok(advance_conservative(
                fp,
                &cfg.grid,
                &cfg.law,
                cfg.epsilon,
                Diffusion::Identity,
                dt,
            ))
        },
        &mut peak,
    )?;

    let mut tailored_peak = PeakR(max_r_initial);
    run_observed(cfg, &mut tailored_peak)?;

    let overshoot = peak.0 - max_r_initial;
    Ok(IdentityDiffusionReport {
        schema: IDENTITY_DEMO_SCHEMA,
        epsilon: cfg.epsilon,
        max_r_initial,
        max_r_peak: peak.0,
        overshoot,
        overshoot_detected: overshoot > 10.0 * f64::EPSILON * max_r_initial,
        tailored_max_r_peak: tailored_peak.0,
        tailored_overshoot: tailored_peak.0 - max_r_initial,
        steps: traj.steps,
    })
}
