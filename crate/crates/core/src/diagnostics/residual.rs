//! Weak-form residuals of a trajectory against smooth compactly supported
//! test functions.
//!
//! For a test function `phi` supported in `[x_l, x_r] x [0, T]` the weak
//! identity is `int int (U phi_t + F phi_x) + int U_0 phi(., 0) - int U_T
//! phi(., T) = 0`. Time is split into slabs between consecutive snapshots;
//! within a slab `U` is the mean of the two endpoint snapshots, `int phi_t dt`
//! is taken exactly as `phi(t_b) - phi(t_a)`, the flux term by the trapezoid
//! rule, and space by the cell-centre midpoint rule.

use crate::entropy::EntropyPair;
use crate::error::{Error, Result};
use crate::flux::FluxLaw;
use crate::mesh::{FieldPair, GHOSTS};
use crate::mollifier::{kernel, kernel_derivative};
use crate::viscous::Trajectory;

/// Largest step gap between consecutive snapshots accepted by the
/// quadrature.
pub const MAX_SNAPSHOT_GAP: usize = 10;

/// `c j((x - x0)/w) j((t - t0)/s)` with `j` the unit-mass Friedrichs kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTest {
    pub x0: f64,
    pub t0: f64,
    pub w: f64,
    pub s: f64,
    pub c: f64,
}

impl BumpTest {
    #[inline]
    fn in_space(&self, x: f64) -> bool {
        (x - self.x0).abs() < self.w
    }

    #[inline]
    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.c * kernel((x - self.x0) / self.w) * kernel((t - self.t0) / self.s)
    }

    #[inline]
    pub fn dx(&self, x: f64, t: f64) -> f64 {
        self.c * kernel_derivative((x - self.x0) / self.w) / self.w * kernel((t - self.t0) / self.s)
    }

    #[inline]
    pub fn dt(&self, x: f64, t: f64) -> f64 {
        self.c * kernel((x - self.x0) / self.w) * kernel_derivative((t - self.t0) / self.s) / self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeWindow {
    pub x_left: f64,
    pub x_right: f64,
    pub t_end: f64,
}

/// Five fixed bumps, placed in window-relative coordinates
/// `(x0, t0, w, s)`.
pub fn standard_test_bank(window: SpaceTimeWindow) -> Vec<BumpTest> {
    const BANK: [[f64; 4]; 5] = [
        [0.5, 0.5, 0.45, 0.5],
        [0.3, 0.3, 0.15, 0.35],
        [0.7, 0.6, 0.15, 0.3],
        [0.5, 0.2, 0.2, 0.3],
        [0.6, 0.7, 0.25, 0.25],
    ];
    let width = window.x_right - window.x_left;
    BANK.iter()
        .map(|&[x0, t0, w, s]| BumpTest {
            x0: window.x_left + x0 * width,
            t0: t0 * window.t_end,
            w: w * width,
            s: s * window.t_end,
            c: 1.0,
        })
        .collect()
}

/// Per-component cell densities and fluxes of one snapshot.
type Densities = Vec<(Vec<f64>, Vec<f64>)>;

fn check_cadence(traj: &Trajectory) -> Result<()> {
    for w in traj.snapshots.windows(2) {
        let gap = w[1].step - w[0].step;
        if gap > MAX_SNAPSHOT_GAP {
            return Err(Error::InsufficientCadence {
                steps: gap,
                max: MAX_SNAPSHOT_GAP,
            });
        }
    }
    Ok(())
}

/// Weak-form defect of every component against `test`.
fn weak_defects(traj: &Trajectory, test: &BumpTest, densities: &[Densities]) -> Vec<f64> {
    let xs = traj.grid.centers();
    let dx = traj.grid.dx();
    let cells: Vec<usize> = (0..xs.len()).filter(|&i| test.in_space(xs[i])).collect();
    let components = densities[0].len();
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time()).collect();
    let (t0, t_last) = (times[0], *times.last().expect("non-empty trajectory"));
    let last = densities.len() - 1;

    (0..components)
        .map(|c| {
            let mut acc = 0.0;
            for &i in &cells {
                acc += densities[0][c].0[i] * test.value(xs[i], t0);
                acc -= densities[last][c].0[i] * test.value(xs[i], t_last);
            }
            for k in 0..last {
                let (ta, tb) = (times[k], times[k + 1]);
                let (da, db) = (&densities[k][c], &densities[k + 1][c]);
                for &i in &cells {
                    let x = xs[i];
                    let mean = 0.5 * (da.0[i] + db.0[i]);
                    acc += mean * (test.value(x, tb) - test.value(x, ta));
                    acc += 0.5 * (tb - ta) * (da.1[i] * test.dx(x, ta) + db.1[i] * test.dx(x, tb));
                }
            }
            acc * dx
        })
        .collect()
}

fn evaluate_all(
    traj: &Trajectory,
    eval: impl Fn(&FieldPair) -> Result<Densities>,
) -> Result<Vec<Densities>> {
    traj.snapshots.iter().map(|s| eval(&s.fields)).collect()
}

/// `max_{phi, component} |int int (U phi_t + F phi_x) + int U_0 phi(., 0)|`.
pub fn weak_residual(traj: &Trajectory, law: &FluxLaw, bank: &[BumpTest]) -> Result<f64> {
    check_cadence(traj)?;
    let dens = evaluate_all(traj, |fp| {
        let states = fp.states();
        let phi: Vec<f64> = states.iter().map(|s| law.phi(s.r())).collect();
        let u: Vec<f64> = states.iter().map(|s| s.u).collect();
        let v: Vec<f64> = states.iter().map(|s| s.v).collect();
        let fu = u.iter().zip(&phi).map(|(a, p)| a * p).collect();
        let fv = v.iter().zip(&phi).map(|(a, p)| a * p).collect();
        Ok(vec![(u, fu), (v, fv)])
    })?;
    Ok(bank
        .iter()
        .flat_map(|t| weak_defects(traj, t, &dens))
        .fold(0.0, |m, d| m.max(d.abs())))
}

fn entropy_densities(
    pair: &EntropyPair,
    law: &FluxLaw,
    fp: &FieldPair,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let states = fp.states();
    let e = states.iter().map(|&s| pair.value_unchecked(s)).collect();
    let q = states
        .iter()
        .map(|&s| pair.flux_unchecked(law, s))
        .collect::<Result<_>>()?;
    Ok((e, q))
}

fn one_sided(traj: &Trajectory, bank: &[BumpTest], dens: &[Densities]) -> f64 {
    bank.iter()
        .map(|t| weak_defects(traj, t, dens)[0])
        .fold(0.0, |m, d| m.max(-d))
}

/// `max_phi max(0, -[int int (E phi_t + Q phi_x) + int E_0 phi(., 0)])`
/// over the (nonnegative) bank.
pub fn entropy_inequality_residual(
    traj: &Trajectory,
    pair: &EntropyPair,
    law: &FluxLaw,
    bank: &[BumpTest],
) -> Result<f64> {
    check_cadence(traj)?;
    let dens = evaluate_all(traj, |fp| Ok(vec![entropy_densities(pair, law, fp)?]))?;
    Ok(one_sided(traj, bank, &dens))
}

/// As [`entropy_inequality_residual`] for a viscous trajectory, with the
/// entropy flux corrected by the viscous term
/// `-eps (grad E)^T B U_x = -eps (r_x / r)(P - 2k r^{-k})`,
/// `P = sqrt(r) xi^p`; `r_x` is the scheme's centred difference.
pub fn entropy_inequality_residual_viscous(
    traj: &Trajectory,
    pair: &EntropyPair,
    law: &FluxLaw,
    epsilon: f64,
    bank: &[BumpTest],
) -> Result<f64> {
    check_cadence(traj)?;
    let grid = traj.grid;
    let dx = grid.dx();
    let (k, p) = (pair.k(), pair.p());
    let dens = evaluate_all(traj, |fp| {
        let (e, mut q) = entropy_densities(pair, law, fp)?;
        let r = fp.r_values();
        let xi = fp.xi_values();
        let r_ext = grid.with_ghosts(&r);
        for (i, w) in r_ext[GHOSTS - 1..r_ext.len() - GHOSTS + 1]
            .windows(3)
            .enumerate()
        {
            let rx = (w[2] - w[0]) / (2.0 * dx);
            let power = r[i].sqrt() * xi[i].powf(p);
            q[i] -= epsilon * rx / r[i] * (power - 2.0 * k * r[i].powf(-k));
        }
        Ok(vec![(e, q)])
    })?;
    Ok(one_sided(traj, bank, &dens))
}
