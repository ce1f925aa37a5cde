use serde::Serialize;

use crate::entropy::EntropyPair;
use crate::error::Result;
use crate::flux::FluxLaw;
use crate::mesh::{Boundary, FieldPair, Grid1D, GHOSTS};
use crate::viscous::{StepEvent, StepObserver};

/// `sum_i E(U_i) dx`.
pub fn total_entropy(pair: &EntropyPair, fp: &FieldPair, dx: f64) -> f64 {
    (0..fp.len())
        .map(|i| pair.value_unchecked(fp.state(i)))
        .sum::<f64>()
        * dx
}

/// `sum_i eps k(2k+1) r_i^{-k-2} ((r_{i+1} - r_{i-1}) / 2dx)^2 dx`, with the
/// same ghost cells as the scheme.
pub fn dissipation_rate(pair: &EntropyPair, epsilon: f64, fp: &FieldPair, grid: &Grid1D) -> f64 {
    let dx = grid.dx();
    let r = fp.r_values();
    let r_ext = grid.with_ghosts(&r);
    let s: f64 = r_ext[GHOSTS - 1..r_ext.len() - GHOSTS + 1]
        .windows(3)
        .zip(&r)
        .map(|(w, &ri)| pair.dissipation_density(ri, (w[2] - w[0]) / (2.0 * dx)))
        .sum();
    epsilon * s * dx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRecord {
    pub time: f64,
    pub step: usize,
    pub total_entropy: f64,
    pub dissipation_accum: f64,
    /// Time-integrated entropy flux leaving through outflow boundaries,
    /// `int (Q(right cell) - Q(left cell)) dt`; zero on periodic grids.
    pub boundary_outflow: f64,
    /// `total + dissipation + outflow - initial`.
    pub residual: f64,
}

impl LedgerRecord {
    /// Entropy still inside the domain plus what has left it.
    pub fn budget(&self) -> f64 {
        self.total_entropy + self.boundary_outflow
    }
}

/// Entropy balance of one run, filled step by step.
#[derive(Debug, Clone)]
pub struct EntropyLedger {
    pair: EntropyPair,
    law: FluxLaw,
    epsilon: f64,
    grid: Grid1D,
    initial_total: f64,
    records: Vec<LedgerRecord>,
}

impl EntropyLedger {
    pub fn new(pair: EntropyPair, law: FluxLaw, epsilon: f64, grid: Grid1D) -> Self {
        Self {
            pair,
            law,
            epsilon,
            grid,
            initial_total: f64::NAN,
            records: Vec::new(),
        }
    }

    pub fn initial_total(&self) -> f64 {
        self.initial_total
    }

    /// Record 0 is the initial state.
    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&LedgerRecord> {
        self.records.last()
    }

    fn outflow_rate(&self, fp: &FieldPair) -> Result<f64> {
        if self.grid.boundary == Boundary::Periodic || fp.is_empty() {
            return Ok(0.0);
        }
        let q_right = self
            .pair
            .flux_unchecked(&self.law, fp.state(fp.len() - 1))?;
        let q_left = self.pair.flux_unchecked(&self.law, fp.state(0))?;
        Ok(q_right - q_left)
    }

    /// First record, after the initial one, whose entropy budget exceeds its
    /// predecessor's by more than `rel_slack` relative to the initial budget
    /// scale.
    pub fn first_increase(&self, rel_slack: f64) -> Option<(usize, f64)> {
        let scale = self.initial_total.abs().max(1.0);
        self.records.windows(2).find_map(|w| {
            let jump = w[1].budget() - w[0].budget();
            (jump > rel_slack * scale).then_some((w[1].step, jump))
        })
    }

    /// Whether every dissipation increment is nonnegative.
    pub fn dissipation_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].dissipation_accum >= w[0].dissipation_accum)
    }
}

impl StepObserver for EntropyLedger {
    fn start(&mut self, initial: &FieldPair) -> Result<()> {
        self.initial_total = total_entropy(&self.pair, initial, self.grid.dx());
        self.records.clear();
        self.records.push(LedgerRecord {
            time: initial.time,
            step: 0,
            total_entropy: self.initial_total,
            dissipation_accum: 0.0,
            boundary_outflow: 0.0,
            residual: 0.0,
        });
        Ok(())
    }

    fn step(&mut self, event: &StepEvent<'_>) -> Result<()> {
        let prev = *self.records.last().expect("ledger started");
        let dissipation = prev.dissipation_accum
            + event.dt * dissipation_rate(&self.pair, self.epsilon, event.before, &self.grid);
        let outflow = prev.boundary_outflow + event.dt * self.outflow_rate(event.before)?;
        let total = total_entropy(&self.pair, event.after, self.grid.dx());
        self.records.push(LedgerRecord {
            time: event.after.time,
            step: event.step,
            total_entropy: total,
            dissipation_accum: dissipation,
            boundary_outflow: outflow,
            residual: total + dissipation + outflow - self.initial_total,
        });
        Ok(())
    }
}

/// Balance residual of the last record at or before `t`; zero at `t = 0`.
pub fn entropy_balance_residual(ledger: &EntropyLedger, t: f64) -> f64 {
    ledger
        .records()
        .iter()
        .take_while(|r| r.time <= t)
        .last()
        .map_or(0.0, |r| r.residual)
}
