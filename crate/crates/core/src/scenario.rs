//! Initial-data library.

use serde::Serialize;

use crate::mesh::{Boundary, Grid1D};
use crate::mollifier::mollify_at;
use crate::state::{state_from_invariants, State};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ScenarioKind {
    Riemann {
        left: State,
        right: State,
        x0: f64,
    },
    /// Riemann datum with common `r` and a jump in `xi`.
    Contact {
        r: f64,
        xi_left: f64,
        xi_right: f64,
        x0: f64,
    },
    SmoothSine {
        mean: State,
        amplitude: f64,
        wavelength: f64,
    },
    Constant {
        state: State,
    },
    /// Piecewise-constant table: `states[0]` left of `breakpoints[0]`,
    /// `states[i]` on `[breakpoints[i-1], breakpoints[i])`.
    CustomTable {
        breakpoints: Vec<f64>,
        states: Vec<State>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierWidth {
    /// Multiple of the cell size.
    Cells(f64),
    Absolute(f64),
}

impl MollifierWidth {
    pub fn resolve(&self, dx: f64) -> f64 {
        match *self {
            MollifierWidth::Cells(c) => c * dx,
            MollifierWidth::Absolute(w) => w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub mollifier: MollifierWidth,
}

impl ScenarioKind {
    pub fn id(&self) -> &'static str {
        match self {
            ScenarioKind::Riemann { .. } => "riemann",
            ScenarioKind::Contact { .. } => "contact",
            ScenarioKind::SmoothSine { .. } => "smooth_sine",
            ScenarioKind::Constant { .. } => "constant",
            ScenarioKind::CustomTable { .. } => "custom_table",
        }
    }

    /// Default mollifier: two cells for discontinuous data, none otherwise.
    pub fn default_mollifier(&self) -> MollifierWidth {
        match self {
            ScenarioKind::SmoothSine { .. } | ScenarioKind::Constant { .. } => {
                MollifierWidth::Absolute(0.0)
            }
            _ => MollifierWidth::Cells(2.0),
        }
    }

    /// Left and right states of a two-state datum.
    pub fn riemann_states(&self) -> Option<(State, State, f64)> {
        match *self {
            ScenarioKind::Riemann { left, right, x0 } => Some((left, right, x0)),
            ScenarioKind::Contact {
                r,
                xi_left,
                xi_right,
                x0,
            } => Some((
                state_from_invariants(r, xi_left),
                state_from_invariants(r, xi_right),
                x0,
            )),
            _ => None,
        }
    }

    /// Every state the raw datum can take, or its extremes for smooth data.
    pub fn referenced_states(&self) -> Vec<State> {
        match self {
            ScenarioKind::Riemann { .. } | ScenarioKind::Contact { .. } => {
                let (l, r, _) = self.riemann_states().expect("two-state datum");
                vec![l, r]
            }
            ScenarioKind::SmoothSine {
                mean, amplitude, ..
            } => vec![
                State::new(mean.u - amplitude, mean.v - amplitude),
                State::new(mean.u + amplitude, mean.v + amplitude),
            ],
            ScenarioKind::Constant { state } => vec![*state],
            ScenarioKind::CustomTable { states, .. } => states.clone(),
        }
    }

    /// Raw (unmollified) datum at `x`.
    pub fn datum(&self, x: f64, grid: &Grid1D) -> State {
        let x = match grid.boundary {
            Boundary::Periodic => {
                let w = grid.width();
                grid.x_left + (x - grid.x_left).rem_euclid(w)
            }
            Boundary::Outflow => x,
        };
        match self {
            ScenarioKind::Riemann { .. } | ScenarioKind::Contact { .. } => {
                let (l, r, x0) = self.riemann_states().expect("two-state datum");
                if x < x0 {
                    l
                } else {
                    r
                }
            }
            ScenarioKind::SmoothSine {
                mean,
                amplitude,
                wavelength,
            } => {
                let phase = std::f64::consts::TAU * (x - grid.x_left) / wavelength;
                State::new(
                    mean.u + amplitude * phase.sin(),
                    mean.v + amplitude * phase.cos(),
                )
            }
            ScenarioKind::Constant { state } => *state,
            ScenarioKind::CustomTable {
                breakpoints,
                states,
            } => {
                let idx = breakpoints.iter().take_while(|&&b| x >= b).count();
                states[idx]
            }
        }
    }
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        let mollifier = kind.default_mollifier();
        Self { kind, mollifier }
    }

    pub fn with_mollifier(mut self, width: MollifierWidth) -> Self {
        self.mollifier = width;
        self
    }

    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    /// Mollified datum sampled at the cell centres of `grid`.
    pub fn initial_states(&self, grid: &Grid1D) -> Vec<State> {
        let width = self.mollifier.resolve(grid.dx());
        let datum = |x: f64| self.kind.datum(x, grid);
        grid.centers()
            .into_iter()
            .map(|x| mollify_at(&datum, width, x))
            .collect()
    }
}
