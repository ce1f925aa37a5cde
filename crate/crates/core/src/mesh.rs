use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{state_from_invariants, State};

pub const GHOSTS: usize = 2;
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells.
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize, boundary: Boundary) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::Validation {
                key: "n_cells".into(),
                message: format!("need at least {MIN_CELLS} cells, got {n_cells}"),
            });
        }
        if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::Validation {
                key: "x_right".into(),
                message: format!("domain [{x_left}, {x_right}] is empty"),
            });
        }
        Ok(Self {
            x_left,
            x_right,
            n_cells,
            boundary,
        })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }

    /// Copy of `values` with [`GHOSTS`] ghost cells on each side.
    pub fn with_ghosts(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let mut out = Vec::with_capacity(n + 2 * GHOSTS);
        for g in (1..=GHOSTS).rev() {
            out.push(match self.boundary {
                Boundary::Periodic => values[n - g],
                Boundary::Outflow => values[0],
            });
        }
        out.extend_from_slice(values);
        for g in 0..GHOSTS {
            out.push(match self.boundary {
                Boundary::Periodic => values[g],
                Boundary::Outflow => values[n - 1],
            });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `(a, b) = (u, v)`.
    Conservative,
    /// `(a, b) = (theta, xi)` with `theta = sqrt(uv)`, `xi = u/v`.
    Invariant,
}

/// Two cell-centred value sequences tagged with their meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub time: f64,
    pub representation: Representation,
}

impl FieldPair {
    pub fn from_states(states: &[State], time: f64, representation: Representation) -> Self {
        let (a, b) = match representation {
            Representation::Conservative => states.iter().map(|s| (s.u, s.v)).unzip(),
            Representation::Invariant => states.iter().map(|s| (s.r().sqrt(), s.xi())).unzip(),
        };
        Self {
            a,
            b,
            time,
            representation,
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    #[inline]
    pub fn state(&self, i: usize) -> State {
        match self.representation {
            Representation::Conservative => State::new(self.a[i], self.b[i]),
            Representation::Invariant => state_from_invariants(self.a[i] * self.a[i], self.b[i]),
        }
    }

    pub fn states(&self) -> Vec<State> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }

    /// `r = uv` per cell.
    pub fn r_values(&self) -> Vec<f64> {
        match self.representation {
            Representation::Conservative => {
                self.a.iter().zip(&self.b).map(|(u, v)| u * v).collect()
            }
            Representation::Invariant => self.a.iter().map(|t| t * t).collect(),
        }
    }

    pub fn xi_values(&self) -> Vec<f64> {
        match self.representation {
            Representation::Conservative => {
                self.a.iter().zip(&self.b).map(|(u, v)| u / v).collect()
            }
            Representation::Invariant => self.b.clone(),
        }
    }

    /// The same field in `(u, v)` form.
    pub fn to_conservative(&self) -> FieldPair {
        match self.representation {
            Representation::Conservative => self.clone(),
            Representation::Invariant => {
                FieldPair::from_states(&self.states(), self.time, Representation::Conservative)
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| x.is_finite())
    }
}
