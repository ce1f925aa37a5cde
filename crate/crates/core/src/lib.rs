//! Numerical laboratory for the Keyfitz-Kranzer thin-film system
//!
//! ```text
//! u_t + (u phi(uv))_x = 0,   v_t + (v phi(uv))_x = 0
//! ```
//!
//! with its explicit entropy pairs, a structure-adapted viscous
//! regularization, an exact Riemann solver and discrete diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod flux;
pub mod hyperbolic;
pub mod io;
pub mod mesh;
pub mod model;
pub mod mollifier;
pub mod quadrature;
pub mod riemann;
pub mod scenario;
pub mod state;
pub mod viscous;

pub use config::{parse_config, parse_config_str, SimConfig};
pub use entropy::EntropyPair;
pub use error::{Error, Result};
pub use flux::FluxLaw;
pub use mesh::{Boundary, FieldPair, Grid1D, Representation};
pub use riemann::{solve_riemann, RiemannSolution, SecondWave};
pub use scenario::{MollifierWidth, Scenario, ScenarioKind};
pub use state::State;
pub use viscous::{run, run_observed, Snapshot, StepEvent, StepObserver, Trajectory};
