//! Run configuration: a flat TOML file whose keys mirror [`SimConfig`] and
//! [`Scenario`].
//!
//! | key | default |
//! |-----|---------|
//! | `flux_law` | `"thin_film"` (`"log"` also accepted) |
//! | `epsilon` | `0.1` |
//! | `k`, `p` | `1.0`, `1.0` (entropy pair used by the ledger) |
//! | `m`, `M` | `0.5`, `4.0` |
//! | `t_end` | `1.0` |
//! | `cfl_adv`, `cfl_diff` | `0.45`, `0.4` |
//! | `representation` | `"invariant"` (or `"conservative"`) |
//! | `output_every` | `10` steps (`0`: initial and final only) |
//! | `scenario` | `"riemann"` |
//! | `x_left`, `x_right` | `-8, 8` (`riemann`, `contact`, `custom_table`); `0, 1` otherwise |
//! | `n_cells` | `400` |
//! | `boundary` | `"outflow"` for two-state data, `"periodic"` otherwise |
//! | `mollifier_width` | `"2dx"` for discontinuous data, `0` otherwise; number or `"<c>dx"` |
//! | `left`, `right`, `x0` | `"2,2"`, `"1,1"`, `0` (`riemann`) |
//! | `r`, `xi_left`, `xi_right`, `x0` | `2`, `0.5`, `2`, `0` (`contact`) |
//! | `mean`, `amplitude`, `wavelength` | `"2,2"`, `0.5`, domain width (`smooth_sine`) |
//! | `state` | `"2,2"` (`constant`) |
//! | `table` | required for `custom_table`: `[[x_break, u, v], ...]`, first `x_break` ignored |
//!
//! States are written either as `"u,v"` strings or `[u, v]` arrays.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{validate_flux_law, FluxLaw};
use crate::mesh::{Boundary, Grid1D, Representation};
use crate::scenario::{MollifierWidth, Scenario, ScenarioKind};
use crate::state::State;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub law: FluxLaw,
    pub epsilon: f64,
    pub k: f64,
    pub p: f64,
    pub m: f64,
    pub big_m: f64,
    pub grid: Grid1D,
    pub t_end: f64,
    pub cfl_adv: f64,
    pub cfl_diff: f64,
    pub scenario: Scenario,
    pub representation: Representation,
    pub output_every: usize,
}

/// Configuration echo written into run metadata.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub flux_law: String,
    pub epsilon: f64,
    pub k: f64,
    pub p: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub grid: Grid1D,
    pub t_end: f64,
    pub cfl_adv: f64,
    pub cfl_diff: f64,
    pub scenario: Scenario,
    pub representation: Representation,
    pub output_every: usize,
}

impl SimConfig {
    /// Defaults for the given scenario with the grid chosen per the table above.
    pub fn with_scenario(kind: ScenarioKind) -> Result<Self> {
        let (x_left, x_right, boundary) = default_domain(&kind);
        Ok(Self {
            law: FluxLaw::ThinFilm,
            epsilon: 0.1,
            k: 1.0,
            p: 1.0,
            m: 0.5,
            big_m: 4.0,
            grid: Grid1D::new(x_left, x_right, 400, boundary)?,
            t_end: 1.0,
            cfl_adv: 0.45,
            cfl_diff: 0.4,
            scenario: Scenario::new(kind),
            representation: Representation::Invariant,
            output_every: 10,
        })
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            flux_law: self.law.name().to_string(),
            epsilon: self.epsilon,
            k: self.k,
            p: self.p,
            m: self.m,
            big_m: self.big_m,
            grid: self.grid,
            t_end: self.t_end,
            cfl_adv: self.cfl_adv,
            cfl_diff: self.cfl_diff,
            scenario: self.scenario.clone(),
            representation: self.representation,
            output_every: self.output_every,
        }
    }

    /// Checks every constraint; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| Error::Validation {
            key: key.to_string(),
            message,
        };
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(bad(
                "epsilon",
                format!("must be >= 0, got {}", self.epsilon),
            ));
        }
        if !(self.m > 0.0) {
            return Err(bad("m", format!("must be positive, got {}", self.m)));
        }
        if !(self.big_m > self.m) || !self.big_m.is_finite() {
            return Err(bad(
                "M",
                format!("must exceed m = {}, got {}", self.m, self.big_m),
            ));
        }
        if !(self.k > 0.0) {
            return Err(bad("k", format!("must be positive, got {}", self.k)));
        }
        if !(self.p >= 0.5) {
            return Err(bad("p", format!("must be at least 0.5, got {}", self.p)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(bad("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        for (key, cfl) in [("cfl_adv", self.cfl_adv), ("cfl_diff", self.cfl_diff)] {
            if !(cfl > 0.0 && cfl <= 0.5) {
                return Err(bad(key, format!("must lie in (0, 0.5], got {cfl}")));
            }
        }
        let (m, big_m) = (self.m, self.big_m);
        validate_flux_law(&self.law, m * m, big_m * big_m, 256)
            .map_err(|e| bad("flux_law", format!("inadmissible on [m^2, M^2]: {e}")))?;

        let states = self.scenario.kind.referenced_states();
        let key = match self.scenario.kind {
            ScenarioKind::Riemann { .. } => "left/right",
            ScenarioKind::Contact { .. } => "r/xi_left/xi_right",
            ScenarioKind::SmoothSine { .. } => "mean/amplitude",
            ScenarioKind::Constant { .. } => "state",
            ScenarioKind::CustomTable { .. } => "table",
        };
        for s in &states {
            if !(s.u >= m && s.u <= big_m && s.v >= m && s.v <= big_m) {
                return Err(bad(
                    key,
                    format!(
                        "state ({}, {}) lies outside [m, M]^2 = [{m}, {big_m}]^2",
                        s.u, s.v
                    ),
                ));
            }
        }
        if let ScenarioKind::CustomTable {
            breakpoints,
            states,
        } = &self.scenario.kind
        {
            if states.is_empty() || breakpoints.len() + 1 != states.len() {
                return Err(bad("table", "need one more state than breakpoints".into()));
            }
            if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad("table", "breakpoints must increase".into()));
            }
        }
        if let ScenarioKind::SmoothSine { wavelength, .. } = self.scenario.kind {
            if !(wavelength > 0.0) {
                return Err(bad(
                    "wavelength",
                    format!("must be positive, got {wavelength}"),
                ));
            }
            if self.grid.boundary == Boundary::Periodic {
                let periods = self.grid.width() / wavelength;
                if (periods - periods.round()).abs() > 1e-9 {
                    return Err(bad(
                        "wavelength",
                        format!("periodic domain width is not a multiple of {wavelength}"),
                    ));
                }
            }
        }
        let mw = self.scenario.mollifier.resolve(self.grid.dx());
        if !(mw >= 0.0) || !mw.is_finite() {
            return Err(bad("mollifier_width", format!("must be >= 0, got {mw}")));
        }
        if self.grid.boundary == Boundary::Outflow {
            let speed = fastest_speed(&self.law, &states);
            let half = 0.5 * self.grid.width();
            if !(speed * self.t_end < half) {
                return Err(bad(
                    "x_left/x_right",
                    format!(
                        "outflow domain half-width {half} is reached by speed {speed} before t_end = {}",
                        self.t_end
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Largest `|lambda|` over the `r`-range spanned by `states`.
fn fastest_speed(law: &FluxLaw, states: &[State]) -> f64 {
    let lo = states.iter().map(|s| s.r()).fold(f64::INFINITY, f64::min);
    let hi = states.iter().map(|s| s.r()).fold(0.0, f64::max);
    (0..=64)
        .map(|i| {
            let r = lo + (hi - lo) * i as f64 / 64.0;
            law.phi(r).abs().max(law.lambda2(r).abs())
        })
        .fold(0.0, f64::max)
}

fn default_domain(kind: &ScenarioKind) -> (f64, f64, Boundary) {
    match kind {
        ScenarioKind::Riemann { .. }
        | ScenarioKind::Contact { .. }
        | ScenarioKind::CustomTable { .. } => (-8.0, 8.0, Boundary::Outflow),
        ScenarioKind::SmoothSine { .. } | ScenarioKind::Constant { .. } => {
            (0.0, 1.0, Boundary::Periodic)
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum StateSpec {
    Pair([f64; 2]),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum WidthSpec {
    Number(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    flux_law: Option<String>,
    epsilon: Option<f64>,
    k: Option<f64>,
    p: Option<f64>,
    m: Option<f64>,
    #[serde(rename = "M")]
    big_m: Option<f64>,
    t_end: Option<f64>,
    cfl_adv: Option<f64>,
    cfl_diff: Option<f64>,
    representation: Option<Representation>,
    output_every: Option<usize>,
    x_left: Option<f64>,
    x_right: Option<f64>,
    n_cells: Option<usize>,
    boundary: Option<Boundary>,
    scenario: Option<String>,
    mollifier_width: Option<WidthSpec>,
    left: Option<StateSpec>,
    right: Option<StateSpec>,
    x0: Option<f64>,
    r: Option<f64>,
    xi_left: Option<f64>,
    xi_right: Option<f64>,
    mean: Option<StateSpec>,
    amplitude: Option<f64>,
    wavelength: Option<f64>,
    state: Option<StateSpec>,
    table: Option<Vec<[f64; 3]>>,
}

fn parse_state(key: &str, spec: Option<StateSpec>, default: State) -> Result<State> {
    match spec {
        None => Ok(default),
        Some(StateSpec::Pair([u, v])) => Ok(State::new(u, v)),
        Some(StateSpec::Text(text)) => {
            let parts: Vec<_> = text.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[u, v]) => Ok(State::new(u, v)),
                _ => Err(Error::Validation {
                    key: key.to_string(),
                    message: format!("expected \"u,v\", got \"{text}\""),
                }),
            }
        }
    }
}

fn parse_width(spec: Option<WidthSpec>, default: MollifierWidth) -> Result<MollifierWidth> {
    match spec {
        None => Ok(default),
        Some(WidthSpec::Number(w)) => Ok(MollifierWidth::Absolute(w)),
        Some(WidthSpec::Text(text)) => text
            .trim()
            .strip_suffix("dx")
            .and_then(|c| c.trim().parse().ok())
            .map(MollifierWidth::Cells)
            .ok_or_else(|| Error::Validation {
                key: "mollifier_width".into(),
                message: format!("expected a number or \"<c>dx\", got \"{text}\""),
            }),
    }
}

/// Parses TOML text into a validated configuration. `overrides` are
/// `key=value` pairs applied on top of the file; values are read as TOML and
/// fall back to bare strings.
pub fn parse_config_str(text: &str, origin: &str, overrides: &[String]) -> Result<SimConfig> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    for ov in overrides {
        let (key, value) = ov.split_once('=').ok_or_else(|| Error::Parse {
            origin: "--override".into(),
            message: format!("expected key=value, got \"{ov}\""),
        })?;
        let key = key.trim();
        let value = value.trim();
        let parsed = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        table.insert(key.to_string(), parsed);
    }
    let raw: RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
    resolve(raw)
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, &path.display().to_string(), overrides)
}

fn resolve(raw: RawConfig) -> Result<SimConfig> {
    let scenario_id = raw.scenario.as_deref().unwrap_or("riemann");
    let x0 = raw.x0.unwrap_or(0.0);
    let kind = match scenario_id {
        "riemann" => ScenarioKind::Riemann {
            left: parse_state("left", raw.left, State::new(2.0, 2.0))?,
            right: parse_state("right", raw.right, State::new(1.0, 1.0))?,
            x0,
        },
        "contact" => ScenarioKind::Contact {
            r: raw.r.unwrap_or(2.0),
            xi_left: raw.xi_left.unwrap_or(0.5),
            xi_right: raw.xi_right.unwrap_or(2.0),
            x0,
        },
        "smooth_sine" => ScenarioKind::SmoothSine {
            mean: parse_state("mean", raw.mean, State::new(2.0, 2.0))?,
            amplitude: raw.amplitude.unwrap_or(0.5),
            // patched below once the domain is known
            wavelength: raw.wavelength.unwrap_or(f64::NAN),
        },
        "constant" => ScenarioKind::Constant {
            state: parse_state("state", raw.state, State::new(2.0, 2.0))?,
        },
        "custom_table" => {
            let rows = raw.table.ok_or_else(|| Error::Validation {
                key: "table".into(),
                message: "custom_table requires a `table` of [x_break, u, v] rows".into(),
            })?;
            if rows.is_empty() {
                return Err(Error::Validation {
                    key: "table".into(),
                    message: "table is empty".into(),
                });
            }
            ScenarioKind::CustomTable {
                breakpoints: rows.iter().skip(1).map(|r| r[0]).collect(),
                states: rows.iter().map(|r| State::new(r[1], r[2])).collect(),
            }
        }
        other => {
            return Err(Error::Validation {
                key: "scenario".into(),
                message: format!(
                    "unknown scenario '{other}' (expected riemann, contact, smooth_sine, constant or custom_table)"
                ),
            })
        }
    };
    let (dl, dr, db) = default_domain(&kind);
    let x_left = raw.x_left.unwrap_or(dl);
    let x_right = raw.x_right.unwrap_or(dr);
    let boundary = raw.boundary.unwrap_or(db);
    let grid = Grid1D::new(x_left, x_right, raw.n_cells.unwrap_or(400), boundary)?;
    let kind = match kind {
        ScenarioKind::SmoothSine {
            mean,
            amplitude,
            wavelength,
        } if wavelength.is_nan() => ScenarioKind::SmoothSine {
            mean,
            amplitude,
            wavelength: grid.width(),
        },
        other => other,
    };
    let mollifier = parse_width(raw.mollifier_width, kind.default_mollifier())?;
    let law = FluxLaw::by_name(raw.flux_law.as_deref().unwrap_or("thin_film"))?;
    let cfg = SimConfig {
        law,
        epsilon: raw.epsilon.unwrap_or(0.1),
        k: raw.k.unwrap_or(1.0),
        p: raw.p.unwrap_or(1.0),
        m: raw.m.unwrap_or(0.5),
        big_m: raw.big_m.unwrap_or(4.0),
        grid,
        t_end: raw.t_end.unwrap_or(1.0),
        cfl_adv: raw.cfl_adv.unwrap_or(0.45),
        cfl_diff: raw.cfl_diff.unwrap_or(0.4),
        scenario: Scenario { kind, mollifier },
        representation: raw.representation.unwrap_or(Representation::Invariant),
        output_every: raw.output_every.unwrap_or(10),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Validation { key, .. } => key,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_riemann_file_resolves_defaults() {
        let cfg = parse_config_str(
            "scenario = \"riemann\"\nleft = \"2,2\"\nright = \"1,1\"\nepsilon = 0.1\n",
            "inline",
            &[],
        )
        .unwrap();
        assert_eq!(cfg.m, 0.5);
        assert_eq!(cfg.big_m, 4.0);
        assert_eq!(cfg.cfl_adv, 0.45);
        assert_eq!(cfg.cfl_diff, 0.4);
        assert_eq!(cfg.grid.boundary, Boundary::Outflow);
        assert_eq!(cfg.representation, Representation::Invariant);
        assert_eq!(cfg.scenario.mollifier, MollifierWidth::Cells(2.0));
        assert_eq!(
            cfg.scenario.kind,
            ScenarioKind::Riemann {
                left: State::new(2.0, 2.0),
                right: State::new(1.0, 1.0),
                x0: 0.0
            }
        );
    }

    #[test]
    fn negative_epsilon_names_key() {
        let err = parse_config_str("epsilon = -1.0", "inline", &[]).unwrap_err();
        assert_eq!(key_of(err), "epsilon");
    }

    #[test]
    fn state_outside_box_is_rejected() {
        let err = parse_config_str("left = \"0.1,2\"", "inline", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[m, M]^2"), "{msg}");
        assert_eq!(key_of(err), "left/right");
    }

    #[test]
    fn arrays_and_overrides() {
        let cfg = parse_config_str(
            "left = [3.0, 1.0]\nright = [1.0, 1.0]\n",
            "inline",
            &["n_cells=64".into(), "representation=conservative".into()],
        )
        .unwrap();
        assert_eq!(cfg.grid.n_cells, 64);
        assert_eq!(cfg.representation, Representation::Conservative);
        assert_eq!(
            cfg.scenario.kind.referenced_states()[0],
            State::new(3.0, 1.0)
        );
    }

    #[test]
    fn malformed_toml_is_a_parse_error_with_line() {
        let err = parse_config_str("epsilon = = 3", "cfg.toml", &[]).unwrap_err();
        match err {
            Error::Parse { origin, message } => {
                assert_eq!(origin, "cfg.toml");
                assert!(
                    message.contains("line 1") || message.contains("1:"),
                    "{message}"
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(
            parse_config_str("epsilonn = 0.1", "inline", &[]),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn narrow_outflow_domain_is_rejected() {
        let err = parse_config_str("x_left = -2.0\nx_right = 2.0", "inline", &[]).unwrap_err();
        assert_eq!(key_of(err), "x_left/x_right");
    }

    #[test]
    fn sine_defaults_to_one_period() {
        let cfg = parse_config_str("scenario = \"smooth_sine\"", "inline", &[]).unwrap();
        assert_eq!(cfg.grid.boundary, Boundary::Periodic);
        match cfg.scenario.kind {
            ScenarioKind::SmoothSine { wavelength, .. } => assert_eq!(wavelength, 1.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn mollifier_width_forms() {
        let cfg = parse_config_str("mollifier_width = \"3dx\"", "inline", &[]).unwrap();
        assert_eq!(cfg.scenario.mollifier, MollifierWidth::Cells(3.0));
        let cfg = parse_config_str("mollifier_width = 0.05", "inline", &[]).unwrap();
        assert_eq!(cfg.scenario.mollifier, MollifierWidth::Absolute(0.05));
        assert!(parse_config_str("mollifier_width = \"wide\"", "inline", &[]).is_err());
    }
}
