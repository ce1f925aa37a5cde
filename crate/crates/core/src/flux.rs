//! Scalar velocity laws `phi(r)` shared by both components of the system.
//!
//! A law is evaluated together with its first two derivatives; custom laws
//! must supply analytic derivatives.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Derivative order requested from [`FluxLaw::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// User-supplied law with analytic derivatives.
#[derive(Clone)]
pub struct AnalyticLaw {
    name: String,
    value: Arc<ScalarFn>,
    first: Arc<ScalarFn>,
    second: Arc<ScalarFn>,
}

impl AnalyticLaw {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            first: Arc::new(first),
            second: Arc::new(second),
        }
    }
}

impl fmt::Debug for AnalyticLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticLaw")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum FluxLaw {
    /// `phi(r) = r/2`, the thin-film instance.
    ThinFilm,
    /// `phi(r) = ln r`.
    Log,
    Custom(AnalyticLaw),
}

impl FluxLaw {
    /// Looks up a built-in law by its configuration name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "thin_film" => Ok(FluxLaw::ThinFilm),
            "log" => Ok(FluxLaw::Log),
            other => Err(Error::Validation {
                key: "flux_law".into(),
                message: format!("unknown flux law '{other}' (expected \"thin_film\" or \"log\")"),
            }),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            FluxLaw::ThinFilm => "thin_film",
            FluxLaw::Log => "log",
            FluxLaw::Custom(law) => &law.name,
        }
    }

    pub fn eval(&self, r: f64, order: Order) -> f64 {
        match (self, order) {
            (FluxLaw::ThinFilm, Order::Value) => 0.5 * r,
            (FluxLaw::ThinFilm, Order::First) => 0.5,
            (FluxLaw::ThinFilm, Order::Second) => 0.0,
            (FluxLaw::Log, Order::Value) => r.ln(),
            (FluxLaw::Log, Order::First) => 1.0 / r,
            (FluxLaw::Log, Order::Second) => -1.0 / (r * r),
            (FluxLaw::Custom(law), Order::Value) => (law.value)(r),
            (FluxLaw::Custom(law), Order::First) => (law.first)(r),
            (FluxLaw::Custom(law), Order::Second) => (law.second)(r),
        }
    }

    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        self.eval(r, Order::Value)
    }

    #[inline]
    pub fn dphi(&self, r: f64) -> f64 {
        self.eval(r, Order::First)
    }

    #[inline]
    pub fn d2phi(&self, r: f64) -> f64 {
        self.eval(r, Order::Second)
    }

    /// Second characteristic speed as a function of `r`: `phi + 2 r phi'`.
    #[inline]
    pub fn lambda2(&self, r: f64) -> f64 {
        self.phi(r) + 2.0 * r * self.dphi(r)
    }

    /// `d lambda2 / dr = 3 phi' + 2 r phi''`; its sign decides whether the
    /// second field is compressive for increasing or decreasing `r`.
    #[inline]
    pub fn lambda2_slope(&self, r: f64) -> f64 {
        3.0 * self.dphi(r) + 2.0 * r * self.d2phi(r)
    }

    /// Closed form of `int_{a}^{b} -k s^{-k-1} (phi(s) + 2 s phi'(s)) ds`
    /// when one is known for this law.
    pub fn entropy_flux_integral_closed_form(&self, k: f64, a: f64, b: f64) -> Option<f64> {
        match self {
            // integrand reduces to -(3k/2) s^{-k}
            FluxLaw::ThinFilm => {
                if k == 1.0 {
                    Some(-1.5 * (b / a).ln())
                } else {
                    let e = 1.0 - k;
                    Some(-1.5 * k * (b.powf(e) - a.powf(e)) / e)
                }
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub law: String,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub min_dphi: f64,
    /// Consecutive sample pairs `[r_i, r_{i+1}]` across which `3 phi' + 2 r phi''`
    /// changes sign. Informational only.
    pub sign_changes: Vec<[f64; 2]>,
    pub pass: bool,
}

/// Samples `phi'` and `3 phi' + 2 r phi''` on a uniform grid of `[r_min, r_max]`.
pub fn validate_flux_law(
    law: &FluxLaw,
    r_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<ValidationReport> {
    if !(r_min > 0.0) || !(r_max >= r_min) {
        return Err(Error::invalid(
            "r_min",
            format!("need 0 < r_min <= r_max, got [{r_min}, {r_max}]"),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "samples",
            "at least two samples are required",
        ));
    }
    let step = (r_max - r_min) / (samples - 1) as f64;
    let mut min_dphi = f64::INFINITY;
    let mut sign_changes = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..samples {
        let r = if i + 1 == samples {
            r_max
        } else {
            r_min + step * i as f64
        };
        let d = law.dphi(r);
        if !(d > 0.0) {
            return Err(Error::NonPositiveDerivative {
                law: law.name().to_string(),
                r,
                value: d,
            });
        }
        min_dphi = min_dphi.min(d);
        let g = law.lambda2_slope(r);
        if let Some((r_prev, g_prev)) = prev {
            if g_prev.signum() != g.signum() || g == 0.0 {
                sign_changes.push([r_prev, r]);
            }
        }
        prev = Some((r, g));
    }
    Ok(ValidationReport {
        law: law.name().to_string(),
        r_min,
        r_max,
        samples,
        min_dphi,
        sign_changes,
        pass: min_dphi > 0.0,
    })
}
