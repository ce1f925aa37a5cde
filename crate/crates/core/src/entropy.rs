//! Entropy/entropy-flux pairs `(E_{k,p}, Q_{k,p})` and the sufficient
//! conditions on the generating functions `(Psi, Theta)`.
//!
//! With `r = uv`, `xi = u/v`:
//!
//! ```text
//! E_{k,p} = r^{-k} + sqrt(r) xi^p - m^{-2k} - m
//! Q_{k,p} = int_{m^2}^{r} -k s^{-k-1} (phi(s) + 2 s phi'(s)) ds + phi(r) sqrt(r) xi^p
//! ```

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::FluxLaw;
use crate::model::{jacobian, sym_eigenvalues, Mat2, Vec2};
use crate::quadrature;
use crate::state::{State, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    k: f64,
    p: f64,
    space: StateSpace,
}

impl EntropyPair {
    pub fn new(k: f64, p: f64, m: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("k", format!("must be positive, got {k}")));
        }
        if !(p >= 0.5) || !p.is_finite() {
            return Err(Error::invalid(
                "p",
                format!("must be at least 1/2, got {p}"),
            ));
        }
        Ok(Self {
            k,
            p,
            space: StateSpace::new(m)?,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> f64 {
        self.space.floor()
    }

    #[inline]
    fn reciprocal_part(&self, u: f64, v: f64) -> f64 {
        (u * v).powf(-self.k)
    }

    #[inline]
    fn power_part(&self, u: f64, v: f64) -> f64 {
        (u * v).sqrt() * (u / v).powf(self.p)
    }

    /// `E_{k,p}(u, v)`, grouped so that the value at `(m, m)` is exactly zero.
    pub fn value(&self, s: State) -> Result<f64> {
        self.space.check(&s)?;
        Ok(self.value_unchecked(s))
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, s: State) -> f64 {
        let m = self.m();
        (self.reciprocal_part(s.u, s.v) - self.reciprocal_part(m, m))
            + (self.power_part(s.u, s.v) - self.power_part(m, m))
    }

    /// `Q_{k,p}(u, v)` for the given law.
    pub fn flux(&self, law: &FluxLaw, s: State) -> Result<f64> {
        self.space.check(&s)?;
        self.flux_unchecked(law, s)
    }

    pub(crate) fn flux_unchecked(&self, law: &FluxLaw, s: State) -> Result<f64> {
        let r = s.r();
        let m = self.m();
        let integral = entropy_flux_integral(law, self.k, m * m, r)?;
        Ok(integral + law.phi(r) * self.power_part(s.u, s.v))
    }

    pub fn gradient(&self, s: State) -> Result<Vec2> {
        s.require_positive()?;
        let rk = self.reciprocal_part(s.u, s.v);
        let pw = self.power_part(s.u, s.v);
        let a = self.p + 0.5;
        let b = 0.5 - self.p;
        Ok([(-self.k * rk + a * pw) / s.u, (-self.k * rk + b * pw) / s.v])
    }

    /// Hessian of `(uv)^{-k}`.
    pub fn hessian_reciprocal_part(&self, s: State) -> Result<Mat2> {
        s.require_positive()?;
        let k = self.k;
        let rk = self.reciprocal_part(s.u, s.v);
        let diag = k * (k + 1.0) * rk;
        let off = k * k * rk / (s.u * s.v);
        Ok([[diag / (s.u * s.u), off], [off, diag / (s.v * s.v)]])
    }

    /// Hessian of `u^{p+1/2} v^{1/2-p}`; rank one.
    pub fn hessian_power_part(&self, s: State) -> Result<Mat2> {
        s.require_positive()?;
        let c = (self.p * self.p - 0.25) * self.power_part(s.u, s.v);
        let off = -c / (s.u * s.v);
        Ok([[c / (s.u * s.u), off], [off, c / (s.v * s.v)]])
    }

    pub fn hessian(&self, s: State) -> Result<Mat2> {
        let a = self.hessian_reciprocal_part(s)?;
        let b = self.hessian_power_part(s)?;
        Ok([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn min_hessian_eigenvalue(&self, s: State) -> Result<f64> {
        Ok(sym_eigenvalues(self.hessian(s)?).0)
    }

    /// Dissipation density `k (2k+1) r^{-k-2} r_x^2` of the tailored regularization.
    #[inline]
    pub fn dissipation_density(&self, r: f64, r_x: f64) -> f64 {
        self.k * (2.0 * self.k + 1.0) * r.powf(-self.k - 2.0) * r_x * r_x
    }
}

/// Diffusion matrix of the structure-adapted regularization:
/// `B = [[1, u/v], [v/u, 1]]`.
pub fn diffusion_matrix(s: State) -> Mat2 {
    [[1.0, s.u / s.v], [s.v / s.u, 1.0]]
}

/// `int_a^b -k s^{-k-1} (phi(s) + 2 s phi'(s)) ds`, closed form when the law
/// provides one, adaptive quadrature otherwise.
pub fn entropy_flux_integral(law: &FluxLaw, k: f64, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    match law.entropy_flux_integral_closed_form(k, a, b) {
        Some(v) => Ok(v),
        None => entropy_flux_integral_quadrature(law, k, a, b),
    }
}

pub fn entropy_flux_integral_quadrature(law: &FluxLaw, k: f64, a: f64, b: f64) -> Result<f64> {
    quadrature::integrate(
        |s| -k * s.powf(-k - 1.0) * law.lambda2(s),
        a,
        b,
        quadrature::DEFAULT_ABS_TOL,
        quadrature::DEFAULT_MAX_SUBDIVISIONS,
    )
}

/// `(grad E)^T DF - (grad Q)^T` with `grad Q` from central differences of
/// the entropy flux.
pub fn compatibility_residual(ep: &EntropyPair, law: &FluxLaw, s: State) -> Result<Vec2> {
    compatibility_residual_with(ep, law, s, |t| ep.flux(law, t))
}

/// Same as [`compatibility_residual`] with a caller-supplied entropy flux.
pub fn compatibility_residual_with(
    ep: &EntropyPair,
    law: &FluxLaw,
    s: State,
    q: impl Fn(State) -> Result<f64>,
) -> Result<Vec2> {
    let grad_e = ep.gradient(s)?;
    let df = jacobian(law, s)?;
    let hu = 1e-5 * s.u.abs().max(1.0);
    let hv = 1e-5 * s.v.abs().max(1.0);
    // one-sided stencil at the floor keeps evaluations inside U_m
    let q_u = diff(|x| q(State::new(x, s.v)), s.u, hu, ep.m())?;
    let q_v = diff(|x| q(State::new(s.u, x)), s.v, hv, ep.m())?;
    Ok([
        grad_e[0] * df[0][0] + grad_e[1] * df[1][0] - q_u,
        grad_e[0] * df[0][1] + grad_e[1] * df[1][1] - q_v,
    ])
}

fn diff(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64, floor: f64) -> Result<f64> {
    if x - h >= floor {
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    } else {
        Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h))
    }
}

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A scalar function with analytic first and second derivatives.
#[derive(Clone)]
pub struct ScalarFunction {
    value: Arc<RealFn>,
    first: Arc<RealFn>,
    second: Arc<RealFn>,
}

impl ScalarFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            first: Arc::new(first),
            second: Arc::new(second),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn first(&self, x: f64) -> f64 {
        (self.first)(x)
    }

    pub fn second(&self, x: f64) -> f64 {
        (self.second)(x)
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarFunction")
    }
}

/// Generating functions of an entropy `E = Psi(r) + sqrt(r) Theta(xi) + K`.
#[derive(Debug, Clone)]
pub struct GeneralPairSpec {
    pub psi: ScalarFunction,
    pub theta: ScalarFunction,
}

impl GeneralPairSpec {
    /// `Psi = r^{-k}`, `Theta = xi^p`: the generators of `E_{k,p}`.
    pub fn power_family(k: f64, p: f64) -> Self {
        Self {
            psi: ScalarFunction::new(
                move |r| r.powf(-k),
                move |r| -k * r.powf(-k - 1.0),
                move |r| k * (k + 1.0) * r.powf(-k - 2.0),
            ),
            theta: ScalarFunction::new(
                move |x| x.powf(p),
                move |x| p * x.powf(p - 1.0),
                move |x| p * (p - 1.0) * x.powf(p - 2.0),
            ),
        }
    }

    /// `Psi = r^{-k}`, `Theta = 0`: the pure-`r` entropy `E_k`.
    pub fn r_entropy(k: f64) -> Self {
        let mut spec = Self::power_family(k, 1.0);
        spec.theta = ScalarFunction::zero();
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionFlags {
    pub psi_convex: bool,
    pub psi_decreasing: bool,
    pub psi_combined: bool,
    pub theta_condition: bool,
    /// `4 xi^2 Theta'' + 4 xi Theta' - Theta`.
    pub theta_expression: f64,
    /// `r1^T Hess(E) r1 = sqrt(r) (4 xi^2 Theta'' + 4 xi Theta' - Theta) - 2 r Psi'`.
    pub form_field1: f64,
    /// `r2^T Hess(E) r2 = 2 r (2 r Psi'' + Psi')`.
    pub form_field2: f64,
}

impl ConditionFlags {
    pub fn all_pass(&self) -> bool {
        self.psi_convex && self.psi_decreasing && self.psi_combined && self.theta_condition
    }
}

pub fn check_general_pair(gp: &GeneralPairSpec, r: f64, xi: f64) -> ConditionFlags {
    let d1 = gp.psi.first(r);
    let d2 = gp.psi.second(r);
    let theta_expression =
        4.0 * xi * xi * gp.theta.second(xi) + 4.0 * xi * gp.theta.first(xi) - gp.theta.value(xi);
    ConditionFlags {
        psi_convex: d2 > 0.0,
        psi_decreasing: d1 < 0.0,
        psi_combined: 2.0 * r * d2 + d1 > 0.0,
        theta_condition: theta_expression >= 0.0,
        theta_expression,
        form_field1: r.sqrt() * theta_expression - 2.0 * r * d1,
        form_field2: 2.0 * r * (2.0 * r * d2 + d1),
    }
}

/// Summary emitted by the `check` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub flux_law: String,
    pub k: f64,
    pub p: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub grid: usize,
    pub min_hessian_eigenvalue: f64,
    pub max_compatibility_residual: f64,
    pub flags_pass_everywhere: bool,
    pub min_form_field1: f64,
    pub min_form_field2: f64,
    pub min_theta_expression: f64,
}

pub const CHECK_SCHEMA: &str = "kklab.check/1";

/// Samples a `grid x grid` lattice of `[m, M]^2` and gathers convexity,
/// compatibility and generator-condition diagnostics for `E_{k,p}`.
pub fn check_entropy_pair(
    law: &FluxLaw,
    k: f64,
    p: f64,
    m: f64,
    big_m: f64,
    grid: usize,
) -> Result<CheckReport> {
    let ep = EntropyPair::new(k, p, m)?;
    if !(big_m > m) {
        return Err(Error::invalid(
            "M",
            format!("must exceed m = {m}, got {big_m}"),
        ));
    }
    if grid < 2 {
        return Err(Error::invalid("grid", "need at least 2 nodes per axis"));
    }
    let gp = GeneralPairSpec::power_family(k, p);
    let node = |i: usize| {
        if i + 1 == grid {
            big_m
        } else {
            m + (big_m - m) * i as f64 / (grid - 1) as f64
        }
    };
    let mut report = CheckReport {
        schema: CHECK_SCHEMA,
        flux_law: law.name().to_string(),
        k,
        p,
        m,
        big_m,
        grid,
        min_hessian_eigenvalue: f64::INFINITY,
        max_compatibility_residual: 0.0,
        flags_pass_everywhere: true,
        min_form_field1: f64::INFINITY,
        min_form_field2: f64::INFINITY,
        min_theta_expression: f64::INFINITY,
    };
    for i in 0..grid {
        for j in 0..grid {
            let s = State::new(node(i), node(j));
            report.min_hessian_eigenvalue = report
                .min_hessian_eigenvalue
                .min(ep.min_hessian_eigenvalue(s)?);
            let res = compatibility_residual(&ep, law, s)?;
            report.max_compatibility_residual = report
                .max_compatibility_residual
                .max(res[0].abs())
                .max(res[1].abs());
            let flags = check_general_pair(&gp, s.r(), s.xi());
            report.flags_pass_everywhere &= flags.all_pass();
            report.min_form_field1 = report.min_form_field1.min(flags.form_field1);
            report.min_form_field2 = report.min_form_field2.min(flags.form_field2);
            report.min_theta_expression = report.min_theta_expression.min(flags.theta_expression);
        }
    }
    Ok(report)
}
