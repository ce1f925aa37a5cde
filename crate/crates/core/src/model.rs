//! Flux, Jacobian and eigenstructure of `U_t + (U phi(uv))_x = 0`.

use serde::Serialize;

use crate::error::Result;
use crate::flux::FluxLaw;
use crate::state::State;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub lambda1: f64,
    pub lambda2: f64,
    pub r1: Vec2,
    pub r2: Vec2,
}

pub fn flux(law: &FluxLaw, s: State) -> Result<Vec2> {
    s.require_positive()?;
    Ok(flux_unchecked(law, s))
}

#[inline]
pub(crate) fn flux_unchecked(law: &FluxLaw, s: State) -> Vec2 {
    let phi = law.phi(s.r());
    [s.u * phi, s.v * phi]
}

pub fn jacobian(law: &FluxLaw, s: State) -> Result<Mat2> {
    s.require_positive()?;
    let r = s.r();
    let phi = law.phi(r);
    let dphi = law.dphi(r);
    let diag = phi + r * dphi;
    Ok([[diag, s.u * s.u * dphi], [s.v * s.v * dphi, diag]])
}

pub fn eigensystem(law: &FluxLaw, s: State) -> Result<Eigensystem> {
    s.require_positive()?;
    let r = s.r();
    Ok(Eigensystem {
        lambda1: law.phi(r),
        lambda2: law.lambda2(r),
        r1: [-s.u, s.v],
        r2: [s.u, s.v],
    })
}

/// Largest characteristic speed magnitude at `s`.
#[inline]
pub(crate) fn max_abs_speed(law: &FluxLaw, s: State) -> f64 {
    let r = s.r();
    law.phi(r).abs().max(law.lambda2(r).abs())
}

/// Marker for the linearly degenerate first field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearlyDegenerate {
    /// `grad(lambda1) . r1`, identically zero.
    pub value: f64,
}

/// Returns the first-field degeneracy value and the second-field
/// nonlinearity indicator `grad(lambda2) . r2 = 6 r phi' + 4 r^2 phi''`.
pub fn classify_fields(law: &FluxLaw, s: State) -> (LinearlyDegenerate, f64) {
    let r = s.r();
    let dphi = law.dphi(r);
    // grad(lambda1) = phi'(r) (v, u)
    let field1 = dphi * s.v * (-s.u) + dphi * s.u * s.v;
    let field2 = 6.0 * r * dphi + 4.0 * r * r * law.d2phi(r);
    (LinearlyDegenerate { value: field1 }, field2)
}

pub(crate) fn sym_eigenvalues(a: Mat2) -> (f64, f64) {
    let tr = a[0][0] + a[1][1];
    let half_diff = 0.5 * (a[0][0] - a[1][1]);
    let off = 0.5 * (a[0][1] + a[1][0]);
    let rad = half_diff.hypot(off);
    let mean = 0.5 * tr;
    (mean - rad, mean + rad)
}
