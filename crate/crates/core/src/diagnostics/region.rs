use serde::Serialize;

use crate::mesh::FieldPair;

pub const REGION_SCHEMA: &str = "kklab.invariant-region/1";

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub schema: &'static str,
    pub pass: bool,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub tol: f64,
    /// `[min, max]` of each quantity over the field.
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub r: [f64; 2],
    pub xi: [f64; 2],
    pub r_bounds: [f64; 2],
    pub xi_bounds: [f64; 2],
    pub first_violation: Option<usize>,
    pub violations: usize,
}

fn extremes(values: impl Iterator<Item = f64>) -> [f64; 2] {
    values.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], x| {
        [lo.min(x), hi.max(x)]
    })
}

/// Passes iff every cell lies in `[m - tol, M + tol]^2`.
pub fn invariant_region_check(fp: &FieldPair, m: f64, big_m: f64, tol: f64) -> RegionReport {
    let states = fp.states();
    let (lo, hi) = (m - tol, big_m + tol);
    let inside = |x: f64| x >= lo && x <= hi;
    let mut first_violation = None;
    let mut violations = 0;
    for (i, s) in states.iter().enumerate() {
        if !(inside(s.u) && inside(s.v)) {
            violations += 1;
            first_violation.get_or_insert(i);
        }
    }
    RegionReport {
        schema: REGION_SCHEMA,
        pass: violations == 0,
        m,
        big_m,
        tol,
        u: extremes(states.iter().map(|s| s.u)),
        v: extremes(states.iter().map(|s| s.v)),
        r: extremes(fp.r_values().into_iter()),
        xi: extremes(fp.xi_values().into_iter()),
        r_bounds: [m * m, big_m * big_m],
        xi_bounds: [m / big_m, big_m / m],
        first_violation,
        violations,
    }
}
