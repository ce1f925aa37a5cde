//! Conserved states `(u, v)` and their Riemann-invariant image `(r, xi) = (uv, u/v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
}

impl State {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.u * self.v
    }

    #[inline]
    pub fn xi(&self) -> f64 {
        self.u / self.v
    }

    /// Membership in `U_m` for some `m > 0`.
    pub fn is_positive(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.u > 0.0 && self.v > 0.0
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        if self.is_positive() {
            Ok(())
        } else {
            Err(Error::OutOfStateSpace {
                u: self.u,
                v: self.v,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantState {
    pub r: f64,
    pub xi: f64,
}

/// The state space `U_m = {u, v >= m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpace {
    m: f64,
}

impl StateSpace {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::invalid(
                "m",
                format!("floor must be positive, got {m}"),
            ));
        }
        Ok(Self { m })
    }

    pub fn floor(&self) -> f64 {
        self.m
    }

    pub fn contains(&self, s: &State) -> bool {
        s.u >= self.m && s.v >= self.m && s.u.is_finite() && s.v.is_finite()
    }

    pub fn check(&self, s: &State) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::OutOfStateSpace { u: s.u, v: s.v })
        }
    }
}

pub fn to_invariants(s: State, space: StateSpace) -> Result<InvariantState> {
    space.check(&s)?;
    Ok(InvariantState {
        r: s.r(),
        xi: s.xi(),
    })
}

pub fn from_invariants(iv: InvariantState) -> Result<State> {
    if !(iv.r > 0.0 && iv.xi > 0.0) || !iv.r.is_finite() || !iv.xi.is_finite() {
        return Err(Error::NonPositiveInvariants { r: iv.r, xi: iv.xi });
    }
    Ok(state_from_invariants(iv.r, iv.xi))
}

/// Unchecked inverse map used in hot loops: `u = sqrt(r xi)`, `v = sqrt(r / xi)`.
#[inline]
pub fn state_from_invariants(r: f64, xi: f64) -> State {
    State {
        u: (r * xi).sqrt(),
        v: (r / xi).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_map_examples() {
        let sp = StateSpace::new(0.5).unwrap();
        let iv = to_invariants(State::new(1.0, 2.0), sp).unwrap();
        assert_eq!((iv.r, iv.xi), (2.0, 0.5));

        let iv = to_invariants(State::new(3.0, 0.75), sp).unwrap();
        assert_eq!((iv.r, iv.xi), (2.25, 4.0));
        let back = from_invariants(iv).unwrap();
        assert_eq!((back.u, back.v), (3.0, 0.75));
    }

    #[test]
    fn corner_of_state_space() {
        let m: f64 = 0.5;
        let s = from_invariants(InvariantState { r: m * m, xi: 1.0 }).unwrap();
        assert_eq!((s.u, s.v), (m, m));
    }

    #[test]
    fn out_of_space_errors() {
        let sp = StateSpace::new(0.5).unwrap();
        assert!(matches!(
            to_invariants(State::new(0.1, 2.0), sp),
            Err(Error::OutOfStateSpace { .. })
        ));
        assert!(from_invariants(InvariantState { r: 0.0, xi: 1.0 }).is_err());
        assert!(from_invariants(InvariantState { r: 1.0, xi: -1.0 }).is_err());
        assert!(StateSpace::new(0.0).is_err());
    }
}
