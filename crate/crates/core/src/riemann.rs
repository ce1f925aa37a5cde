//! Exact Riemann solver.
//!
//! The first field is linearly degenerate, so the left state is joined to the
//! middle state by a contact along `r = const` moving at `phi(r)`. The second
//! field is genuinely nonlinear; the middle state is joined to the right state
//! along `xi = const` by either a Lax shock or a centred rarefaction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::FluxLaw;
use crate::state::{state_from_invariants, State};

/// Jumps in `r` below this size carry no second wave.
pub const DEGENERATE_JUMP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SecondWave {
    None,
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub left: State,
    pub middle: State,
    pub right: State,
    pub contact_speed: f64,
    pub wave2: SecondWave,
    pub law: FluxLaw,
    increasing: bool,
}

/// Rankine-Hugoniot speed of a second-family jump between `r_a` and `r_b`
/// at common `xi`.
pub fn shock_speed(law: &FluxLaw, r_a: f64, r_b: f64) -> f64 {
    let (sa, sb) = (r_a.sqrt(), r_b.sqrt());
    (sb * law.phi(r_b) - sa * law.phi(r_a)) / (sb - sa)
}

pub fn solve_riemann(law: &FluxLaw, left: State, right: State) -> Result<RiemannSolution> {
    left.require_positive()?;
    right.require_positive()?;
    let r_l = left.r();
    let r_r = right.r();
    let xi_r = right.xi();
    let middle = if r_l == right.r() && left.xi() == xi_r {
        right
    } else {
        state_from_invariants(r_l, xi_r)
    };
    let contact_speed = law.phi(r_l);

    let (lo, hi) = (r_l.min(r_r), r_l.max(r_r));
    let increasing = lambda2_monotonicity(law, lo, hi)?;

    let wave2 = if (r_r - r_l).abs() < DEGENERATE_JUMP {
        SecondWave::None
    } else {
        let l_mid = law.lambda2(r_l);
        let l_right = law.lambda2(r_r);
        if l_mid < l_right {
            SecondWave::Rarefaction {
                head: l_mid,
                tail: l_right,
            }
        } else {
            let speed = shock_speed(law, r_l, r_r);
            if !(l_mid > speed && speed > l_right) {
                return Err(Error::AdmissibilityViolation(format!(
                    "Lax inequalities fail: lambda2(mid) = {l_mid}, s = {speed}, lambda2(right) = {l_right}"
                )));
            }
            SecondWave::Shock { speed }
        }
    };

    let min_wave2 = match wave2 {
        SecondWave::None => f64::INFINITY,
        SecondWave::Shock { speed } => speed,
        SecondWave::Rarefaction { head, .. } => head,
    };
    if contact_speed > min_wave2 {
        return Err(Error::AdmissibilityViolation(format!(
            "contact speed {contact_speed} exceeds second-wave speed {min_wave2}"
        )));
    }

    Ok(RiemannSolution {
        left,
        middle,
        right,
        contact_speed,
        wave2,
        law: law.clone(),
        increasing,
    })
}

/// Returns whether `lambda2` increases on `[lo, hi]`; rejects ranges where
/// `3 phi' + 2 r phi''` changes sign.
fn lambda2_monotonicity(law: &FluxLaw, lo: f64, hi: f64) -> Result<bool> {
    const SAMPLES: usize = 64;
    let mut sign = 0.0f64;
    for i in 0..=SAMPLES {
        let r = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let g = law.lambda2_slope(r);
        if g == 0.0 || !g.is_finite() {
            return Err(Error::AdmissibilityViolation(format!(
                "second field degenerates at r = {r}"
            )));
        }
        if sign == 0.0 {
            sign = g.signum();
        } else if g.signum() != sign {
            return Err(Error::AdmissibilityViolation(format!(
                "lambda2 is not monotone on [{lo}, {hi}]"
            )));
        }
    }
    Ok(sign > 0.0)
}

impl RiemannSolution {
    pub fn sample(&self, x_over_t: f64) -> Result<State> {
        if x_over_t < self.contact_speed {
            return Ok(self.left);
        }
        match self.wave2 {
            SecondWave::None => Ok(self.middle),
            SecondWave::Shock { speed } => Ok(if x_over_t < speed {
                self.middle
            } else {
                self.right
            }),
            SecondWave::Rarefaction { head, tail } => {
                if x_over_t <= head {
                    Ok(self.middle)
                } else if x_over_t >= tail {
                    Ok(self.right)
                } else {
                    let r = self.invert_lambda2(x_over_t)?;
                    Ok(state_from_invariants(r, self.right.xi()))
                }
            }
        }
    }

    /// Solves `lambda2(r) = c` inside the fan.
    fn invert_lambda2(&self, c: f64) -> Result<f64> {
        if let FluxLaw::ThinFilm = self.law {
            return Ok(2.0 * c / 3.0);
        }
        let (mut lo, mut hi) = {
            let a = self.middle.r();
            let b = self.right.r();
            (a.min(b), a.max(b))
        };
        let g = |r: f64| self.law.lambda2(r) - c;
        let (glo, ghi) = (g(lo), g(hi));
        if glo * ghi > 0.0 {
            return Err(Error::RootNotBracketed { x_over_t: c });
        }
        let up = self.increasing;
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (g(mid) < 0.0) == up {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Samples the self-similar solution at time `t` on the given points.
    pub fn sample_at(&self, xs: &[f64], x0: f64, t: f64) -> Result<Vec<State>> {
        xs.iter()
            .map(|&x| {
                if t <= 0.0 {
                    Ok(if x < x0 { self.left } else { self.right })
                } else {
                    self.sample((x - x0) / t)
                }
            })
            .collect()
    }

    pub fn summary(&self) -> WaveSummary {
        WaveSummary {
            schema: WAVES_SCHEMA,
            flux_law: self.law.name().to_string(),
            left: self.left,
            middle: self.middle,
            right: self.right,
            contact_speed: self.contact_speed,
            contact_strength: (self.middle.xi() - self.left.xi()).abs(),
            wave2: self.wave2,
        }
    }
}

pub const WAVES_SCHEMA: &str = "kklab.riemann-waves/1";

#[derive(Debug, Clone, Serialize)]
pub struct WaveSummary {
    pub schema: &'static str,
    pub flux_law: String,
    pub left: State,
    pub middle: State,
    pub right: State,
    pub contact_speed: f64,
    pub contact_strength: f64,
    pub wave2: SecondWave,
}

/// `s [U] - [F(U)]` for a jump from `a` to `b`.
pub fn rankine_hugoniot_residual(law: &FluxLaw, s: f64, a: State, b: State) -> [f64; 2] {
    let pa = law.phi(a.r());
    let pb = law.phi(b.r());
    [
        s * (b.u - a.u) - (b.u * pb - a.u * pa),
        s * (b.v - a.v) - (b.v * pb - a.v * pa),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thin_film_shock_example() {
        let sol = solve_riemann(
            &FluxLaw::ThinFilm,
            State::new(2.0, 2.0),
            State::new(1.0, 1.0),
        )
        .unwrap();
        assert_eq!(sol.wave2, SecondWave::Shock { speed: 3.5 });
        assert_eq!(sol.middle, State::new(2.0, 2.0));
        assert_eq!(sol.contact_speed, 2.0);
        assert_eq!(sol.sample(3.4).unwrap(), State::new(2.0, 2.0));
        assert_eq!(sol.sample(3.6).unwrap(), State::new(1.0, 1.0));
    }

    #[test]
    fn thin_film_rarefaction_example() {
        let sol = solve_riemann(
            &FluxLaw::ThinFilm,
            State::new(1.0, 1.0),
            State::new(2.0, 2.0),
        )
        .unwrap();
        assert_eq!(
            sol.wave2,
            SecondWave::Rarefaction {
                head: 1.5,
                tail: 6.0
            }
        );
        let s = sol.sample(1.5 * 2.25).unwrap();
        assert!((s.u - 1.5).abs() < 1e-15 && (s.v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn identical_states_give_constant_solution() {
        let a = State::new(1.3, 0.9);
        let sol = solve_riemann(&FluxLaw::ThinFilm, a, a).unwrap();
        assert_eq!(sol.wave2, SecondWave::None);
        for c in [-1e9, -1.0, 0.0, 0.585, 2.0, 1e9] {
            assert_eq!(sol.sample(c).unwrap(), a);
        }
    }

    #[test]
    fn far_field_returns_end_states() {
        let l = State::new(1.0, 2.0);
        let r = State::new(3.0, 0.5);
        let sol = solve_riemann(&FluxLaw::Log, l, r).unwrap();
        assert_eq!(sol.sample(-1e12).unwrap(), l);
        assert_eq!(sol.sample(1e12).unwrap(), r);
    }

    #[test]
    fn rh_residual_examples() {
        let law = FluxLaw::ThinFilm;
        let a = State::new(2.0, 2.0);
        let b = State::new(1.0, 1.0);
        let res = rankine_hugoniot_residual(&law, 3.5, a, b);
        assert!(res[0].abs() <= 1e-14 && res[1].abs() <= 1e-14);
        assert_eq!(rankine_hugoniot_residual(&law, 7.0, a, a), [0.0, 0.0]);
        let res = rankine_hugoniot_residual(&law, 3.0, a, b);
        assert!((res[0] - 0.5).abs() < 1e-14 && (res[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn non_monotone_lambda2_is_rejected() {
        use crate::flux::AnalyticLaw;
        // 3 phi' + 2 r phi'' = 3 - 5r/4 vanishes at r = 2.4
        let law = FluxLaw::Custom(AnalyticLaw::new(
            "bent",
            |r| r - r * r / 8.0,
            |r| 1.0 - r / 4.0,
            |_| -0.25,
        ));
        let err = solve_riemann(&law, State::new(1.0, 1.0), State::new(1.7, 1.7)).unwrap_err();
        assert!(matches!(err, Error::AdmissibilityViolation(_)));
    }
}
