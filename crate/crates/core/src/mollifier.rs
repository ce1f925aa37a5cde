//! Friedrichs mollifier `j(x) = exp(1/(x^2 - 1)) / A` on `|x| < 1`.

use std::sync::OnceLock;

use crate::quadrature;
use crate::state::State;

/// Simpson intervals across the kernel support.
const NODES: usize = 128;

/// Unnormalized bump `exp(1/(x^2 - 1))`.
#[inline]
pub fn raw_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (x * x - 1.0)).exp()
    }
}

/// Derivative of [`raw_bump`].
#[inline]
pub fn raw_bump_derivative(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let d = x * x - 1.0;
        raw_bump(x) * (-2.0 * x / (d * d))
    }
}

/// Normalizing constant `A = int_{-1}^{1} exp(1/(x^2-1)) dx`.
pub fn normalization() -> f64 {
    static A: OnceLock<f64> = OnceLock::new();
    *A.get_or_init(|| {
        quadrature::integrate(raw_bump, -1.0, 1.0, 1e-15, 10_000).expect("bump integral converges")
    })
}

/// The unit-mass kernel `j`.
#[inline]
pub fn kernel(x: f64) -> f64 {
    raw_bump(x) / normalization()
}

#[inline]
pub fn kernel_derivative(x: f64) -> f64 {
    raw_bump_derivative(x) / normalization()
}

struct Stencil {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn stencil() -> &'static Stencil {
    static S: OnceLock<Stencil> = OnceLock::new();
    S.get_or_init(|| {
        let h = 2.0 / NODES as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        // endpoints carry zero kernel weight
        for i in 1..NODES {
            let y = -1.0 + h * i as f64;
            let simpson = if i % 2 == 1 { 4.0 } else { 2.0 };
            nodes.push(y);
            weights.push(simpson * raw_bump(y));
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Stencil { nodes, weights }
    })
}

/// `(j_width * datum)(x)` by composite Simpson quadrature over the kernel
/// support. The result is a convex average of sampled datum values and is
/// clamped to their range; `width == 0` samples the datum directly.
pub fn mollify_at(datum: &impl Fn(f64) -> State, width: f64, x: f64) -> State {
    let centre = datum(x);
    if width <= 0.0 {
        return centre;
    }
    let st = stencil();
    let (mut du, mut dv) = (0.0, 0.0);
    let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) = (centre.u, centre.u, centre.v, centre.v);
    for (&y, &w) in st.nodes.iter().zip(&st.weights) {
        let s = datum(x - width * y);
        du += w * (s.u - centre.u);
        dv += w * (s.v - centre.v);
        lo_u = lo_u.min(s.u);
        hi_u = hi_u.max(s.u);
        lo_v = lo_v.min(s.v);
        hi_v = hi_v.max(s.v);
    }
    State::new(
        (centre.u + du).clamp(lo_u, hi_u),
        (centre.v + dv).clamp(lo_v, hi_v),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_has_unit_mass() {
        // independent composite Simpson with 2^16 panels
        let n = 1 << 16;
        let h = 2.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * kernel(-1.0 + h * i as f64);
        }
        s *= h / 3.0;
        assert!((s - 1.0).abs() < 1e-10, "mass {s}");
        assert!((normalization() - 0.443_993_8).abs() < 1e-7);
    }

    #[test]
    fn constants_are_preserved_exactly() {
        let c = State::new(1.37, 2.9);
        for x in [-3.0, 0.0, 0.123] {
            assert_eq!(mollify_at(&|_| c, 0.2, x), c);
        }
    }

    #[test]
    fn step_profile_is_monotone_with_compact_support() {
        let step = |x: f64| {
            if x < 0.0 {
                State::new(2.0, 2.0)
            } else {
                State::new(1.0, 1.0)
            }
        };
        assert_eq!(mollify_at(&step, 0.1, -0.2).u, 2.0);
        assert_eq!(mollify_at(&step, 0.1, 0.2).u, 1.0);
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let x = -0.2 + 0.4 * i as f64 / 200.0;
            let u = mollify_at(&step, 0.1, x).u;
            assert!(u <= prev && (1.0..=2.0).contains(&u));
            prev = u;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for x in [-0.9, -0.3, 0.0, 0.4, 0.8] {
            let h = 1e-6;
            let fd = (raw_bump(x + h) - raw_bump(x - h)) / (2.0 * h);
            assert!((fd - raw_bump_derivative(x)).abs() < 1e-7);
        }
    }
}
