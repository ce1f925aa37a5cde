use crate::error::{Error, Result};
use crate::mesh::{Boundary, FieldPair};
use crate::state::State;
use crate::viscous::{StepEvent, StepObserver};

/// `sum |f_{i+1} - f_i|`.
pub fn total_variation(field: &[f64]) -> f64 {
    field.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Total variation on the circle: adds the wrap-around jump.
pub fn total_variation_periodic(field: &[f64]) -> f64 {
    match (field.first(), field.last()) {
        (Some(a), Some(b)) => total_variation(field) + (a - b).abs(),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    One,
    Two,
    Infinity,
}

/// Discrete `L^p` distance over both components. Fields in different
/// representations are compared in `(u, v)`.
pub fn lp_distance(a: &FieldPair, b: &FieldPair, p: LpNorm, dx: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (a, b) = if a.representation == b.representation {
        (a.clone(), b.clone())
    } else {
        (a.to_conservative(), b.to_conservative())
    };
    let diffs =
        a.a.iter()
            .zip(&b.a)
            .chain(a.b.iter().zip(&b.b))
            .map(|(x, y)| (x - y).abs());
    Ok(match p {
        LpNorm::One => diffs.sum::<f64>() * dx,
        LpNorm::Two => (diffs.map(|d| d * d).sum::<f64>() * dx).sqrt(),
        LpNorm::Infinity => diffs.fold(0.0, f64::max),
    })
}

/// `sum (|u_i - u*_i| + |v_i - v*_i|) dx` over cells whose centre lies in
/// `[lo, hi]`.
pub fn window_l1_distance(
    xs: &[f64],
    a: &[State],
    b: &[State],
    dx: f64,
    window: (f64, f64),
) -> Result<f64> {
    if a.len() != b.len() || xs.len() != a.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(xs
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(&x, _)| x >= window.0 && x <= window.1)
        .map(|(_, (p, q))| (p.u - q.u).abs() + (p.v - q.v).abs())
        .sum::<f64>()
        * dx)
}

/// First position where the piecewise-linear interpolant of `values`
/// crosses `level`.
pub fn locate_crossing(xs: &[f64], values: &[f64], level: f64) -> Option<f64> {
    xs.windows(2).zip(values.windows(2)).find_map(|(x, f)| {
        let (d0, d1) = (f[0] - level, f[1] - level);
        if d0 == 0.0 {
            Some(x[0])
        } else if d0 * d1 < 0.0 {
            Some(x[0] + (x[1] - x[0]) * d0 / (d0 - d1))
        } else {
            None
        }
    })
}

/// Tracks `TV(xi)` step by step and the largest single-step increase.
/// On a periodic grid the wrap-around jump counts.
#[derive(Debug, Clone, Default)]
pub struct TvMonitor {
    pub periodic: bool,
    pub initial: f64,
    pub history: Vec<f64>,
    pub max_increase: f64,
}

impl TvMonitor {
    pub fn new(boundary: Boundary) -> Self {
        TvMonitor {
            periodic: boundary == Boundary::Periodic,
            ..Self::default()
        }
    }

    fn measure(&self, fp: &FieldPair) -> f64 {
        let xi = fp.xi_values();
        if self.periodic {
            total_variation_periodic(&xi)
        } else {
            total_variation(&xi)
        }
    }
}

impl StepObserver for TvMonitor {
    fn start(&mut self, initial: &FieldPair) -> Result<()> {
        self.initial = self.measure(initial);
        self.history = vec![self.initial];
        self.max_increase = f64::NEG_INFINITY;
        Ok(())
    }

    fn step(&mut self, event: &StepEvent<'_>) -> Result<()> {
        let tv = self.measure(event.after);
        let prev = *self.history.last().expect("monitor started");
        self.max_increase = self.max_increase.max(tv - prev);
        self.history.push(tv);
        Ok(())
    }
}
