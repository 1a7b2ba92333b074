use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorisationOutcome {
    /// Both sequences positive and non-decreasing.
    pub monotone: bool,
    /// Σ_{i≤k} a_i ≤ Σ_{i≤k} b_i for every k.
    pub dominated: bool,
    /// Each f_i non-increasing and convex on the sampled range.
    pub convex_decreasing: bool,
    /// f_{i−1} − f_i non-increasing on the sampled range.
    pub decreasing_differences: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Σ f_i(a_i) ≥ Σ f_i(b_i).
    pub holds: bool,
}

impl MajorisationOutcome {
    pub fn hypotheses_hold(&self) -> bool {
        self.monotone && self.dominated && self.convex_decreasing && self.decreasing_differences
    }
}

const REL: f64 = 1e-12;
const SAMPLES: usize = 64;

fn le(a: f64, b: f64) -> bool {
    a <= b + REL * (a.abs() + b.abs())
}

/// Checks the hypotheses numerically (functions sampled on a log grid covering
/// both sequences), then compares Σ f_i(a_i) with Σ f_i(b_i).
pub fn majorisation_check(a: &[f64], b: &[f64], f: &[&dyn Fn(f64) -> f64]) -> Result<MajorisationOutcome> {
    if a.len() != b.len() || a.len() != f.len() || a.is_empty() {
        return Err(invalid("sequences and function family must have equal, non-zero length"));
    }
    let mono = |s: &[f64]| s.iter().all(|&x| x > 0.0) && s.windows(2).all(|w| le(w[0], w[1]));
    let monotone = mono(a) && mono(b);
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut dominated = true;
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        dominated &= le(sa, sb);
    }

    let lo = a.iter().chain(b).fold(f64::INFINITY, |m, &x| m.min(x)).max(f64::MIN_POSITIVE) / 2.0;
    let hi = 2.0 * a.iter().chain(b).fold(0.0f64, |m, &x| m.max(x)).max(lo * 4.0);
    let us = crate::index::log_grid(lo, hi, SAMPLES)?;
    let tol = |v: &[f64]| REL * v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let non_increasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + tol(v));
    let convex = |v: &[f64]| {
        us.windows(3).zip(v.windows(3)).all(|(u, y)| {
            // slope on the right is at least the slope on the left
            (y[2] - y[1]) / (u[2] - u[1]) >= (y[1] - y[0]) / (u[1] - u[0]) - tol(v) / (u[1] - u[0])
        })
    };
    let samples: Vec<Vec<f64>> = f.iter().map(|fi| us.iter().map(|&u| fi(u)).collect()).collect();
    let convex_decreasing = samples.iter().all(|v| non_increasing(v) && convex(v));
    let decreasing_differences = samples.windows(2).all(|w| {
        let d: Vec<f64> = w[0].iter().zip(&w[1]).map(|(x, y)| x - y).collect();
        non_increasing(&d)
    });

    let lhs: f64 = f.iter().zip(a).map(|(fi, &x)| fi(x)).sum();
    let rhs: f64 = f.iter().zip(b).map(|(fi, &x)| fi(x)).sum();
    Ok(MajorisationOutcome {
        monotone,
        dominated,
        convex_decreasing,
        decreasing_differences,
        lhs,
        rhs,
        holds: le(rhs, lhs),
    })
}
