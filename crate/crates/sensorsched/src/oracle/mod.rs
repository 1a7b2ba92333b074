//! Brute-force checks: value iteration for the ν-priced single-arm problem and
//! numerical versions of the indexability conditions.

mod majorisation;
mod pcli;

use serde::{Deserialize, Serialize};

use crate::cost::CostFn;
use crate::dynamics::{boundary_fixed_points, ArmParams};
use crate::error::{invalid, Result};
use crate::index::{whittle_index, IndexQuery};

pub use majorisation::{majorisation_check, MajorisationOutcome};
pub use pcli::{pcli_report, DiscontinuityReport, Pcli1Report, Pcli2Report, Pcli3Check, PcliConfig, PcliReport};

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MIN_GRID_POINTS: usize = 64;
const MAX_ITERATIONS: usize = 1_000_000;

/// Log-spaced state grid; images off the grid are clamped then interpolated linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DPGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    points: Vec<f64>,
}

impl DPGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid(format!("grid bounds need 0 < lo < hi < ∞, got [{lo}, {hi}]")));
        }
        if n < MIN_GRID_POINTS {
            return Err(invalid(format!("grid needs at least {MIN_GRID_POINTS} points, got {n}")));
        }
        let points = crate::index::log_grid(lo, hi, n)?;
        Ok(DPGrid { lo, hi, n, points })
    }

    /// [1e−4·y1, 4·y0]; y0 must be finite, so r < 1 or a0 > 0.
    pub fn covering(p: &ArmParams, n: usize) -> Result<Self> {
        let (y1, y0) = boundary_fixed_points(p);
        if !y0.is_finite() {
            return Err(invalid("passive fixed point is infinite; give grid bounds explicitly"));
        }
        let base = if y1 > 0.0 { y1 } else { p.phi(false, 0.0) };
        Self::new(1e-4 * base, 4.0 * y0, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Index i and weight t with x ≈ (1−t)·x_i + t·x_{i+1}, clamped to the ends.
    fn locate(&self, x: f64) -> (usize, f64) {
        let pts = &self.points;
        if x <= self.lo {
            return (0, 0.0);
        }
        if x >= self.hi {
            return (self.n - 2, 1.0);
        }
        let i = pts.partition_point(|&g| g <= x).saturating_sub(1).min(self.n - 2);
        (i, (x - pts[i]) / (pts[i + 1] - pts[i]))
    }

    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let (i, t) = self.locate(x);
        (1.0 - t) * values[i] + t * values[i + 1]
    }

    pub fn cell_width(&self, x: f64) -> f64 {
        let (i, _) = self.locate(x);
        self.points[i + 1] - self.points[i]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DPSolution {
    pub grid: DPGrid,
    pub beta: f64,
    pub nu: f64,
    pub values: Vec<f64>,
    pub actions: Vec<bool>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Q1 within this relative distance of Q0 counts as a tie, and ties go active.
const TIE_TOL: f64 = 1e-12;

fn prefers_active(q0: f64, q1: f64) -> bool {
    q1 <= q0 + TIE_TOL * (1.0 + q0.abs())
}

impl DPSolution {
    /// (Q(x,0), Q(x,1)) from the interpolated value function.
    pub fn q_values(&self, p: &ArmParams, cost: &CostFn, x: f64) -> Result<(f64, f64)> {
        let c = cost.try_eval(x)?;
        let q = |a: bool| c + self.nu * p.obs_cost(a) + self.beta * self.grid.interpolate(&self.values, p.phi(a, x));
        Ok((q(false), q(true)))
    }

    pub fn action_at(&self, p: &ArmParams, cost: &CostFn, x: f64) -> Result<bool> {
        let (q0, q1) = self.q_values(p, cost, x)?;
        Ok(prefers_active(q0, q1))
    }
}

/// V(x) = C(x) + min_a {ν c(a) + β V(φ_a(x))}, iterated until the sup-norm change
/// drops below tol·(1−β)/(2β).
pub fn value_iteration(
    p: &ArmParams,
    cost: &CostFn,
    beta: f64,
    nu: f64,
    grid: &DPGrid,
    tol: f64,
) -> Result<DPSolution> {
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta = {beta} must lie in [0, 1)")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let pts = grid.points();
    let c: Vec<f64> = pts.iter().map(|&x| cost.try_eval(x)).collect::<Result<_>>()?;
    let img = |a: bool| pts.iter().map(|&x| grid.locate(p.phi(a, x))).collect::<Vec<_>>();
    let (img0, img1) = (img(false), img(true));
    let (k0, k1) = (nu * p.obs_cost(false), nu * p.obs_cost(true));
    let stop = if beta == 0.0 { f64::INFINITY } else { tol * (1.0 - beta) / (2.0 * beta) };

    let interp = |v: &[f64], (i, t): (usize, f64)| (1.0 - t) * v[i] + t * v[i + 1];
    let mut values = vec![0.0; pts.len()];
    let mut next = values.clone();
    let mut actions = vec![false; pts.len()];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        residual = 0.0;
        for i in 0..pts.len() {
            let q0 = c[i] + k0 + beta * interp(&values, img0[i]);
            let q1 = c[i] + k1 + beta * interp(&values, img1[i]);
            actions[i] = prefers_active(q0, q1);
            next[i] = q0.min(q1);
            residual = residual.max((next[i] - values[i]).abs());
        }
        std::mem::swap(&mut values, &mut next);
        if residual < stop || beta == 0.0 {
            break;
        }
    }
    Ok(DPSolution {
        grid: grid.clone(),
        beta,
        nu,
        values,
        actions,
        iterations,
        converged: residual < stop || beta == 0.0,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpThreshold {
    /// Passive strictly below, active from this grid point on (±∞ for constant policies).
    Threshold(#[serde(with = "crate::ext")] f64),
    /// Grid positions i where actions[i] ≠ actions[i+1] beyond the first 0→1 switch.
    NotThreshold { extra_switches: Vec<usize> },
}

pub fn dp_threshold(sol: &DPSolution) -> DpThreshold {
    let acts = &sol.actions;
    let switches: Vec<usize> = (0..acts.len().saturating_sub(1)).filter(|&i| acts[i] != acts[i + 1]).collect();
    match switches.as_slice() {
        [] if acts.first() == Some(&true) => DpThreshold::Threshold(f64::NEG_INFINITY),
        [] => DpThreshold::Threshold(f64::INFINITY),
        [i] if !acts[*i] => DpThreshold::Threshold(sol.grid.points()[i + 1]),
        _ => {
            let skip = usize::from(!acts[0]);
            DpThreshold::NotThreshold { extra_switches: switches[skip..].to_vec() }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpCrossCheck {
    pub x: f64,
    pub lambda: f64,
    pub delta: f64,
    /// DP action at x with ν = λ(x) + δ (should be passive).
    pub action_above: bool,
    /// DP action at x with ν = λ(x) − δ (should be active).
    pub action_below: bool,
    pub threshold_above: DpThreshold,
    pub threshold_below: DpThreshold,
    pub passed: bool,
}

impl DpCrossCheck {
    pub fn threshold_policies(&self) -> bool {
        matches!(self.threshold_above, DpThreshold::Threshold(_))
            && matches!(self.threshold_below, DpThreshold::Threshold(_))
    }
}

/// Solves the DP at ν = λ(x) ± δ, with δ = 10 · cell · |λ'(x)|, and checks that
/// the optimal action at x flips from active to passive.
pub fn dp_cross_check(
    p: &ArmParams,
    cost: &CostFn,
    beta: f64,
    x: f64,
    grid: &DPGrid,
    tol: f64,
) -> Result<DpCrossCheck> {
    let q = IndexQuery::new(*p, cost.clone(), beta, x);
    let lambda = whittle_index(&q)?.lambda;
    let h = grid.cell_width(x);
    let slope = (whittle_index(&q.at(x + h))?.lambda - whittle_index(&q.at((x - h).max(0.0)))?.lambda) / (2.0 * h);
    let delta = (10.0 * h * slope.abs()).max(1e-6 * (1.0 + lambda.abs()));
    let above = value_iteration(p, cost, beta, lambda + delta, grid, tol)?;
    let below = value_iteration(p, cost, beta, lambda - delta, grid, tol)?;
    let action_above = above.action_at(p, cost, x)?;
    let action_below = below.action_at(p, cost, x)?;
    let threshold_above = dp_threshold(&above);
    let threshold_below = dp_threshold(&below);
    let passed = !action_above && action_below && above.converged && below.converged;
    Ok(DpCrossCheck { x, lambda, delta, action_above, action_below, threshold_above, threshold_below, passed })
}
