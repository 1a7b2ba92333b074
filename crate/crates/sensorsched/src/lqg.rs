//! Scalar LQG control where each observation's quality is bought at a price.

use serde::{Deserialize, Serialize};

use crate::cost::CostFn;
use crate::dynamics::{boundary_fixed_points, ArmParams};
use crate::error::{invalid, Error, Result};
use crate::index::{whittle_index, IndexQuery};
use crate::oracle::DPGrid;

/// x_{t+1} = A x_t + B u_t + noise(sigma_x); y_{t+1} = x_{t+1} + noise(sigma_y(a_t)).
/// All sigma fields are variances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LqgProblem {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub beta: f64,
    pub sigma_x: f64,
    #[serde(with = "crate::ext")]
    pub sigma_y0: f64,
    pub sigma_y1: f64,
    #[serde(default)]
    pub c0: f64,
    #[serde(default = "one")]
    pub c1: f64,
}

fn one() -> f64 {
    1.0
}

impl LqgProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.a.abs() <= 1.0) {
            return Err(invalid(format!("A = {} must lie in [-1, 1]", self.a)));
        }
        if !(self.b != 0.0 && self.b.is_finite()) {
            return Err(invalid("B must be finite and non-zero"));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(invalid(format!("D = {} must be positive", self.d)));
        }
        if !(self.f >= 0.0 && self.f.is_finite()) {
            return Err(invalid(format!("F = {} must be non-negative", self.f)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid(format!("beta = {} must lie in (0, 1)", self.beta)));
        }
        self.arm().map(|_| ())
    }

    /// Normalized variance dynamics (unit observation costs); variances are in units of sigma_x.
    pub fn arm(&self) -> Result<ArmParams> {
        if self.a != 0.0 {
            return ArmParams::from_kalman(self.a, self.sigma_x, self.sigma_y0, self.sigma_y1)?
                .with_costs(self.c0, self.c1);
        }
        // A = 0 forgets the past; a vanishing multiplier gives the same maps
        ArmParams::from_kalman(1.0, self.sigma_x, self.sigma_y0, self.sigma_y1)
            .and_then(|p| ArmParams::new(1e-150, p.a0(), p.a1()))?
            .with_costs(self.c0, self.c1)
    }

    fn quadratic(&self) -> (f64, f64, f64) {
        let (a, b, d, f, beta) = (self.a, self.b, self.d, self.f, self.beta);
        (beta * b * b, beta * b * b * d + beta * a * a * f - f, d * f)
    }

    /// |−βB²R² + (βB²D + βA²F − F)R + DF| relative to the size of its terms.
    pub fn riccati_residual(&self, r: f64) -> f64 {
        let (q, l, c) = self.quadratic();
        let terms = [-q * r * r, l * r, c];
        terms.iter().sum::<f64>().abs() / terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
    }

    /// Discounted mean-part cost coefficient (D + F L²)/(1 − β(A − BL)²) of the gain L.
    pub fn mean_cost(&self, l: f64) -> f64 {
        let closed = self.a - self.b * l;
        let den = 1.0 - self.beta * closed * closed;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            (self.d + self.f * l * l) / den
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqgSolution {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub alpha: f64,
    /// Observe when the posterior variance is at least z.
    #[serde(with = "crate::ext")]
    pub z: f64,
}

const ALPHA_TOL: f64 = 1e-12;
const BISECTIONS: usize = 60;
const MAX_BRACKET: f64 = 1e12;
/// Relative slack for a threshold policy against the grid optimum.
const GAP_TOL: f64 = 1e-5;

/// Positive root of βB²R² − bR − DF = 0 without cancellation.
fn riccati_root(p: &LqgProblem) -> f64 {
    if p.f == 0.0 {
        return p.d;
    }
    let (q, b, c) = p.quadratic();
    let s = (b * b + 4.0 * q * c).sqrt();
    if b >= 0.0 {
        (b + s) / (2.0 * q)
    } else {
        2.0 * c / (s - b)
    }
}

pub fn solve_lqg(p: &LqgProblem) -> Result<LqgSolution> {
    p.validate()?;
    let r = riccati_root(p);
    let l = if p.f == 0.0 { p.a / p.b } else { p.a / (p.b + p.f / (p.beta * p.b * r)) };
    let alpha = p.d - (1.0 - p.beta * p.a * p.a) * r;
    if alpha < -ALPHA_TOL * p.d.max(r) {
        return Err(Error::Internal(format!("variance weight alpha = {alpha} is negative")));
    }
    let alpha = alpha.max(0.0);
    let z = observation_threshold(p, alpha)?;
    Ok(LqgSolution { r, l, alpha, z })
}

/// Solves λ(z) = (c1 − c0)/(α·sigma_x) for the unit-cost normalized arm with C(v) = v.
fn observation_threshold(p: &LqgProblem, alpha: f64) -> Result<f64> {
    let dc = p.c1 - p.c0;
    if dc == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if alpha == 0.0 {
        return Ok(f64::INFINITY);
    }
    let target = dc / (alpha * p.sigma_x);
    let arm = p.arm()?.with_costs(0.0, 1.0)?;
    let q = IndexQuery::new(arm, CostFn::linear(), p.beta, 0.0);
    let lambda = |x: f64| whittle_index(&q.at(x)).map(|r| r.lambda);
    if target <= lambda(0.0)? {
        return Ok(f64::NEG_INFINITY);
    }
    let (y1, y0) = boundary_fixed_points(&arm);
    let mut hi = if y0.is_finite() { 4.0 * y0 } else { 4.0 * (y1 + 1.0) };
    while lambda(hi)? < target {
        if hi > MAX_BRACKET {
            return Ok(f64::INFINITY);
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if lambda(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi * p.sigma_x)
}

/// (u, a) = (−L·mean, 1{variance ≥ z}).
pub fn lqg_act(sol: &LqgSolution, mean: f64, variance: f64) -> (f64, bool) {
    (-sol.l * mean, variance >= sol.z)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqgGridReport {
    /// Gains tried, with the best-policy cost J(1, v̄) for each.
    pub gains: Vec<(f64, f64)>,
    pub best_gain: f64,
    /// max over reachable grid variances of J_{(L,z)} − J_opt.
    pub max_gap: f64,
    /// Allowed gap, relative to the optimal cost scale.
    pub tolerance: f64,
    pub passed: bool,
}

/// h(v) = min_a {c(a) + D·v + β P_L·innov_a(v) + β h(φ_a(v))} in raw variance units;
/// with `threshold` the action is fixed to 1{v ≥ threshold} instead.
fn variance_dp(p: &LqgProblem, arm: &ArmParams, grid: &DPGrid, pl: f64, threshold: Option<f64>) -> Vec<f64> {
    let sx = p.sigma_x;
    let pts = grid.points();
    let stage = |a: bool, v: f64| {
        p.c0 + (p.c1 - p.c0) * a as u8 as f64 + p.d * sx * v + p.beta * pl * sx * arm.innovation_variance(a, v)
    };
    let mut h = vec![0.0; pts.len()];
    let stop = 1e-10 * (1.0 - p.beta);
    loop {
        let next: Vec<f64> = pts
            .iter()
            .map(|&v| {
                let q = |a: bool| stage(a, v) + p.beta * grid.interpolate(&h, arm.phi(a, v));
                match threshold {
                    Some(z) => q(v * sx >= z),
                    None => q(false).min(q(true)),
                }
            })
            .collect();
        let change = next.iter().zip(&h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        h = next;
        if change < stop * (1.0 + h[0].abs()) {
            return h;
        }
    }
}

/// Brute-force check of the (L, z) policy: scan gains around L, solve the variance
/// DP for each, and compare the threshold policy's cost with the grid optimum.
pub fn lqg_grid_check(p: &LqgProblem, sol: &LqgSolution, n: usize, gains: usize) -> Result<LqgGridReport> {
    let arm = p.arm()?;
    let (y1, y0) = boundary_fixed_points(&arm);
    let hi = if y0.is_finite() { 4.0 * y0 } else { 50.0 * (y1 + 1.0) };
    let grid = DPGrid::new(1e-4 * y1.max(1e-12), hi, n)?;
    let reach_hi = if y0.is_finite() { 2.0 * y0 } else { hi / 2.0 };
    let probe: Vec<usize> = (0..n).filter(|&i| grid.points()[i] >= y1 && grid.points()[i] <= reach_hi).collect();
    let v_ref = probe.get(probe.len() / 2).copied().unwrap_or(n / 2);

    let spread = 0.5 * (sol.l.abs() + 0.1);
    let mut scan = Vec::with_capacity(gains);
    for k in 0..gains {
        let l = sol.l - spread + 2.0 * spread * k as f64 / (gains.max(2) - 1) as f64;
        let pl = p.mean_cost(l);
        let cost = if pl.is_finite() { pl + variance_dp(p, &arm, &grid, pl, None)[v_ref] } else { f64::INFINITY };
        scan.push((l, cost));
    }
    let best_gain = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|g| g.0).unwrap_or(sol.l);

    let pl = p.mean_cost(sol.l);
    let opt = variance_dp(p, &arm, &grid, pl, None);
    let pol = variance_dp(p, &arm, &grid, pl, Some(sol.z));
    let max_gap = probe.iter().map(|&i| pol[i] - opt[i]).fold(0.0, f64::max);
    let tolerance = GAP_TOL * (1.0 + opt[v_ref].abs());
    let cell = 2.0 * spread / (gains.max(2) - 1) as f64;
    let passed = max_gap <= tolerance && (best_gain - sol.l).abs() <= cell;
    Ok(LqgGridReport { gains: scan, best_gain, max_gap, tolerance, passed })
}
