use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::CostFn;
use crate::dynamics::ArmParams;
use crate::error::{invalid, Result};
use crate::index::{self, action_words, marginal_work, marginals, whittle_index, Horizon, IndexQuery};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PcliConfig {
    /// States are sampled from this range.
    pub x_lo: f64,
    pub x_hi: f64,
    pub eps: f64,
    pub work_samples: usize,
    pub grid_points: usize,
    pub disc_steps: Vec<usize>,
    pub disc_points: usize,
    pub disc_states: usize,
    pub max_disc_slope: f64,
    pub pcli3_checks: usize,
    /// Discount used for the jump-measure checks; defaults to min(β, 0.8).
    pub pcli3_beta: Option<f64>,
    pub seed: u64,
}

impl Default for PcliConfig {
    fn default() -> Self {
        PcliConfig {
            x_lo: 0.01,
            x_hi: 5.0,
            eps: index::DEFAULT_EPS,
            work_samples: 1000,
            grid_points: 1000,
            disc_steps: vec![4, 8, 16, 32],
            disc_points: 4000,
            disc_states: 4,
            max_disc_slope: 4.5,
            pcli3_checks: 8,
            pcli3_beta: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pcli1Report {
    pub samples: usize,
    pub failures: usize,
    /// min over samples of w_x(x) − ((1−β)(c1−c0) − slack).
    pub min_margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pcli2Report {
    pub grid_points: usize,
    pub violations: usize,
    pub first_violation: Option<f64>,
    /// Largest |λ(x_{i+1}) − λ(x_i)| on the grid.
    pub max_step: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityReport {
    pub steps: Vec<usize>,
    pub counts: Vec<usize>,
    /// Least-squares slope of log(count + 1) against log t.
    pub slope: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pcli3Check {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub jumps: usize,
    /// c_x(b) − c_x(a).
    pub lhs: f64,
    /// Σ λ(d) Δw_x(d) over the located jumps.
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcliReport {
    pub beta: f64,
    pub pcli1: Pcli1Report,
    pub pcli2: Pcli2Report,
    pub discontinuities: DiscontinuityReport,
    pub pcli3: Vec<Pcli3Check>,
    pub passed: bool,
}

fn sample_states(cfg: &PcliConfig, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(cfg.x_lo..=cfg.x_hi)).collect()
}

fn pcli1(p: &ArmParams, base: &IndexQuery, xs: &[f64]) -> Result<Pcli1Report> {
    let dc = p.c1() - p.c0();
    let beta = base.beta;
    let slack = dc * beta.powi(base.steps() as i32 + 1) / (1.0 - beta);
    let bound = (1.0 - beta) * dc - slack - 1e-12 * dc;
    let margins = xs.par_iter().map(|&x| Ok(marginal_work(&base.at(x), x)? - bound)).collect::<Result<Vec<f64>>>()?;
    let failures = margins.iter().filter(|&&m| m < 0.0).count();
    Ok(Pcli1Report {
        samples: xs.len(),
        failures,
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        passed: failures == 0,
    })
}

fn pcli2(p: &ArmParams, cost: &CostFn, beta: f64, cfg: &PcliConfig) -> Result<Pcli2Report> {
    let grid = if cfg.x_lo > 0.0 {
        index::log_grid(cfg.x_lo, cfg.x_hi, cfg.grid_points)?
    } else {
        index::linear_grid(cfg.x_lo, cfg.x_hi, cfg.grid_points)?
    };
    let table = index::index_table(p, cost, beta, &grid, cfg.eps)?;
    let max_step = table.records.windows(2).map(|w| (w[1].lambda - w[0].lambda).abs()).fold(0.0, f64::max);
    Ok(Pcli2Report {
        grid_points: grid.len(),
        violations: table.violations.len(),
        first_violation: table.violations.first().map(|&i| grid[i]),
        max_step,
        passed: table.violations.is_empty(),
    })
}

fn fit_slope(ts: &[usize], counts: &[usize]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64 + 1.0).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Counts changes of s ↦ (A_{0:t}(x,0;s), A_{0:t}(x,1;s)) along an even sweep of s.
fn discontinuities(base: &IndexQuery, xs: &[f64], cfg: &PcliConfig) -> Result<DiscontinuityReport> {
    let ss = index::linear_grid(cfg.x_lo, cfg.x_hi, cfg.disc_points.max(2))?;
    let counts: Vec<usize> = cfg
        .disc_steps
        .par_iter()
        .map(|&t| {
            xs.iter()
                .map(|&x| {
                    let q = base.at(x).with_horizon(Horizon::Steps(t));
                    let words: Vec<_> = ss.iter().map(|&s| action_words(&q, s)).collect();
                    words.windows(2).filter(|w| w[0] != w[1]).count()
                })
                .sum()
        })
        .collect();
    let slope = if cfg.disc_steps.len() >= 2 { fit_slope(&cfg.disc_steps, &counts) } else { 0.0 };
    Ok(DiscontinuityReport { steps: cfg.disc_steps.clone(), counts, slope, passed: slope <= cfg.max_disc_slope })
}

const JUMP_WIDTH: f64 = 1e-8;
const PCLI3_TOL: f64 = 1e-6;

fn locate_jumps(q: &IndexQuery, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    if action_words(q, a) == action_words(q, b) {
        return;
    }
    if b - a <= JUMP_WIDTH * (1.0 + b.abs()) {
        out.push((a, b));
        return;
    }
    let m = 0.5 * (a + b);
    locate_jumps(q, a, m, out);
    locate_jumps(q, m, b, out);
}

/// c_x(b) − c_x(a) against Σ_d λ(d)(w_x(d⁺) − w_x(d⁻)) over the jumps of s ↦ A(x,·;s).
fn pcli3_check(q: &IndexQuery, a: f64, b: f64) -> Result<Pcli3Check> {
    let mut jumps = Vec::new();
    locate_jumps(q, a, b, &mut jumps);
    let mut rhs = 0.0;
    for &(l, h) in &jumps {
        let (_, wl) = marginals(q, l)?;
        let (_, wh) = marginals(q, h)?;
        let d = 0.5 * (l + h);
        rhs += whittle_index(&q.at(d))?.lambda * (wh - wl);
    }
    let lhs = marginals(q, b)?.0 - marginals(q, a)?.0;
    let passed = (lhs - rhs).abs() <= PCLI3_TOL * (1.0 + lhs.abs());
    Ok(Pcli3Check { x: q.x, a, b, jumps: jumps.len(), lhs, rhs, passed })
}

/// Numerical evidence for the four indexability conditions of one arm.
pub fn pcli_report(p: &ArmParams, cost: &CostFn, beta: f64, cfg: &PcliConfig) -> Result<PcliReport> {
    if !(cfg.x_lo >= 0.0 && cfg.x_hi > cfg.x_lo && cfg.x_hi.is_finite()) {
        return Err(invalid(format!("state range [{}, {}] is invalid", cfg.x_lo, cfg.x_hi)));
    }
    let base = IndexQuery::new(*p, cost.clone(), beta, cfg.x_lo).with_horizon(Horizon::Tolerance(cfg.eps));
    base.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let xs = sample_states(cfg, cfg.work_samples, &mut rng);
    let pcli1 = pcli1(p, &base, &xs)?;
    let pcli2 = pcli2(p, cost, beta, cfg)?;
    let disc_xs = sample_states(cfg, cfg.disc_states, &mut rng);
    let discontinuities = discontinuities(&base, &disc_xs, cfg)?;

    let b3 = cfg.pcli3_beta.unwrap_or(beta.min(0.8));
    let q3 = IndexQuery { beta: b3, ..base.clone() };
    let width = (cfg.x_hi - cfg.x_lo) / 50.0;
    let spots: Vec<(f64, f64)> = (0..cfg.pcli3_checks)
        .map(|_| (rng.random_range(cfg.x_lo..=cfg.x_hi), rng.random_range(cfg.x_lo..=cfg.x_hi - width)))
        .collect();
    let pcli3 = spots.par_iter().map(|&(x, a)| pcli3_check(&q3.at(x), a, a + width)).collect::<Result<Vec<_>>>()?;

    let passed = pcli1.passed && pcli2.passed && discontinuities.passed && pcli3.iter().all(|c| c.passed);
    Ok(PcliReport { beta, pcli1, pcli2, discontinuities, pcli3, passed })
}
