//! Marginal work, marginal cost and the marginal-productivity (Whittle) index.

mod closed_form;
mod limit;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::CostFn;
use crate::dynamics::{orbit_resolved, threshold_word, ArmParams, Orbit};
use crate::error::{invalid, Error, Result};
use crate::words::Word;

pub use closed_form::{closed_form_noiseless, ClosedFormMode};
pub use limit::{index_beta1, Beta1Record};

pub const DEFAULT_EPS: f64 = 1e-12;
pub const MAX_STEPS: usize = 5_000_000;
/// Above this discount the truncated sums get long enough to prefer the β → 1 limit.
pub const LARGE_BETA: f64 = 0.999;
/// Longest period searched when labelling records with their threshold word.
pub const WORD_MAX_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Steps(usize),
    Tolerance(f64),
}

/// T = ⌈log eps / log β⌉, capped; β = 0 needs no terms beyond t = 0.
pub fn truncation_steps(beta: f64, eps: f64) -> usize {
    if beta <= 0.0 {
        return 0;
    }
    let t = (eps.ln() / beta.ln()).ceil();
    if t.is_finite() && t >= 0.0 {
        (t as usize).min(MAX_STEPS)
    } else {
        MAX_STEPS
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexQuery {
    pub params: ArmParams,
    pub cost: CostFn,
    pub beta: f64,
    pub x: f64,
    pub horizon: Horizon,
}

impl IndexQuery {
    pub fn new(params: ArmParams, cost: CostFn, beta: f64, x: f64) -> Self {
        IndexQuery { params, cost, beta, x, horizon: Horizon::Tolerance(DEFAULT_EPS) }
    }

    pub fn with_horizon(mut self, h: Horizon) -> Self {
        self.horizon = h;
        self
    }

    pub fn at(&self, x: f64) -> Self {
        IndexQuery { x, ..self.clone() }
    }

    pub fn steps(&self) -> usize {
        match self.horizon {
            Horizon::Steps(t) => t.min(MAX_STEPS),
            Horizon::Tolerance(eps) => truncation_steps(self.beta, eps),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.beta) {
            return Err(invalid(format!("beta = {} must lie in [0, 1)", self.beta)));
        }
        if !(self.x.is_finite() && self.x >= 0.0) {
            return Err(invalid(format!("state x = {} must be finite and non-negative", self.x)));
        }
        if let Horizon::Tolerance(eps) = self.horizon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(invalid(format!("eps = {eps} must lie in (0, 1)")));
            }
        }
        if self.params.c1() == self.params.c0() {
            return Err(invalid("c1 = c0: marginal work vanishes and the index is undefined"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub x: f64,
    pub lambda: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Threshold word π(x), when its period was certified.
    pub word: Option<Word>,
    pub knife_edge: bool,
    /// Truncation index T (sums run over t = 0..=T).
    pub steps: usize,
    /// First-order bound on |λ̂_T − λ|.
    pub tail_bound: f64,
}

fn discounted_cost_diff(q: &IndexQuery, o0: &Orbit, o1: &Orbit) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut span: f64 = 0.0;
    let mut disc = 1.0;
    for (&u, &v) in o0.states.iter().zip(&o1.states) {
        let d = q.cost.try_eval(u)? - q.cost.try_eval(v)?;
        sum += disc * d;
        span = span.max(d.abs());
        disc *= q.beta;
    }
    Ok((sum, span))
}

fn discounted_work_diff(q: &IndexQuery, o0: &Orbit, o1: &Orbit) -> f64 {
    let mut sum = 0.0;
    let mut disc = 1.0;
    for (a, b) in o1.actions.iter().zip(o0.actions.iter()) {
        sum += disc * (a as i32 - b as i32) as f64;
        disc *= q.beta;
    }
    sum * (q.params.c1() - q.params.c0())
}

fn orbit_pair(q: &IndexQuery, s: f64) -> (Orbit, Orbit) {
    let t = q.steps();
    (orbit_resolved(&q.params, q.x, false, s, t), orbit_resolved(&q.params, q.x, true, s, t))
}

/// w_x(s) = Σ_{t≤T} β^t (c(A_t(x,1;s)) − c(A_t(x,0;s))).
pub fn marginal_work(q: &IndexQuery, s: f64) -> Result<f64> {
    q.validate()?;
    let (o0, o1) = orbit_pair(q, s);
    Ok(discounted_work_diff(q, &o0, &o1))
}

/// c_x(s) = Σ_{t≤T} β^t (C(X_t(x,0;s)) − C(X_t(x,1;s))).
pub fn marginal_cost(q: &IndexQuery, s: f64) -> Result<f64> {
    q.validate()?;
    let (o0, o1) = orbit_pair(q, s);
    Ok(discounted_cost_diff(q, &o0, &o1)?.0)
}

/// Both marginals at one threshold from a single pair of orbits.
pub fn marginals(q: &IndexQuery, s: f64) -> Result<(f64, f64)> {
    q.validate()?;
    let (o0, o1) = orbit_pair(q, s);
    Ok((discounted_cost_diff(q, &o0, &o1)?.0, discounted_work_diff(q, &o0, &o1)))
}

/// Action words A_{0:T}(x,0;s) and A_{0:T}(x,1;s); marginals are constant in s while these are.
pub fn action_words(q: &IndexQuery, s: f64) -> (Word, Word) {
    let (o0, o1) = orbit_pair(q, s);
    (o0.actions, o1.actions)
}

/// λ̂(x) = c_x(x)/w_x(x) with both sums truncated at the same T.
pub fn whittle_index(q: &IndexQuery) -> Result<IndexRecord> {
    q.validate()?;
    let (o0, o1) = orbit_pair(q, q.x);
    let (num, span) = discounted_cost_diff(q, &o0, &o1)?;
    let den = discounted_work_diff(q, &o0, &o1);
    let steps = q.steps();
    let dc = q.params.c1() - q.params.c0();
    let slack = dc * q.beta.powi(steps as i32 + 1) / (1.0 - q.beta);
    if !(den > 0.0) || den < (1.0 - q.beta) * dc - slack - 1e-12 * dc {
        return Err(Error::Internal(format!("marginal work {den} at x = {} is below the positivity bound", q.x)));
    }
    let lambda = num / den;
    let tail = q.beta.powi(steps as i32 + 1) / (1.0 - q.beta);
    let tail_bound = tail * (span + lambda.abs() * dc) / den;
    let tw = threshold_word(&q.params, q.x, WORD_MAX_LEN)?;
    let knife_edge = !o0.knife_edges.is_empty() || !o1.knife_edges.is_empty() || tw.knife_edge;
    Ok(IndexRecord {
        x: q.x,
        lambda,
        numerator: num,
        denominator: den,
        word: tw.periodic.then_some(tw.word),
        knife_edge,
        steps,
        tail_bound,
    })
}

/// λ evaluated along prescribed action words, A(x,0;x) = w0^ω and A(x,1;x) = w1^ω.
pub fn index_along_words(q: &IndexQuery, w0: &Word, w1: &Word) -> Result<f64> {
    q.validate()?;
    if w0.is_empty() || w1.is_empty() {
        return Err(invalid("action words must be non-empty"));
    }
    let p = &q.params;
    let (mut u, mut v) = (q.x, q.x);
    let (mut num, mut den, mut disc) = (0.0, 0.0, 1.0);
    for t in 0..=q.steps() {
        let (a, b) = (w0.bit(t % w0.len()), w1.bit(t % w1.len()));
        num += disc * (q.cost.try_eval(u)? - q.cost.try_eval(v)?);
        den += disc * (b as i32 - a as i32) as f64;
        u = p.phi(a, u);
        v = p.phi(b, v);
        disc *= q.beta;
    }
    Ok(num / (den * (p.c1() - p.c0())))
}

/// Q(x,a;s,ν) = f(x,a;s) + ν g(x,a;s), truncated at T.
#[allow(clippy::too_many_arguments)]
pub fn q_value(p: &ArmParams, cost: &CostFn, beta: f64, nu: f64, x: f64, a: bool, s: f64, steps: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta = {beta} must lie in [0, 1)")));
    }
    let o = orbit_resolved(p, x, a, s, steps);
    let mut total = 0.0;
    let mut disc = 1.0;
    for (&v, act) in o.states.iter().zip(o.actions.iter()) {
        total += disc * (cost.try_eval(v)? + nu * p.obs_cost(act));
        disc *= beta;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexTable {
    pub records: Vec<IndexRecord>,
    /// Grid positions i where λ(x_{i+1}) < λ(x_i) beyond tolerance.
    pub violations: Vec<usize>,
}

/// Absolute slack on monotonicity comparisons besides the truncation bounds.
const MONO_TOL: f64 = 1e-9;

/// One record per grid point (evaluated in parallel, returned in grid order)
/// plus the positions where λ decreases.
pub fn index_table(p: &ArmParams, cost: &CostFn, beta: f64, grid: &[f64], eps: f64) -> Result<IndexTable> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("grid must be strictly increasing"));
    }
    let base = IndexQuery::new(*p, cost.clone(), beta, grid.first().copied().unwrap_or(0.0))
        .with_horizon(Horizon::Tolerance(eps));
    base.validate()?;
    let records = grid.par_iter().map(|&x| whittle_index(&base.at(x))).collect::<Result<Vec<_>>>()?;
    let violations = monotonicity_violations(&records);
    Ok(IndexTable { records, violations })
}

pub fn monotonicity_violations(records: &[IndexRecord]) -> Vec<usize> {
    records
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let tol = MONO_TOL * (1.0 + w[0].lambda.abs()) + w[0].tail_bound + w[1].tail_bound;
            w[1].lambda < w[0].lambda - tol
        })
        .map(|(i, _)| i)
        .collect()
}

/// n points spaced evenly in log between lo and hi inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(invalid(format!("log grid needs 0 < lo < hi and n ≥ 2, got {lo}:{hi}:{n}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > lo && n >= 2) {
        return Err(invalid(format!("linear grid needs lo < hi and n ≥ 2, got {lo}:{hi}:{n}")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}
