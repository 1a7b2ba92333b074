use serde::{Deserialize, Serialize};

use super::WORD_MAX_LEN;
use crate::cost::CostFn;
use crate::dynamics::{orbit_resolved, threshold_word, ArmParams};
use crate::error::{invalid, Error, Result};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beta1Record {
    pub x: f64,
    pub lambda: f64,
    pub numerator: f64,
    /// Limit of the discounted work, 1/n for period n.
    pub denominator: f64,
    pub word: Word,
    /// Number of periods summed.
    pub periods: usize,
}

/// Undiscounted index
///
/// ```text
/// λ = n · (Σ_t [C(X_t⁰) − C(X_t^{0,∞}) − C(X_t¹) + C(X_t^{1,∞})] + (1/n) Σ_{t<n} t (C(X_t^{1,∞}) − C(X_t^{0,∞})))
/// ```
///
/// where n is the period of π(x) and the limit cycles X^{a,∞} are read off the last simulated period.
pub fn index_beta1(p: &ArmParams, cost: &CostFn, x: f64, periods: usize) -> Result<Beta1Record> {
    if periods < 2 {
        return Err(invalid("need at least two periods"));
    }
    if p.c1() == p.c0() {
        return Err(invalid("c1 = c0: marginal work vanishes and the index is undefined"));
    }
    let tw = threshold_word(p, x, WORD_MAX_LEN)?;
    if !tw.periodic {
        return Err(Error::Uncertified(WORD_MAX_LEN));
    }
    let n = tw.word.len();
    let len = periods * n;
    let o0 = orbit_resolved(p, x, false, x, len - 1);
    let o1 = orbit_resolved(p, x, true, x, len - 1);
    let tail = len - n;
    let mut cyc0 = Vec::with_capacity(n);
    let mut cyc1 = Vec::with_capacity(n);
    for k in 0..n {
        cyc0.push(cost.try_eval(o0.states[tail + k])?);
        cyc1.push(cost.try_eval(o1.states[tail + k])?);
    }
    let mut num = 0.0;
    for t in 0..len {
        let k = t % n;
        num += cost.try_eval(o0.states[t])? - cyc0[k] - cost.try_eval(o1.states[t])? + cyc1[k];
    }
    num += (0..n).map(|t| t as f64 * (cyc1[t] - cyc0[t])).sum::<f64>() / n as f64;
    let dc = p.c1() - p.c0();
    Ok(Beta1Record {
        x,
        lambda: num * n as f64 / dc,
        numerator: num,
        denominator: dc / n as f64,
        word: tw.word,
        periods,
    })
}
