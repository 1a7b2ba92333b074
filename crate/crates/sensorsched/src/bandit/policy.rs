use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ArmSpec, BeliefState, Scenario};
use crate::dynamics::boundary_fixed_points;
use crate::error::{Error, Result};
use crate::index::{log_grid, whittle_index, IndexQuery};

pub const TABLE_POINTS: usize = 512;

pub trait Policy: Send {
    fn name(&self) -> &str;
    /// The m arms to observe this round, ascending by id.
    fn select(&mut self, s: &Scenario, b: &BeliefState, step: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>>;
    fn extrapolations(&self) -> usize {
        0
    }
}

/// Ids of the m largest scores; equal scores go to the smaller id.
fn top_m(scores: &[f64], m: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    let mut out = ids[..m].to_vec();
    out.sort_unstable();
    out
}

/// λ over a log-variance grid, interpolated linearly in log v.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmIndexTable {
    log_v: Vec<f64>,
    lambda: Vec<f64>,
}

impl ArmIndexTable {
    pub fn new(v: &[f64], lambda: Vec<f64>) -> Result<Self> {
        if v.len() < 2 || v.len() != lambda.len() || v.iter().any(|&x| !(x > 0.0)) || v.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(crate::error::invalid("index table needs ≥ 2 increasing positive variances"));
        }
        Ok(ArmIndexTable { log_v: v.iter().map(|x| x.ln()).collect(), lambda })
    }

    /// Activation price λ_unit(v) − (c1 − c0) on a grid spanning every variance
    /// the arm can reach within the horizon.
    pub fn build(arm: &ArmSpec, beta: f64, horizon: usize) -> Result<Self> {
        let p = arm.params;
        let (y1, y0) = boundary_fixed_points(&p);
        let mut top = arm.v0.max(y1);
        let mut v = arm.v0;
        for _ in 0..horizon {
            v = p.phi(false, v);
            top = top.max(v);
        }
        if y0.is_finite() {
            top = top.max(y0);
        }
        let base = [y1, arm.v0].into_iter().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        let base = if base.is_finite() { base } else { p.phi(false, 0.0) };
        let grid = log_grid(0.5 * base, 1.5 * top.max(base), TABLE_POINTS)?;
        let unit = p.with_costs(0.0, 1.0)?;
        let cost = arm.cost.clone().scaled(arm.weight)?;
        let premium = p.c1() - p.c0();
        let q = IndexQuery::new(unit, cost, beta, grid[0]);
        let lambda = grid
            .par_iter()
            .map(|&x| whittle_index(&q.at(x)).map(|r| r.lambda - premium))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&grid, lambda)
    }

    /// (λ(v), true when v fell outside the table and the end value was used).
    pub fn lookup(&self, v: f64) -> (f64, bool) {
        let n = self.log_v.len();
        if !(v > 0.0) || v.ln() < self.log_v[0] {
            return (self.lambda[0], true);
        }
        let lv = v.ln();
        if lv > self.log_v[n - 1] {
            return (self.lambda[n - 1], true);
        }
        let i = self.log_v.partition_point(|&g| g <= lv).saturating_sub(1).min(n - 2);
        let t = (lv - self.log_v[i]) / (self.log_v[i + 1] - self.log_v[i]);
        ((1.0 - t) * self.lambda[i] + t * self.lambda[i + 1], false)
    }
}

/// The m arms with the largest interpolated index, plus how many lookups extrapolated.
pub fn whittle_policy(b: &BeliefState, tables: &[ArmIndexTable], m: usize) -> (Vec<usize>, usize) {
    let looked: Vec<(f64, bool)> = tables.iter().zip(&b.variance).map(|(t, &v)| t.lookup(v)).collect();
    let scores: Vec<f64> = looked.iter().map(|l| l.0).collect();
    (top_m(&scores, m), looked.iter().filter(|l| l.1).count())
}

/// The m arms with the highest current cost weight·C(v).
pub fn myopic_policy(b: &BeliefState, arms: &[ArmSpec], m: usize) -> Result<Vec<usize>> {
    let scores = arms.iter().zip(&b.variance).map(|(a, &v)| a.uncertainty_cost(v)).collect::<Result<Vec<_>>>()?;
    Ok(top_m(&scores, m))
}

pub struct Whittle {
    tables: Vec<ArmIndexTable>,
    extrapolated: usize,
}

impl Whittle {
    pub fn new(s: &Scenario) -> Result<Self> {
        let tables = s.arms.par_iter().map(|a| ArmIndexTable::build(a, s.beta, s.horizon)).collect::<Result<_>>()?;
        Ok(Whittle { tables, extrapolated: 0 })
    }

    pub fn tables(&self) -> &[ArmIndexTable] {
        &self.tables
    }
}

impl Policy for Whittle {
    fn name(&self) -> &str {
        "whittle"
    }
    fn select(&mut self, s: &Scenario, b: &BeliefState, _: usize, _: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let (ids, ext) = whittle_policy(b, &self.tables, s.m);
        self.extrapolated += ext;
        Ok(ids)
    }
    fn extrapolations(&self) -> usize {
        self.extrapolated
    }
}

pub struct Myopic;

impl Policy for Myopic {
    fn name(&self) -> &str {
        "myopic"
    }
    fn select(&mut self, s: &Scenario, b: &BeliefState, _: usize, _: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        myopic_policy(b, &s.arms, s.m)
    }
}

/// Observes arms cursor, cursor+1, ... (mod n), m per round.
#[derive(Default)]
pub struct RoundRobin {
    cursor: usize,
}

impl Policy for RoundRobin {
    fn name(&self) -> &str {
        "round_robin"
    }
    fn select(&mut self, s: &Scenario, _: &BeliefState, _: usize, _: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let n = s.arms.len();
        let mut ids: Vec<usize> = (0..s.m).map(|k| (self.cursor + k) % n).collect();
        self.cursor = (self.cursor + s.m) % n;
        ids.sort_unstable();
        Ok(ids)
    }
}

pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }
    fn select(&mut self, s: &Scenario, _: &BeliefState, _: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let mut ids = rand::seq::index::sample(rng, s.arms.len(), s.m).into_vec();
        ids.sort_unstable();
        Ok(ids)
    }
}

pub type PolicyBuilder = Box<dyn Fn(&Scenario) -> Result<Box<dyn Policy>> + Send + Sync>;

/// Policies by name.
pub struct PolicyRegistry {
    builders: BTreeMap<String, PolicyBuilder>,
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        PolicyRegistry { builders: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("whittle", Box::new(|s| Ok(Box::new(Whittle::new(s)?))));
        r.register("myopic", Box::new(|_| Ok(Box::new(Myopic))));
        r.register("round_robin", Box::new(|_| Ok(Box::new(RoundRobin::default()))));
        r.register("random", Box::new(|_| Ok(Box::new(RandomPolicy))));
        r
    }

    pub fn register(&mut self, name: &str, b: PolicyBuilder) {
        self.builders.insert(name.to_string(), b);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, s: &Scenario) -> Result<Box<dyn Policy>> {
        let b = self.builders.get(name).ok_or_else(|| Error::Unknown { kind: "policy", name: name.to_string() })?;
        b(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostFn;
    use crate::dynamics::ArmParams;

    fn beliefs(v: &[f64]) -> BeliefState {
        BeliefState { mean: vec![0.0; v.len()], variance: v.to_vec() }
    }

    #[test]
    fn ranking() {
        assert_eq!(top_m(&[1.0, 3.0, 2.0], 1), vec![1]);
        assert_eq!(top_m(&[1.0, 3.0, 2.0], 2), vec![1, 2]);
        assert_eq!(top_m(&[2.0, 2.0, 2.0], 2), vec![0, 1]);
        // m = n − 1 drops the single smallest
        assert_eq!(top_m(&[5.0, 0.5, 2.0, 9.0], 3), vec![0, 2, 3]);
    }

    #[test]
    fn table_interpolates_in_log() {
        let t = ArmIndexTable::new(&[1.0, 100.0], vec![0.0, 2.0]).unwrap();
        let (l, ext) = t.lookup(10.0);
        assert!((l - 1.0).abs() < 1e-12 && !ext);
        assert_eq!(t.lookup(1000.0), (2.0, true));
        assert_eq!(t.lookup(0.0), (0.0, true));
    }

    #[test]
    fn myopic_examples() {
        let s = Scenario::heavy_first(10.0, 0.99, 10, 0).unwrap();
        assert_eq!(myopic_policy(&beliefs(&[4.0; 10]), &s.arms, 1).unwrap(), vec![0]);
        let mut v = vec![1.0; 10];
        v[3] = 50.0;
        let unit = Scenario::heavy_first(1.0, 0.99, 10, 0).unwrap();
        assert_eq!(myopic_policy(&beliefs(&v), &unit.arms, 1).unwrap(), vec![3]);
    }

    #[test]
    fn weighted_arm_index_scales() {
        let params = ArmParams::new(0.9, 0.1, 1.0).unwrap().with_costs(0.0, 0.0).unwrap();
        let mk = |w: f64| ArmSpec { params, cost: CostFn::linear(), weight: w, x0: 0.0, v0: 2.0 };
        let a = ArmIndexTable::build(&mk(1.0), 0.9, 50).unwrap();
        let b = ArmIndexTable::build(&mk(3.0), 0.9, 50).unwrap();
        for v in [0.8, 1.5, 3.0] {
            let (la, lb) = (a.lookup(v).0, b.lookup(v).0);
            assert!((lb - 3.0 * la).abs() < 1e-9 * lb.abs());
        }
        // at equal variance the heavier arm wins
        let (ids, ext) = whittle_policy(&beliefs(&[1.5, 1.5]), &[a, b], 1);
        assert_eq!((ids, ext), (vec![1], 0));
    }

    #[test]
    fn unknown_policy() {
        let s = Scenario::heavy_first(10.0, 0.99, 10, 0).unwrap();
        assert!(matches!(PolicyRegistry::builtin().build("greedy", &s), Err(Error::Unknown { .. })));
        let reg = PolicyRegistry::builtin();
        let names: Vec<&str> = reg.names().collect();
        assert_eq!(names, vec!["myopic", "random", "round_robin", "whittle"]);
    }
}
