//! Uncertainty costs C(v), looked up by name at runtime.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// One cost family. Implementations must be cheap to evaluate; the index
/// sums them over thousands of orbit states.
pub trait UncertaintyCost: Send + Sync {
    /// Spec string that `CostRegistry::parse` maps back to this cost.
    fn spec(&self) -> String;
    fn eval(&self, v: f64) -> f64;
    fn derivative(&self, v: f64) -> f64;
    /// Membership in the admissible cost family (non-decreasing marginal cost is then guaranteed).
    fn condition_c(&self) -> bool;
    /// Whether v = 0 is outside the domain.
    fn needs_positive(&self) -> bool {
        false
    }
}

struct Linear;

impl UncertaintyCost for Linear {
    fn spec(&self) -> String {
        "linear".into()
    }
    fn eval(&self, v: f64) -> f64 {
        v
    }
    fn derivative(&self, _: f64) -> f64 {
        1.0
    }
    fn condition_c(&self) -> bool {
        true
    }
}

/// log v, the Gaussian entropy up to an affine change.
struct Entropy;

impl UncertaintyCost for Entropy {
    fn spec(&self) -> String {
        "entropy".into()
    }
    fn eval(&self, v: f64) -> f64 {
        v.ln()
    }
    fn derivative(&self, v: f64) -> f64 {
        1.0 / v
    }
    fn condition_c(&self) -> bool {
        true
    }
    fn needs_positive(&self) -> bool {
        true
    }
}

/// −1/v
struct NegPrecision;

impl UncertaintyCost for NegPrecision {
    fn spec(&self) -> String {
        "neg_precision".into()
    }
    fn eval(&self, v: f64) -> f64 {
        -1.0 / v
    }
    fn derivative(&self, v: f64) -> f64 {
        1.0 / (v * v)
    }
    fn condition_c(&self) -> bool {
        true
    }
    fn needs_positive(&self) -> bool {
        true
    }
}

/// v^q / q for q ≠ 0.
struct Power(f64);

impl UncertaintyCost for Power {
    fn spec(&self) -> String {
        format!("power:{}", self.0)
    }
    fn eval(&self, v: f64) -> f64 {
        v.powf(self.0) / self.0
    }
    fn derivative(&self, v: f64) -> f64 {
        v.powf(self.0 - 1.0)
    }
    fn condition_c(&self) -> bool {
        self.0 >= -1.0
    }
    fn needs_positive(&self) -> bool {
        self.0 < 0.0
    }
}

/// (v² − 1)/v
struct RatioDemo;

impl UncertaintyCost for RatioDemo {
    fn spec(&self) -> String {
        "ratio_demo".into()
    }
    fn eval(&self, v: f64) -> f64 {
        v - 1.0 / v
    }
    fn derivative(&self, v: f64) -> f64 {
        1.0 + 1.0 / (v * v)
    }
    fn condition_c(&self) -> bool {
        true
    }
    fn needs_positive(&self) -> bool {
        true
    }
}

/// v/(v + 1)
struct BoundedDemo;

impl UncertaintyCost for BoundedDemo {
    fn spec(&self) -> String {
        "bounded_demo".into()
    }
    fn eval(&self, v: f64) -> f64 {
        v / (v + 1.0)
    }
    fn derivative(&self, v: f64) -> f64 {
        1.0 / ((v + 1.0) * (v + 1.0))
    }
    fn condition_c(&self) -> bool {
        true
    }
}

/// Piecewise-linear interpolation through (v_i, C_i), extended linearly past both ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCost {
    pub v: Vec<f64>,
    pub c: Vec<f64>,
}

impl TableCost {
    pub fn new(v: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if v.len() < 2 || v.len() != c.len() {
            return Err(invalid("a cost table needs at least two (v, C) pairs of equal length"));
        }
        if v.windows(2).any(|p| !(p[0] < p[1])) || v.iter().chain(&c).any(|t| !t.is_finite()) {
            return Err(invalid("cost table abscissae must be finite and strictly increasing"));
        }
        Ok(TableCost { v, c })
    }

    fn segment(&self, x: f64) -> usize {
        self.v.partition_point(|&t| t <= x).clamp(1, self.v.len() - 1) - 1
    }
}

impl UncertaintyCost for TableCost {
    fn spec(&self) -> String {
        format!("table:{}", self.v.len())
    }
    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let t = (x - self.v[i]) / (self.v[i + 1] - self.v[i]);
        self.c[i] + t * (self.c[i + 1] - self.c[i])
    }
    fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        (self.c[i + 1] - self.c[i]) / (self.v[i + 1] - self.v[i])
    }
    fn condition_c(&self) -> bool {
        false
    }
}

/// A weighted cost k·C(v), shared cheaply between threads.
#[derive(Clone)]
pub struct CostFn {
    inner: Arc<dyn UncertaintyCost>,
    weight: f64,
}

impl CostFn {
    pub fn new(inner: Arc<dyn UncertaintyCost>) -> Self {
        CostFn { inner, weight: 1.0 }
    }

    pub fn linear() -> Self {
        CostFn::new(Arc::new(Linear))
    }

    pub fn entropy() -> Self {
        CostFn::new(Arc::new(Entropy))
    }

    pub fn neg_precision() -> Self {
        CostFn::new(Arc::new(NegPrecision))
    }

    pub fn power(q: f64) -> Result<Self> {
        if q == 0.0 || !q.is_finite() {
            return Err(invalid(format!("power cost needs finite q ≠ 0, got {q}")));
        }
        Ok(CostFn::new(Arc::new(Power(q))))
    }

    pub fn ratio_demo() -> Self {
        CostFn::new(Arc::new(RatioDemo))
    }

    pub fn bounded_demo() -> Self {
        CostFn::new(Arc::new(BoundedDemo))
    }

    pub fn table(t: TableCost) -> Self {
        CostFn::new(Arc::new(t))
    }

    /// k·C; k must be positive so the cost's shape is kept.
    pub fn scaled(mut self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid(format!("cost weight {k} must be positive")));
        }
        self.weight *= k;
        Ok(self)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn spec(&self) -> String {
        if self.weight == 1.0 {
            self.inner.spec()
        } else {
            format!("{}*{}", self.weight, self.inner.spec())
        }
    }

    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        self.weight * self.inner.eval(v)
    }

    pub fn derivative(&self, v: f64) -> f64 {
        self.weight * self.inner.derivative(v)
    }

    /// Evaluates and reports domain violations instead of returning ±∞ or NaN.
    #[inline]
    pub fn try_eval(&self, v: f64) -> Result<f64> {
        let c = self.eval(v);
        if c.is_finite() && !(v == 0.0 && self.inner.needs_positive()) {
            Ok(c)
        } else {
            Err(Error::CostDomain { cost: self.spec(), v })
        }
    }

    pub fn condition_c(&self) -> bool {
        self.inner.condition_c()
    }

    pub fn needs_positive(&self) -> bool {
        self.inner.needs_positive()
    }
}

impl fmt::Debug for CostFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CostFn({})", self.spec())
    }
}

impl Serialize for CostFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec())
    }
}

impl<'de> Deserialize<'de> for CostFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CostRegistry::builtin().parse(&s).map_err(serde::de::Error::custom)
    }
}

type Builder = fn(Option<&str>) -> Result<CostFn>;

/// Name → constructor map. Arguments follow a colon: `power:-1.5`.
/// A leading `k*` applies a weight: `10*linear`.
pub struct CostRegistry {
    builders: BTreeMap<&'static str, Builder>,
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(a) => Err(invalid(format!("cost `{name}` takes no argument, got `{a}`"))),
    }
}

impl CostRegistry {
    pub fn empty() -> Self {
        CostRegistry { builders: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = CostRegistry::empty();
        r.register("linear", |a| no_arg("linear", a).map(|_| CostFn::linear()));
        r.register("entropy", |a| no_arg("entropy", a).map(|_| CostFn::entropy()));
        r.register("log", |a| no_arg("log", a).map(|_| CostFn::entropy()));
        r.register("neg_precision", |a| no_arg("neg_precision", a).map(|_| CostFn::neg_precision()));
        r.register("ratio_demo", |a| no_arg("ratio_demo", a).map(|_| CostFn::ratio_demo()));
        r.register("bounded_demo", |a| no_arg("bounded_demo", a).map(|_| CostFn::bounded_demo()));
        r.register("power", |a| {
            let q = a
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| invalid("power cost needs an exponent, e.g. power:-1.5"))?;
            CostFn::power(q)
        });
        r
    }

    pub fn register(&mut self, name: &'static str, b: Builder) {
        self.builders.insert(name, b);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn parse(&self, spec: &str) -> Result<CostFn> {
        let spec = spec.trim();
        let (weight, body) = match spec.split_once('*') {
            Some((k, rest)) => {
                let k: f64 = k.trim().parse().map_err(|_| invalid(format!("bad cost weight in `{spec}`")))?;
                (k, rest.trim())
            }
            None => (1.0, spec),
        };
        let (name, arg) = match body.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (body, None),
        };
        let build = self.builders.get(name).ok_or_else(|| Error::Unknown { kind: "cost", name: name.to_string() })?;
        build(arg)?.scaled(weight)
    }
}
