use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Raw filter parameters the normalized triple was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KalmanRaw {
    #[serde(rename = "A")]
    pub a: f64,
    pub sigma_x: f64,
    #[serde(with = "crate::ext")]
    pub sigma_y0: f64,
    pub sigma_y1: f64,
}

/// Normalized arm dynamics (r, a0, a1) with observation costs c0 ≤ c1.
///
/// φ_a(v) = (r²v + 1)/(a_q r²v + a_q + 1), variances in units of sigma_x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArmParamsRepr", into = "ArmParamsRepr")]
pub struct ArmParams {
    r: f64,
    a0: f64,
    a1: f64,
    c0: f64,
    c1: f64,
    kalman: Option<KalmanRaw>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArmParamsRepr {
    r: f64,
    a0: f64,
    #[serde(with = "crate::ext")]
    a1: f64,
    #[serde(default)]
    c0: f64,
    #[serde(default = "one")]
    c1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kalman: Option<KalmanRaw>,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ArmParamsRepr> for ArmParams {
    type Error = Error;
    fn try_from(p: ArmParamsRepr) -> Result<Self> {
        let mut out = ArmParams::new(p.r, p.a0, p.a1)?.with_costs(p.c0, p.c1)?;
        out.kalman = p.kalman;
        Ok(out)
    }
}

impl From<ArmParams> for ArmParamsRepr {
    fn from(p: ArmParams) -> Self {
        ArmParamsRepr { r: p.r, a0: p.a0, a1: p.a1, c0: p.c0, c1: p.c1, kalman: p.kalman }
    }
}

impl ArmParams {
    /// Validates 0 < r ≤ 1 and 0 ≤ a0 < a1 ≤ ∞; costs default to c0 = 0, c1 = 1.
    pub fn new(r: f64, a0: f64, a1: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid(format!("r = {r} must lie in (0, 1]")));
        }
        if !(a0.is_finite() && a0 >= 0.0) {
            return Err(invalid(format!("a0 = {a0} must be finite and non-negative")));
        }
        if a1.is_nan() || a1 <= a0 {
            return Err(invalid(format!("a1 = {a1} must exceed a0 = {a0}")));
        }
        Ok(ArmParams { r, a0, a1, c0: 0.0, c1: 1.0, kalman: None })
    }

    /// Parameterization by the passive slope ρ = r², as in φ0(x) = ρx + 1 when a0 = 0.
    pub fn from_slope(rho: f64, a0: f64, a1: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(invalid(format!("slope {rho} must lie in (0, 1]")));
        }
        ArmParams::new(rho.sqrt(), a0, a1)
    }

    /// Normalizes raw filter parameters: r = |A|, a = sigma_x/sigma_y.
    pub fn from_kalman(a: f64, sigma_x: f64, sigma_y0: f64, sigma_y1: f64) -> Result<Self> {
        if !(a != 0.0 && a.abs() <= 1.0) {
            return Err(invalid(format!("A = {a} must satisfy 0 < |A| ≤ 1")));
        }
        if !(sigma_x > 0.0 && sigma_x.is_finite()) {
            return Err(invalid(format!("sigma_x = {sigma_x} must be positive")));
        }
        if !(sigma_y1 > 0.0 && sigma_y1.is_finite()) {
            return Err(invalid(format!("sigma_y1 = {sigma_y1} must be positive and finite")));
        }
        if sigma_y0.is_nan() || sigma_y1 >= sigma_y0 {
            return Err(invalid(format!(
                "sigma_y1 = {sigma_y1} must be below sigma_y0 = {sigma_y0} (active observations are the better ones)"
            )));
        }
        let a0 = if sigma_y0.is_infinite() { 0.0 } else { sigma_x / sigma_y0 };
        let mut p = ArmParams::new(a.abs(), a0, sigma_x / sigma_y1)?;
        p.kalman = Some(KalmanRaw { a, sigma_x, sigma_y0, sigma_y1 });
        Ok(p)
    }

    pub fn with_costs(mut self, c0: f64, c1: f64) -> Result<Self> {
        if !(c0.is_finite() && c1.is_finite() && c0 <= c1) {
            return Err(invalid(format!("observation costs need c0 = {c0} ≤ c1 = {c1}")));
        }
        self.c0 = c0;
        self.c1 = c1;
        Ok(self)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn kalman(&self) -> Option<&KalmanRaw> {
        self.kalman.as_ref()
    }

    pub fn precision(&self, action: bool) -> f64 {
        if action {
            self.a1
        } else {
            self.a0
        }
    }

    pub fn obs_cost(&self, action: bool) -> f64 {
        if action {
            self.c1
        } else {
            self.c0
        }
    }

    /// φ_a(v); the noiseless active map is identically zero.
    #[inline]
    pub fn phi(&self, action: bool, v: f64) -> f64 {
        let a = self.precision(action);
        if a.is_infinite() {
            return 0.0;
        }
        let p = self.r * self.r * v + 1.0;
        p / (a * p + 1.0)
    }

    /// Scale factor turning normalized variances into raw ones.
    pub fn sigma_x(&self) -> f64 {
        self.kalman.map_or(1.0, |k| k.sigma_x)
    }

    /// Mean-transition variance r²v + 1 − φ_a(v), in normalized units.
    pub fn innovation_variance(&self, action: bool, v: f64) -> f64 {
        (self.r * self.r * v + 1.0 - self.phi(action, v)).max(0.0)
    }

    /// Bound 1/(1 − r²) on the passive fixed point; infinite at r = 1.
    pub fn passive_bound(&self) -> f64 {
        if self.r >= 1.0 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - self.r * self.r)
        }
    }
}
