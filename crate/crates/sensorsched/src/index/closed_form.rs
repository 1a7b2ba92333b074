use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormMode {
    /// Same normalization as `whittle_index`; equals β times the `Printed` expression.
    Finite,
    /// The expression exactly as usually printed, which is 1 at x = 0.
    Printed,
    /// β → 1, r → 1 limit ⌈x + 1⌉(x + 1 − ⌈x⌉/2).
    Limit,
}

/// Number of passive steps from 0 until φ0^n(0) ≥ x, with φ0(x) = rx + 1.
fn passive_steps(r: f64, x: f64) -> u32 {
    if x <= 0.0 {
        return 0;
    }
    if r == 0.0 {
        return 1;
    }
    let n = ((1.0 - (1.0 - r) * x).ln() / r.ln()).ceil().max(0.0) as u32;
    // the logarithm can land a hair on the wrong side of an integer
    let reach = |k: u32| (1.0 - r.powi(k as i32)) / (1.0 - r);
    if n > 0 && reach(n - 1) >= x {
        n - 1
    } else if reach(n) < x {
        n + 1
    } else {
        n
    }
}

/// Index for C(x) = x, a0 = 0, noiseless active observations, φ0(x) = rx + 1.
///
/// Here `r` is the passive slope, i.e. the square of the multiplier in `ArmParams`.
pub fn closed_form_noiseless(r: f64, beta: f64, x: f64, mode: ClosedFormMode) -> Result<f64> {
    if mode == ClosedFormMode::Limit {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(invalid(format!("x = {x} must be finite and non-negative")));
        }
        return Ok((x + 1.0).ceil() * (x + 1.0 - x.ceil() / 2.0));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("slope r = {r} must lie in [0, 1)")));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta = {beta} must lie in [0, 1)")));
    }
    if !(x >= 0.0 && x < 1.0 / (1.0 - r)) {
        return Err(invalid(format!("x = {x} outside [0, {})", 1.0 / (1.0 - r))));
    }
    let n = passive_steps(r, x) as i32;
    let bn1 = 1.0 - beta.powi(n + 1);
    let geo_br = (1.0 - (beta * r).powi(n)) / (1.0 - beta * r);
    let geo_r = if n == 0 { 0.0 } else { (1.0 - r.powi(n)) / (1.0 - r) };
    let printed = bn1 / (1.0 - beta) * (r * x + 1.0 - beta / bn1 * (geo_br - beta.powi(n) * geo_r));
    Ok(match mode {
        ClosedFormMode::Printed => printed,
        _ => beta * printed,
    })
}
