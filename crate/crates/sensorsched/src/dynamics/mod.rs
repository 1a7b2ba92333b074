//! Variance dynamics: the maps φ0, φ1, their matrices, fixed points,
//! threshold orbits and itineraries of the map with a gap.

mod claims;
mod moebius;
mod params;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::words::{self, central_palindrome, is_christoffel, DoubleDouble, Rational, Word};

pub use claims::{check_integrated, integrated_sequences, IntegratedReport, IntegratedSeqs};
pub use moebius::{moebius_matrix, MoebiusMat};
pub use params::{ArmParams, KalmanRaw};

/// States this close to the threshold (relative to 1 + |s|) are knife-edge.
pub const KNIFE_EDGE_TOL: f64 = 1e-12;

pub fn phi(p: &ArmParams, action: bool, v: f64) -> f64 {
    p.phi(action, v)
}

/// φ_w(x), applying letters left to right.
pub fn phi_word(p: &ArmParams, w: &Word, x: f64) -> f64 {
    w.iter().fold(x, |v, b| p.phi(b, v))
}

#[inline]
pub(crate) fn near_threshold(x: f64, s: f64) -> bool {
    s.is_finite() && (x - s).abs() <= KNIFE_EDGE_TOL * (1.0 + s.abs())
}

/// Unique positive fixed point y_w of φ_w; +∞ when φ_w has none (0^k at r = 1, a0 = 0).
pub fn fixed_point(p: &ArmParams, w: &Word) -> Result<f64> {
    if w.is_empty() {
        return Err(invalid("the empty word has no fixed point"));
    }
    if p.a1().is_infinite() {
        if let Some(last) = (0..w.len()).rev().find(|&i| w.bit(i)) {
            // φ_w is constant: everything before the last 1 is forgotten
            return Ok(phi_word(p, &w.factor(last + 2, w.len()), 0.0));
        }
    }
    let y = moebius::projective_matrix(p, w).positive_fixed_point();
    if y.is_finite() {
        let img = phi_word(p, w, y);
        if !(y > 0.0 || (y == 0.0 && img == 0.0)) || (img - y).abs() > 1e-10 * (1.0 + y) {
            return Err(Error::Internal(format!("fixed point of {w} failed: y = {y}, φ(y) = {img}")));
        }
    }
    Ok(y)
}

/// y_1 and y_0.
pub fn boundary_fixed_points(p: &ArmParams) -> (f64, f64) {
    let y1 = fixed_point(p, &words::w("1")).expect("y_1 exists");
    let y0 = fixed_point(p, &words::w("0")).expect("y_0 exists");
    (y1, y0)
}

/// Interval [y_{01p}, y_{10p}] of a Christoffel word 0p1.
pub fn christoffel_interval(p: &ArmParams, cw: &Word) -> Result<(f64, f64)> {
    let pal = central_palindrome(cw)?;
    let lo = fixed_point(p, &words::w("01").concat(&pal))?;
    let hi = fixed_point(p, &words::w("10").concat(&pal))?;
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SturmianBracket {
    pub lower: f64,
    pub upper: f64,
    /// Christoffel word at the last visited tree node.
    pub word: Word,
}

/// Brackets y_s by walking the Christoffel tree toward `rate`.
///
/// A node 0w1 steeper than the rate lies below y_s and raises the lower end to
/// y_{10w}; a shallower node lowers the upper end to y_{01w}. The brackets nest.
pub fn sturmian_fixed_point(p: &ArmParams, rate: DoubleDouble, depth: usize) -> Result<SturmianBracket> {
    let a = rate.to_f64();
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid(format!("rate {a} must lie in (0, 1)")));
    }
    if depth == 0 || depth > 64 {
        return Err(invalid(format!("depth {depth} must be in 1..=64")));
    }
    let (mut lower, mut upper) = boundary_fixed_points(p);
    let mut node = words::ChristoffelPair::root();
    let mut word = node.word();
    for _ in 0..depth {
        word = node.word();
        let q = words::rate(&word)?;
        let diff = (DoubleDouble::from_f64(q.num() as f64) - rate.mul_f64(q.den() as f64)).to_f64();
        let (y01, y10) = christoffel_interval(p, &word)?;
        if diff == 0.0 {
            return Ok(SturmianBracket { lower: y01, upper: y10, word });
        }
        let (l, r) = words::tree_children(&node);
        if diff > 0.0 {
            lower = lower.max(y10);
            node = l;
        } else {
            upper = upper.min(y01);
            node = r;
        }
    }
    Ok(SturmianBracket { lower, upper, word })
}

/// X_0..X_T and A_0..A_T of the s-threshold policy with forced first action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub states: Vec<f64>,
    pub actions: Word,
    #[serde(with = "crate::ext")]
    pub threshold: f64,
    pub initial_action: bool,
    /// Steps t ≥ 1 whose state sat within the knife-edge tolerance of s.
    pub knife_edges: Vec<usize>,
}

/// Look-ahead used to arbitrate knife-edge decisions.
const LOOKAHEAD: usize = 3;
const HISTORY: usize = 64;

/// Decides A_t at a knife-edge state by preferring the branch whose recent
/// history plus a short continuation is balanced; active wins ties.
fn arbitrate(p: &ArmParams, x: f64, s: f64, history: &[bool]) -> bool {
    let start = history.len().saturating_sub(HISTORY);
    let ok = |cand: bool| {
        let mut seq: Vec<bool> = history[start..].to_vec();
        seq.push(cand);
        let mut v = p.phi(cand, x);
        for _ in 0..LOOKAHEAD {
            let b = v >= s;
            seq.push(b);
            v = p.phi(b, v);
        }
        words::balanced_after_run(&Word::from_bits(seq))
    };
    ok(true) || !ok(false)
}

fn run_orbit(p: &ArmParams, x: f64, a: bool, s: f64, t_max: usize, resolve: bool) -> Orbit {
    let mut states = Vec::with_capacity(t_max + 1);
    let mut acts = Vec::with_capacity(t_max + 1);
    let mut knife = Vec::new();
    let mut v = x;
    for t in 0..=t_max {
        let act = if t == 0 {
            a
        } else if near_threshold(v, s) {
            knife.push(t);
            if resolve {
                arbitrate(p, v, s, &acts[1..])
            } else {
                v >= s
            }
        } else {
            v >= s
        };
        states.push(v);
        acts.push(act);
        v = p.phi(act, v);
    }
    Orbit { states, actions: Word::from_bits(acts), threshold: s, initial_action: a, knife_edges: knife }
}

/// Plain s-threshold orbit: A_t = 1{X_t ≥ s} for t ≥ 1, knife-edges only flagged.
pub fn orbit(p: &ArmParams, x: f64, a: bool, s: f64, t_max: usize) -> Orbit {
    run_orbit(p, x, a, s, t_max, false)
}

/// Orbit with knife-edge decisions arbitrated by balance of the continuation.
pub fn orbit_resolved(p: &ArmParams, x: f64, a: bool, s: f64, t_max: usize) -> Orbit {
    run_orbit(p, x, a, s, t_max, true)
}

/// σ(x|z)_{1:n}: x_1 = x, σ_t = 1{x_t ≥ z}, x_{t+1} = φ_{σ_t}(x_t).
pub fn itinerary(p: &ArmParams, x: f64, z: f64, n: usize) -> Word {
    itinerary_detail(p, x, z, n, false).0
}

/// Itinerary plus knife-edge positions (1-based), optionally arbitrated.
pub fn itinerary_detail(p: &ArmParams, x: f64, z: f64, n: usize, resolve: bool) -> (Word, Vec<usize>) {
    let mut acts: Vec<bool> = Vec::with_capacity(n);
    let mut knife = Vec::new();
    let mut v = x;
    for t in 1..=n {
        let b = if near_threshold(v, z) {
            knife.push(t);
            if resolve {
                arbitrate(p, v, z, &acts)
            } else {
                v >= z
            }
        } else {
            v >= z
        };
        acts.push(b);
        v = p.phi(b, v);
    }
    (Word::from_bits(acts), knife)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdWord {
    /// π(x) when certified, else the first max_len letters after the leading 1.
    pub word: Word,
    pub periodic: bool,
    pub knife_edge: bool,
}

/// Relative slack for fixed-point interval membership.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// x-threshold word π(x), where σ(x|x) = 1π(x)^ω.
///
/// A candidate period is read off the action sequence (it must repeat for at
/// least three periods and be a Christoffel word) and then certified by the
/// fixed-point interval it must belong to: x ≤ y_1 for 1, x ≥ y_0 for 0,
/// x ∈ [y_{01p}, y_{10p}] for 0p1.
pub fn threshold_word(p: &ArmParams, x: f64, max_len: usize) -> Result<ThresholdWord> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!("state {x} must be finite and non-negative")));
    }
    if max_len == 0 {
        return Err(invalid("max_len must be positive"));
    }
    let horizon = 3 * max_len;
    let (sigma, knife) = itinerary_detail(p, x, x, horizon + 1, true);
    let seq = sigma.factor(2, horizon + 1);
    let period = (1..=max_len).find(|&q| (q..horizon).all(|i| seq.bit(i) == seq.bit(i - q)));
    let knife_edge = !knife.is_empty();
    let fallback = ThresholdWord { word: seq.prefix(max_len), periodic: false, knife_edge };
    let Some(q) = period else {
        return Ok(fallback);
    };
    let cand = seq.prefix(q);
    if !is_christoffel(&cand) {
        return Ok(fallback);
    }
    let tol = |y: f64| MEMBERSHIP_TOL * (1.0 + y.abs());
    let certified = if q == 1 {
        let y = fixed_point(p, &cand)?;
        if cand.bit(0) {
            x <= y + tol(y)
        } else {
            y.is_finite() && x >= y - tol(y)
        }
    } else {
        let (lo, hi) = christoffel_interval(p, &cand)?;
        x >= lo - tol(lo) && x <= hi + tol(hi)
    };
    if certified {
        Ok(ThresholdWord { word: cand, periodic: true, knife_edge })
    } else {
        Ok(fallback)
    }
}

/// Christoffel word whose interval contains x, found without simulation by a
/// tree search over rates (used to cross-check `threshold_word`).
pub fn interval_word(p: &ArmParams, x: f64, max_len: u64) -> Result<Option<Word>> {
    let (y1, y0) = boundary_fixed_points(p);
    if x <= y1 {
        return Ok(Some(words::w("1")));
    }
    if x >= y0 {
        return Ok(Some(words::w("0")));
    }
    let mut node = words::ChristoffelPair::root();
    loop {
        let cw = node.word();
        if cw.len() as u64 > max_len {
            return Ok(None);
        }
        let (lo, hi) = christoffel_interval(p, &cw)?;
        let (l, r) = words::tree_children(&node);
        // larger states sit on shallower words
        if x > hi {
            node = l;
        } else if x < lo {
            node = r;
        } else {
            return Ok(Some(cw));
        }
    }
}

/// Rate of a Christoffel word as f64, for convenience in reports.
pub fn word_rate(w: &Word) -> Option<Rational> {
    words::rate(w).ok()
}
