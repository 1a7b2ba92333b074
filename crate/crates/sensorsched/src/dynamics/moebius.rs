use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::ArmParams;
use crate::error::{invalid, Result};
use crate::words::Word;

/// 2×2 matrix acting on (x, 1)ᵀ as the Möbius map x ↦ (m11 x + m12)/(m21 x + m22).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMat {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl MoebiusMat {
    pub const IDENTITY: MoebiusMat = MoebiusMat { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };

    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        MoebiusMat { m11, m12, m21, m22 }
    }

    /// F (a = a0) or G (a = a1): [[r, 1/r], [a r, (a + 1)/r]].
    pub fn step(r: f64, a: f64) -> Self {
        MoebiusMat::new(r, 1.0 / r, a * r, (a + 1.0) / r)
    }

    /// K = [[r, 1/r], [r − r³, −r]].
    pub fn k(r: f64) -> Self {
        MoebiusMat::new(r, 1.0 / r, r - r * r * r, -r)
    }

    /// X = diag(−r/(1 − r²), 1/r), defined for r < 1.
    pub fn x(r: f64) -> Self {
        MoebiusMat::new(-r / (1.0 - r * r), 0.0, 0.0, 1.0 / r)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        MoebiusMat::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    pub fn apply(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return if self.m21 == 0.0 { f64::INFINITY } else { self.m11 / self.m21 };
        }
        (self.m11 * x + self.m12) / (self.m21 * x + self.m22)
    }

    /// M·(x, y)ᵀ.
    pub fn apply_vec(&self, x: f64, y: f64) -> (f64, f64) {
        (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)
    }

    pub fn max_abs(&self) -> f64 {
        self.m11.abs().max(self.m12.abs()).max(self.m21.abs()).max(self.m22.abs())
    }

    pub fn scaled(&self, k: f64) -> Self {
        MoebiusMat::new(self.m11 * k, self.m12 * k, self.m21 * k, self.m22 * k)
    }

    /// Unique positive root of m21 y² + (m22 − m11) y − m12 = 0; +∞ when none is finite.
    pub fn positive_fixed_point(&self) -> f64 {
        let b = self.m22 - self.m11;
        if self.m21 == 0.0 {
            return if b > 0.0 { self.m12 / b } else { f64::INFINITY };
        }
        let disc = (b * b + 4.0 * self.m21 * self.m12).max(0.0).sqrt();
        if b > 0.0 {
            2.0 * self.m12 / (b + disc)
        } else {
            (disc - b) / (2.0 * self.m21)
        }
    }

    pub fn max_diff(&self, o: &MoebiusMat) -> f64 {
        (self.m11 - o.m11)
            .abs()
            .max((self.m12 - o.m12).abs())
            .max((self.m21 - o.m21).abs())
            .max((self.m22 - o.m22).abs())
    }
}

impl Mul for MoebiusMat {
    type Output = MoebiusMat;
    fn mul(self, o: MoebiusMat) -> MoebiusMat {
        MoebiusMat::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

fn letter_matrix(p: &ArmParams, bit: bool) -> MoebiusMat {
    MoebiusMat::step(p.r(), p.precision(bit))
}

/// M(w) = M(w_|w|) ⋯ M(w_1) with M(0) = F, M(1) = G.
pub fn moebius_matrix(p: &ArmParams, w: &Word) -> Result<MoebiusMat> {
    if p.a1().is_infinite() {
        return Err(invalid("the active map has no matrix when a1 = ∞"));
    }
    Ok(w.iter().fold(MoebiusMat::IDENTITY, |m, b| letter_matrix(p, b) * m))
}

/// M(w) rescaled after each factor; the induced map is unchanged and long words cannot overflow.
pub(crate) fn projective_matrix(p: &ArmParams, w: &Word) -> MoebiusMat {
    w.iter().fold(MoebiusMat::IDENTITY, |m, b| {
        let next = letter_matrix(p, b) * m;
        next.scaled(1.0 / next.max_abs())
    })
}
