//! Sequences a, b, c, d built from M((01p)^n (01p)_{1:k}) and M((10p)^n (10p)_{1:k})
//! applied to (x, 1)ᵀ, and the inequalities they satisfy.

use serde::{Deserialize, Serialize};

use super::{fixed_point, moebius_matrix, phi_word, ArmParams};
use crate::error::{invalid, Result};
use crate::words::{w, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedSeqs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

pub fn integrated_sequences(p: &ArmParams, pal: &Word, n: usize, x: f64) -> Result<IntegratedSeqs> {
    if !pal.is_palindrome() {
        return Err(invalid(format!("{pal} is not a palindrome")));
    }
    let lo = w("01").concat(pal);
    let hi = w("10").concat(pal);
    let m = lo.len();
    let mut s = IntegratedSeqs { a: vec![], b: vec![], c: vec![], d: vec![] };
    for k in 1..=m {
        let ml = moebius_matrix(p, &lo.repeat(n).concat(&lo.prefix(k)))?;
        let mh = moebius_matrix(p, &hi.repeat(n).concat(&hi.prefix(k)))?;
        let (a, c) = ml.apply_vec(x, 1.0);
        let (b, d) = mh.apply_vec(x, 1.0);
        s.a.push(a);
        s.b.push(b);
        s.c.push(c);
        s.d.push(d);
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedReport {
    /// x lies in [φ_p(0), φ_p(1/(1 − r²))].
    pub in_domain: bool,
    pub claim1: bool,
    pub claim2: bool,
    pub claim3: bool,
    pub claim4: bool,
    pub claim5: bool,
    pub seqs: IntegratedSeqs,
}

impl IntegratedReport {
    pub fn all(&self) -> bool {
        self.claim1 && self.claim2 && self.claim3 && self.claim4 && self.claim5
    }
}

const REL: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    a <= b + REL * (a.abs() + b.abs())
}

fn non_decreasing_positive(v: &[f64]) -> bool {
    v.iter().all(|&t| t > 0.0) && v.windows(2).all(|p| le(p[0], p[1]))
}

/// Evaluates the five inequalities at one (p, palindrome, n, x).
pub fn check_integrated(p: &ArmParams, pal: &Word, n: usize, x: f64) -> Result<IntegratedReport> {
    let s = integrated_sequences(p, pal, n, x)?;
    let dom_lo = phi_word(p, pal, 0.0);
    let dom_hi = phi_word(p, pal, p.passive_bound());
    let in_domain = le(dom_lo, x) && le(x, dom_hi);
    let claim1 = [&s.a, &s.b, &s.c, &s.d].iter().all(|v| non_decreasing_positive(v));
    let claim2 = s.a.iter().zip(&s.b).all(|(a, b)| le(*a, *b));
    let (mut pc, mut pd) = (0.0, 0.0);
    let mut claim3 = true;
    for (c, d) in s.c.iter().zip(&s.d) {
        pc += c;
        pd += d;
        claim3 &= le(pc, pd);
    }
    let claim4 = le(s.c[0], s.d[0]) && s.c.iter().zip(&s.d).skip(1).all(|(c, d)| le(*d, *c));
    let y01 = fixed_point(p, &w("01").concat(pal))?;
    let y10 = fixed_point(p, &w("10").concat(pal))?;
    let claim5 = le(dom_lo, y01) && y01 < y10 && le(y10, dom_hi);
    Ok(IntegratedReport { in_domain, claim1, claim2, claim3, claim4, claim5, seqs: s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_palindrome_by_hand() {
        // p = ε, n = 0, r = 1, a0 = 0, a1 = 1: F = [[1,1],[0,1]], G = [[1,1],[1,2]]
        let p = ArmParams::new(1.0, 0.0, 1.0).unwrap();
        let x = 1.0;
        let s = integrated_sequences(&p, &Word::new(), 0, x).unwrap();
        // 01: F(x,1) = (2,1); G F (x,1) = (3,4). 10: G(x,1) = (2,3); F G (x,1) = (5,3)
        assert_eq!(s.a, vec![2.0, 3.0]);
        assert_eq!(s.c, vec![1.0, 4.0]);
        assert_eq!(s.b, vec![2.0, 5.0]);
        assert_eq!(s.d, vec![3.0, 3.0]);
        let rep = check_integrated(&p, &Word::new(), 0, x).unwrap();
        assert!(rep.all(), "{rep:?}");
    }

    #[test]
    fn rejects_non_palindromes() {
        let p = ArmParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(integrated_sequences(&p, &w("01"), 1, 1.0).is_err());
    }
}
