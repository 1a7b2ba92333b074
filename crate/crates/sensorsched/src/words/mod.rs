//! Binary words: Christoffel and mechanical words, Farey sequences,
//! balance, conjugacy and the 10 → 01 swap system.

mod dd;
mod rational;
mod word;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dd::DoubleDouble;
pub use rational::{gcd, Rational};
pub use word::{w, Word};

/// Christoffel word of the given rate: (w^ω)_k = ⌊αk⌋ − ⌊α(k−1)⌋, length den.
pub fn christoffel(rate: Rational) -> Word {
    let (m, n) = (rate.num(), rate.den());
    Word::from_bits((1..=n).map(|k| (m * k) / n != (m * (k - 1)) / n))
}

/// Same word via w_{i+1} = 1{(m·i mod n) ≥ n − m}.
pub fn christoffel_mod(rate: Rational) -> Word {
    let (m, n) = (rate.num(), rate.den());
    let p = n - m;
    Word::from_bits((0..n).map(|i| (m * i) % n >= p))
}

/// Rate |w|_1/|w| as a reduced fraction.
pub fn rate(w: &Word) -> Result<Rational> {
    if w.is_empty() {
        return Err(Error::InvalidParam("the empty word has no rate".into()));
    }
    Rational::reduced(w.count_ones() as u64, w.len() as u64)
}

pub fn is_christoffel(w: &Word) -> bool {
    let (m, n) = (w.count_ones() as u64, w.len() as u64);
    n > 0 && gcd(m, n) == 1 && Rational::new(m, n).map(christoffel).as_ref() == Ok(w)
}

/// First n letters of w^ω for the M-word w of a rational rate.
pub fn mword_prefix(rate: Rational, n: usize) -> Word {
    let (m, d) = (rate.num() as u128, rate.den() as u128);
    Word::from_bits((1..=n as u128).map(|k| (m * k) / d != (m * (k - 1)) / d))
}

/// Prefix of the mechanical word at a real slope, with breakpoint flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealPrefix {
    pub word: Word,
    /// 1-based positions k where αk sat within the guard of an integer.
    pub near_breakpoint: Vec<usize>,
}

/// Guard of 2^-80 per unit of k, roughly what double-double resolves reliably.
pub const DEFAULT_GUARD_BITS: i32 = 80;

/// First n letters of the mechanical word of slope `alpha` in [0,1].
///
/// `alpha` is taken as exact; αk is evaluated in double-double and any k
/// with αk within k·2^-guard_bits of an integer is reported.
pub fn mword_prefix_real(alpha: DoubleDouble, n: usize, guard_bits: i32) -> Result<RealPrefix> {
    let a = alpha.to_f64();
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParam(format!("slope {a} outside [0, 1]")));
    }
    let guard = 2f64.powi(-guard_bits);
    let mut word = Word::with_capacity(n);
    let mut near = Vec::new();
    let mut prev = 0.0;
    for k in 1..=n {
        let ak = alpha.mul_f64(k as f64);
        let fl = ak.floor();
        let fr = ak.fract();
        if k > 0 && (fr < guard * k as f64 || 1.0 - fr < guard * k as f64) {
            near.push(k);
        }
        word.push(fl != prev);
        prev = fl;
    }
    Ok(RealPrefix { word, near_breakpoint: near })
}

/// Farey sequence F_n in increasing order.
pub fn farey(n: u64) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::InvalidParam("Farey order must be at least 1".into()));
    }
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    let mut out = vec![Rational::ZERO];
    while c <= n {
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
        out.push(Rational::new(a, b).expect("Farey terms are reduced"));
    }
    Ok(out)
}

/// 1-balanced test from min/max window weights for every window length.
pub fn is_balanced(w: &Word) -> bool {
    let pre = w.prefix_ones();
    let n = w.len();
    (1..n).all(|len| {
        let (mut lo, mut hi) = (usize::MAX, 0);
        for i in 0..=n - len {
            let c = pre[i + len] - pre[i];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        hi - lo <= 1
    })
}

/// Lexicographic order with a proper prefix below its extensions.
pub fn lex_cmp(u: &Word, v: &Word) -> Ordering {
    for (a, b) in u.iter().zip(v.iter()) {
        if a != b {
            return a.cmp(&b);
        }
    }
    u.len().cmp(&v.len())
}

/// Node (u, v) of the Christoffel tree; uv is the node's Christoffel word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChristoffelPair {
    u: Word,
    v: Word,
}

impl ChristoffelPair {
    pub fn root() -> Self {
        ChristoffelPair { u: w("0"), v: w("1") }
    }

    /// Follows a path of left (false) / right (true) moves from the root.
    pub fn from_path(path: &[bool]) -> Self {
        path.iter().fold(Self::root(), |p, &right| {
            let (l, r) = tree_children(&p);
            if right {
                r
            } else {
                l
            }
        })
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    pub fn v(&self) -> &Word {
        &self.v
    }

    pub fn word(&self) -> Word {
        self.u.concat(&self.v)
    }
}

pub fn tree_children(p: &ChristoffelPair) -> (ChristoffelPair, ChristoffelPair) {
    let uv = p.word();
    (ChristoffelPair { u: p.u.clone(), v: uv.clone() }, ChristoffelPair { u: uv, v: p.v.clone() })
}

/// Modular inverse of m mod n (n ≥ 1, gcd = 1).
fn inv_mod(m: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, n as i128, m as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(n as i128) as u64
}

/// Conjugates u(0), u(l), …, u((n−1)l) with l·m ≡ 1 (mod n).
pub fn conjugates_sorted(w: &Word) -> Result<Vec<Word>> {
    let m = w.count_ones() as u64;
    if m == 0 || !is_christoffel(w) {
        return Err(Error::NotChristoffel(w.to_string()));
    }
    let n = w.len() as u64;
    let l = inv_mod(m, n);
    let out: Vec<Word> = (0..n).map(|k| w.rotate(((k * l) % n) as usize)).collect();
    if out.windows(2).any(|p| lex_cmp(&p[0], &p[1]) != Ordering::Less) || out.last() != Some(&w.reversed()) {
        return Err(Error::Internal(format!("conjugate ordering failed for {w}")));
    }
    Ok(out)
}

/// d(a, b) = Σ_i (|a_{1:i}|_1 − |b_{1:i}|_1).
pub fn swap_distance(a: &Word, b: &Word) -> Result<usize> {
    check_swappable(a, b)?;
    let (pa, pb) = (a.prefix_ones(), b.prefix_ones());
    Ok((1..=a.len()).map(|i| pa[i] - pb[i]).sum())
}

fn check_swappable(a: &Word, b: &Word) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::NotSwappable(format!("{a} and {b} differ in length")));
    }
    let (pa, pb) = (a.prefix_ones(), b.prefix_ones());
    if pa[a.len()] != pb[b.len()] {
        return Err(Error::NotSwappable(format!("{a} and {b} differ in weight")));
    }
    if let Some(k) = (1..a.len()).find(|&k| pa[k] < pb[k]) {
        return Err(Error::NotSwappable(format!("prefix of {b} outweighs {a} at {k}")));
    }
    Ok(())
}

/// Exchange positions j (1-based; factor 10 at j−1, j becomes 01) taking a to b.
pub fn swap_sequence(a: &Word, b: &Word) -> Result<Vec<usize>> {
    check_swappable(a, b)?;
    let mut cur = a.clone();
    let mut steps = Vec::new();
    let pb = b.prefix_ones();
    while cur != *b {
        let pa = cur.prefix_ones();
        let i = (1..=cur.len()).find(|&i| pa[i] > pb[i]).expect("a ≠ b with equal weights");
        let j = (i + 1..=cur.len()).find(|&j| !cur.at(j)).expect("a zero follows");
        cur.exchange(j)?;
        steps.push(j);
    }
    Ok(steps)
}

/// Applies exchanges in order, returning every intermediate word.
pub fn apply_swaps(a: &Word, steps: &[usize]) -> Result<Vec<Word>> {
    let mut out = vec![a.clone()];
    let mut cur = a.clone();
    for &j in steps {
        cur.exchange(j)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Central palindrome p of a Christoffel word 0p1.
pub fn central_palindrome(w: &Word) -> Result<Word> {
    if w.len() < 2 || !is_christoffel(w) {
        return Err(Error::NotChristoffel(w.to_string()));
    }
    let p = w.factor(2, w.len() - 1);
    if !p.is_palindrome() {
        return Err(Error::Internal(format!("central part of {w} is not a palindrome")));
    }
    Ok(p)
}

/// All Christoffel words of length 2..=max_len, ordered by length then rate.
pub fn christoffel_words_up_to(max_len: u64) -> Vec<Word> {
    let mut out = Vec::new();
    for n in 2..=max_len {
        for m in 1..n {
            if let Ok(q) = Rational::new(m, n) {
                out.push(christoffel(q));
            }
        }
    }
    out
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

/// Number of balanced words of length n: 1 + Σ_{i=1}^n (n−i+1)·φ(i).
pub fn balanced_word_count(n: u64) -> u64 {
    1 + (1..=n).map(|i| (n - i + 1) * totient(i)).sum::<u64>()
}

/// Whether w = l^m u with u balanced, for some letter l and m ≥ 0.
pub fn balanced_after_run(w: &Word) -> bool {
    if is_balanced(w) {
        return true;
    }
    let first = w.bit(0);
    let run = w.iter().take_while(|&b| b == first).count();
    (1..=run).any(|m| is_balanced(&w.factor(m + 1, w.len())))
}
