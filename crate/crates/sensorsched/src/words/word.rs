use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error};

/// Binary word packed 64 letters per block. Unused high bits of the last
/// block are always zero so derived equality and hashing are sound.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    blocks: Vec<u64>,
    len: usize,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Word { blocks: Vec::with_capacity(n.div_ceil(64)), len: 0 }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut w = Word::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    /// `n` copies of one letter.
    pub fn repeat_letter(bit: bool, n: usize) -> Self {
        Word::from_bits(std::iter::repeat_n(bit, n))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let (q, r) = (self.len / 64, self.len % 64);
        if r == 0 {
            self.blocks.push(0);
        }
        if bit {
            self.blocks[q] |= 1 << r;
        }
        self.len += 1;
    }

    /// Zero-based letter access.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for word of length {}", self.len);
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Letter w_k with 1-based k.
    #[inline]
    pub fn at(&self, k: usize) -> bool {
        assert!(k >= 1, "letters are numbered from 1");
        self.bit(k - 1)
    }

    fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.blocks[i / 64] |= mask;
        } else {
            self.blocks[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// |w|_1
    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Factor w_{i..=j} in 1-based inclusive indexing; empty when j < i.
    pub fn factor(&self, i: usize, j: usize) -> Word {
        if j < i {
            return Word::new();
        }
        assert!(i >= 1 && j <= self.len);
        Word::from_bits((i - 1..j).map(|t| self.bit(t)))
    }

    /// Prefix w_{1:k}.
    pub fn prefix(&self, k: usize) -> Word {
        self.factor(1, k.min(self.len))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for b in other.iter() {
            w.push(b);
        }
        w
    }

    pub fn repeat(&self, times: usize) -> Word {
        let mut w = Word::with_capacity(self.len * times);
        for _ in 0..times {
            for b in self.iter() {
                w.push(b);
            }
        }
        w
    }

    pub fn reversed(&self) -> Word {
        Word::from_bits((0..self.len).rev().map(|i| self.bit(i)))
    }

    pub fn is_palindrome(&self) -> bool {
        (0..self.len / 2).all(|i| self.bit(i) == self.bit(self.len - 1 - i))
    }

    /// Conjugate u(i) = w_{i+1} ... w_n w_1 ... w_i.
    pub fn rotate(&self, i: usize) -> Word {
        let n = self.len;
        if n == 0 {
            return Word::new();
        }
        Word::from_bits((0..n).map(|t| self.bit((t + i) % n)))
    }

    /// First `n` letters of w^ω.
    pub fn periodic_prefix(&self, n: usize) -> Word {
        assert!(!self.is_empty() || n == 0);
        Word::from_bits((0..n).map(|t| self.bit(t % self.len)))
    }

    /// Replace the factor 10 at 1-based positions (j-1, j) by 01.
    pub fn exchange(&mut self, j: usize) -> Result<(), Error> {
        if j < 2 || j > self.len || !self.at(j - 1) || self.at(j) {
            return Err(invalid(format!("no factor 10 ending at position {j} of {self}")));
        }
        self.set(j - 2, false);
        self.set(j - 1, true);
        Ok(())
    }

    /// Prefix 1-counts |w_{1:k}|_1 for k = 0..=n.
    pub fn prefix_ones(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len + 1);
        out.push(0);
        let mut acc = 0;
        for b in self.iter() {
            acc += b as usize;
            out.push(acc);
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        super::lex_cmp(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses strings over {0,1}. `""` and `"ε"` give the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ε" {
            return Ok(Word::new());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(invalid(format!("`{s}` is not a binary word"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word::from_bits)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for word literals in tests and examples.
pub fn w(s: &str) -> Word {
    s.parse().expect("binary literal")
}
