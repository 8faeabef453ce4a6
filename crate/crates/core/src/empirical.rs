//! Non-overlapping and overlapping empirical distributions of a sequence.
//!
//! Counts are exact integers keyed by packed word (see [`crate::word`]), so
//! the identity `(n-l+1) p_l(a) = sum_s floor((n-s)/l) q_{l;s}(a)` holds with
//! zero tolerance on the count tables.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::word;
use crate::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Disjoint blocks starting at offset `s`.
    Shift(usize),
    /// Every length-`l` window.
    Overlapping,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub block_len: usize,
    pub window: Window,
    radix: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn count(&self, word: u64) -> u64 {
        self.counts.get(&word).copied().unwrap_or(0)
    }

    /// Nonzero `(word, count)` pairs in lexicographic order.
    pub fn counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    pub fn prob(&self, word: u64) -> f64 {
        self.count(word) as f64 / self.total as f64
    }

    /// Dense pmf over all `radix^l` words.
    pub fn to_pmf(&self) -> Result<Vec<f64>> {
        let size = word::word_count(self.radix, self.block_len)? as usize;
        let mut pmf = vec![0.0; size];
        for (w, c) in self.counts() {
            pmf[w as usize] = c as f64 / self.total as f64;
        }
        Ok(pmf)
    }

    /// `sum_a q(a) values(a)` with `values` indexed by packed word.
    pub fn weighted_average(&self, values: &[f64]) -> f64 {
        let sum: f64 = self.counts.iter().map(|(&w, &c)| c as f64 * values[w as usize]).sum();
        sum / self.total as f64
    }
}

impl fmt::Display for EmpiricalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.window {
            Window::Shift(s) => format!("q[l={}; s={s}]", self.block_len),
            Window::Overlapping => format!("p[l={}]", self.block_len),
        };
        write!(f, "{label} total={}", self.total)?;
        let mut buf = vec![0; self.block_len];
        for (w, c) in self.counts() {
            word::unpack_into(w, self.radix, &mut buf);
            let letters: Vec<String> = buf.iter().map(|s| s.to_string()).collect();
            write!(f, " {}:{c}", letters.join("."))?;
        }
        Ok(())
    }
}

fn check_sequence(x: &[Symbol], radix: usize, l: usize) -> Result<()> {
    if l == 0 || l > x.len() {
        return Err(Error::InvalidBlock(format!(
            "block length {l} must satisfy 1 <= l <= n = {}",
            x.len()
        )));
    }
    word::word_count(radix, l)?;
    if let Some(&symbol) = x.iter().find(|&&s| s >= radix) {
        return Err(Error::SymbolOutOfAlphabet { symbol, size: radix });
    }
    Ok(())
}

/// Number of complete blocks `floor((n - s) / l)` at offset `s`.
pub fn block_count(n: usize, l: usize, s: usize) -> usize {
    n.saturating_sub(s) / l
}

/// q_{l;s}: the type of the blocks `x[s + i l .. s + (i+1) l]` for
/// `0 <= i < floor((n-s)/l)`.
pub fn nonoverlapping(x: &[Symbol], radix: usize, l: usize, s: usize) -> Result<EmpiricalDistribution> {
    check_sequence(x, radix, l)?;
    if s >= l {
        return Err(Error::InvalidBlock(format!("shift {s} must be below block length {l}")));
    }
    let blocks = block_count(x.len(), l, s);
    if blocks == 0 {
        return Err(Error::InvalidBlock(format!(
            "no complete block of length {l} at shift {s} in n = {}",
            x.len()
        )));
    }
    let mut counts = BTreeMap::new();
    for block in x[s..s + blocks * l].chunks_exact(l) {
        *counts.entry(word::pack(block, radix)).or_insert(0) += 1;
    }
    Ok(EmpiricalDistribution {
        block_len: l,
        window: Window::Shift(s),
        radix,
        counts,
        total: blocks as u64,
    })
}

/// p_l: the type of all `n - l + 1` sliding windows.
pub fn overlapping(x: &[Symbol], radix: usize, l: usize) -> Result<EmpiricalDistribution> {
    check_sequence(x, radix, l)?;
    let mut counts = BTreeMap::new();
    for w in x.windows(l) {
        *counts.entry(word::pack(w, radix)).or_insert(0) += 1;
    }
    Ok(EmpiricalDistribution {
        block_len: l,
        window: Window::Overlapping,
        radix,
        counts,
        total: (x.len() - l + 1) as u64,
    })
}
