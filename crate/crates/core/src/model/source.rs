use nalgebra::{DMatrix, DVector};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

use super::{check_pmf, STOCHASTIC_TOL};
use crate::error::{Error, Result};
use crate::word;
use crate::Symbol;

/// A stationary ergodic source over `X`.
///
/// Only the experiment harness sees this type; the encoder and decoders
/// never take one as an argument.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    Iid {
        pmf: Vec<f64>,
    },
    /// Started from its stationary distribution.
    Markov {
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
    /// Hidden Markov chain on states, observed through `emission[state]`.
    FunctionOfMarkov {
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
        emission: Vec<Symbol>,
        source_size: usize,
    },
}

impl SourceModel {
    pub fn iid(pmf: Vec<f64>) -> Result<Self> {
        check_pmf(&pmf).map_err(Error::InvalidSource)?;
        Ok(Self::Iid { pmf })
    }

    /// Markov source; the chain must be irreducible and aperiodic.
    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        let stationary = checked_chain(&transition, true)?;
        Ok(Self::Markov { transition, stationary })
    }

    /// Markov source whose chain only needs to be irreducible. A periodic
    /// irreducible chain started from its stationary law is still stationary
    /// and ergodic, just not mixing.
    pub fn markov_allow_periodic(transition: Vec<Vec<f64>>) -> Result<Self> {
        let stationary = checked_chain(&transition, false)?;
        Ok(Self::Markov { transition, stationary })
    }

    pub fn function_of_markov(transition: Vec<Vec<f64>>, emission: Vec<Symbol>, source_size: usize) -> Result<Self> {
        let stationary = checked_chain(&transition, true)?;
        if emission.len() != transition.len() {
            return Err(Error::InvalidSource(format!(
                "{} hidden states but {} emission entries",
                transition.len(),
                emission.len()
            )));
        }
        if let Some(&bad) = emission.iter().find(|&&e| e >= source_size) {
            return Err(Error::InvalidSource(format!(
                "emission symbol {bad} outside alphabet of size {source_size}"
            )));
        }
        Ok(Self::FunctionOfMarkov {
            transition,
            stationary,
            emission,
            source_size,
        })
    }

    pub fn source_size(&self) -> usize {
        match self {
            Self::Iid { pmf } => pmf.len(),
            Self::Markov { transition, .. } => transition.len(),
            Self::FunctionOfMarkov { source_size, .. } => *source_size,
        }
    }

    /// Marginal law of a single letter.
    pub fn letter_pmf(&self) -> Vec<f64> {
        match self {
            Self::Iid { pmf } => pmf.clone(),
            Self::Markov { stationary, .. } => stationary.clone(),
            Self::FunctionOfMarkov {
                stationary,
                emission,
                source_size,
                ..
            } => {
                let mut p = vec![0.0; *source_size];
                for (state, &pi) in stationary.iter().enumerate() {
                    p[emission[state]] += pi;
                }
                p
            }
        }
    }

    /// Exact law P_{X^l} of the first `l` letters, indexed by packed word.
    pub fn block_pmf(&self, l: usize) -> Result<Vec<f64>> {
        if l == 0 {
            return Err(Error::InvalidBlock("block length must be positive".into()));
        }
        let radix = self.source_size();
        let count = word::word_count(radix, l)? as usize;
        let mut out = vec![0.0; count];
        let mut buf = vec![0; l];
        for (w, slot) in out.iter_mut().enumerate() {
            word::unpack_into(w as u64, radix, &mut buf);
            *slot = self.word_prob(&buf);
        }
        Ok(out)
    }

    fn word_prob(&self, a: &[Symbol]) -> f64 {
        match self {
            Self::Iid { pmf } => a.iter().map(|&s| pmf[s]).product(),
            Self::Markov { transition, stationary } => {
                let mut p = stationary[a[0]];
                for pair in a.windows(2) {
                    p *= transition[pair[0]][pair[1]];
                }
                p
            }
            Self::FunctionOfMarkov {
                transition,
                stationary,
                emission,
                ..
            } => {
                // forward recursion over hidden states
                let states = transition.len();
                let mut alpha: Vec<f64> = (0..states)
                    .map(|s| if emission[s] == a[0] { stationary[s] } else { 0.0 })
                    .collect();
                for &sym in &a[1..] {
                    let mut next = vec![0.0; states];
                    for (from, &mass) in alpha.iter().enumerate() {
                        if mass == 0.0 {
                            continue;
                        }
                        for (to, slot) in next.iter_mut().enumerate() {
                            if emission[to] == sym {
                                *slot += mass * transition[from][to];
                            }
                        }
                    }
                    alpha = next;
                }
                alpha.iter().sum()
            }
        }
    }

    /// Draws `x^n`; deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Symbol>> {
        if n == 0 {
            return Err(Error::InvalidBlock("sequence length must be positive".into()));
        }
        let weighted = |p: &[f64]| WeightedIndex::new(p).expect("validated distribution");
        match self {
            Self::Iid { pmf } => {
                let dist = weighted(pmf);
                Ok((0..n).map(|_| dist.sample(rng)).collect())
            }
            Self::Markov { transition, stationary } => Ok(walk(transition, stationary, n, rng, &weighted)),
            Self::FunctionOfMarkov {
                transition,
                stationary,
                emission,
                ..
            } => Ok(walk(transition, stationary, n, rng, &weighted)
                .into_iter()
                .map(|s| emission[s])
                .collect()),
        }
    }
}

fn walk<R, F>(transition: &[Vec<f64>], start: &[f64], n: usize, rng: &mut R, weighted: &F) -> Vec<Symbol>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> WeightedIndex<f64>,
{
    let rows: Vec<WeightedIndex<f64>> = transition.iter().map(|r| weighted(r)).collect();
    let mut state = weighted(start).sample(rng);
    let mut out = Vec::with_capacity(n);
    out.push(state);
    for _ in 1..n {
        state = rows[state].sample(rng);
        out.push(state);
    }
    out
}

/// Validates a transition matrix and returns its stationary distribution.
fn checked_chain(transition: &[Vec<f64>], require_aperiodic: bool) -> Result<Vec<f64>> {
    let k = transition.len();
    if k == 0 {
        return Err(Error::InvalidSource("empty transition matrix".into()));
    }
    for (i, row) in transition.iter().enumerate() {
        if row.len() != k {
            return Err(Error::InvalidSource(format!("transition row {i} is not length {k}")));
        }
        check_pmf(row).map_err(|e| Error::InvalidSource(format!("transition row {i}: {e}")))?;
    }
    if !is_irreducible(transition) {
        return Err(Error::InvalidSource("transition matrix is reducible".into()));
    }
    if require_aperiodic {
        let period = chain_period(transition);
        if period != 1 {
            return Err(Error::InvalidSource(format!("chain is periodic with period {period}")));
        }
    }
    stationary_distribution(transition)
}

fn reachable(transition: &[Vec<f64>], from: usize, forward: bool) -> Vec<bool> {
    let k = transition.len();
    let mut seen = vec![false; k];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        for v in 0..k {
            let edge = if forward { transition[u][v] } else { transition[v][u] };
            if edge > 0.0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

pub(crate) fn is_irreducible(transition: &[Vec<f64>]) -> bool {
    reachable(transition, 0, true).iter().all(|&b| b) && reachable(transition, 0, false).iter().all(|&b| b)
}

/// Period of an irreducible chain: gcd over edges u -> v of
/// `level(u) + 1 - level(v)` for BFS levels from state 0.
pub(crate) fn chain_period(transition: &[Vec<f64>]) -> usize {
    let k = transition.len();
    let mut level = vec![usize::MAX; k];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if transition[u][v] > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..k {
        for v in 0..k {
            if transition[u][v] > 0.0 && level[u] != usize::MAX && level[v] != usize::MAX {
                let diff = (level[u] as isize + 1 - level[v] as isize).unsigned_abs();
                g = gcd(g, diff);
            }
        }
    }
    g
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Solves `pi T = pi`, `sum pi = 1` by replacing one balance equation with
/// the normalization row.
fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = transition.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            // row i of (T^T - I)
            a[(i, j)] = transition[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidSource("stationary system is singular".into()))?;
    let mut pi: Vec<f64> = pi.iter().map(|&v| v.max(0.0)).collect();
    let sum: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= sum);
    for j in 0..k {
        let moved: f64 = (0..k).map(|i| pi[i] * transition[i][j]).sum();
        if (moved - pi[j]).abs() > STOCHASTIC_TOL * 10.0 * k as f64 {
            return Err(Error::InvalidSource(format!(
                "stationary solve residual {} exceeds tolerance",
                (moved - pi[j]).abs()
            )));
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_iid() {
        let src = SourceModel::iid(vec![1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(src.sample(5, &mut rng).unwrap(), vec![0; 5]);
    }

    #[test]
    fn always_switching_chain_alternates() {
        let t = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(SourceModel::markov(t.clone()).is_err());
        let src = SourceModel::markov_allow_periodic(t).unwrap();
        assert_eq!(src.letter_pmf(), vec![0.5, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = src.sample(9, &mut rng).unwrap();
        for pair in x.windows(2) {
            assert_ne!(pair[0], pair[1]);
        }
    }

    #[test]
    fn bernoulli_frequency() {
        let src = SourceModel::iid(vec![0.7, 0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let ones = src.sample(n, &mut rng).unwrap().iter().filter(|&&s| s == 1).count();
        let f = ones as f64 / n as f64;
        assert!((f - 0.3).abs() <= 0.01, "frequency {f}");
    }

    #[test]
    fn rejects_reducible_and_malformed() {
        assert!(SourceModel::markov(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).is_err());
        assert!(SourceModel::markov(vec![vec![0.9, 0.2], vec![0.5, 0.5]]).is_err());
        assert!(SourceModel::iid(vec![0.5, 0.6]).is_err());
        assert!(SourceModel::function_of_markov(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![0, 2], 2).is_err());
    }

    #[test]
    fn period_detection() {
        let cycle3 = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        assert_eq!(chain_period(&cycle3), 3);
        let lazy = vec![vec![0.1, 0.9, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        assert_eq!(chain_period(&lazy), 1);
    }

    #[test]
    fn stationary_solves_balance() {
        let src = SourceModel::markov(vec![vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        let pi = src.letter_pmf();
        assert!((pi[0] - 0.75).abs() < 1e-12);
        assert!((pi[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn block_pmf_sums_to_one_and_is_consistent() {
        let hmm = SourceModel::function_of_markov(
            vec![vec![0.8, 0.2, 0.0], vec![0.0, 0.5, 0.5], vec![0.4, 0.0, 0.6]],
            vec![0, 1, 1],
            2,
        )
        .unwrap();
        for l in 1..=4 {
            let p = hmm.block_pmf(l).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // marginalizing the last letter of P_{X^2} gives P_{X^1}
        let p2 = hmm.block_pmf(2).unwrap();
        let p1 = hmm.block_pmf(1).unwrap();
        for a in 0..2 {
            assert!((p2[2 * a] + p2[2 * a + 1] - p1[a]).abs() < 1e-12);
        }
        assert_eq!(p1, hmm.letter_pmf());
    }

    #[test]
    fn markov_marginal_matches_stationary() {
        let src = SourceModel::markov(vec![vec![0.6, 0.4], vec![0.2, 0.8]]).unwrap();
        let pi = src.letter_pmf();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let x = src.sample(n, &mut rng).unwrap();
        let f = x.iter().filter(|&&s| s == 1).count() as f64 / n as f64;
        // correlated draws; loose bound on the mean
        assert!((f - pi[1]).abs() < 0.02);
    }
}
