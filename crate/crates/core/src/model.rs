//! Finite state spaces and Markov-chain kernels with rational rows.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::bits::{BitSource, IntervalSampler};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Resource caps shared by the exact computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `|Ω|` for dense matrix operations.
    pub dense_states: usize,
    /// Largest state space a gallery builder will enumerate.
    pub enumeration: usize,
    /// Largest time index for exact matrix powers.
    pub max_time: u64,
    /// Largest bit length of any numerator in an exact matrix power.
    pub max_entry_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            dense_states: 5000,
            enumeration: 1_000_000,
            max_time: 1 << 16,
            max_entry_bits: 1 << 20,
        }
    }
}

impl Limits {
    /// Defaults overridden by `PERFECT_SAMPLER_DENSE_CAP`,
    /// `PERFECT_SAMPLER_ENUM_CAP`, `PERFECT_SAMPLER_MAX_T` and
    /// `PERFECT_SAMPLER_MAX_BITS`.
    pub fn from_env() -> Self {
        fn read<T: std::str::FromStr>(key: &str, default: T) -> T {
            std::env::var(key)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(default)
        }
        let d = Self::default();
        Self {
            dense_states: read("PERFECT_SAMPLER_DENSE_CAP", d.dense_states),
            enumeration: read("PERFECT_SAMPLER_ENUM_CAP", d.enumeration),
            max_time: read("PERFECT_SAMPLER_MAX_T", d.max_time),
            max_entry_bits: read("PERFECT_SAMPLER_MAX_BITS", d.max_entry_bits),
        }
    }
}

/// Bijection between state indices `0..size` and printable labels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Modeling("empty state space".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Modeling(format!("duplicate state label {l:?}")));
            }
        }
        Ok(Self { labels, index })
    }

    /// States labelled by their own index.
    pub fn indexed(size: usize) -> Self {
        Self::new((0..size).map(|i| i.to_string()).collect()).expect("nonempty")
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn encode(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A finite Markov chain: state space, sparse rational rows and an exact
/// one-step simulator per row.
#[derive(Debug, Clone)]
pub struct ChainModel {
    space: StateSpace,
    rows: Vec<Vec<(usize, Rational)>>,
    steppers: Vec<IntervalSampler>,
}

impl ChainModel {
    /// Validates and normalizes rows: duplicates merged, zeros dropped,
    /// entries sorted by target index, each row summing exactly to one.
    pub fn new(space: StateSpace, rows: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        let n = space.size();
        if rows.len() != n {
            return Err(Error::Modeling(format!("{} rows for {n} states", rows.len())));
        }
        let mut clean = Vec::with_capacity(n);
        let mut steppers = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
            for (j, p) in row {
                if j >= n {
                    return Err(Error::Modeling(format!("row {i} targets unknown state {j}")));
                }
                if p.is_negative() {
                    return Err(Error::Domain(format!("negative probability {p} in row {i}")));
                }
                *merged.entry(j).or_insert_with(Rational::zero) += p;
            }
            let entries: Vec<(usize, Rational)> =
                merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            let sum: Rational = entries.iter().map(|(_, p)| p).sum();
            if !sum.is_one() {
                return Err(Error::Domain(format!("row {i} sums to {sum}, not 1")));
            }
            let probs: Vec<Rational> = entries.iter().map(|(_, p)| p.clone()).collect();
            steppers.push(IntervalSampler::from_probabilities(&probs)?);
            clean.push(entries);
        }
        Ok(Self {
            space,
            rows: clean,
            steppers,
        })
    }

    pub fn from_matrix(space: StateSpace, matrix: &RationalMatrix) -> Result<Self> {
        matrix.check_stochastic()?;
        let rows = matrix
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().enumerate().collect())
            .collect();
        Self::new(space, rows)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn probability(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .binary_search_by_key(&j, |(k, _)| *k)
            .map(|pos| self.rows[i][pos].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.size() {
            return Err(Error::Domain(format!("state {i} out of range 0..{}", self.size())));
        }
        Ok(())
    }

    /// One exact transition from `from`.
    pub fn step<B: BitSource + ?Sized>(&self, from: usize, bits: &mut B) -> usize {
        let pick = self.steppers[from].sample(bits);
        self.rows[from][pick].0
    }

    /// `X_t` of the chain started at `X_0 = start`.
    pub fn simulate<B: BitSource + ?Sized>(&self, start: usize, t: u64, bits: &mut B) -> Result<usize> {
        self.check_index(start)?;
        let mut x = start;
        for _ in 0..t {
            x = self.step(x, bits);
        }
        Ok(x)
    }

    /// Dense form of the kernel, refused above `cap` states.
    pub fn transition_matrix(&self, cap: usize) -> Result<RationalMatrix> {
        let n = self.size();
        if n > cap {
            return Err(Error::Resource(format!("{n} states exceed dense cap {cap}")));
        }
        let mut m = RationalMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                m[(i, *j)] = p.clone();
            }
        }
        Ok(m)
    }

    /// Whether every state reaches every other one.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size();
        let reach = |rev: bool| {
            let mut adj = vec![Vec::new(); n];
            for (i, row) in self.rows.iter().enumerate() {
                for (j, _) in row {
                    if rev {
                        adj[*j].push(i);
                    } else {
                        adj[i].push(*j);
                    }
                }
            }
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(false) && reach(true)
    }

    /// Whether some state has positive holding probability.
    pub fn has_self_loop(&self) -> bool {
        (0..self.size()).any(|i| !self.probability(i, i).is_zero())
    }
}
