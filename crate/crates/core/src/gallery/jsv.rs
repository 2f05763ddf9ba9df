//! Single-phase matching chain on the complete bipartite closure of a graph.
//!
//! States are the perfect matchings `𝒫` and the near-perfect matchings
//! `𝒩(u,v)` of `K_{n,n}`. Edges of the input graph have activity 1; the
//! missing ones get a small penalty. With the ideal hole weights
//! `w*(u,v) = λ(𝒫)/λ(𝒩(u,v))` every hole pattern carries the same
//! stationary mass as `𝒫`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GalleryChain, GraphSpec};
use crate::bits::{BitSource, SeededBits};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::sampler::{PerfectSampler, SamplerConfig};

/// A perfect or near-perfect matching; `mate[u]` is the partner of `U[u]`
/// as an index into `V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchingState {
    pub mate: Vec<Option<usize>>,
    /// Unmatched pair, absent for perfect matchings.
    pub hole: Option<(usize, usize)>,
}

impl MatchingState {
    fn from_mates(mate: Vec<Option<usize>>) -> Self {
        let n = mate.len();
        let hole = mate.iter().position(Option::is_none).map(|u| {
            let mut used = vec![false; n];
            for v in mate.iter().flatten() {
                used[*v] = true;
            }
            (u, used.iter().position(|b| !b).expect("one free V vertex"))
        });
        Self { mate, hole }
    }

    pub fn is_perfect(&self) -> bool {
        self.hole.is_none()
    }

    fn label(&self) -> String {
        let body: Vec<String> = self
            .mate
            .iter()
            .map(|m| m.map_or("-".to_string(), |v| v.to_string()))
            .collect();
        match self.hole {
            None => format!("P[{}]", body.join(" ")),
            Some((u, v)) => format!("N({u},{v})[{}]", body.join(" ")),
        }
    }
}

/// The matching chain plus the quantities that define its weights.
#[derive(Debug, Clone)]
pub struct JsvChain {
    pub gallery: GalleryChain,
    pub n: usize,
    pub states: Vec<MatchingState>,
    /// `λ_{u,v}` over `U × V`.
    pub activity: Vec<Vec<Rational>>,
    pub lambda_perfect: Rational,
    /// `λ(𝒩(u,v))` per hole pattern.
    pub lambda_near: Vec<Vec<Rational>>,
    /// Ideal weights `w*`.
    pub ideal_weights: Vec<Vec<Rational>>,
    /// Weights actually used in the kernel.
    pub weights: Vec<Vec<Rational>>,
    /// Perfect matchings using only edges of the input graph.
    pub valid_perfect: Vec<usize>,
}

impl JsvChain {
    fn mass_where(&self, keep: impl Fn(&MatchingState) -> bool) -> Rational {
        self.states
            .iter()
            .zip(self.gallery.declared_pi.masses())
            .filter(|(s, _)| keep(s))
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// `π(𝒫)`.
    pub fn pi_perfect(&self) -> Rational {
        self.mass_where(MatchingState::is_perfect)
    }

    /// `π(𝒩(u,v))`.
    pub fn pi_hole(&self, u: usize, v: usize) -> Rational {
        self.mass_where(|s| s.hole == Some((u, v)))
    }

    /// `π` of the penalty-free perfect matchings.
    pub fn pi_valid_perfect(&self) -> Rational {
        self.valid_perfect
            .iter()
            .map(|&i| self.gallery.declared_pi.mass(i).clone())
            .sum()
    }

    /// `π` conditioned on the valid perfect matchings, in `valid_perfect` order.
    pub fn conditional_on_valid(&self) -> Vec<Rational> {
        let total = self.pi_valid_perfect();
        self.valid_perfect
            .iter()
            .map(|&i| self.gallery.declared_pi.mass(i) / &total)
            .collect()
    }
}

fn matching_weight(activity: &[Vec<Rational>], mate: &[Option<usize>]) -> Rational {
    mate.iter()
        .enumerate()
        .filter_map(|(u, v)| v.map(|v| &activity[u][v]))
        .fold(Rational::one(), |acc, a| acc * a)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn sides(graph: &GraphSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let (u, v) = graph
        .bipartition()
        .ok_or_else(|| Error::Domain("matching chain needs a bipartition".into()))?;
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::Domain(format!("sides of size {} and {} must be equal and nonempty", u.len(), v.len())));
    }
    if u.len() > 6 {
        return Err(Error::Resource(format!("n = {} exceeds the enumeration limit of 6", u.len())));
    }
    Ok((u.to_vec(), v.to_vec()))
}

fn enumerate(n: usize) -> Vec<MatchingState> {
    fn rec(n: usize, used: &mut [bool], holes: usize, mate: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if mate.len() == n {
            out.push(mate.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                mate.push(Some(v));
                rec(n, used, holes, mate, out);
                mate.pop();
                used[v] = false;
            }
        }
        if holes == 0 {
            mate.push(None);
            rec(n, used, 1, mate, out);
            mate.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, &mut vec![false; n], 0, &mut Vec::new(), &mut raw);
    let mut states: Vec<MatchingState> = raw.into_iter().map(MatchingState::from_mates).collect();
    // perfect first, then grouped by hole pattern
    states.sort_by(|a, b| (a.hole, &a.mate).cmp(&(b.hole, &b.mate)));
    states
}

/// Matching chain with the ideal hole weights `w*`. The edge penalty
/// defaults to `1/n!`.
pub fn jsv_matching_chain(graph: &GraphSpec, penalty: Option<Rational>) -> Result<JsvChain> {
    jsv_matching_chain_with_weights(graph, penalty, |_, _, ideal| ideal.clone())
}

/// Matching chain whose hole weights are `choose(u, v, w*(u,v))`.
pub fn jsv_matching_chain_with_weights(
    graph: &GraphSpec,
    penalty: Option<Rational>,
    choose: impl Fn(usize, usize, &Rational) -> Rational,
) -> Result<JsvChain> {
    let (us, vs) = sides(graph)?;
    let n = us.len();
    let penalty = penalty.unwrap_or_else(|| Rational::new(BigInt::one(), factorial(n)));
    if penalty <= Rational::zero() {
        return Err(Error::Domain(format!("edge penalty must be positive, got {penalty}")));
    }
    let activity: Vec<Vec<Rational>> = us
        .iter()
        .map(|&a| {
            vs.iter()
                .map(|&b| if graph.has_edge(a, b) { Rational::one() } else { penalty.clone() })
                .collect()
        })
        .collect();
    let states = enumerate(n);
    let lambdas: Vec<Rational> = states.iter().map(|s| matching_weight(&activity, &s.mate)).collect();
    let mut lambda_perfect = Rational::zero();
    let mut lambda_near = vec![vec![Rational::zero(); n]; n];
    for (s, l) in states.iter().zip(&lambdas) {
        match s.hole {
            None => lambda_perfect += l,
            Some((u, v)) => lambda_near[u][v] += l,
        }
    }
    let ideal_weights: Vec<Vec<Rational>> = lambda_near
        .iter()
        .map(|row| row.iter().map(|l| &lambda_perfect / l).collect())
        .collect();
    let weights: Vec<Vec<Rational>> = (0..n)
        .map(|u| (0..n).map(|v| choose(u, v, &ideal_weights[u][v])).collect())
        .collect();
    if weights.iter().flatten().any(|w| *w <= Rational::zero()) {
        return Err(Error::Domain("hole weights must be positive".into()));
    }
    let big: Vec<Rational> = states
        .iter()
        .zip(&lambdas)
        .map(|(s, l)| match s.hole {
            None => l.clone(),
            Some((u, v)) => l * &weights[u][v],
        })
        .collect();
    let valid_perfect = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_perfect() && s.mate.iter().enumerate().all(|(u, v)| activity[u][v.unwrap()].is_one()))
        .map(|(i, _)| i)
        .collect();

    let index: HashMap<&[Option<usize>], usize> =
        states.iter().enumerate().map(|(i, s)| (s.mate.as_slice(), i)).collect();
    let propose = rat(1, 2 * (n * n) as i64);
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![(i, rat(1, 2))];
            for u in 0..n {
                for v in 0..n {
                    let mut next = s.mate.clone();
                    match s.hole {
                        None if s.mate[u] == Some(v) => next[u] = None,
                        Some((hu, hv)) if (u, v) == (hu, hv) => next[u] = Some(v),
                        Some((hu, hv)) if u == hu && v != hv => {
                            let other = s.mate.iter().position(|m| *m == Some(v)).expect("v matched");
                            next[other] = None;
                            next[u] = Some(v);
                        }
                        Some((hu, hv)) if v == hv && u != hu => next[u] = Some(v),
                        _ => {
                            row.push((i, propose.clone()));
                            continue;
                        }
                    }
                    let j = index[next.as_slice()];
                    let accept = (&big[j] / &big[i]).min(Rational::one());
                    row.push((i, &propose * (Rational::one() - &accept)));
                    row.push((j, &propose * accept));
                }
            }
            row
        })
        .collect();
    let labels = states.iter().map(MatchingState::label).collect();
    let gallery = GalleryChain::assemble(format!("jsv-matching(n={n})"), labels, big, rows)?;
    Ok(JsvChain {
        gallery,
        n,
        states,
        activity,
        lambda_perfect,
        lambda_near,
        ideal_weights,
        weights,
        valid_perfect,
    })
}

/// One output of [`JsvMatchingSampler`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingDraw {
    /// `matching[u]` is the `V`-index matched to `U[u]`.
    pub matching: Vec<usize>,
    pub state: usize,
    /// Position of the matching in [`JsvChain::valid_perfect`].
    pub outcome: usize,
    /// Rejected stationary draws before this one.
    pub restarts: u64,
    pub steps_simulated: u64,
    pub bits_used: u64,
    pub oracle_invoked: bool,
}

/// Exact uniform sampler for the perfect matchings of a bipartite graph:
/// draws from the matching chain's stationary law and keeps only valid
/// perfect matchings.
#[derive(Debug)]
pub struct JsvMatchingSampler {
    pub jsv: JsvChain,
    pub inner: PerfectSampler,
    outcome: HashMap<usize, usize>,
}

impl JsvMatchingSampler {
    pub fn draw<B: BitSource + ?Sized>(&self, bits: &mut B) -> Result<MatchingDraw> {
        let before = bits.bits_used();
        let (mut steps, mut restarts, mut oracle) = (0, 0, false);
        loop {
            let r = self.inner.draw(bits)?;
            steps += r.steps_simulated;
            oracle |= r.oracle_invoked;
            if let Some(&outcome) = self.outcome.get(&r.state) {
                return Ok(MatchingDraw {
                    matching: self.jsv.states[r.state].mate.iter().map(|m| m.unwrap()).collect(),
                    state: r.state,
                    outcome,
                    restarts,
                    steps_simulated: steps,
                    bits_used: bits.bits_used() - before,
                    oracle_invoked: oracle,
                });
            }
            restarts += 1;
        }
    }

    pub fn draw_many(&self, n: u64, seed: u64) -> Result<Vec<MatchingDraw>> {
        const CHUNK: u64 = 1024;
        let parts: Vec<Result<Vec<MatchingDraw>>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut bits = SeededBits::with_stream(seed, c);
                (0..CHUNK.min(n - c * CHUNK)).map(|_| self.draw(&mut bits)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(n as usize);
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }

    /// Probability that one stationary draw is accepted.
    pub fn acceptance_mass(&self) -> Rational {
        self.jsv.pi_valid_perfect()
    }
}

/// Builds the matching chain with default penalty and wraps a perfect
/// sampler around it, started at the first valid perfect matching.
pub fn jsv_perfect_matching_sampler(graph: &GraphSpec, config: &SamplerConfig) -> Result<JsvMatchingSampler> {
    let jsv = jsv_matching_chain(graph, None)?;
    let start = *jsv
        .valid_perfect
        .first()
        .ok_or_else(|| Error::Modeling("graph has no perfect matching".into()))?;
    let inner = PerfectSampler::build(jsv.gallery.chain.clone(), start, config)?;
    let outcome = jsv.valid_perfect.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    Ok(JsvMatchingSampler { jsv, inner, outcome })
}
