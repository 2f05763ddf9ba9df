//! Exact stationary distributions and detailed-balance checks.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::FiniteDist;
use crate::error::{Error, Result};
use crate::matrix::{RationalMatrix, ScaledMatrix};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryVector {
    pub dist: FiniteDist,
    /// Minimum mass over the support.
    #[serde(with = "crate::rational::serde_pair")]
    pub pi_star: Rational,
}

impl StationaryVector {
    pub fn new(dist: FiniteDist) -> Self {
        let pi_star = dist.min_positive();
        Self { dist, pi_star }
    }
}

/// Solves `πP = π`, `Σπ = 1` exactly.
///
/// Uses fraction-free (Bareiss) elimination on the integer system obtained
/// by clearing the common denominator of `P`; every intermediate division
/// is exact, so entry sizes stay bounded by the minors of the system.
pub fn solve_stationary(p: &RationalMatrix) -> Result<StationaryVector> {
    p.check_stochastic()?;
    let n = p.rows();
    let scaled = ScaledMatrix::from_rational(p);
    let d = scaled.denom().clone();

    // Rows 0..n: column j of (A - dI), i.e. the j-th equation of π(P - I) = 0.
    // Row n: Σ π_i = 1. Column n holds the right-hand side.
    let width = n + 1;
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..n).map(|i| scaled.numer(i, j).clone()).collect();
            row[j] -= &d;
            row.push(BigInt::zero());
            row
        })
        .collect();
    m.push(vec![BigInt::from(1); width]);

    let mut prev = BigInt::from(1);
    for col in 0..n {
        let pivot = (col..=n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Multiplicity {
            rank: col,
            dim: n,
        })?;
        m.swap(col, pivot);
        for r in col + 1..=n {
            if m[r][col].is_zero() {
                // Bareiss update still rescales the row.
                for c in col + 1..width {
                    let v = &m[col][col] * &m[r][c];
                    m[r][c] = v / &prev;
                }
                continue;
            }
            for c in col + 1..width {
                let v = &m[col][col] * &m[r][c] - &m[r][col] * &m[col][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    if !m[n][n].is_zero() {
        return Err(Error::Domain("stationary system is inconsistent".into()));
    }

    let mut pi = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = Rational::from_integer(m[row][n].clone());
        for c in row + 1..n {
            acc -= Rational::from_integer(m[row][c].clone()) * &pi[c];
        }
        pi[row] = acc / Rational::from_integer(m[row][row].clone());
    }
    if let Some(i) = pi.iter().position(|v| v.is_negative()) {
        return Err(Error::Domain(format!("negative stationary mass at {i}")));
    }
    let dist = FiniteDist::new(pi)?;
    debug_assert!(is_stationary(p, &dist));
    Ok(StationaryVector::new(dist))
}

/// Exact check of `μP = μ`.
pub fn is_stationary(p: &RationalMatrix, mu: &FiniteDist) -> bool {
    let n = p.rows();
    if mu.len() != n {
        return false;
    }
    (0..n).all(|j| {
        let s: Rational = (0..n).map(|i| mu.mass(i) * &p[(i, j)]).sum();
        s == *mu.mass(j)
    })
}

/// `π(x)P(x,y) = π(y)P(y,x)` for all pairs, exactly.
pub fn check_reversible(p: &RationalMatrix, pi: &FiniteDist) -> Result<bool> {
    let n = p.rows();
    if !p.is_square() || pi.len() != n {
        return Err(Error::Domain(format!(
            "{}x{} matrix against distribution of length {}",
            p.rows(),
            p.cols(),
            pi.len()
        )));
    }
    for x in 0..n {
        for y in x + 1..n {
            if pi.mass(x) * &p[(x, y)] != pi.mass(y) * &p[(y, x)] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Normalizes nonnegative weights by their sum (the partition function).
pub fn gibbs_from_weights(weights: &[Rational]) -> Result<FiniteDist> {
    if let Some(i) = weights.iter().position(|w| w.is_negative()) {
        return Err(Error::Domain(format!("negative weight at {i}")));
    }
    let z: Rational = weights.iter().sum();
    if z.is_zero() {
        return Err(Error::EmptySupport);
    }
    FiniteDist::new(weights.iter().map(|w| w / &z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[(i64, i64)]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_state() {
        let s = solve_stationary(&RationalMatrix::identity(1)).unwrap();
        assert_eq!(s.dist.masses(), &[int(1)]);
        assert_eq!(s.pi_star, int(1));
    }

    #[test]
    fn two_state_by_hand() {
        let p = m(&[&[(1, 2), (1, 2)], &[(1, 3), (2, 3)]]);
        let s = solve_stationary(&p).unwrap();
        assert_eq!(s.dist.masses(), &[rat(2, 5), rat(3, 5)]);
        assert_eq!(s.pi_star, rat(2, 5));
    }

    #[test]
    fn doubly_stochastic_gives_uniform() {
        let n = 5;
        let mut p = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = if i == j { rat(1, 2) } else { rat(1, 8) };
            }
        }
        let s = solve_stationary(&p).unwrap();
        assert_eq!(s.dist, FiniteDist::uniform(n));
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let err = solve_stationary(&RationalMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, Error::Multiplicity { .. }));
        let bad = m(&[&[(1, 2), (1, 3)], &[(0, 1), (1, 1)]]);
        assert!(matches!(solve_stationary(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn transient_states_get_zero_mass() {
        let p = m(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]);
        let s = solve_stationary(&p).unwrap();
        assert_eq!(s.dist.masses(), &[int(0), int(1)]);
        assert_eq!(s.pi_star, int(1));
    }

    #[test]
    fn reversibility_examples() {
        let sym = m(&[&[(1, 2), (1, 4), (1, 4)], &[(1, 4), (1, 2), (1, 4)], &[(1, 4), (1, 4), (1, 2)]]);
        assert!(check_reversible(&sym, &FiniteDist::uniform(3)).unwrap());
        let cycle = m(&[&[(0, 1), (1, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)]]);
        assert!(!check_reversible(&cycle, &FiniteDist::uniform(3)).unwrap());
        assert!(check_reversible(&cycle, &FiniteDist::uniform(2)).is_err());
    }

    #[test]
    fn gibbs_examples() {
        assert_eq!(gibbs_from_weights(&vec![int(1); 4]).unwrap(), FiniteDist::uniform(4));
        let hardcore = [int(1), int(2), int(2), int(2), int(4)];
        let g = gibbs_from_weights(&hardcore).unwrap();
        assert_eq!(g.masses(), &[rat(1, 11), rat(2, 11), rat(2, 11), rat(2, 11), rat(4, 11)]);
        let doubled: Vec<Rational> = hardcore.iter().map(|w| w * int(2)).collect();
        assert_eq!(gibbs_from_weights(&doubled).unwrap(), g);
        assert!(matches!(gibbs_from_weights(&[int(0), int(0)]), Err(Error::EmptySupport)));
    }

    fn arb_chain(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(proptest::collection::vec(1i64..9, n), n).prop_map(move |w| {
            let rows = w
                .into_iter()
                .map(|r| {
                    let t: i64 = r.iter().sum();
                    r.into_iter().map(|x| rat(x, t)).collect()
                })
                .collect();
            RationalMatrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn solution_is_stationary(p in arb_chain(5)) {
            let s = solve_stationary(&p).unwrap();
            prop_assert!(is_stationary(&p, &s.dist));
        }

        #[test]
        fn relabeling_equivariance(p in arb_chain(4), shift in 0usize..4) {
            let perm: Vec<usize> = (0..4).map(|i| (i * 3 + shift) % 4).collect();
            let a = solve_stationary(&p).unwrap().dist;
            let b = solve_stationary(&p.permuted(&perm)).unwrap().dist;
            prop_assert_eq!(a.permuted(&perm), b);
        }

        #[test]
        fn detailed_balance_implies_stationary(w in proptest::collection::vec(1i64..6, 4)) {
            // Metropolis chain on 4 states against weights w, uniform proposal.
            let n = 4;
            let total: i64 = w.iter().sum();
            let mu = FiniteDist::new(w.iter().map(|&x| rat(x, total)).collect()).unwrap();
            let mut p = RationalMatrix::zeros(n, n);
            for x in 0..n {
                let mut stay = int(1);
                for y in 0..n {
                    if x != y {
                        let acc = std::cmp::min(int(1), rat(w[y], w[x]));
                        let v = acc * rat(1, n as i64);
                        stay -= &v;
                        p[(x, y)] = v;
                    }
                }
                p[(x, x)] = stay;
            }
            prop_assert!(check_reversible(&p, &mu).unwrap());
            prop_assert_eq!(solve_stationary(&p).unwrap().dist, mu);
        }
    }
}
