use std::sync::Arc;

use num_traits::{One, Zero};
use perfect_sampler::bits::{bernoulli_exact, dyadic, PrefixBits};
use perfect_sampler::dist::{d_inf, d_max, mixture, residual};
use perfect_sampler::mixing::MixingAnalysis;
use perfect_sampler::rational::{int, rat};
use perfect_sampler::stationary::{check_reversible, is_stationary};
use perfect_sampler::{
    solve_stationary, ChainModel, FiniteDist, Limits, Mode, PerfectSampler, Rational, RationalMatrix, SeededBits,
    StateSpace,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn normalize(weights: &[u32]) -> Vec<Rational> {
    let total: i64 = weights.iter().map(|&w| w as i64).sum();
    weights.iter().map(|&w| rat(w as i64, total)).collect()
}

fn dist_strategy(n: usize) -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec(1u32..20, n).prop_map(|w| FiniteDist::new(normalize(&w)).unwrap())
}

/// Half-lazy chain from positive integer weights; irreducible and aperiodic.
fn lazy_from_weights(n: usize, w: &[u32]) -> RationalMatrix {
    let rows = (0..n)
        .map(|i| {
            let row = normalize(&w[i * n..(i + 1) * n]);
            (0..n)
                .map(|j| {
                    let half = &row[j] / int(2);
                    if i == j { half + rat(1, 2) } else { half }
                })
                .collect()
        })
        .collect();
    RationalMatrix::from_rows(rows).unwrap()
}

fn chain_strategy() -> impl Strategy<Value = RationalMatrix> {
    (2usize..5).prop_flat_map(|n| prop::collection::vec(1u32..9, n * n).prop_map(move |w| lazy_from_weights(n, &w)))
}

/// Reversible chain from symmetric conductances: `P(i,j) = c(i,j)/c(i)`.
fn reversible_strategy() -> impl Strategy<Value = (RationalMatrix, FiniteDist)> {
    (2usize..5).prop_flat_map(|n| {
        prop::collection::vec(1u32..9, n * n).prop_map(move |w| {
            let c = |i: usize, j: usize| w[i.min(j) * n + i.max(j)] as i64;
            let total: Vec<i64> = (0..n).map(|i| (0..n).map(|j| c(i, j)).sum()).collect();
            let rows = (0..n).map(|i| (0..n).map(|j| rat(c(i, j), total[i])).collect()).collect();
            let all: i64 = total.iter().sum();
            let mu = FiniteDist::new(total.iter().map(|&t| rat(t, all)).collect()).unwrap();
            (RationalMatrix::from_rows(rows).unwrap(), mu)
        })
    })
}

fn naive_dinf(p: &RationalMatrix, pi: &FiniteDist, t: u64) -> Rational {
    let n = p.rows();
    let mut acc: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for _ in 0..t {
        acc = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &acc[i][k] * &p.row(k)[j]).sum()).collect()).collect();
    }
    let mut worst = Rational::zero();
    for row in &acc {
        for (x, r) in row.iter().zip(pi.masses()) {
            let d = x / r - Rational::one();
            worst = worst.max(if d < Rational::zero() { -d } else { d });
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        rng_seed: RngSeed::Fixed(0x5eed_2024),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn bernoulli_prefix_masses(num in 0u64..=64, k in 1u32..=12) {
        let p = rat(num as i64, 64).min(Rational::one()) * rat(63, 64) + rat(1, 193);
        let (mut accept, mut reject, mut open) = (Rational::zero(), Rational::zero(), Rational::zero());
        for code in 0..(1u64 << k) {
            let mut bits = PrefixBits::from_code(code, k);
            let y = bernoulli_exact(&p, &mut bits).unwrap();
            let cell = dyadic(1, k);
            if bits.exhausted() {
                open += cell;
            } else if y {
                accept += cell;
            } else {
                reject += cell;
            }
        }
        prop_assert_eq!(&accept + &reject + &open, Rational::one());
        prop_assert!(accept <= p && p <= &accept + &open);
        prop_assert!(open <= dyadic(1, k - 1));
    }

    #[test]
    fn residual_is_the_unique_completion(p in dist_strategy(4), r in dist_strategy(4)) {
        let eps = d_inf(&p, &r).unwrap().max(rat(1, 1000));
        let h = residual(&p, &r, &eps).unwrap();
        prop_assert!(h.masses().iter().all(|m| *m >= Rational::zero()));
        prop_assert_eq!(mixture(&p, &h, &eps), r.masses().to_vec());
        // any other h changes the mixture
        let other = FiniteDist::uniform(4);
        if other != h {
            prop_assert_ne!(mixture(&p, &other, &eps), r.masses().to_vec());
        }
    }

    #[test]
    fn divergence_floors(p in dist_strategy(5), r in dist_strategy(5)) {
        prop_assert!(d_max(&p, &r).unwrap() >= Rational::one());
        prop_assert!(d_inf(&p, &r).unwrap() >= Rational::zero());
        prop_assert_eq!(d_max(&p, &p).unwrap(), Rational::one());
        prop_assert_eq!(d_inf(&p, &p).unwrap(), Rational::zero());
        if p != r {
            prop_assert!(d_max(&p, &r).unwrap() > Rational::one());
            prop_assert!(d_inf(&p, &r).unwrap() > Rational::zero());
        }
    }

    #[test]
    fn stationary_solve_is_exact_and_equivariant(p in chain_strategy(), shift in 0usize..4) {
        let pi = solve_stationary(&p).unwrap().dist;
        prop_assert!(is_stationary(&p, &pi));
        prop_assert_eq!(pi.masses().iter().sum::<Rational>(), Rational::one());
        let n = p.rows();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let relabeled = solve_stationary(&p.permuted(&perm)).unwrap().dist;
        prop_assert_eq!(relabeled, pi.permuted(&perm));
    }

    #[test]
    fn detailed_balance_implies_stationarity((p, mu) in reversible_strategy()) {
        prop_assert!(check_reversible(&p, &mu).unwrap());
        prop_assert_eq!(solve_stationary(&p).unwrap().dist, mu);
    }

    #[test]
    fn distance_ordering_on_random_chains(p in chain_strategy(), t in 1u64..6) {
        let pi = solve_stationary(&p).unwrap().dist;
        let mut a = MixingAnalysis::new(&p, &pi, Limits::default()).unwrap();
        prop_assert!(a.verify_norm_ordering(t).unwrap());
        let d = a.distances(t).unwrap();
        prop_assert_eq!(d.dinf, naive_dinf(&p, &pi, t));
    }

    #[test]
    fn reversible_identity((p, mu) in reversible_strategy(), t in 1u64..5) {
        let lazy = RationalMatrix::from_rows(
            (0..p.rows())
                .map(|i| (0..p.rows()).map(|j| {
                    let half = &p.row(i)[j] / int(2);
                    if i == j { half + rat(1, 2) } else { half }
                }).collect())
                .collect(),
        ).unwrap();
        let mut a = MixingAnalysis::new(&lazy, &mu, Limits::default()).unwrap();
        prop_assert!(a.verify_l2_linf_identity(t).unwrap());
    }

    #[test]
    fn brute_certificates_reverify(p in chain_strategy(), k in 1i64..6) {
        let pi = solve_stationary(&p).unwrap().dist;
        let eps = rat(1, 2 * k);
        let cert = MixingAnalysis::new(&p, &pi, Limits::default()).unwrap().tau_uniform_brute(&eps).unwrap();
        prop_assert!(naive_dinf(&p, &pi, cert.t) <= eps);
        if cert.t > 0 {
            prop_assert!(naive_dinf(&p, &pi, cert.t - 1) > eps);
        }
    }

    #[test]
    fn both_reductions_hit_the_target_exactly(p in chain_strategy(), k in 2i64..6, start in 0usize..4) {
        let chain = Arc::new(ChainModel::from_matrix(StateSpace::indexed(p.rows()), &p).unwrap());
        let start = start % p.rows();
        let eps = rat(1, k);
        let pi = solve_stationary(&p).unwrap().dist;
        for mode in [Mode::Mixture, Mode::Reject] {
            let cfg = perfect_sampler::SamplerConfig {
                mode,
                source: perfect_sampler::CertificateSource::Brute,
                eps: Some(eps.clone()),
                limits: Limits::default(),
            };
            let s = PerfectSampler::build(chain.clone(), start, &cfg).unwrap();
            match mode {
                Mode::Mixture => prop_assert!(s.exact_mixture_identity().unwrap()),
                Mode::Reject => {
                    let law = s.exact_rejection_law().unwrap();
                    let one_plus = Rational::one() + &eps;
                    prop_assert_eq!(law, pi.masses().iter().map(|r| r / &one_plus).collect::<Vec<_>>());
                }
            }
            let a = s.draw_many(300, 9).unwrap();
            prop_assert_eq!(&a, &s.draw_many(300, 9).unwrap());
        }
    }

    #[test]
    fn simulate_replays(p in chain_strategy(), seed in any::<u64>(), t in 0u64..30) {
        let chain = ChainModel::from_matrix(StateSpace::indexed(p.rows()), &p).unwrap();
        let mut a = SeededBits::new(seed);
        let mut b = SeededBits::new(seed);
        prop_assert_eq!(chain.simulate(0, t, &mut a).unwrap(), chain.simulate(0, t, &mut b).unwrap());
        prop_assert_eq!(
            perfect_sampler::BitSource::bits_used(&a),
            perfect_sampler::BitSource::bits_used(&b)
        );
    }
}
