//! Fair-bit randomness and zero-error coins built on top of it.
//!
//! Every random decision in the crate is made by consuming fair bits, so an
//! output law is an exact function of the bit stream. Rational coins compare
//! the random stream lazily against the binary expansion of the target
//! probability and never round.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A stream of independent fair bits with a consumption counter.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;

    /// Total number of bits handed out so far.
    fn bits_used(&self) -> u64;
}

impl<B: BitSource + ?Sized> BitSource for &mut B {
    fn next_bit(&mut self) -> bool {
        (**self).next_bit()
    }

    fn bits_used(&self) -> u64 {
        (**self).bits_used()
    }
}

/// ChaCha20-backed bit stream; identical seeds replay identical bits.
#[derive(Debug, Clone)]
pub struct SeededBits {
    rng: ChaCha20Rng,
    buffer: u64,
    remaining: u32,
    used: u64,
}

impl SeededBits {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-stream of the same seed, used to give each parallel
    /// worker its own source without losing replay determinism.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            buffer: 0,
            remaining: 0,
            used: 0,
        }
    }
}

impl BitSource for SeededBits {
    fn next_bit(&mut self) -> bool {
        if self.remaining == 0 {
            self.buffer = self.rng.next_u64();
            self.remaining = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.remaining -= 1;
        self.used += 1;
        bit
    }

    fn bits_used(&self) -> u64 {
        self.used
    }
}

/// Replays a fixed bit prefix, then reports exhaustion.
///
/// After the prefix runs out it keeps returning `true` (so every exact
/// sampler terminates) and sets
/// [`PrefixBits::exhausted`]; callers enumerating bit trees treat any outcome
/// reached after exhaustion as undecided.
#[derive(Debug, Clone)]
pub struct PrefixBits {
    bits: Vec<bool>,
    pos: usize,
    exhausted: bool,
}

impl PrefixBits {
    pub fn new(bits: Vec<bool>) -> Self {
        Self {
            bits,
            pos: 0,
            exhausted: false,
        }
    }

    /// The `k`-bit prefix whose bits are the binary digits of `code`,
    /// most significant first.
    pub fn from_code(code: u64, k: u32) -> Self {
        Self::new((0..k).rev().map(|i| (code >> i) & 1 == 1).collect())
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }
}

impl BitSource for PrefixBits {
    fn next_bit(&mut self) -> bool {
        match self.bits.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                b
            }
            None => {
                self.exhausted = true;
                self.pos += 1;
                true
            }
        }
    }

    fn bits_used(&self) -> u64 {
        self.pos as u64
    }
}

/// Returns `true` with probability exactly `p`.
///
/// Reads bits until the first 1; if that happens at position `i`, the answer
/// is the `i`-th binary digit of `p`. Expected consumption is 2 bits. The
/// endpoints 0 and 1 consume nothing.
pub fn bernoulli_exact<B: BitSource + ?Sized>(p: &Rational, bits: &mut B) -> Result<bool> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::Domain(format!("probability {p} outside [0,1]")));
    }
    if p.is_zero() {
        return Ok(false);
    }
    if p.is_one() {
        return Ok(true);
    }
    let denom = p.denom().clone();
    let mut rem = p.numer().clone();
    loop {
        rem <<= 1;
        let digit = rem >= denom;
        if digit {
            rem -= &denom;
        }
        if bits.next_bit() {
            return Ok(digit);
        }
    }
}

/// Cumulative integer weights of a finite distribution, ready for exact
/// interval sampling.
#[derive(Debug, Clone)]
pub struct IntervalSampler {
    /// `cumulative[i]` is the total weight of outcomes `0..i`; last entry is the total.
    cumulative: Vec<BigUint>,
    small: Option<Vec<u64>>,
}

// Keeps `cumulative * 2^m` within u128 for m <= 64.
const SMALL_LIMIT_BITS: u64 = 62;
const SMALL_MAX_DEPTH: u32 = 64;

impl IntervalSampler {
    /// Builds a sampler from nonnegative weights that sum exactly to 1.
    pub fn from_probabilities(weights: &[Rational]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight list".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        let denom = crate::rational::common_denominator(weights);
        let ints: Vec<BigUint> = weights
            .iter()
            .map(|w| {
                (w.numer() * (&denom / w.denom()))
                    .to_biguint()
                    .expect("nonnegative")
            })
            .collect();
        Ok(Self::from_integer_weights(ints))
    }

    fn from_integer_weights(weights: Vec<BigUint>) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = BigUint::zero();
        cumulative.push(acc.clone());
        for w in weights {
            acc += w;
            cumulative.push(acc.clone());
        }
        let small = if acc.bits() <= SMALL_LIMIT_BITS {
            Some(cumulative.iter().map(|c| c.to_u64().unwrap()).collect())
        } else {
            None
        };
        Self { cumulative, small }
    }

    pub fn len(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Draws an index with probability proportional to its weight.
    ///
    /// Refines a dyadic interval `[k/2^m, (k+1)/2^m)` one bit at a time and
    /// stops once it sits inside a single bucket of the cumulative table.
    /// A 1 bit selects the lower half, so for two equal weights the result
    /// is index 0 exactly when the first bit is 1, agreeing with
    /// [`bernoulli_exact`] at `p = 1/2`.
    pub fn sample<B: BitSource + ?Sized>(&self, bits: &mut B) -> usize {
        if self.len() == 1 {
            return 0;
        }
        let mut k: u128 = 0;
        let mut m: u32 = 0;
        if let Some(cum) = &self.small {
            let total = *cum.last().unwrap() as u128;
            while m < SMALL_MAX_DEPTH {
                if let Some(i) = locate_small(cum, total, k, m) {
                    return i;
                }
                k = (k << 1) | u128::from(!bits.next_bit());
                m += 1;
            }
        }
        let mut k = BigUint::from(k);
        loop {
            if let Some(i) = self.locate_big(&k, m) {
                return i;
            }
            k <<= 1;
            if !bits.next_bit() {
                k += 1u32;
            }
            m += 1;
        }
    }

    fn locate_big(&self, k: &BigUint, m: u32) -> Option<usize> {
        let total = self.cumulative.last().unwrap();
        let lo = k * total;
        let hi = (k + 1u32) * total;
        let scaled = |i: usize| &self.cumulative[i] << m;
        // Largest i with cumulative[i] * 2^m <= lo.
        let idx = self.cumulative.partition_point(|c| (c << m) <= lo) - 1;
        let idx = idx.min(self.len() - 1);
        (hi <= scaled(idx + 1)).then_some(idx)
    }
}

fn locate_small(cum: &[u64], total: u128, k: u128, m: u32) -> Option<usize> {
    let lo = k * total;
    let hi = (k + 1) * total;
    let idx = cum.partition_point(|&c| (c as u128) << m <= lo) - 1;
    let idx = idx.min(cum.len() - 2);
    (hi <= (cum[idx + 1] as u128) << m).then_some(idx)
}

/// Returns index `i` with probability exactly `weights[i]`.
pub fn categorical_exact<B: BitSource + ?Sized>(weights: &[Rational], bits: &mut B) -> Result<usize> {
    Ok(IntervalSampler::from_probabilities(weights)?.sample(bits))
}

/// Exact value of `a / 2^k` as a rational, for bit-tree bookkeeping.
pub fn dyadic(a: u64, k: u32) -> Rational {
    Rational::new(BigInt::from(a), BigInt::one() << k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    /// Decided-true, decided-false and undecided mass of `bernoulli_exact`
    /// over every k-bit prefix.
    fn bernoulli_tree(p: &Rational, k: u32) -> (Rational, Rational, Rational) {
        let mut acc = (Rational::zero(), Rational::zero(), Rational::zero());
        let cell = dyadic(1, k);
        for code in 0..(1u64 << k) {
            let mut src = PrefixBits::from_code(code, k);
            let out = bernoulli_exact(p, &mut src).unwrap();
            if src.exhausted() {
                acc.2 += &cell;
            } else if out {
                acc.0 += &cell;
            } else {
                acc.1 += &cell;
            }
        }
        acc
    }

    #[test]
    fn degenerate_coins() {
        let mut src = SeededBits::new(3);
        for _ in 0..100 {
            assert!(!bernoulli_exact(&int(0), &mut src).unwrap());
            assert!(bernoulli_exact(&int(1), &mut src).unwrap());
        }
        assert_eq!(src.bits_used(), 0);
    }

    #[test]
    fn half_coin_is_first_bit() {
        for code in 0..16u64 {
            let mut src = PrefixBits::from_code(code, 4);
            let first = (code >> 3) & 1 == 1;
            let out = bernoulli_exact(&rat(1, 2), &mut src).unwrap();
            if !src.exhausted() {
                assert_eq!(out, first);
            }
        }
    }

    #[test]
    fn third_coin_tree_depth_six() {
        let (yes, no, open) = bernoulli_tree(&rat(1, 3), 6);
        assert_eq!(yes, rat(21, 64));
        assert_eq!(open, rat(1, 64));
        assert_eq!(yes + no + open, int(1));
    }

    #[test]
    fn acceptance_mass_increases_to_p() {
        for p in [rat(1, 3), rat(5, 7), rat(3, 8), rat(999, 1000)] {
            let mut prev = Rational::zero();
            for k in 0..=12 {
                let (yes, no, open) = bernoulli_tree(&p, k);
                assert_eq!(&yes + &no + &open, int(1));
                assert!(yes >= prev && yes <= p);
                assert!(&p - &yes <= open);
                prev = yes;
            }
        }
    }

    #[test]
    fn out_of_range_probability() {
        let mut src = SeededBits::new(0);
        assert!(matches!(bernoulli_exact(&rat(3, 2), &mut src), Err(Error::Domain(_))));
        assert!(matches!(bernoulli_exact(&rat(-1, 2), &mut src), Err(Error::Domain(_))));
    }

    #[test]
    fn categorical_point_mass_and_half() {
        let mut src = SeededBits::new(11);
        for _ in 0..200 {
            assert_eq!(categorical_exact(&[int(1), int(0), int(0)], &mut src).unwrap(), 0);
        }
        let half = [rat(1, 2), rat(1, 2)];
        for seed in 0..200 {
            let a = categorical_exact(&half, &mut SeededBits::new(seed)).unwrap();
            let b = bernoulli_exact(&rat(1, 2), &mut SeededBits::new(seed)).unwrap();
            assert_eq!(a == 0, b);
        }
    }

    #[test]
    fn categorical_rejects_bad_sums() {
        let mut src = SeededBits::new(0);
        let r = categorical_exact(&[rat(1, 2), rat(1, 3)], &mut src);
        assert!(matches!(r, Err(Error::InvalidDistribution(_))));
        let r = categorical_exact(&[rat(3, 2), rat(-1, 2)], &mut src);
        assert!(matches!(r, Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn categorical_frequencies_within_four_sigma() {
        let weights = [rat(1, 6), rat(1, 3), rat(1, 2)];
        let sampler = IntervalSampler::from_probabilities(&weights).unwrap();
        let n = 100_000u64;
        let mut counts = [0u64; 3];
        let mut src = SeededBits::new(20240601);
        for _ in 0..n {
            counts[sampler.sample(&mut src)] += 1;
        }
        for (c, w) in counts.iter().zip([1.0 / 6.0, 1.0 / 3.0, 0.5]) {
            let sd = (n as f64 * w * (1.0 - w)).sqrt();
            assert!((*c as f64 - n as f64 * w).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn big_denominator_path_matches_tree() {
        // Denominator above the u64 fast path forces the BigUint branch.
        let d = BigInt::from(3).pow(50);
        let a = Rational::new(BigInt::one(), d.clone());
        let weights = [a.clone(), Rational::one() - a];
        let sampler = IntervalSampler::from_probabilities(&weights).unwrap();
        assert!(sampler.small.is_none());
        let mut src = SeededBits::new(5);
        let mut zeros = 0;
        for _ in 0..1000 {
            if sampler.sample(&mut src) == 0 {
                zeros += 1;
            }
        }
        assert!(zeros <= 1);
    }

    #[test]
    fn seeded_replay_and_counter() {
        let mut a = SeededBits::new(42);
        let mut b = SeededBits::new(42);
        let xs: Vec<bool> = (0..300).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..300).map(|_| b.next_bit()).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.bits_used(), 300);
        let mut c = SeededBits::with_stream(42, 1);
        let zs: Vec<bool> = (0..300).map(|_| c.next_bit()).collect();
        assert_ne!(xs, zs);
    }
}
