//! Perfect samplers built from an approximate Markov-chain sampler plus
//! exact (slow) oracles for its output law and for the target.
//!
//! Two reductions are provided:
//!
//! * [`perfect_sample_mixture`] writes the target as
//!   `π = p/(1+ε) + ε·h/(1+ε)` where `p` is the law of `X_t`. With
//!   probability `1/(1+ε)` it returns `X_t`; otherwise it computes the
//!   residual `h` exactly and samples it.
//! * [`perfect_sample_reject`] proposes `X_t` and accepts with probability
//!   `π(x)/((1+ε)p(x))`, split into a cheap coin `(1−ε)/(1+ε)` and, only when
//!   that fails, an exact correction coin.
//!
//! The mixture reduction needs `D∞(t) ≤ ε`. The rejection reduction needs
//! `π(x)/p(x) ∈ [1−ε, 1+ε]`, which `D∞(t) ≤ ε` alone does not give (it
//! allows `π/p` up to `1/(1−ε)`), so it certifies `D∞(t) ≤ ε/(1+ε)`
//! instead; see [`proposal_tolerance`]. When the certificate behind `t` is wrong the
//! expensive branch detects it and raises [`Error::CertificateViolation`]
//! instead of returning a biased sample.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{bernoulli_exact, BitSource, IntervalSampler, SeededBits};
use crate::dist::{mixture, residual, FiniteDist};
use crate::error::{Error, Result};
use crate::mixing::{
    output_distribution, spectral_gap_estimate, tau_from_ell1, tau_from_gap, MixingAnalysis,
    MixingCertificate,
};
use crate::model::{ChainModel, Limits};
use crate::rational::{rat, Rational};
use crate::stationary::{check_reversible, solve_stationary, StationaryVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Mixture,
    Reject,
}

/// Which path produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Returned the simulated state without consulting any oracle.
    Cheap,
    /// Sampled the exact residual distribution.
    ExpensiveMixture,
    /// Accepted by the exact correction coin.
    ExpensiveRejectAccept,
    /// Accepted by the cheap coin after at least one rejected proposal.
    RejectRetry,
}

impl Branch {
    pub fn is_expensive(self) -> bool {
        self != Branch::Cheap
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub state: usize,
    pub branch: Branch,
    pub steps_simulated: u64,
    pub bits_used: u64,
    pub oracle_invoked: bool,
    /// Proposals drawn; always 1 in mixture mode.
    pub iterations: u64,
}

/// The approximate sampler `X_t` from a fixed start, with its claimed `ε`.
#[derive(Debug, Clone)]
pub struct ApproxSamplerSpec {
    pub chain: Arc<ChainModel>,
    pub start: usize,
    pub t: u64,
    pub eps: Rational,
}

impl ApproxSamplerSpec {
    pub fn new(chain: Arc<ChainModel>, start: usize, certificate: &MixingCertificate) -> Result<Self> {
        if start >= chain.size() {
            return Err(Error::Domain(format!("start {start} out of range")));
        }
        Ok(Self {
            chain,
            start,
            t: certificate.t,
            eps: certificate.eps.clone(),
        })
    }
}

struct ResidualTable {
    dist: FiniteDist,
    sampler: IntervalSampler,
}

/// Lazily computed exact oracles. Each slot is filled at most once and the
/// first successful writer wins.
pub struct OracleCache {
    limits: Limits,
    stationary: OnceLock<StationaryVector>,
    output: OnceLock<FiniteDist>,
    residual: OnceLock<ResidualTable>,
    entries: Mutex<HashMap<usize, (Rational, Rational)>>,
}

impl std::fmt::Debug for OracleCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleCache")
            .field("stationary", &self.stationary.get().is_some())
            .field("output", &self.output.get().is_some())
            .field("residual", &self.residual.get().is_some())
            .finish()
    }
}

fn get_or_try<T>(cell: &OnceLock<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = init()?;
    Ok(cell.get_or_init(|| v))
}

impl OracleCache {
    pub fn new(limits: Limits) -> Self {
        Self {
            limits,
            stationary: OnceLock::new(),
            output: OnceLock::new(),
            residual: OnceLock::new(),
            entries: Mutex::new(HashMap::new()),
        }
    }

    /// Target oracle: exact `π` by elimination on the dense kernel.
    pub fn stationary(&self, chain: &ChainModel) -> Result<&StationaryVector> {
        get_or_try(&self.stationary, || {
            solve_stationary(&chain.transition_matrix(self.limits.dense_states)?)
        })
    }

    /// Output-law oracle: the exact row `1_start · P^t`.
    pub fn output_dist(&self, spec: &ApproxSamplerSpec) -> Result<&FiniteDist> {
        get_or_try(&self.output, || {
            output_distribution(&spec.chain, spec.start, spec.t, &self.limits)
        })
    }

    /// Exact residual `h`; fails loudly if the certificate was false.
    pub fn residual(&self, spec: &ApproxSamplerSpec) -> Result<&FiniteDist> {
        Ok(&self.residual_table(spec)?.dist)
    }

    fn residual_table(&self, spec: &ApproxSamplerSpec) -> Result<&ResidualTable> {
        get_or_try(&self.residual, || {
            let pi = &self.stationary(&spec.chain)?.dist;
            let p = self.output_dist(spec)?;
            let dist = residual(p, pi, &spec.eps)?;
            let sampler = IntervalSampler::from_probabilities(dist.masses())?;
            Ok(ResidualTable { dist, sampler })
        })
    }

    /// `(π(x), p(x))` for a single state.
    pub fn entry(&self, spec: &ApproxSamplerSpec, x: usize) -> Result<(Rational, Rational)> {
        if let Some(v) = self.entries.lock().unwrap().get(&x) {
            return Ok(v.clone());
        }
        let r = self.stationary(&spec.chain)?.dist.mass(x).clone();
        let p = self.output_dist(spec)?.mass(x).clone();
        self.entries.lock().unwrap().insert(x, (r.clone(), p.clone()));
        Ok((r, p))
    }

    pub fn is_warm(&self) -> bool {
        self.stationary.get().is_some() && self.output.get().is_some()
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// One draw of the mixture reduction. The output law is exactly `π`.
pub fn perfect_sample_mixture<B: BitSource + ?Sized>(
    spec: &ApproxSamplerSpec,
    oracles: &OracleCache,
    bits: &mut B,
) -> Result<SampleReport> {
    check_eps(&spec.eps)?;
    let before = bits.bits_used();
    let cheap = Rational::one() / (Rational::one() + &spec.eps);
    if bernoulli_exact(&cheap, bits)? {
        let state = spec.chain.simulate(spec.start, spec.t, bits)?;
        return Ok(SampleReport {
            state,
            branch: Branch::Cheap,
            steps_simulated: spec.t,
            bits_used: bits.bits_used() - before,
            oracle_invoked: false,
            iterations: 1,
        });
    }
    let table = oracles.residual_table(spec)?;
    let state = table.sampler.sample(bits);
    Ok(SampleReport {
        state,
        branch: Branch::ExpensiveMixture,
        steps_simulated: 0,
        bits_used: bits.bits_used() - before,
        oracle_invoked: true,
        iterations: 1,
    })
}

/// Probability of the correction coin, `(1/(2ε))·(r/p − (1−ε))`, checked
/// to lie in `[0,1]`.
pub fn correction_probability(x: usize, r: &Rational, p: &Rational, eps: &Rational) -> Result<Rational> {
    if p.is_zero() {
        return Err(Error::CertificateViolation {
            state: x,
            detail: format!("approximate sampler gives zero mass to a state with target mass {r}"),
        });
    }
    let one = Rational::one();
    let a = (r / p - (&one - eps)) / (Rational::from_integer(BigInt::from(2)) * eps);
    if a.is_negative() || a > one {
        return Err(Error::CertificateViolation {
            state: x,
            detail: format!("correction probability {a} outside [0,1]"),
        });
    }
    Ok(a)
}

/// One draw of the rejection reduction; requires `ε ≤ 1/2`.
pub fn perfect_sample_reject<B: BitSource + ?Sized>(
    spec: &ApproxSamplerSpec,
    oracles: &OracleCache,
    bits: &mut B,
) -> Result<SampleReport> {
    check_eps(&spec.eps)?;
    if spec.eps > rat(1, 2) {
        return Err(Error::Domain(format!("rejection reduction needs eps <= 1/2, got {}", spec.eps)));
    }
    let before = bits.bits_used();
    let one = Rational::one();
    let cheap = (&one - &spec.eps) / (&one + &spec.eps);
    let mut iterations = 0u64;
    let mut oracle_invoked = false;
    loop {
        iterations += 1;
        let x = spec.chain.simulate(spec.start, spec.t, bits)?;
        let accepted = if bernoulli_exact(&cheap, bits)? {
            Some(if oracle_invoked { Branch::RejectRetry } else { Branch::Cheap })
        } else {
            oracle_invoked = true;
            let (r, p) = oracles.entry(spec, x)?;
            let a = correction_probability(x, &r, &p, &spec.eps)?;
            bernoulli_exact(&a, bits)?.then_some(Branch::ExpensiveRejectAccept)
        };
        if let Some(branch) = accepted {
            return Ok(SampleReport {
                state: x,
                branch,
                steps_simulated: iterations * spec.t,
                bits_used: bits.bits_used() - before,
                oracle_invoked,
                iterations,
            });
        }
    }
}

/// Exact check that `p/(1+ε) + ε·h/(1+ε) = π` entrywise.
pub fn mixture_identity(p: &FiniteDist, pi: &FiniteDist, eps: &Rational) -> Result<bool> {
    let h = residual(p, pi, eps)?;
    Ok(mixture(p, &h, eps) == pi.masses())
}

/// Per-iteration return mass of every state under the rejection reduction,
/// `p(x)·((1−ε)/(1+ε) + (2ε/(1+ε))·a(x))`.
pub fn rejection_iteration_law(p: &FiniteDist, pi: &FiniteDist, eps: &Rational) -> Result<Vec<Rational>> {
    let one = Rational::one();
    let one_plus = &one + eps;
    let cheap = (&one - eps) / &one_plus;
    let expensive = Rational::from_integer(BigInt::from(2)) * eps / &one_plus;
    (0..p.len())
        .map(|x| {
            let (px, rx) = (p.mass(x), pi.mass(x));
            if px.is_zero() {
                if rx.is_zero() {
                    return Ok(Rational::zero());
                }
                return correction_probability(x, rx, px, eps).map(|_| Rational::zero());
            }
            let a = correction_probability(x, rx, px, eps)?;
            Ok(px * (&cheap + &expensive * a))
        })
        .collect()
}

/// Where the simulation length comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateSource {
    /// Exact brute-force uniform mixing time.
    Brute,
    /// Spectral-gap bound using the floating-point gap estimate.
    Gap,
    /// ℓ1 bound using the exact quarter-mixing time.
    Ell1,
    /// Caller asserts `D∞(t) ≤ ε` for this `t`.
    User(u64),
}

#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub mode: Mode,
    pub source: CertificateSource,
    /// Overrides the default `1/|Ω|⁴`.
    pub eps: Option<Rational>,
    pub limits: Limits,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Mixture,
            source: CertificateSource::Brute,
            eps: None,
            limits: Limits::from_env(),
        }
    }
}

/// `1/|Ω|⁴`.
pub fn default_eps(states: usize) -> Rational {
    let n = BigInt::from(states);
    Rational::new(BigInt::one(), n.pow(4))
}

/// `eps`, or `1/|Ω|⁴` clamped to `1/2` in rejection mode.
pub fn effective_eps(states: usize, mode: Mode, eps: Option<Rational>) -> Rational {
    let eps = eps.unwrap_or_else(|| default_eps(states));
    if mode == Mode::Reject && eps > rat(1, 2) && eps == default_eps(states) {
        // only a one-state chain lands here
        return rat(1, 2);
    }
    eps
}

/// `D∞` bound a sampler with coin parameter `eps` must certify: `eps` for
/// the mixture reduction, `eps/(1+eps)` for rejection.
pub fn proposal_tolerance(mode: Mode, eps: &Rational) -> Rational {
    match mode {
        Mode::Mixture => eps.clone(),
        Mode::Reject => eps / (Rational::one() + eps),
    }
}

/// Inverse of [`proposal_tolerance`]: the coin parameter a certificate
/// with bound `tolerance` supports.
pub fn coin_eps(mode: Mode, tolerance: &Rational) -> Result<Rational> {
    check_eps(tolerance)?;
    match mode {
        Mode::Mixture => Ok(tolerance.clone()),
        Mode::Reject if *tolerance < Rational::one() => Ok(tolerance / (Rational::one() - tolerance)),
        Mode::Reject => Err(Error::Domain(format!("rejection reduction needs a bound below 1, got {tolerance}"))),
    }
}

/// Mixing certificate for `ε` from the chosen source.
pub fn certify(
    chain: &ChainModel,
    stationary: &StationaryVector,
    source: &CertificateSource,
    eps: &Rational,
    limits: &Limits,
) -> Result<MixingCertificate> {
    match *source {
        CertificateSource::User(t) => Ok(MixingCertificate::user(t, eps.clone())),
        CertificateSource::Brute => {
            let p = chain.transition_matrix(limits.dense_states)?;
            MixingAnalysis::new(&p, &stationary.dist, *limits)?.tau_uniform_brute(eps)
        }
        CertificateSource::Gap => {
            let p = chain.transition_matrix(limits.dense_states)?;
            let gap = spectral_gap_estimate(&p, &stationary.dist)?;
            tau_from_gap(gap.gamma_star, &stationary.pi_star, eps)
        }
        CertificateSource::Ell1 => {
            let p = chain.transition_matrix(limits.dense_states)?;
            let quarter = MixingAnalysis::new(&p, &stationary.dist, *limits)?.tau_l1_brute(&rat(1, 4))?;
            tau_from_ell1(quarter, &stationary.pi_star, eps)
        }
    }
}

/// Bound accepted by [`main_theorem_sampler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingBound {
    /// Trusted `T` with `D1(T) ≤ 1/4`.
    QuarterTime(u64),
    /// Trusted absolute spectral gap of a reversible chain.
    SpectralGap(f64),
}

/// Reusable perfect sampler for the stationary law of a chain.
#[derive(Debug)]
pub struct PerfectSampler {
    spec: ApproxSamplerSpec,
    mode: Mode,
    certificate: MixingCertificate,
    cache: OracleCache,
}

const CHUNK: u64 = 1024;

impl PerfectSampler {
    /// Wires a sampler around an existing certificate without auditing it.
    /// In rejection mode a bound `δ` yields coin parameter `δ/(1−δ)`.
    pub fn from_certificate(
        chain: Arc<ChainModel>,
        start: usize,
        mode: Mode,
        certificate: MixingCertificate,
        limits: Limits,
    ) -> Result<Self> {
        let mut spec = ApproxSamplerSpec::new(chain, start, &certificate)?;
        spec.eps = coin_eps(mode, &certificate.eps)?;
        if mode == Mode::Reject && spec.eps > rat(1, 2) {
            return Err(Error::Domain(format!("rejection reduction needs eps <= 1/2, got {}", spec.eps)));
        }
        Ok(Self {
            spec,
            mode,
            certificate,
            cache: OracleCache::new(limits),
        })
    }

    /// Screens the chain for a unique stationary law, picks `ε` (default
    /// `1/|Ω|⁴`), obtains a certificate from `config.source` and wires the
    /// oracles.
    pub fn build(chain: Arc<ChainModel>, start: usize, config: &SamplerConfig) -> Result<Self> {
        let eps = effective_eps(chain.size(), config.mode, config.eps.clone());
        let cache = OracleCache::new(config.limits);
        let stationary = cache.stationary(&chain)?.clone();
        let tolerance = proposal_tolerance(config.mode, &eps);
        let certificate = certify(&chain, &stationary, &config.source, &tolerance, &config.limits)?;
        let mut sampler = Self::from_certificate(chain, start, config.mode, certificate, config.limits)?;
        sampler.cache = cache;
        Ok(sampler)
    }

    pub fn draw<B: BitSource + ?Sized>(&self, bits: &mut B) -> Result<SampleReport> {
        match self.mode {
            Mode::Mixture => perfect_sample_mixture(&self.spec, &self.cache, bits),
            Mode::Reject => perfect_sample_reject(&self.spec, &self.cache, bits),
        }
    }

    /// `n` draws split into fixed chunks, chunk `i` using stream `i` of
    /// `seed`. Output is identical regardless of thread count.
    pub fn draw_many(&self, n: u64, seed: u64) -> Result<Vec<SampleReport>> {
        let chunks = n.div_ceil(CHUNK);
        let parts: Vec<Result<Vec<SampleReport>>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut bits = SeededBits::with_stream(seed, c);
                let len = CHUNK.min(n - c * CHUNK);
                (0..len).map(|_| self.draw(&mut bits)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(n as usize);
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    pub fn spec(&self) -> &ApproxSamplerSpec {
        &self.spec
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn certificate(&self) -> &MixingCertificate {
        &self.certificate
    }

    pub fn eps(&self) -> &Rational {
        &self.spec.eps
    }

    pub fn t(&self) -> u64 {
        self.spec.t
    }

    pub fn cache(&self) -> &OracleCache {
        &self.cache
    }

    pub fn stationary(&self) -> Result<&StationaryVector> {
        self.cache.stationary(&self.spec.chain)
    }

    pub fn output_dist(&self) -> Result<&FiniteDist> {
        self.cache.output_dist(&self.spec)
    }

    /// Deterministic proof that the mixture reduction outputs `π`.
    pub fn exact_mixture_identity(&self) -> Result<bool> {
        mixture_identity(self.output_dist()?, &self.stationary()?.dist, &self.spec.eps)
    }

    /// Per-iteration return masses of the rejection reduction.
    pub fn exact_rejection_law(&self) -> Result<Vec<Rational>> {
        rejection_iteration_law(self.output_dist()?, &self.stationary()?.dist, &self.spec.eps)
    }
}

/// `mc_perfect_sampler`: the Markov-chain instantiation with a chosen
/// certificate source.
pub fn mc_perfect_sampler(
    chain: Arc<ChainModel>,
    start: usize,
    mode: Mode,
    source: CertificateSource,
) -> Result<PerfectSampler> {
    PerfectSampler::build(
        chain,
        start,
        &SamplerConfig {
            mode,
            source,
            ..SamplerConfig::default()
        },
    )
}

/// Sampler driven by a trusted mixing bound: `t` follows from the ℓ1 or
/// spectral-gap formula at `ε = 1/|Ω|⁴`.
pub fn main_theorem_sampler(
    chain: Arc<ChainModel>,
    start: usize,
    mode: Mode,
    bound: MixingBound,
    limits: Limits,
) -> Result<PerfectSampler> {
    let eps = proposal_tolerance(mode, &effective_eps(chain.size(), mode, None));
    let cache = OracleCache::new(limits);
    let stationary = cache.stationary(&chain)?.clone();
    let certificate = match bound {
        MixingBound::QuarterTime(t) => tau_from_ell1(t, &stationary.pi_star, &eps)?,
        MixingBound::SpectralGap(gamma) => {
            let p = chain.transition_matrix(limits.dense_states)?;
            if !check_reversible(&p, &stationary.dist)? {
                return Err(Error::Domain("spectral-gap route needs a reversible chain".into()));
            }
            tau_from_gap(gamma, &stationary.pi_star, &eps)?
        }
    };
    let mut sampler = PerfectSampler::from_certificate(chain, start, mode, certificate, limits)?;
    sampler.cache = cache;
    Ok(sampler)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateSpace;
    use crate::rational::int;

    fn lazy_complete(n: usize) -> Arc<ChainModel> {
        let off = rat(1, 2 * (n as i64 - 1));
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (j, if i == j { rat(1, 2) } else { off.clone() }))
                    .collect()
            })
            .collect();
        Arc::new(ChainModel::new(StateSpace::indexed(n), rows).unwrap())
    }

    fn single() -> Arc<ChainModel> {
        Arc::new(ChainModel::new(StateSpace::indexed(1), vec![vec![(0, int(1))]]).unwrap())
    }

    fn cert(t: u64, eps: Rational) -> MixingCertificate {
        MixingCertificate::user(t, eps)
    }

    #[test]
    fn one_state_chain() {
        let s = PerfectSampler::from_certificate(single(), 0, Mode::Mixture, cert(0, rat(1, 3)), Limits::default())
            .unwrap();
        let mut bits = SeededBits::new(1);
        for _ in 0..50 {
            assert_eq!(s.draw(&mut bits).unwrap().state, 0);
        }
        let s = PerfectSampler::from_certificate(single(), 0, Mode::Reject, cert(0, rat(1, 4)), Limits::default())
            .unwrap();
        assert_eq!(*s.eps(), rat(1, 3));
        assert_eq!(s.exact_rejection_law().unwrap(), vec![rat(3, 4)]);
        for _ in 0..50 {
            let r = s.draw(&mut bits).unwrap();
            assert_eq!(r.state, 0);
            assert!(r.iterations >= 1);
        }
    }

    #[test]
    fn lazy_k3_mixture_identity() {
        let s = PerfectSampler::from_certificate(lazy_complete(3), 0, Mode::Mixture, cert(3, rat(1, 2)), Limits::default())
            .unwrap();
        let p = s.output_dist().unwrap().clone();
        assert_eq!(p.masses(), &[rat(11, 32), rat(21, 64), rat(21, 64)]);
        assert!(s.exact_mixture_identity().unwrap());
    }

    #[test]
    fn lazy_k3_rejection_law_total() {
        let eps = rat(1, 4);
        let s = PerfectSampler::from_certificate(lazy_complete(3), 1, Mode::Reject, cert(3, rat(1, 5)), Limits::default())
            .unwrap();
        assert_eq!(*s.eps(), eps);
        let law = s.exact_rejection_law().unwrap();
        for m in &law {
            assert_eq!(*m, rat(1, 3) / (int(1) + &eps));
        }
        assert_eq!(law.iter().sum::<Rational>(), rat(4, 5));
    }

    #[test]
    fn rejection_needs_the_tighter_bound() {
        // p = (1−ε)π passes D∞ ≤ ε but the correction coin exceeds 1
        let eps = rat(1, 4);
        let r = rat(1, 2);
        let p = (int(1) - &eps) * &r;
        assert!(matches!(correction_probability(0, &r, &p, &eps), Err(Error::CertificateViolation { .. })));
        // at D∞ ≤ ε/(1+ε) the coin stays in [0,1]; the low end is tight
        let tol = proposal_tolerance(Mode::Reject, &eps);
        assert_eq!(tol, rat(1, 5));
        assert_eq!(coin_eps(Mode::Reject, &tol).unwrap(), eps);
        let low = (int(1) - &tol) * &r;
        let high = (int(1) + &tol) * &r;
        assert_eq!(correction_probability(0, &r, &low, &eps).unwrap(), int(1));
        assert_eq!(correction_probability(0, &r, &high, &eps).unwrap(), rat(1, 6));
        assert_eq!(proposal_tolerance(Mode::Mixture, &eps), eps);
        assert!(coin_eps(Mode::Reject, &int(1)).is_err());
    }

    #[test]
    fn reject_mode_rejects_large_eps() {
        let r = PerfectSampler::from_certificate(lazy_complete(3), 0, Mode::Reject, cert(3, rat(3, 4)), Limits::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn false_certificate_surfaces() {
        // D∞(1) = 1/2 on lazy K3, so eps = 1/10 at t = 1 is a lie.
        for mode in [Mode::Mixture, Mode::Reject] {
            let s = PerfectSampler::from_certificate(lazy_complete(3), 0, mode, cert(1, rat(1, 10)), Limits::default())
                .unwrap();
            let mut bits = SeededBits::new(3);
            let err = (0..10_000).find_map(|_| s.draw(&mut bits).err()).expect("violation");
            assert!(matches!(err, Error::CertificateViolation { .. }), "{err:?}");
        }
    }

    #[test]
    fn report_invariants_and_replay() {
        let s = PerfectSampler::from_certificate(lazy_complete(4), 0, Mode::Reject, cert(4, rat(1, 3)), Limits::default())
            .unwrap();
        let a = s.draw_many(3000, 9).unwrap();
        let b = s.draw_many(3000, 9).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert_eq!(r.oracle_invoked, r.branch.is_expensive());
            assert_eq!(r.steps_simulated, r.iterations * 4);
        }
    }

    #[test]
    fn warm_cache_does_not_change_outputs() {
        let make = || {
            PerfectSampler::from_certificate(lazy_complete(4), 0, Mode::Mixture, cert(2, rat(1, 2)), Limits::default())
                .unwrap()
        };
        let cold = make();
        let warm = make();
        warm.exact_mixture_identity().unwrap();
        warm.cache().residual(warm.spec()).unwrap();
        assert!(!cold.cache().is_warm());
        assert!(warm.cache().is_warm());
        assert_eq!(cold.draw_many(2000, 4).unwrap(), warm.draw_many(2000, 4).unwrap());
    }

    #[test]
    fn default_eps_is_inverse_fourth_power() {
        assert_eq!(default_eps(3), rat(1, 81));
        assert_eq!(default_eps(8), rat(1, 4096));
    }

    #[test]
    fn brute_sampler_on_one_state_chain_has_zero_time() {
        let s = mc_perfect_sampler(single(), 0, Mode::Mixture, CertificateSource::Brute).unwrap();
        assert_eq!(s.t(), 0);
        assert_eq!(*s.eps(), int(1));
    }

    #[test]
    fn gap_route_refuses_nonreversible_chain() {
        let rows = (0..3).map(|i| vec![(i, rat(1, 2)), ((i + 1) % 3, rat(1, 2))]).collect();
        let c = Arc::new(ChainModel::new(StateSpace::indexed(3), rows).unwrap());
        let err = main_theorem_sampler(c, 0, Mode::Mixture, MixingBound::SpectralGap(0.5), Limits::default())
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn gap_route_time_matches_formula() {
        let gamma = 0.5 + 1.0 / 14.0;
        let s = main_theorem_sampler(lazy_complete(8), 0, Mode::Mixture, MixingBound::SpectralGap(gamma), Limits::default())
            .unwrap();
        let expected = 2 * ((4096.0f64 * 8.0).ln() / gamma).ceil() as u64;
        assert_eq!(s.t(), expected);
        assert_eq!(s.t(), 38);
    }
}
