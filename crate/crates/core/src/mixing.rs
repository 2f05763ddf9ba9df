//! Exact ℓp mixing distances, uniform mixing times and the certificates
//! that pick the simulation length `t` for the samplers.
//!
//! For a chain `P` with stationary `π`, write `q_t(x,y) = P^t(x,y)/π(y)`.
//! The worst-start distances are
//!
//! * `D1(t) = max_x Σ_y |P^t(x,y) − π(y)|` (unhalved, twice total variation),
//! * `D2(t)² = max_x Σ_y π(y) (q_t(x,y) − 1)²` (kept squared so it stays rational),
//! * `D∞(t) = max_{x,y} |q_t(x,y) − 1|`.
//!
//! Everything here is exact except [`spectral_gap_estimate`], which is a
//! floating-point estimate and is flagged as uncertified.

use std::cmp::max;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::FiniteDist;
use crate::error::{Error, Result};
use crate::matrix::{RationalMatrix, ScaledMatrix};
use crate::model::{ChainModel, Limits};
use crate::rational::{self, common_denominator, Rational};
use crate::stationary::check_reversible;

/// Where a mixing certificate's claim `D∞(t) ≤ ε` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Exhaustive exact computation; machine-checked.
    BruteExact,
    /// Spectral-gap bound; trusted, audited downstream.
    SpectralGap,
    /// ℓ1 quarter-mixing bound; trusted, audited downstream.
    Ell1Bound,
    UserSupplied,
}

/// Claim that the uniform distance after `t` steps is at most `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCertificate {
    pub t: u64,
    #[serde(with = "crate::rational::serde_pair")]
    pub eps: Rational,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default)]
    pub note: String,
}

impl MixingCertificate {
    pub fn user(t: u64, eps: Rational) -> Self {
        Self {
            t,
            eps,
            provenance: Provenance::UserSupplied,
            gap: None,
            note: String::new(),
        }
    }

    pub fn is_machine_checked(&self) -> bool {
        self.provenance == Provenance::BruteExact
    }
}

/// The three exact distances at one time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub t: u64,
    #[serde(with = "crate::rational::serde_pair")]
    pub d1: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub d2_squared: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub dinf: Rational,
}

impl Distances {
    /// `D1 ≤ D2 ≤ D∞`, with `D2` compared through squares.
    pub fn is_monotone(&self) -> bool {
        &self.d1 * &self.d1 <= self.d2_squared && self.d2_squared <= &self.dinf * &self.dinf
    }
}

/// Cache of `P^(2^k)` for exact powers by repeated squaring.
#[derive(Debug, Clone)]
pub struct PowerTable {
    squares: Vec<ScaledMatrix>,
    limits: Limits,
}

impl PowerTable {
    pub fn new(p: &RationalMatrix, limits: Limits) -> Result<Self> {
        if p.rows() > limits.dense_states {
            return Err(Error::Resource(format!(
                "{} states exceed dense cap {}",
                p.rows(),
                limits.dense_states
            )));
        }
        Ok(Self {
            squares: vec![ScaledMatrix::from_rational(p)],
            limits,
        })
    }

    fn square(&mut self, k: usize) -> Result<&ScaledMatrix> {
        while self.squares.len() <= k {
            let last = self.squares.last().unwrap();
            let next = last.mul(last);
            if next.max_bits() > self.limits.max_entry_bits {
                return Err(Error::Resource(format!(
                    "P^(2^{}) needs {} bits per entry (budget {})",
                    self.squares.len(),
                    next.max_bits(),
                    self.limits.max_entry_bits
                )));
            }
            self.squares.push(next);
        }
        Ok(&self.squares[k])
    }

    /// Exact `P^t`.
    pub fn power(&mut self, t: u64) -> Result<ScaledMatrix> {
        if t > self.limits.max_time {
            return Err(Error::Resource(format!(
                "t = {t} exceeds max time {}",
                self.limits.max_time
            )));
        }
        let n = self.squares[0].dim();
        let mut acc: Option<ScaledMatrix> = None;
        let mut k = 0;
        let mut rest = t;
        while rest > 0 {
            if rest & 1 == 1 {
                let sq = self.square(k)?.clone();
                acc = Some(match acc {
                    None => sq,
                    Some(a) => a.mul(&sq),
                });
            }
            rest >>= 1;
            k += 1;
        }
        let out = acc.unwrap_or_else(|| ScaledMatrix::identity(n));
        if out.max_bits() > self.limits.max_entry_bits {
            return Err(Error::Resource(format!("P^{t} exceeds the entry bit budget")));
        }
        Ok(out)
    }
}

/// Exact mixing analysis of one chain against its stationary distribution.
#[derive(Debug, Clone)]
pub struct MixingAnalysis {
    p: RationalMatrix,
    pi: FiniteDist,
    pi_star: Rational,
    powers: PowerTable,
}

impl MixingAnalysis {
    pub fn new(p: &RationalMatrix, pi: &FiniteDist, limits: Limits) -> Result<Self> {
        p.check_stochastic()?;
        if pi.len() != p.rows() {
            return Err(Error::Domain("distribution length does not match matrix".into()));
        }
        if let Some(y) = (0..pi.len()).find(|&y| pi.mass(y).is_zero()) {
            return Err(Error::Support {
                index: y,
                detail: "q_t needs π(y) > 0 for every state".into(),
            });
        }
        Ok(Self {
            p: p.clone(),
            pi: pi.clone(),
            pi_star: pi.min_positive(),
            powers: PowerTable::new(p, limits)?,
        })
    }

    pub fn pi(&self) -> &FiniteDist {
        &self.pi
    }

    pub fn pi_star(&self) -> &Rational {
        &self.pi_star
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.p
    }

    pub fn power(&mut self, t: u64) -> Result<ScaledMatrix> {
        self.powers.power(t)
    }

    /// `q_t(x,y) = P^t(x,y)/π(y)`.
    pub fn q_ratio_matrix(&mut self, t: u64) -> Result<RationalMatrix> {
        let pt = self.powers.power(t)?;
        let n = pt.dim();
        let mut q = RationalMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                q[(x, y)] = pt.entry(x, y) / self.pi.mass(y);
            }
        }
        Ok(q)
    }

    pub fn distances(&mut self, t: u64) -> Result<Distances> {
        let pt = self.powers.power(t)?;
        let n = pt.dim();
        let (mut d1, mut d2, mut dinf) = (Rational::zero(), Rational::zero(), Rational::zero());
        for x in 0..n {
            let (mut l1, mut l2) = (Rational::zero(), Rational::zero());
            for y in 0..n {
                let diff = pt.entry(x, y) - self.pi.mass(y);
                let rel = (&diff / self.pi.mass(y)).abs();
                l2 += &diff * &diff / self.pi.mass(y);
                l1 += diff.abs();
                dinf = max(dinf, rel);
            }
            d1 = max(d1, l1);
            d2 = max(d2, l2);
        }
        Ok(Distances {
            t,
            d1,
            d2_squared: d2,
            dinf,
        })
    }

    /// Exact `D∞(t)`.
    pub fn dinf(&mut self, t: u64) -> Result<Rational> {
        let pt = self.powers.power(t)?;
        dinf_of(&pt, &self.pi)
    }

    /// Exact `D1(t)`.
    pub fn d1(&mut self, t: u64) -> Result<Rational> {
        Ok(self.distances(t)?.d1)
    }

    /// Smallest `t` with `D∞(t) ≤ eps`, located by doubling then bisection.
    ///
    /// `D∞` is not monotone for every chain, so the answer is re-verified and
    /// the certificate only claims the bound at the returned `t`.
    pub fn tau_uniform_brute(&mut self, eps: &Rational) -> Result<MixingCertificate> {
        let t = self.first_time_below(eps, |a, t| a.dinf(t), "D∞")?;
        let check = self.dinf(t)?;
        if check > *eps {
            return Err(Error::Domain(format!("D∞({t}) = {check} failed re-verification")));
        }
        Ok(MixingCertificate {
            t,
            eps: eps.clone(),
            provenance: Provenance::BruteExact,
            gap: None,
            note: format!("exact D∞({t}) ≈ {:.6e}", rational::to_f64(&check)),
        })
    }

    /// Smallest `t` with `D1(t) ≤ threshold` (a quarter-mixing time when the
    /// threshold is 1/4).
    pub fn tau_l1_brute(&mut self, threshold: &Rational) -> Result<u64> {
        self.first_time_below(threshold, |a, t| a.d1(t), "D1")
    }

    fn first_time_below(
        &mut self,
        bound: &Rational,
        mut measure: impl FnMut(&mut Self, u64) -> Result<Rational>,
        name: &str,
    ) -> Result<u64> {
        if measure(self, 0)? <= *bound {
            return Ok(0);
        }
        let max_t = self.powers.limits.max_time;
        let (mut lo, mut hi) = (0u64, 1u64);
        loop {
            if hi > max_t {
                return Err(Error::Resource(format!(
                    "{name}(t) > {bound} for every t up to {lo}; chain may be periodic or slow"
                )));
            }
            if measure(self, hi)? <= *bound {
                break;
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if measure(self, mid)? <= *bound {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `D∞(2t) = D2(t)² = max_x q_{2t}(x,x) − 1`, for reversible chains.
    pub fn verify_l2_linf_identity(&mut self, t: u64) -> Result<bool> {
        if !check_reversible(&self.p, &self.pi)? {
            return Err(Error::Domain("identity requires a reversible chain".into()));
        }
        let dinf_2t = self.dinf(2 * t)?;
        let d2sq = self.distances(t)?.d2_squared;
        let q = self.q_ratio_matrix(2 * t)?;
        let diag = (0..q.rows())
            .map(|x| q[(x, x)].clone())
            .max()
            .expect("nonempty")
            - Rational::one();
        Ok(dinf_2t == d2sq && d2sq == diag)
    }

    /// `D1(t) ≤ D2(t) ≤ D∞(t)` and `D∞(t) ≤ D1(t)/π*`, compared through
    /// squares so everything stays rational.
    pub fn verify_norm_ordering(&mut self, t: u64) -> Result<bool> {
        let d = self.distances(t)?;
        Ok(&d.d1 * &d.d1 <= d.d2_squared
            && d.d2_squared <= &d.dinf * &d.dinf
            && d.dinf <= &d.d1 / &self.pi_star)
    }

    /// `D∞(t) ≤ D1(t)/π*`.
    pub fn verify_linf_from_l1(&mut self, t: u64) -> Result<bool> {
        let d = self.distances(t)?;
        Ok(d.dinf <= d.d1 / &self.pi_star)
    }
}

fn dinf_of(pt: &ScaledMatrix, pi: &FiniteDist) -> Result<Rational> {
    let n = pt.dim();
    let mut best = Rational::zero();
    for x in 0..n {
        for y in 0..n {
            let rel = (pt.entry(x, y) / pi.mass(y) - Rational::one()).abs();
            if rel > best {
                best = rel;
            }
        }
    }
    Ok(best)
}

/// Row `1_start · P^t` by `t` sparse vector-matrix products.
///
/// This is the single-start oracle: it never forms a dense power.
pub fn output_distribution(chain: &ChainModel, start: usize, t: u64, limits: &Limits) -> Result<FiniteDist> {
    let n = chain.size();
    if start >= n {
        return Err(Error::Domain(format!("start {start} out of range")));
    }
    let denom = common_denominator((0..n).flat_map(|i| chain.row(i).iter().map(|(_, p)| p)));
    let rows: Vec<Vec<(usize, BigInt)>> = (0..n)
        .map(|i| {
            chain
                .row(i)
                .iter()
                .map(|(j, p)| (*j, p.numer() * (&denom / p.denom())))
                .collect()
        })
        .collect();
    let mut v = vec![BigInt::zero(); n];
    v[start] = BigInt::one();
    let mut scale = BigInt::one();
    for step in 0..t {
        let mut next = vec![BigInt::zero(); n];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, a) in &rows[i] {
                next[*j] += vi * a;
            }
        }
        v = next;
        scale *= &denom;
        if scale.bits() > limits.max_entry_bits {
            return Err(Error::Resource(format!(
                "row of P^{t} needs more than {} bits (reached at step {step})",
                limits.max_entry_bits
            )));
        }
    }
    FiniteDist::new(v.into_iter().map(|x| Rational::new(x, scale.clone())).collect())
}

/// `D∞` restricted to one start state: `max_y |p(y)/π(y) − 1|`.
pub fn dinf_from_start(row: &FiniteDist, pi: &FiniteDist) -> Rational {
    (0..row.len())
        .map(|y| (row.mass(y) / pi.mass(y) - Rational::one()).abs())
        .max()
        .expect("nonempty")
}

fn log_inverse(eps: &Rational, pi_star: &Rational) -> Result<f64> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if !pi_star.is_positive() || *pi_star > Rational::one() {
        return Err(Error::Domain(format!("π* must lie in (0,1], got {pi_star}")));
    }
    Ok(-rational::ln(&(eps * pi_star))?)
}

/// Certificate from an absolute spectral gap `γ*` of a reversible chain:
/// `t = 2·⌈(1/γ*)·ln(1/(ε·π*))⌉`, clamped at 0.
pub fn tau_from_gap(gamma_star: f64, pi_star: &Rational, eps: &Rational) -> Result<MixingCertificate> {
    if !(gamma_star > 0.0 && gamma_star <= 1.0) {
        return Err(Error::Domain(format!("spectral gap must lie in (0,1], got {gamma_star}")));
    }
    let l = log_inverse(eps, pi_star)?;
    let t = if l <= 0.0 {
        0
    } else {
        2 * (l / gamma_star).ceil() as u64
    };
    Ok(MixingCertificate {
        t,
        eps: eps.clone(),
        provenance: Provenance::SpectralGap,
        gap: Some(gamma_star),
        note: format!("2*ceil(ln(1/(eps*pi*))/gap), pi* = {pi_star}"),
    })
}

/// Certificate from an ℓ1 quarter-mixing time `T` (`D1(T) ≤ 1/4`):
/// `t = T·⌈ln(1/(ε·π*))⌉`, clamped at 0.
pub fn tau_from_ell1(quarter_time: u64, pi_star: &Rational, eps: &Rational) -> Result<MixingCertificate> {
    let l = log_inverse(eps, pi_star)?;
    let t = if l <= 0.0 {
        0
    } else {
        quarter_time * l.ceil() as u64
    };
    Ok(MixingCertificate {
        t,
        eps: eps.clone(),
        provenance: Provenance::Ell1Bound,
        gap: None,
        note: format!("T*ceil(ln(1/(eps*pi*))) with T = {quarter_time}, pi* = {pi_star}"),
    })
}

/// Floating-point estimate of the absolute spectral gap; not a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub gamma_star: f64,
    /// Largest eigen-pair residual `‖Sv − λv‖` of the symmetrized kernel.
    pub residual: f64,
    pub certified: bool,
}

/// `1 − max |λ|` over the non-unit eigenvalues of the π-symmetrized kernel.
pub fn spectral_gap_estimate(p: &RationalMatrix, pi: &FiniteDist) -> Result<GapEstimate> {
    if !check_reversible(p, pi)? {
        return Err(Error::Domain("spectral gap estimate needs a reversible chain".into()));
    }
    let n = p.rows();
    if n == 1 {
        return Ok(GapEstimate {
            gamma_star: 1.0,
            residual: 0.0,
            certified: false,
        });
    }
    let sqrt_pi: Vec<f64> = pi.masses().iter().map(|m| rational::to_f64(m).sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        let a = sqrt_pi[i] * rational::to_f64(&p[(i, j)]) / sqrt_pi[j];
        let b = sqrt_pi[j] * rational::to_f64(&p[(j, i)]) / sqrt_pi[i];
        0.5 * (a + b)
    });
    let eig = SymmetricEigen::new(s.clone());
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let second = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != top)
        .map(|(_, v)| v.abs())
        .fold(0.0f64, f64::max);
    let residual = (0..n)
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            (&s * v - v * eig.eigenvalues[k]).norm()
        })
        .fold(0.0f64, f64::max);
    Ok(GapEstimate {
        gamma_star: (1.0 - second).clamp(0.0, 1.0),
        residual,
        certified: false,
    })
}

/// Convenience wrapper: `q_t` without keeping an analysis session.
pub fn q_ratio_matrix(p: &RationalMatrix, pi: &FiniteDist, t: u64) -> Result<RationalMatrix> {
    MixingAnalysis::new(p, pi, Limits::from_env())?.q_ratio_matrix(t)
}

/// Which worst-start distance [`d_p_at`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    /// Returned squared.
    L2Squared,
    LInf,
}

/// `D1(t)`, `D2(t)²` or `D∞(t)`.
pub fn d_p_at(p: &RationalMatrix, pi: &FiniteDist, t: u64, norm: Norm) -> Result<Rational> {
    let d = MixingAnalysis::new(p, pi, Limits::from_env())?.distances(t)?;
    Ok(match norm {
        Norm::L1 => d.d1,
        Norm::L2Squared => d.d2_squared,
        Norm::LInf => d.dinf,
    })
}

pub fn tau_uniform_brute(p: &RationalMatrix, pi: &FiniteDist, eps: &Rational) -> Result<MixingCertificate> {
    MixingAnalysis::new(p, pi, Limits::from_env())?.tau_uniform_brute(eps)
}

pub fn verify_l2_linf_identity(p: &RationalMatrix, pi: &FiniteDist, t: u64) -> Result<bool> {
    MixingAnalysis::new(p, pi, Limits::from_env())?.verify_l2_linf_identity(t)
}

pub fn verify_linf_from_l1(p: &RationalMatrix, pi: &FiniteDist, t: u64) -> Result<bool> {
    MixingAnalysis::new(p, pi, Limits::from_env())?.verify_linf_from_l1(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn lazy_complete(n: usize) -> RationalMatrix {
        let mut p = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = if i == j { rat(1, 2) } else { rat(1, 2 * (n as i64 - 1)) };
            }
        }
        p
    }

    fn analysis(p: &RationalMatrix) -> MixingAnalysis {
        let n = p.rows();
        MixingAnalysis::new(p, &FiniteDist::uniform(n), Limits::default()).unwrap()
    }

    #[test]
    fn q_at_time_zero_and_one() {
        let p = lazy_complete(3);
        let mut a = analysis(&p);
        let q0 = a.q_ratio_matrix(0).unwrap();
        let q1 = a.q_ratio_matrix(1).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(q0[(x, y)], if x == y { int(3) } else { int(0) });
                assert_eq!(q1[(x, y)], if x == y { rat(3, 2) } else { rat(3, 4) });
            }
            let avg: Rational = (0..3).map(|y| &q1[(x, y)] * rat(1, 3)).sum();
            assert_eq!(avg, int(1));
        }
    }

    #[test]
    fn dinf_examples() {
        let mut a = analysis(&lazy_complete(3));
        assert_eq!(a.dinf(0).unwrap(), int(2));
        assert_eq!(a.dinf(1).unwrap(), rat(1, 2));
        let mut a = analysis(&lazy_complete(6));
        assert_eq!(a.dinf(0).unwrap(), int(5));
        for t in [0, 1, 2, 5, 9] {
            assert!(a.distances(t).unwrap().is_monotone());
        }
    }

    #[test]
    fn brute_tau_examples() {
        let mut a = analysis(&lazy_complete(3));
        assert_eq!(a.tau_uniform_brute(&rat(1, 2)).unwrap().t, 1);
        assert_eq!(a.tau_uniform_brute(&int(2)).unwrap().t, 0);
        let flip = RationalMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let mut a = analysis(&flip);
        assert!(matches!(a.tau_uniform_brute(&rat(1, 2)), Err(Error::Resource(_))));
    }

    #[test]
    fn l2_linf_identity_on_lazy_k3() {
        let p = lazy_complete(3);
        let mut a = analysis(&p);
        assert_eq!(a.dinf(2).unwrap(), rat(1, 8));
        assert_eq!(a.distances(1).unwrap().d2_squared, rat(1, 8));
        assert_eq!(a.q_ratio_matrix(2).unwrap()[(0, 0)], rat(9, 8));
        assert!(a.verify_l2_linf_identity(1).unwrap());
    }

    #[test]
    fn identity_chain_stays_at_n_minus_one() {
        let n = 4;
        let mut a = analysis(&RationalMatrix::identity(n));
        for t in [1, 2, 4] {
            assert!(a.verify_l2_linf_identity(t).unwrap());
            assert_eq!(a.dinf(2 * t).unwrap(), int(n as i64 - 1));
        }
    }

    #[test]
    fn three_cycle_is_refused() {
        let z = int(0);
        let o = int(1);
        let c = RationalMatrix::from_rows(vec![
            vec![z.clone(), o.clone(), z.clone()],
            vec![z.clone(), z.clone(), o.clone()],
            vec![o.clone(), z.clone(), z.clone()],
        ])
        .unwrap();
        let mut a = analysis(&c);
        assert!(matches!(a.verify_l2_linf_identity(1), Err(Error::Domain(_))));
        assert!(matches!(spectral_gap_estimate(&c, &FiniteDist::uniform(3)), Err(Error::Domain(_))));
        assert!(a.verify_linf_from_l1(2).unwrap());
    }

    #[test]
    fn gap_certificate_examples() {
        assert_eq!(tau_from_gap(1.0, &rat(1, 2), &rat(1, 2)).unwrap().t, 4);
        assert_eq!(tau_from_gap(0.3, &int(1), &int(2)).unwrap().t, 0);
        assert!(tau_from_gap(0.0, &rat(1, 2), &rat(1, 2)).is_err());
        assert!(tau_from_gap(-0.5, &rat(1, 2), &rat(1, 2)).is_err());
    }

    #[test]
    fn ell1_certificate_examples() {
        assert_eq!(tau_from_ell1(3, &rat(1, 4), &rat(1, 16)).unwrap().t, 15);
        assert_eq!(tau_from_ell1(3, &int(1), &int(1)).unwrap().t, 0);
        assert!(tau_from_ell1(3, &int(0), &int(1)).is_err());
    }

    #[test]
    fn gap_estimates() {
        for n in [3usize, 5, 8] {
            let est = spectral_gap_estimate(&lazy_complete(n), &FiniteDist::uniform(n)).unwrap();
            let exact = 0.5 + 0.5 / (n as f64 - 1.0);
            assert!((est.gamma_star - exact).abs() < 1e-9, "{n}: {est:?}");
            assert!(!est.certified);
        }
        let est = spectral_gap_estimate(&RationalMatrix::identity(3), &FiniteDist::uniform(3)).unwrap();
        assert!(est.gamma_star.abs() < 1e-12);
        let half = RationalMatrix::from_rows(vec![vec![rat(1, 2); 2], vec![rat(1, 2); 2]]).unwrap();
        let est = spectral_gap_estimate(&half, &FiniteDist::uniform(2)).unwrap();
        assert!((est.gamma_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_row_oracle_matches_dense_power() {
        use crate::model::{ChainModel, StateSpace};
        let p = lazy_complete(5);
        let chain = ChainModel::from_matrix(StateSpace::indexed(5), &p).unwrap();
        let mut a = analysis(&p);
        for t in [0, 1, 3, 7] {
            let row = output_distribution(&chain, 2, t, &Limits::default()).unwrap();
            assert_eq!(row.masses(), a.power(t).unwrap().row(2).as_slice());
        }
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = tau_from_gap(0.5, &rat(1, 8), &rat(1, 4096)).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"spectral-gap\""));
        assert_eq!(serde_json::from_str::<MixingCertificate>(&s).unwrap(), c);
    }

    #[test]
    fn bit_budget_is_enforced() {
        let p = lazy_complete(3);
        let limits = Limits {
            max_entry_bits: 16,
            ..Limits::default()
        };
        let mut a = MixingAnalysis::new(&p, &FiniteDist::uniform(3), limits).unwrap();
        assert!(matches!(a.dinf(64), Err(Error::Resource(_))));
    }
}
