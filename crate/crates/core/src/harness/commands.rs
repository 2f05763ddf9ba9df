use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OutputFormat};
use super::stats::{binomial_z, chi_square, mean_z, percentile, ChiSquare};
use crate::dist::{mixture, residual};
use crate::error::{Error, Result};
use crate::gallery::{lazy_walk, ChainDef, GalleryChain, GalleryCheck, GraphSpec};
use crate::mixing::{dinf_from_start, spectral_gap_estimate, GapEstimate, MixingAnalysis, MixingCertificate};
use crate::rational::{self, rat, Rational};
use crate::sampler::{certify, effective_eps, proposal_tolerance, Branch, Mode, PerfectSampler, SampleReport};
use crate::stationary::check_reversible;

fn build(cfg: &ExperimentConfig) -> Result<(GalleryChain, PerfectSampler)> {
    cfg.validate()?;
    let gallery = cfg.chain.build()?;
    let sampler = PerfectSampler::build(gallery.chain.clone(), cfg.start, &cfg.sampler_config())?;
    Ok((gallery, sampler))
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub chain: String,
    pub states: usize,
    pub mode: Mode,
    pub certificate: MixingCertificate,
    pub draws: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    #[serde(with = "crate::rational::serde_vec")]
    pub target: Vec<Rational>,
    pub branches: BTreeMap<Branch, u64>,
    pub mean_steps: f64,
    pub mean_bits: f64,
    pub total_bits: u64,
    pub oracle_rate: f64,
}

impl SampleSummary {
    fn from_reports(gallery: &GalleryChain, sampler: &PerfectSampler, cfg: &ExperimentConfig, reports: &[SampleReport]) -> Self {
        let n = reports.len() as f64;
        let mut counts = vec![0u64; gallery.size()];
        let mut branches = BTreeMap::new();
        for r in reports {
            counts[r.state] += 1;
            *branches.entry(r.branch).or_insert(0) += 1;
        }
        let total_bits = reports.iter().map(|r| r.bits_used).sum();
        Self {
            chain: gallery.name.clone(),
            states: gallery.size(),
            mode: sampler.mode(),
            certificate: sampler.certificate().clone(),
            draws: reports.len() as u64,
            seed: cfg.seed,
            frequencies: counts.iter().map(|&c| c as f64 / n).collect(),
            counts,
            target: gallery.declared_pi.masses().to_vec(),
            branches,
            mean_steps: reports.iter().map(|r| r.steps_simulated as f64).sum::<f64>() / n,
            mean_bits: total_bits as f64 / n,
            total_bits,
            oracle_rate: reports.iter().filter(|r| r.oracle_invoked).count() as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutput {
    pub reports: Vec<SampleReport>,
    pub summary: SampleSummary,
}

impl SampleOutput {
    /// JSON lines (one report per line, then `{"summary": ...}`) or CSV.
    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Json => {
                for r in &self.reports {
                    out.push_str(&to_json_line(r));
                    out.push('\n');
                }
                out.push_str(&to_json_line(&serde_json::json!({ "summary": self.summary })));
                out.push('\n');
            }
            OutputFormat::Csv => {
                out.push_str("state,branch,steps_simulated,bits_used,oracle_invoked,iterations\n");
                for r in &self.reports {
                    let branch = serde_json::to_value(r.branch).expect("serializable");
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.state,
                        branch.as_str().unwrap_or_default(),
                        r.steps_simulated,
                        r.bits_used,
                        r.oracle_invoked,
                        r.iterations
                    );
                }
            }
        }
        out
    }
}

/// `N` seeded draws with per-draw telemetry and a summary.
pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<SampleOutput> {
    let (gallery, sampler) = build(cfg)?;
    let reports = sampler.draw_many(cfg.n, cfg.seed)?;
    let summary = SampleSummary::from_reports(&gallery, &sampler, cfg, &reports);
    Ok(SampleOutput { reports, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCheck {
    pub t: u64,
    /// `D∞(2t) = D2(t)² = max_x q_{2t}(x,x) − 1`; reversible chains only.
    pub l2_linf_identity: Option<bool>,
    /// `D1 ≤ D2 ≤ D∞ ≤ D1/π*`.
    pub norm_ordering: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub chain: String,
    pub states: usize,
    pub mode: Mode,
    pub certificate: MixingCertificate,
    pub gallery: GalleryCheck,
    /// Exact `D∞` of the start row at the certified `t` is at most `ε`.
    pub certificate_holds: bool,
    pub mixture_identity: bool,
    /// Per-iteration return mass equals `π/(1+ε)`; absent when `ε > 1/2`.
    pub rejection_law: Option<bool>,
    /// Total per-iteration acceptance equals `1/(1+ε)`.
    pub rejection_total: Option<bool>,
    /// First state where an exact identity failed.
    pub offending_state: Option<usize>,
    pub distance_checks: Vec<DistanceCheck>,
    pub chi_square: ChiSquare,
    pub chi_square_pass: bool,
    /// `oracle-rate` (mixture) or `iterations` (rejection).
    pub branch_statistic: String,
    pub branch_z: f64,
    pub mean_steps: f64,
    pub total_bits: u64,
    pub draws: u64,
    pub exact_pass: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.exact_pass && self.chi_square_pass
    }
}

fn first_mismatch(a: &[Rational], b: &[Rational]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

/// Exact identities first, then a χ² check of `N` draws against `π`.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let (gallery, sampler) = build(cfg)?;
    let limits = cfg.limits;
    let check = gallery.check(&limits)?;
    let pi = &gallery.declared_pi;
    let eps = sampler.eps().clone();
    let p_t = sampler.output_dist()?.clone();
    let certificate_holds = dinf_from_start(&p_t, pi) <= sampler.certificate().eps;

    let h = residual(&p_t, pi, &eps)?;
    let mix = mixture(&p_t, &h, &eps);
    let mut offending_state = first_mismatch(&mix, pi.masses());
    let mixture_identity = offending_state.is_none();

    let (rejection_law, rejection_total) = if sampler.mode() == Mode::Reject {
        let law = crate::sampler::rejection_iteration_law(&p_t, pi, &eps)?;
        let one_plus = Rational::one() + &eps;
        let want: Vec<Rational> = pi.masses().iter().map(|r| r / &one_plus).collect();
        let mismatch = first_mismatch(&law, &want);
        offending_state = offending_state.or(mismatch);
        let total: Rational = law.iter().sum();
        (Some(mismatch.is_none()), Some(total == Rational::one() / one_plus))
    } else {
        (None, None)
    };

    let mut distance_checks = Vec::new();
    if pi.support().count() == pi.len() {
        let p = gallery.chain.transition_matrix(limits.dense_states)?;
        let reversible = check_reversible(&p, pi)?;
        let mut analysis = MixingAnalysis::new(&p, pi, limits)?;
        for t in [1, 2, 4, 8] {
            distance_checks.push(DistanceCheck {
                t,
                l2_linf_identity: if reversible { Some(analysis.verify_l2_linf_identity(t)?) } else { None },
                norm_ordering: analysis.verify_norm_ordering(t)?,
            });
        }
    }

    let reports = sampler.draw_many(cfg.n, cfg.seed)?;
    let mut counts = vec![0u64; gallery.size()];
    for r in &reports {
        counts[r.state] += 1;
    }
    let probs: Vec<f64> = pi.masses().iter().map(rational::to_f64).collect();
    let chi = chi_square(&counts, &probs);
    let e = rational::to_f64(&eps);
    let (branch_statistic, branch_z) = match sampler.mode() {
        Mode::Mixture => {
            let hits = reports.iter().filter(|r| r.oracle_invoked).count() as u64;
            ("oracle-rate", binomial_z(hits, reports.len() as u64, e / (1.0 + e)))
        }
        Mode::Reject => {
            let iters: Vec<f64> = reports.iter().map(|r| r.iterations as f64).collect();
            ("iterations", mean_z(&iters, 1.0 + e, e * (1.0 + e)))
        }
    };

    let gallery_ok = check.stationary_matches
        && check.irreducible
        && check.aperiodic
        && (check.reversible || matches!(cfg.chain, ChainDef::Explicit { .. }));
    let exact_pass = gallery_ok
        && certificate_holds
        && mixture_identity
        && rejection_law.unwrap_or(true)
        && rejection_total.unwrap_or(true)
        && distance_checks
            .iter()
            .all(|d| d.norm_ordering && d.l2_linf_identity.unwrap_or(true));
    Ok(VerificationReport {
        chain: gallery.name.clone(),
        states: gallery.size(),
        mode: sampler.mode(),
        certificate: sampler.certificate().clone(),
        gallery: check,
        certificate_holds,
        mixture_identity,
        rejection_law,
        rejection_total,
        offending_state,
        distance_checks,
        chi_square_pass: chi.passes(cfg.significance),
        chi_square: chi,
        branch_statistic: branch_statistic.into(),
        branch_z,
        mean_steps: reports.iter().map(|r| r.steps_simulated as f64).sum::<f64>() / reports.len() as f64,
        total_bits: reports.iter().map(|r| r.bits_used).sum(),
        draws: reports.len() as u64,
        exact_pass,
    })
}

/// One row of a mixing trajectory. `tv` is the halved ℓ1 distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingRow {
    pub t: u64,
    #[serde(with = "crate::rational::serde_pair")]
    pub d1: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub tv: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub d2_squared: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub dinf: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    /// Least `t` with `D∞(t) ≤ 1/n`.
    pub tau_uniform: u64,
    /// Least `t` with `D1(t) ≤ 1/4`.
    pub tau_quarter: u64,
    #[serde(with = "crate::rational::serde_pair")]
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub chain: String,
    pub states: usize,
    #[serde(with = "crate::rational::serde_pair")]
    pub pi_star: Rational,
    pub rows: Vec<MixingRow>,
    pub certificate: MixingCertificate,
    /// Exact worst-start `D∞` at the certificate's `t`.
    #[serde(with = "crate::rational::serde_pair")]
    pub certificate_dinf: Rational,
    pub certificate_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_estimate: Option<GapEstimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ratio_study: Vec<RatioRow>,
}

impl MixingReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            OutputFormat::Csv => {
                let mut out = String::from("t,D1,TV,D2_squared,Dinf\n");
                for r in &self.rows {
                    let _ = writeln!(out, "{},{},{},{},{}", r.t, r.d1, r.tv, r.d2_squared, r.dinf);
                }
                if !self.ratio_study.is_empty() {
                    out.push_str("\nn,tau_uniform,tau_quarter,ratio\n");
                    for r in &self.ratio_study {
                        let _ = writeln!(out, "{},{},{},{}", r.n, r.tau_uniform, r.tau_quarter, r.ratio);
                    }
                }
                out
            }
        }
    }
}

/// Exact distance trajectory at `times`, the configured certificate with
/// an exact audit, and optionally the lazy-complete-graph ratio study.
pub fn cmd_mixing(cfg: &ExperimentConfig, times: &[u64], ratio_ns: &[usize]) -> Result<MixingReport> {
    cfg.validate()?;
    let gallery = cfg.chain.build()?;
    let limits = cfg.limits;
    let p = gallery.chain.transition_matrix(limits.dense_states)?;
    let stationary = crate::stationary::StationaryVector::new(gallery.declared_pi.clone());
    let mut analysis = MixingAnalysis::new(&p, &stationary.dist, limits)?;
    let rows = times
        .iter()
        .map(|&t| {
            let d = analysis.distances(t)?;
            Ok(MixingRow {
                t,
                tv: &d.d1 / Rational::from_integer(2.into()),
                d1: d.d1,
                d2_squared: d.d2_squared,
                dinf: d.dinf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eps = effective_eps(gallery.size(), cfg.mode, cfg.eps.clone());
    let tolerance = proposal_tolerance(cfg.mode, &eps);
    let certificate = certify(&gallery.chain, &stationary, &cfg.cert, &tolerance, &limits)?;
    let certificate_dinf = analysis.dinf(certificate.t)?;
    let gap_estimate = if check_reversible(&p, &stationary.dist)? {
        Some(spectral_gap_estimate(&p, &stationary.dist)?)
    } else {
        None
    };
    Ok(MixingReport {
        chain: gallery.name.clone(),
        states: gallery.size(),
        pi_star: stationary.pi_star.clone(),
        rows,
        certificate_holds: certificate_dinf <= certificate.eps,
        certificate,
        certificate_dinf,
        gap_estimate,
        ratio_study: ratio_study(ratio_ns, &limits)?,
    })
}

/// `τ_U(1/n) / τ(1/4)` on the half-lazy walk on `K_n`.
pub fn ratio_study(ns: &[usize], limits: &crate::model::Limits) -> Result<Vec<RatioRow>> {
    ns.iter()
        .map(|&n| {
            let g = lazy_walk(&GraphSpec::complete(n))?;
            let p = g.chain.transition_matrix(limits.dense_states)?;
            let mut a = MixingAnalysis::new(&p, &g.declared_pi, *limits)?;
            let tau_uniform = a.tau_uniform_brute(&rat(1, n as i64))?.t;
            let tau_quarter = a.tau_l1_brute(&rat(1, 4))?;
            if tau_quarter == 0 {
                return Err(Error::Domain(format!("K_{n} is mixed at t = 0")));
            }
            Ok(RatioRow {
                n,
                tau_uniform,
                tau_quarter,
                ratio: rat(tau_uniform as i64, tau_quarter as i64),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub chain: String,
    pub mode: Mode,
    pub t: u64,
    #[serde(with = "crate::rational::serde_pair")]
    pub eps: Rational,
    pub draws: u64,
    pub mean_steps: f64,
    pub steps_p50: u64,
    pub steps_p90: u64,
    pub steps_p99: u64,
    pub mean_bits: f64,
    pub bits_p50: u64,
    pub bits_p90: u64,
    pub bits_p99: u64,
    pub oracle_rate: f64,
    /// `ε/(1+ε)`, the mixture-mode oracle probability.
    pub expected_oracle_rate: f64,
    pub oracle_z: f64,
    pub mean_iterations: f64,
    /// `1+ε`, the rejection-mode mean proposal count.
    pub expected_iterations: f64,
    pub iterations_z: f64,
    /// Every cheap draw simulated exactly `t` steps.
    pub cheap_steps_equal_t: bool,
}

/// Step, bit and oracle statistics over `N` draws.
pub fn cmd_bench(cfg: &ExperimentConfig) -> Result<BenchReport> {
    let (gallery, sampler) = build(cfg)?;
    let reports = sampler.draw_many(cfg.n, cfg.seed)?;
    let n = reports.len() as f64;
    let mut steps: Vec<u64> = reports.iter().map(|r| r.steps_simulated).collect();
    let mut bits: Vec<u64> = reports.iter().map(|r| r.bits_used).collect();
    steps.sort_unstable();
    bits.sort_unstable();
    let e = rational::to_f64(sampler.eps());
    let hits = reports.iter().filter(|r| r.oracle_invoked).count() as u64;
    let iters: Vec<f64> = reports.iter().map(|r| r.iterations as f64).collect();
    let t = sampler.t();
    let (oracle_z, iterations_z) = match sampler.mode() {
        Mode::Mixture => (binomial_z(hits, reports.len() as u64, e / (1.0 + e)), 0.0),
        Mode::Reject => (0.0, mean_z(&iters, 1.0 + e, e * (1.0 + e))),
    };
    Ok(BenchReport {
        chain: gallery.name.clone(),
        mode: sampler.mode(),
        t,
        eps: sampler.eps().clone(),
        draws: reports.len() as u64,
        mean_steps: steps.iter().sum::<u64>() as f64 / n,
        steps_p50: percentile(&steps, 0.5),
        steps_p90: percentile(&steps, 0.9),
        steps_p99: percentile(&steps, 0.99),
        mean_bits: bits.iter().sum::<u64>() as f64 / n,
        bits_p50: percentile(&bits, 0.5),
        bits_p90: percentile(&bits, 0.9),
        bits_p99: percentile(&bits, 0.99),
        oracle_rate: hits as f64 / n,
        expected_oracle_rate: e / (1.0 + e),
        oracle_z,
        mean_iterations: iters.iter().sum::<f64>() / n,
        expected_iterations: 1.0 + e,
        iterations_z,
        cheap_steps_equal_t: reports
            .iter()
            .filter(|r| r.branch == Branch::Cheap)
            .all(|r| r.steps_simulated == t),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}
