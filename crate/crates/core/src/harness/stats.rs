use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins after pooling.
    pub bins: usize,
}

impl ChiSquare {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// χ² test of observed counts against probabilities. Bins whose expected
/// count is below 5 are pooled together; a pooled bin still below 5 is
/// merged into the smallest remaining bin.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(counts.len(), probs.len(), "one probability per bin");
    let n: u64 = counts.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * n as f64;
        if e < 5.0 {
            pooled_obs += c as f64;
            pooled_exp += e;
        } else {
            bins.push((c as f64, e));
        }
    }
    if pooled_exp > 0.0 || pooled_obs > 0.0 {
        if pooled_exp >= 5.0 || bins.is_empty() {
            bins.push((pooled_obs, pooled_exp));
        } else {
            let k = (0..bins.len())
                .min_by(|&a, &b| bins[a].1.total_cmp(&bins[b].1))
                .expect("nonempty");
            bins[k].0 += pooled_obs;
            bins[k].1 += pooled_exp;
        }
    }
    let statistic: f64 = bins
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive dof");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        bins: bins.len(),
    }
}

/// `(k − Np)/sqrt(Np(1−p))`; zero when the variance vanishes and `k = Np`.
pub fn binomial_z(successes: u64, trials: u64, p: f64) -> f64 {
    let mean = trials as f64 * p;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    let diff = successes as f64 - mean;
    if sd == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / sd
    }
}

/// z-score of a sample mean against `mean` with per-draw variance `var`.
pub fn mean_z(values: &[f64], mean: f64, var: f64) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let se = (var / n).sqrt();
    if se == 0.0 {
        if m == mean {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (m - mean) / se
    }
}

/// Nearest-rank percentile of already sorted values.
pub fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}
