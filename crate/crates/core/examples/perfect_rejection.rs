//! Rejection sampler on the Ising model of a 4-cycle.

use perfect_sampler::gallery::{two_spin_glauber, GraphSpec};
use perfect_sampler::rational::{int, rat, to_f64};
use perfect_sampler::{CertificateSource, Limits, Mode, PerfectSampler, Rational, SamplerConfig};

fn main() -> perfect_sampler::Result<()> {
    let g = two_spin_glauber(&GraphSpec::cycle(4)?, &int(2), &int(2), &int(1))?;
    let cfg = SamplerConfig {
        mode: Mode::Reject,
        source: CertificateSource::Brute,
        eps: Some(rat(1, 10)),
        limits: Limits::default(),
    };
    let s = PerfectSampler::build(g.chain.clone(), 0, &cfg)?;
    let law = s.exact_rejection_law()?;
    println!("{}: t = {}, certified Dinf <= {}", g.name, s.t(), s.certificate().eps);
    println!("per-iteration acceptance {}", law.iter().sum::<Rational>());

    let n = 40_000;
    let draws = s.draw_many(n, 3)?;
    let mut counts = vec![0u64; g.size()];
    for d in &draws {
        counts[d.state] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        println!("{:>5}  {:.4}  {:.4}", g.chain.space().label(i), *c as f64 / n as f64, to_f64(g.declared_pi.mass(i)));
    }
    let its: u64 = draws.iter().map(|d| d.iterations).sum();
    println!("mean proposals {:.4} (expected 1.1)", its as f64 / n as f64);
    Ok(())
}
