//! Mixture sampler on the hardcore model of a 4-path: exact identity first,
//! then empirical frequencies.

use perfect_sampler::gallery::{hardcore, GraphSpec};
use perfect_sampler::rational::{int, rat, to_f64};
use perfect_sampler::{CertificateSource, Limits, Mode, PerfectSampler, SamplerConfig};

fn main() -> perfect_sampler::Result<()> {
    let g = hardcore(&GraphSpec::path(4), &int(2))?;
    let cfg = SamplerConfig {
        mode: Mode::Mixture,
        source: CertificateSource::Brute,
        eps: Some(rat(1, 8)),
        limits: Limits::default(),
    };
    let s = PerfectSampler::build(g.chain.clone(), 0, &cfg)?;
    println!("{}: t = {}, eps = {}", g.name, s.t(), s.eps());
    println!("exact identity holds: {}", s.exact_mixture_identity()?);

    let n = 50_000;
    let draws = s.draw_many(n, 11)?;
    let mut counts = vec![0u64; g.size()];
    for d in &draws {
        counts[d.state] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let want = to_f64(g.declared_pi.mass(i));
        println!("{:>6}  {:.4}  {:.4}", g.chain.space().label(i), *c as f64 / n as f64, want);
    }
    let expensive = draws.iter().filter(|d| d.oracle_invoked).count();
    println!("oracle rate {:.4} (expected {:.4})", expensive as f64 / n as f64, 1.0 / 9.0);
    Ok(())
}
