//! Uniform mixing against quarter mixing on lazy complete graphs, and the
//! step counts each certificate route asks for.

use perfect_sampler::gallery::{lazy_walk, GraphSpec};
use perfect_sampler::harness::ratio_study;
use perfect_sampler::{mc_perfect_sampler, CertificateSource, Limits, Mode};

fn main() -> perfect_sampler::Result<()> {
    for row in ratio_study(&[8, 16, 32, 64], &Limits::default())? {
        println!("K{:<3} tau_U(1/n) = {:>2}  tau(1/4) = {}  ratio {}", row.n, row.tau_uniform, row.tau_quarter, row.ratio);
    }
    for n in [4, 8, 16, 32] {
        let g = lazy_walk(&GraphSpec::complete(n))?;
        let t: Vec<u64> = [CertificateSource::Brute, CertificateSource::Gap, CertificateSource::Ell1]
            .into_iter()
            .map(|src| mc_perfect_sampler(g.chain.clone(), 0, Mode::Mixture, src).map(|s| s.t()))
            .collect::<perfect_sampler::Result<_>>()?;
        println!("K{n:<3} t: brute {:>3}  gap {:>3}  ell1 {:>3}", t[0], t[1], t[2]);
    }
    Ok(())
}
