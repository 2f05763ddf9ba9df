//! Even subgraphs of K4 weighted by `beta^|S|`, sampled exactly.

use perfect_sampler::gallery::{even_subgraph_weights, GraphSpec};
use perfect_sampler::rational::{rat, to_f64};
use perfect_sampler::{mc_perfect_sampler, CertificateSource, Mode};

fn main() -> perfect_sampler::Result<()> {
    let g = even_subgraph_weights(&GraphSpec::complete(4), &rat(1, 2))?;
    let s = mc_perfect_sampler(g.chain.clone(), 0, Mode::Mixture, CertificateSource::Brute)?;
    println!("{} states, t = {}", g.size(), s.t());
    let n = 20_000;
    let mut counts = vec![0u64; g.size()];
    for d in s.draw_many(n, 1)? {
        counts[d.state] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        println!("{:<22} {:.4}  {:.4}", g.chain.space().label(i), *c as f64 / n as f64, to_f64(g.declared_pi.mass(i)));
    }
    Ok(())
}
