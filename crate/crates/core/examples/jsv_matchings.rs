//! Uniform perfect matchings of a bipartite graph through the matching chain.

use std::time::Instant;

use perfect_sampler::gallery::{jsv_perfect_matching_sampler, GraphSpec};
use perfect_sampler::SamplerConfig;

fn main() -> perfect_sampler::Result<()> {
    let graph = GraphSpec::complete_bipartite(3, 3).without_edge(0, 3)?;
    let started = Instant::now();
    let sampler = jsv_perfect_matching_sampler(&graph, &SamplerConfig::default())?;
    let jsv = &sampler.jsv;
    println!("states: {}, t = {}, eps = {}", jsv.states.len(), sampler.inner.t(), sampler.inner.eps());
    println!("pi(P) = {}, pi(valid P) = {}", jsv.pi_perfect(), sampler.acceptance_mass());
    println!("setup {:.2}s", started.elapsed().as_secs_f64());

    let n = 20_000;
    let started = Instant::now();
    let draws = sampler.draw_many(n, 7)?;
    let mut counts = vec![0u64; jsv.valid_perfect.len()];
    for d in &draws {
        counts[d.outcome] += 1;
    }
    let restarts: u64 = draws.iter().map(|d| d.restarts).sum();
    for (k, &i) in jsv.valid_perfect.iter().enumerate() {
        println!("{:>12}  {}", jsv.gallery.chain.space().label(i), counts[k]);
    }
    println!("mean restarts {:.3}", restarts as f64 / n as f64);
    println!("{n} draws in {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}
