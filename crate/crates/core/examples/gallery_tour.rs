//! Every gallery family, its size and its exact self-check.

use perfect_sampler::gallery::{
    bases_exchange_chain, coloring_glauber, even_subgraph_weights, hardcore, jsv_matching_chain, lazy_walk,
    linear_extension_chain, two_spin_glauber, GraphSpec,
};
use perfect_sampler::rational::{int, rat};
use perfect_sampler::Limits;

fn main() -> perfect_sampler::Result<()> {
    let k4 = GraphSpec::complete(4);
    let chains = vec![
        lazy_walk(&GraphSpec::cycle(6)?)?,
        coloring_glauber(&GraphSpec::path(4), 4)?,
        hardcore(&GraphSpec::cycle(5)?, &rat(3, 2))?,
        two_spin_glauber(&GraphSpec::path(4), &int(3), &int(3), &rat(1, 2))?,
        linear_extension_chain(4, &[(0, 1), (2, 3)])?,
        bases_exchange_chain(&k4)?,
        even_subgraph_weights(&k4, &rat(1, 3))?,
        jsv_matching_chain(&GraphSpec::complete_bipartite(2, 2), None)?.gallery,
    ];
    for g in &chains {
        let check = g.check(&Limits::default())?;
        println!("{:<40} |Omega| = {:>4}  pi* = {:<12} ok = {}", g.name, g.size(), g.declared_pi.min_positive(), check.all());
    }
    Ok(())
}
