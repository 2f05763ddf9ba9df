//! Exact distance trajectory of the lazy walk on a path, and the three
//! ways of choosing `t`.

use perfect_sampler::gallery::{lazy_walk, GraphSpec};
use perfect_sampler::mixing::{spectral_gap_estimate, tau_from_ell1, tau_from_gap, MixingAnalysis};
use perfect_sampler::rational::{rat, show};
use perfect_sampler::Limits;

fn main() -> perfect_sampler::Result<()> {
    let g = lazy_walk(&GraphSpec::path(5))?;
    let p = g.chain.transition_matrix(5000)?;
    let pi = &g.declared_pi;
    let mut a = MixingAnalysis::new(&p, pi, Limits::default())?;
    println!("{:>3} {:>12} {:>12} {:>12}", "t", "D1", "D2^2", "Dinf");
    for t in [0, 1, 2, 4, 8, 16, 32] {
        let d = a.distances(t)?;
        println!("{t:>3} {:>12.6} {:>12.6} {:>12.6}", to(&d.d1), to(&d.d2_squared), to(&d.dinf));
    }
    let eps = rat(1, 625);
    let brute = a.tau_uniform_brute(&eps)?;
    let gap = spectral_gap_estimate(&p, pi)?;
    let quarter = a.tau_l1_brute(&rat(1, 4))?;
    println!("eps = {}", show(&eps));
    println!("brute: t = {}", brute.t);
    println!("gap {:.4}: t = {}", gap.gamma_star, tau_from_gap(gap.gamma_star, &pi.min_positive(), &eps)?.t);
    println!("quarter time {quarter}: t = {}", tau_from_ell1(quarter, &pi.min_positive(), &eps)?.t);
    Ok(())
}

fn to(x: &perfect_sampler::Rational) -> f64 {
    perfect_sampler::rational::to_f64(x)
}
