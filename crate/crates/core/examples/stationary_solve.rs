//! Exact stationary law of a small explicit chain, with a reversibility check.

use perfect_sampler::rational::rat;
use perfect_sampler::stationary::check_reversible;
use perfect_sampler::{solve_stationary, RationalMatrix};

fn main() -> perfect_sampler::Result<()> {
    let p = RationalMatrix::from_rows(vec![
        vec![rat(1, 2), rat(1, 4), rat(1, 4)],
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        vec![rat(0, 1), rat(1, 2), rat(1, 2)],
    ])?;
    let pi = solve_stationary(&p)?;
    for (i, m) in pi.dist.masses().iter().enumerate() {
        println!("pi({i}) = {m}");
    }
    println!("pi* = {}", pi.pi_star);
    println!("reversible: {}", check_reversible(&p, &pi.dist)?);
    Ok(())
}
