//! Exact rational coins and categorical draws from a fair-bit stream.

use perfect_sampler::bits::{bernoulli_exact, IntervalSampler};
use perfect_sampler::rational::rat;
use perfect_sampler::{BitSource, SeededBits};

fn main() -> perfect_sampler::Result<()> {
    let mut bits = SeededBits::new(1);
    let p = rat(1, 3);
    let n = 30_000;
    let mut heads = 0;
    for _ in 0..n {
        heads += bernoulli_exact(&p, &mut bits)? as u32;
    }
    println!("Ber(1/3): {heads}/{n} heads, {:.3} bits per coin", bits.bits_used() as f64 / n as f64);

    let weights = [rat(1, 7), rat(2, 7), rat(4, 7)];
    let sampler = IntervalSampler::from_probabilities(&weights)?;
    let mut counts = [0u32; 3];
    let before = bits.bits_used();
    for _ in 0..n {
        counts[sampler.sample(&mut bits)] += 1;
    }
    println!("(1,2,4)/7: {counts:?}, {:.3} bits per draw", (bits.bits_used() - before) as f64 / n as f64);
    Ok(())
}
