// Random windows through ideal networks of 2 to 16 points, compared with a
// brute-force DFT.

use num_complex::Complex64;
use offt::network::{sample_outputs, time_simulate, NetworkParams, OfftNetwork};
use offt::oracle::{dft, match_ports};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest residual per transform size.
pub fn run_example() -> offt::Result<Vec<(usize, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = Vec::new();
    for n in [2, 4, 8, 16] {
        let net = OfftNetwork::build(&NetworkParams::ideal(n, 10e9))?;
        let mut max_residual: f64 = 0.0;
        for _ in 0..25 {
            let window: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let input: Vec<Complex64> = window.iter().rev().copied().collect();
            let frame = sample_outputs(&time_simulate(&net, &input)?, 0)?.remove(0);
            let m = match_ports(&net.to_physical_order(&frame), &dft(&window))?;
            max_residual = max_residual.max(m.residual);
        }
        worst.push((n, max_residual));
    }
    Ok(worst)
}

fn main() -> offt::Result<()> {
    println!("{:>4}  {:>12}", "N", "max residual");
    for (n, r) in run_example()? {
        println!("{n:>4}  {r:>12.3e}");
    }
    Ok(())
}
