// Four QPSK subcarriers summed into one serial stream and separated again
// by the optical transform.

use num_complex::Complex64;
use offt::network::{sample_outputs, time_simulate, NetworkParams, OfftNetwork};

type Frames = Vec<Vec<Complex64>>;

/// Transmitted and recovered symbols, one vector per frame.
pub fn run_example() -> offt::Result<(Frames, Frames)> {
    let n = 4;
    let net = OfftNetwork::build(&NetworkParams::ideal(n, 10e9))?;
    let qpsk =
        [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)].map(|(re, im)| Complex64::new(re, im));
    let sent: Vec<Vec<Complex64>> = (0..6)
        .map(|f| (0..n).map(|k| qpsk[(3 * f + k * k) % 4]).collect())
        .collect();

    // inverse DFT of each frame; sample i of a frame is the i-th newest
    let mut stream = Vec::new();
    for symbols in &sent {
        let mut frame: Vec<Complex64> = (0..n)
            .map(|i| {
                symbols
                    .iter()
                    .enumerate()
                    .map(|(k, s)| {
                        s * Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64,
                        )
                    })
                    .sum()
            })
            .collect();
        frame.reverse();
        stream.extend(frame);
    }
    let received = sample_outputs(&time_simulate(&net, &stream)?, 0)?;
    Ok((sent, received))
}

fn main() -> offt::Result<()> {
    let (sent, received) = run_example()?;
    for (s, r) in sent.iter().zip(&received) {
        let fmt = |v: &[Complex64]| {
            v.iter()
                .map(|c| format!("{:+.0}{:+.0}j", c.re, c.im))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("sent {}   recovered {}", fmt(s), fmt(r));
    }
    Ok(())
}
