// Transmission of the 4-point chip versus frequency, and where each output
// peaks.

use offt::network::{auto_probe_frequencies, frequency_response, NetworkParams, OfftNetwork};
use offt::photonic::power_to_db;

pub struct Peaks {
    /// Peak frequency of each DFT bin, Hz.
    pub frequencies: Vec<f64>,
    /// Minimum over the grid of the total output power.
    pub min_total: f64,
}

pub fn run_example() -> offt::Result<Peaks> {
    let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9))?;
    let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 1e8).collect();
    let resp = frequency_response(&net, &grid)?;
    for (i, f) in grid.iter().enumerate().step_by(25) {
        let row: Vec<String> = (0..4)
            .map(|k| format!("{:>8.2}", power_to_db(resp.per_port[k][i].norm_sqr())))
            .collect();
        println!("{:>6.1} GHz {}", f / 1e9, row.join(""));
    }
    let min_total = resp.total_power().into_iter().fold(f64::INFINITY, f64::min);
    Ok(Peaks {
        frequencies: auto_probe_frequencies(4, 10e9)?,
        min_total,
    })
}

fn main() -> offt::Result<()> {
    println!("power per output, dB (X0..X3)");
    let peaks = run_example()?;
    for (k, f) in peaks.frequencies.iter().enumerate() {
        println!("X{k} peaks at {:.4} GHz", f / 1e9);
    }
    println!(
        "total output power never drops below {:.15}",
        peaks.min_total
    );
    Ok(())
}
