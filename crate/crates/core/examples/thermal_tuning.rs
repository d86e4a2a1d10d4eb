// How much heat a 500 um heater needs for common phase targets.

use std::f64::consts::PI;

use offt::thermal::{phase_to_temperature, temperature_to_phase, HeaterSection};

/// `(phase rad, temperature K)` pairs.
pub fn run_example() -> offt::Result<Vec<(f64, f64)>> {
    let heater = HeaterSection::default();
    [0.2, PI / 4.0, PI / 2.0, PI]
        .into_iter()
        .map(|phi| {
            let dt = phase_to_temperature(phi, &heater)?;
            debug_assert!((temperature_to_phase(dt, &heater)? - phi).abs() < 1e-12);
            Ok((phi, dt))
        })
        .collect()
}

fn main() -> offt::Result<()> {
    println!("rad/K: {:.5}", HeaterSection::default().phase_per_kelvin());
    for (phi, dt) in run_example()? {
        println!("{phi:>8.4} rad -> {dt:>7.3} K");
    }
    Ok(())
}
