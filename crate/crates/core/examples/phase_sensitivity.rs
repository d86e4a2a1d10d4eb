// Detune the first-stage phase over pi/2 +- pi/2 and watch the figure of
// merit collapse; then find the heater tolerance for -20 dB crosstalk.

use std::f64::consts::{FRAC_PI_2, PI};

use offt::network::{NetworkParams, OfftNetwork};
use offt::sensitivity::{
    crosstalk_tolerance, run_sweep, LeakageMetric, Locator, Metric, ProbeSpec, SweepSpec,
};
use offt::thermal::{phase_to_temperature, HeaterSection};

pub struct Sensitivity {
    pub fom: Vec<Metric>,
    pub tolerance_rad: f64,
    pub tolerance_k: f64,
}

pub fn run_example() -> offt::Result<Sensitivity> {
    let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9))?;
    let spec = SweepSpec {
        name: "phase".into(),
        center: FRAC_PI_2,
        half_range: FRAC_PI_2,
        increment: PI / 100.0,
        probe: ProbeSpec::Auto,
        target_port: 2,
        paired_port: 0,
        ..Default::default()
    };
    let sweep = run_sweep(&net, &spec)?;
    for (i, v) in sweep.parameter_values.iter().enumerate().step_by(10) {
        let p = &sweep.power[i];
        println!(
            "{v:>6.3} rad  X2 {:.4}  X3 {:.4}  FOM {}",
            p[2], p[3], sweep.metrics[i].fom
        );
    }
    let probe = sweep.probe_frequencies[2];
    let tolerance_rad = crosstalk_tolerance(
        &net,
        &Locator::default(),
        -20.0,
        2,
        probe,
        LeakageMetric::Aggregate,
    )?;
    let tolerance_k = phase_to_temperature(tolerance_rad, &HeaterSection::default())?;
    Ok(Sensitivity {
        fom: sweep.metrics.iter().map(|m| m.fom).collect(),
        tolerance_rad,
        tolerance_k,
    })
}

fn main() -> offt::Result<()> {
    let s = run_example()?;
    println!(
        "-20 dB crosstalk tolerance: {:.4} rad, {:.3} K",
        s.tolerance_rad, s.tolerance_k
    );
    Ok(())
}
