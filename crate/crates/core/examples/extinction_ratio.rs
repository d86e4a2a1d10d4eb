// Extinction ratio versus spiral loss, for one interferometer against its
// closed form and for the whole 4-point network.

use offt::network::{DelayedInterferometer, DiPort, NetworkParams, OfftNetwork};
use offt::sensitivity::{
    analytic_extinction_ratio, di_extinction_ratio, er_vs_loss_curve, Arm, Metric,
};

/// `(loss dB, simulated single cell, closed form, network X0)`.
pub fn run_example() -> offt::Result<Vec<(f64, Metric, Metric, Metric)>> {
    let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9))?;
    let losses: Vec<f64> = (0..=25).map(|i| i as f64 * 0.5).collect();
    let curve = er_vs_loss_curve(&net, &losses, Arm::Long)?;
    losses
        .iter()
        .zip(&curve.per_port)
        .map(|(&g, row)| {
            let di = DelayedInterferometer {
                arm_loss_long_db: g,
                ..DelayedInterferometer::ideal(50e-12, 0.0)
            };
            Ok((
                g,
                di_extinction_ratio(&di, DiPort::Cross)?,
                analytic_extinction_ratio(g)?,
                row[0],
            ))
        })
        .collect()
}

fn main() -> offt::Result<()> {
    println!(
        "{:>6}  {:>12}  {:>12}  {:>12}",
        "loss", "cell ER dB", "closed form", "network dB"
    );
    for (g, cell, exact, network) in run_example()? {
        println!(
            "{g:>6.1}  {:>12.4}  {:>12.4}  {:>12.4}",
            cell.to_db(),
            exact.to_db(),
            network.to_db()
        );
    }
    Ok(())
}
