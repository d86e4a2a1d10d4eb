// Transforms per second per watt per mm² against a P100-class GPU.

use offt::scaling::{channel_capacity, crossover_n, CrossoverReport, ScalingModel, ScalingRow};

pub fn run_example() -> offt::Result<(Vec<ScalingRow>, CrossoverReport)> {
    let model = ScalingModel::default();
    Ok((model.table(1 << 20)?, crossover_n(&model)?))
}

fn main() -> offt::Result<()> {
    let (rows, report) = run_example()?;
    println!(
        "{:>8}  {:>8}  {:>10}  {:>10}  {:>10}  {:>10}",
        "N", "loss dB", "P_in W", "OFFT FOM", "GPU FOM", "ratio"
    );
    for r in rows.iter().step_by(2) {
        println!(
            "{:>8}  {:>8.3}  {:>10.3e}  {:>10.3e}  {:>10.3e}  {:>10.3e}",
            r.n_points, r.path_loss_db, r.input_power_w, r.offt_fom, r.gpu_fom, r.ratio
        );
    }
    match report.n_star {
        Some(n) => println!("GPU catches up at N = {n}"),
        None => println!("no crossover up to N = 2^20"),
    }
    println!(
        "QAM-256 at 10 GHz: {} Gbps per channel",
        channel_capacity(8, 10e9, 1)? / 1e9
    );
    Ok(())
}
