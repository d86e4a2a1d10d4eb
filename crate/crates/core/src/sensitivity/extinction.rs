use serde::Serialize;

use super::metrics::{extinction_ratio, Metric};
use super::sweep::Arm;
use crate::error::{domain, Result};
use crate::network::{golden_section_max, DelayedInterferometer, DiPort, OfftNetwork};
use crate::photonic::db_to_amplitude;

/// Extinction ratios above this count as a perfect null.
pub const ER_NULL_FLOOR: f64 = 1e12;

const GRID_POINTS: usize = 2048;

/// Maximum and minimum of `power` over `[start, start + period)`.
///
/// A uniform grid locates both extremes, then golden-section search refines
/// each within one grid step.
pub fn power_extremes(
    power: impl Fn(f64) -> Result<f64>,
    start: f64,
    period: f64,
) -> Result<(f64, f64)> {
    if !(period.is_finite() && period > 0.0) {
        return Err(domain(format!("period must be > 0, got {period}")));
    }
    let step = period / GRID_POINTS as f64;
    let (mut hi, mut lo) = ((start, f64::NEG_INFINITY), (start, f64::INFINITY));
    for i in 0..GRID_POINTS {
        let f = start + i as f64 * step;
        let p = power(f)?;
        if p > hi.1 {
            hi = (f, p);
        }
        if p < lo.1 {
            lo = (f, p);
        }
    }
    let tol = step * 1e-12;
    let f_max = golden_section_max(&power, hi.0 - step, hi.0 + step, tol)?;
    let f_min = golden_section_max(|f| power(f).map(|p| -p), lo.0 - step, lo.0 + step, tol)?;
    Ok((power(f_max)?.max(hi.1), power(f_min)?.min(lo.1).max(0.0)))
}

fn with_null_floor(er: Metric) -> Metric {
    match er {
        Metric::Finite(v) if v > ER_NULL_FLOOR => Metric::Unbounded,
        other => other,
    }
}

/// Extinction ratio of one output of a single cell over its free spectral range.
pub fn di_extinction_ratio(di: &DelayedInterferometer, port: DiPort) -> Result<Metric> {
    let fsr = di
        .free_spectral_range()
        .ok_or_else(|| domain("cell has no differential delay, so no spectral period"))?;
    let (p_max, p_min) =
        power_extremes(|f| di.response(f).map(|o| o.get(port).norm_sqr()), 0.0, fsr)?;
    Ok(with_null_floor(extinction_ratio(p_max, p_min)?))
}

/// Closed-form extinction ratio `((1 + a) / (1 - a))^2` of an ideal-coupler
/// cell whose delayed arm has `loss_db` of loss, `a = 10^(-loss/20)`.
pub fn analytic_extinction_ratio(loss_db: f64) -> Result<Metric> {
    let a = db_to_amplitude(loss_db)?;
    if a == 1.0 {
        return Ok(Metric::Unbounded);
    }
    Ok(Metric::Finite(((1.0 + a) / (1.0 - a)).powi(2)))
}

/// Per-port extinction ratios of the whole network versus loss.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtinctionCurve {
    /// First-stage loss of each point, dB.
    pub losses_db: Vec<f64>,
    /// `per_port[point][bin]`.
    pub per_port: Vec<Vec<Metric>>,
}

/// Extinction ratio of every output over one comb period `N f_s` while the
/// chosen arm of every stage-`s` cell gets `loss / 2^(s-1)` extra dB.
pub fn er_vs_loss_curve(net: &OfftNetwork, losses_db: &[f64], arm: Arm) -> Result<ExtinctionCurve> {
    let period = net.n_points() as f64 * net.system_frequency();
    let mut per_port = Vec::with_capacity(losses_db.len());
    for &gamma in losses_db {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(domain(format!("loss must be finite and >= 0, got {gamma}")));
        }
        let lossy = net.with_cells(|stage, cell| {
            let extra = gamma / 2f64.powi(stage as i32 - 1);
            match arm {
                Arm::Long => cell.arm_loss_long_db += extra,
                Arm::Short => cell.arm_loss_short_db += extra,
            }
        })?;
        let row = (0..net.n_points())
            .map(|bin| {
                let (p_max, p_min) = power_extremes(
                    |f| lossy.bin_response(bin, f).map(|h| h.norm_sqr()),
                    0.0,
                    period,
                )?;
                extinction_ratio(p_max, p_min).map(with_null_floor)
            })
            .collect::<Result<Vec<_>>>()?;
        per_port.push(row);
    }
    Ok(ExtinctionCurve {
        losses_db: losses_db.to_vec(),
        per_port,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkParams;

    fn lossy_di(loss_db: f64) -> DelayedInterferometer {
        DelayedInterferometer {
            arm_loss_long_db: loss_db,
            ..DelayedInterferometer::ideal(100e-12, 0.0)
        }
    }

    #[test]
    fn single_cell_spot_value() {
        let er = di_extinction_ratio(&lossy_di(6.25), DiPort::Cross)
            .unwrap()
            .value()
            .unwrap();
        assert!((er - 8.40).abs() < 0.01, "{er}");
        let exact = analytic_extinction_ratio(6.25).unwrap().value().unwrap();
        assert!(((er - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn both_outputs_agree() {
        let di = lossy_di(3.0);
        let a = di_extinction_ratio(&di, DiPort::Bar)
            .unwrap()
            .value()
            .unwrap();
        let b = di_extinction_ratio(&di, DiPort::Cross)
            .unwrap()
            .value()
            .unwrap();
        assert!(((a - b) / a).abs() < 1e-9);
    }

    #[test]
    fn lossless_cell_is_unbounded() {
        assert_eq!(
            di_extinction_ratio(&lossy_di(0.0), DiPort::Bar).unwrap(),
            Metric::Unbounded
        );
        assert_eq!(analytic_extinction_ratio(0.0).unwrap(), Metric::Unbounded);
        assert!(di_extinction_ratio(&DelayedInterferometer::ideal(0.0, 0.0), DiPort::Bar).is_err());
    }

    #[test]
    fn network_curve_falls_with_loss() {
        let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9)).unwrap();
        let curve = er_vs_loss_curve(&net, &[0.0, 1.0, 3.0, 6.25, 12.5], Arm::Long).unwrap();
        assert!(curve.per_port[0].iter().all(Metric::is_unbounded));
        for bin in 0..4 {
            let v: Vec<f64> = curve.per_port[1..]
                .iter()
                .map(|r| r[bin].value().unwrap())
                .collect();
            assert!(v.windows(2).all(|w| w[1] < w[0]), "bin {bin}: {v:?}");
        }
        assert!(er_vs_loss_curve(&net, &[-1.0], Arm::Long).is_err());
    }
}
