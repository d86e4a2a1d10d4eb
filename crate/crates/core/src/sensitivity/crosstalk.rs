use serde::{Deserialize, Serialize};

use super::sweep::{perturb, Locator, SweepParameter};
use crate::error::{domain, Result};
use crate::network::{OfftNetwork, DEGENERATE_POWER};
use crate::OfftError;

/// How leakage into the non-target ports is summarised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMetric {
    /// Total power of all other ports over the target power.
    #[default]
    Aggregate,
    /// Strongest single other port over the target power.
    WorstPort,
}

/// Leakage relative to `target_port`, linear, at frequency `probe`.
pub fn leakage_ratio(
    net: &OfftNetwork,
    target_port: usize,
    probe: f64,
    metric: LeakageMetric,
) -> Result<f64> {
    let n = net.n_points();
    if target_port >= n {
        return Err(domain(format!(
            "target port {target_port} out of range 0..{n}"
        )));
    }
    let powers: Vec<f64> = net
        .all_bin_responses(probe)?
        .iter()
        .map(|h| h.norm_sqr())
        .collect();
    let target = powers[target_port];
    if target < DEGENERATE_POWER {
        return Err(OfftError::Degenerate(format!(
            "target port {target_port} carries no power at {probe} Hz"
        )));
    }
    let others = powers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != target_port)
        .map(|(_, p)| *p);
    let leak = match metric {
        LeakageMetric::Aggregate => others.sum(),
        LeakageMetric::WorstPort => others.fold(0.0, f64::max),
    };
    Ok(leak / target)
}

const SCAN_STEP: f64 = 1e-3;
const BISECT_TOL: f64 = 1e-4;

/// Smallest heater detuning (radians, either sign) that drives the leakage
/// at `probe` up to `threshold_db` (for example -20).
///
/// Scans outward from zero in both directions up to pi, then bisects the
/// first crossing. Fails if no detuning within pi reaches the threshold or
/// if the threshold is already exceeded without detuning.
pub fn crosstalk_tolerance(
    net: &OfftNetwork,
    heater: &Locator,
    threshold_db: f64,
    target_port: usize,
    probe: f64,
    metric: LeakageMetric,
) -> Result<f64> {
    if !(threshold_db.is_finite() && threshold_db < 0.0) {
        return Err(domain(format!(
            "leakage threshold must be a negative dB value, got {threshold_db}"
        )));
    }
    let limit = 10f64.powf(threshold_db / 10.0);
    let leak = |delta: f64| -> Result<f64> {
        let detuned = perturb(net, heater, SweepParameter::Phase, delta, 0.0)?;
        leakage_ratio(&detuned, target_port, probe, metric)
    };
    let base = leak(0.0)?;
    if base >= limit {
        return Err(domain(format!(
            "leakage is already {:.2} dB without detuning",
            10.0 * base.log10()
        )));
    }

    let mut best: Option<f64> = None;
    for sign in [1.0, -1.0] {
        let steps = (std::f64::consts::PI / SCAN_STEP).ceil() as usize;
        let mut inside = 0.0;
        for i in 1..=steps {
            let outside = sign * (i as f64 * SCAN_STEP).min(std::f64::consts::PI);
            if leak(outside)? >= limit {
                let (mut a, mut b) = (inside, outside);
                while (b - a).abs() > BISECT_TOL {
                    let mid = 0.5 * (a + b);
                    if leak(mid)? >= limit {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                let found = 0.5 * (a + b).abs();
                best = Some(best.map_or(found, |x: f64| x.min(found)));
                break;
            }
            inside = outside;
        }
    }
    best.ok_or_else(|| {
        domain(format!(
            "no detuning within pi reaches {threshold_db} dB of leakage"
        ))
    })
}
