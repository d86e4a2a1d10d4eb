//! Sweeps of phase, delay and loss on individual arms, with the derived
//! SNR, mismatch, figure of merit, crosstalk tolerance and extinction ratio.

mod crosstalk;
mod extinction;
mod metrics;
mod sweep;

pub use crosstalk::{crosstalk_tolerance, leakage_ratio, LeakageMetric};
pub use extinction::{
    analytic_extinction_ratio, di_extinction_ratio, er_vs_loss_curve, power_extremes,
    ExtinctionCurve, ER_NULL_FLOOR,
};
pub use metrics::{
    degradation, extinction_ratio, fom, mismatch_ratio, snr, Metric, DEFAULT_PLOT_CAP,
};
pub use sweep::{
    perturb, run_sweep, Arm, Locator, PointMetrics, ProbeSpec, SweepKind, SweepParameter,
    SweepResult, SweepSpec,
};
