use serde::{Deserialize, Serialize};

use super::metrics::{degradation, fom, mismatch_ratio, snr, Metric};
use crate::error::{domain, Result};
use crate::network::{auto_probe_frequencies, OfftNetwork};

/// Interferometer arm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// The delayed arm carrying the spiral and the twiddle phase.
    #[default]
    Long,
    /// The short, heater-tunable arm.
    Short,
}

/// Addresses one arm of one cell: 1-based stage, 0-based cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Locator {
    pub stage: usize,
    pub cell: usize,
    pub arm: Arm,
}

impl Default for Locator {
    /// The long arm of the first-stage interferometer.
    fn default() -> Self {
        Self {
            stage: 1,
            cell: 0,
            arm: Arm::Long,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Extra phase, radians.
    #[default]
    Phase,
    /// Extra delay, seconds.
    Delay,
    /// Extra loss, dB.
    Loss,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Port powers at the probe frequencies.
    #[default]
    Transmission,
    /// Extinction ratio per port versus loss.
    Extinction,
}

/// Where each port's power is read.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeSpec {
    /// Every port at its own ideal-design peak.
    #[default]
    Auto,
    /// Every port at the ideal-design peak of one port.
    PortPeak(usize),
    /// One frequency for all ports, or one per port.
    Frequencies(Vec<f64>),
}

impl ProbeSpec {
    /// One probe frequency per DFT bin.
    pub fn resolve(&self, net: &OfftNetwork) -> Result<Vec<f64>> {
        let n = net.n_points();
        match self {
            ProbeSpec::Auto => auto_probe_frequencies(n, net.system_frequency()),
            ProbeSpec::PortPeak(k) => {
                if *k >= n {
                    return Err(domain(format!("probe port {k} out of range 0..{n}")));
                }
                let f = auto_probe_frequencies(n, net.system_frequency())?[*k];
                Ok(vec![f; n])
            }
            ProbeSpec::Frequencies(fs) if fs.len() == 1 => Ok(vec![fs[0]; n]),
            ProbeSpec::Frequencies(fs) if fs.len() == n => Ok(fs.clone()),
            ProbeSpec::Frequencies(fs) => Err(domain(format!(
                "need 1 or {n} probe frequencies, got {}",
                fs.len()
            ))),
        }
    }
}

/// A single-axis sweep of one parameter on one arm.
///
/// Values run from `center - half_range` to `center + half_range` in steps of
/// `increment` and are offsets added to the design value. A delay sweep can
/// also add `loss_db_per_ps` dB of loss per picosecond of extra delay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    pub kind: SweepKind,
    pub target: Locator,
    pub parameter: SweepParameter,
    pub center: f64,
    pub half_range: f64,
    pub increment: f64,
    pub probe: ProbeSpec,
    pub loss_db_per_ps: f64,
    /// Port for the SNR-based figure of merit.
    pub target_port: usize,
    /// Denominator port of the mismatch ratio.
    pub paired_port: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            name: String::new(),
            kind: SweepKind::Transmission,
            target: Locator::default(),
            parameter: SweepParameter::Phase,
            center: 0.0,
            half_range: 0.0,
            increment: 1.0,
            probe: ProbeSpec::Auto,
            loss_db_per_ps: 0.0,
            target_port: 0,
            paired_port: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.center,
            self.half_range,
            self.increment,
            self.loss_db_per_ps,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(domain(format!(
                "sweep '{}': non-finite parameter",
                self.name
            )));
        }
        if self.increment <= 0.0 {
            return Err(domain(format!(
                "sweep '{}': increment must be > 0",
                self.name
            )));
        }
        if self.half_range < 0.0 {
            return Err(domain(format!(
                "sweep '{}': half range must be >= 0",
                self.name
            )));
        }
        if self.half_range > 0.0 && self.increment > 2.0 * self.half_range {
            return Err(domain(format!(
                "sweep '{}': increment {} exceeds the full range {}",
                self.name,
                self.increment,
                2.0 * self.half_range
            )));
        }
        if self.kind == SweepKind::Extinction && self.parameter != SweepParameter::Loss {
            return Err(domain(format!(
                "sweep '{}': extinction sweeps vary loss",
                self.name
            )));
        }
        Ok(())
    }

    /// The sweep grid; a zero half range gives just the centre.
    pub fn parameter_values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.half_range == 0.0 {
            return Ok(vec![self.center]);
        }
        let steps = (2.0 * self.half_range / self.increment + 1e-9).floor() as usize;
        let start = self.center - self.half_range;
        Ok((0..=steps)
            .map(|i| start + i as f64 * self.increment)
            .collect())
    }
}

/// Powers and derived metrics of a transmission sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub name: String,
    pub parameter: SweepParameter,
    pub parameter_values: Vec<f64>,
    /// Probe frequency of each port, Hz.
    pub probe_frequencies: Vec<f64>,
    /// Port powers of the unperturbed network.
    pub baseline_power: Vec<f64>,
    /// `power[point][port]`, linear.
    pub power: Vec<Vec<f64>>,
    pub target_port: usize,
    pub paired_port: usize,
    pub metrics: Vec<PointMetrics>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointMetrics {
    /// Per port.
    pub degradation: Vec<f64>,
    /// Per port, with the baseline power as signal.
    pub snr: Vec<Metric>,
    /// Target over paired port.
    pub mismatch: Metric,
    /// Target-port SNR over mismatch.
    pub fom: Metric,
}

/// Applies `value` of `parameter` to the arm at `target`.
pub fn perturb(
    net: &OfftNetwork,
    target: &Locator,
    parameter: SweepParameter,
    value: f64,
    loss_db_per_ps: f64,
) -> Result<OfftNetwork> {
    net.with_cell(target.stage, target.cell, |cell| {
        match (parameter, target.arm) {
            (SweepParameter::Phase, Arm::Long) => cell.static_phase += value,
            (SweepParameter::Phase, Arm::Short) => cell.short_arm_phase += value,
            (SweepParameter::Delay, Arm::Long) => {
                cell.arm_delay_long += value;
                cell.arm_loss_long_db += loss_db_per_ps * value * 1e12;
            }
            (SweepParameter::Delay, Arm::Short) => {
                cell.short_arm_delay += value;
                cell.arm_loss_short_db += loss_db_per_ps * value * 1e12;
            }
            (SweepParameter::Loss, Arm::Long) => cell.arm_loss_long_db += value,
            (SweepParameter::Loss, Arm::Short) => cell.arm_loss_short_db += value,
        }
    })
}

fn powers_at(net: &OfftNetwork, probes: &[f64]) -> Result<Vec<f64>> {
    probes
        .iter()
        .enumerate()
        .map(|(bin, &f)| net.bin_response(bin, f).map(|h| h.norm_sqr()))
        .collect()
}

pub fn run_sweep(net: &OfftNetwork, spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::Transmission {
        return Err(domain(format!(
            "sweep '{}' is not a transmission sweep",
            spec.name
        )));
    }
    let values = spec.parameter_values()?;
    net.cell(spec.target.stage, spec.target.cell)?;
    let n = net.n_points();
    for (what, p) in [("target", spec.target_port), ("paired", spec.paired_port)] {
        if p >= n {
            return Err(domain(format!("{what} port {p} out of range 0..{n}")));
        }
    }
    let probes = spec.probe.resolve(net)?;
    let baseline = powers_at(net, &probes)?;

    let mut power = Vec::with_capacity(values.len());
    let mut metrics = Vec::with_capacity(values.len());
    for &v in &values {
        let perturbed = perturb(net, &spec.target, spec.parameter, v, spec.loss_db_per_ps)?;
        let p = powers_at(&perturbed, &probes)?;
        let degr: Vec<f64> = p
            .iter()
            .zip(&baseline)
            .map(|(&now, &ideal)| degradation(now, ideal))
            .collect::<Result<_>>()?;
        let snrs: Vec<Metric> = baseline
            .iter()
            .zip(&degr)
            .map(|(&out, &d)| snr(out, d))
            .collect::<Result<_>>()?;
        let mismatch = mismatch_ratio(p[spec.target_port], p[spec.paired_port])?;
        let fom = fom(snrs[spec.target_port], mismatch);
        metrics.push(PointMetrics {
            degradation: degr,
            snr: snrs,
            mismatch,
            fom,
        });
        power.push(p);
    }

    Ok(SweepResult {
        name: spec.name.clone(),
        parameter: spec.parameter,
        parameter_values: values,
        probe_frequencies: probes,
        baseline_power: baseline,
        power,
        target_port: spec.target_port,
        paired_port: spec.paired_port,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkParams;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ideal4() -> OfftNetwork {
        OfftNetwork::build(&NetworkParams::ideal(4, 10e9)).unwrap()
    }

    fn phase_spec() -> SweepSpec {
        SweepSpec {
            name: "phase".into(),
            center: FRAC_PI_2,
            half_range: FRAC_PI_2,
            increment: PI / 100.0,
            target_port: 2,
            paired_port: 0,
            ..Default::default()
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(phase_spec().parameter_values().unwrap().len(), 101);
        let delay = SweepSpec {
            parameter: SweepParameter::Delay,
            center: 12.5e-12,
            half_range: 12.5e-12,
            increment: 0.5e-12,
            ..Default::default()
        };
        let v = delay.parameter_values().unwrap();
        assert_eq!(v.len(), 51);
        assert_eq!(v[0], 0.0);
        assert!((v[50] - 25e-12).abs() < 1e-24);
        let single = SweepSpec {
            center: 0.3,
            ..Default::default()
        };
        assert_eq!(single.parameter_values().unwrap(), vec![0.3]);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SweepSpec {
                increment: 0.0,
                ..phase_spec()
            },
            SweepSpec {
                half_range: -1.0,
                ..phase_spec()
            },
            SweepSpec {
                increment: 4.0,
                ..phase_spec()
            },
            SweepSpec {
                kind: SweepKind::Extinction,
                ..phase_spec()
            },
        ];
        for s in bad {
            assert!(s.validate().is_err(), "{s:?}");
        }
    }

    #[test]
    fn ideal_point_leaks_nothing() {
        let spec = SweepSpec {
            probe: ProbeSpec::PortPeak(2),
            ..phase_spec()
        };
        let r = run_sweep(&ideal4(), &spec).unwrap();
        let p0 = &r.power[0];
        assert!((p0[2] - 1.0).abs() < 1e-12);
        for k in [0, 1, 3] {
            assert!(p0[k] <= 1e-12 * p0[2]);
        }
        assert_eq!(r.metrics[0].snr[2], Metric::Unbounded);
        assert!(r.metrics[1].degradation[2] > 0.0);
    }

    #[test]
    fn loss_sweep_attenuates_monotonically() {
        let spec = SweepSpec {
            parameter: SweepParameter::Loss,
            center: 6.25,
            half_range: 6.25,
            increment: 0.5,
            probe: ProbeSpec::PortPeak(2),
            target_port: 2,
            ..Default::default()
        };
        let r = run_sweep(&ideal4(), &spec).unwrap();
        for w in r.power.windows(2) {
            assert!(w[1][2] < w[0][2]);
        }
    }

    #[test]
    fn locator_miss_is_descriptive() {
        let spec = SweepSpec {
            target: Locator {
                stage: 2,
                cell: 5,
                arm: Arm::Long,
            },
            ..phase_spec()
        };
        let err = run_sweep(&ideal4(), &spec).unwrap_err();
        assert!(err.to_string().contains("stage 2 cell 5"), "{err}");
        let spec = SweepSpec {
            target: Locator {
                stage: 0,
                ..Locator::default()
            },
            ..phase_spec()
        };
        assert!(run_sweep(&ideal4(), &spec).is_err());
    }

    #[test]
    fn short_arm_phase_mirrors_long_arm() {
        let net = ideal4();
        let long = perturb(&net, &Locator::default(), SweepParameter::Phase, 0.3, 0.0).unwrap();
        let short = perturb(
            &net,
            &Locator {
                arm: Arm::Short,
                ..Locator::default()
            },
            SweepParameter::Phase,
            -0.3,
            0.0,
        )
        .unwrap();
        for bin in 0..4 {
            let a = long.bin_response(bin, 7.1e9).unwrap().norm_sqr();
            let b = short.bin_response(bin, 7.1e9).unwrap().norm_sqr();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn delay_sweep_couples_loss() {
        let net = ideal4();
        let p = perturb(
            &net,
            &Locator::default(),
            SweepParameter::Delay,
            10e-12,
            0.5,
        )
        .unwrap();
        let c = p.cell(1, 0).unwrap();
        assert!((c.arm_delay_long - 60e-12).abs() < 1e-24);
        assert!((c.arm_loss_long_db - 5.0).abs() < 1e-9);
    }

    #[test]
    fn probe_resolution() {
        let net = ideal4();
        assert_eq!(
            ProbeSpec::Frequencies(vec![1e9]).resolve(&net).unwrap(),
            vec![1e9; 4]
        );
        assert!(ProbeSpec::Frequencies(vec![1e9, 2e9])
            .resolve(&net)
            .is_err());
        assert!(ProbeSpec::PortPeak(4).resolve(&net).is_err());
        let auto = ProbeSpec::Auto.resolve(&net).unwrap();
        assert_eq!(
            ProbeSpec::PortPeak(2).resolve(&net).unwrap(),
            vec![auto[2]; 4]
        );
    }
}
