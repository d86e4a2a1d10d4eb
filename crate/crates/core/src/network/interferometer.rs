use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::photonic::{coupler_matrix, loss_amplitude, propagate, ComplexAmplitude, Transfer2x2};

/// One butterfly cell: a Mach-Zehnder interferometer whose long arm carries
/// an extra delay and the twiddle phase.
///
/// Light enters coupler port 0. After the input coupler, lane 0 is the long
/// (delayed) arm and lane 1 the short arm. The output on lane 0 is the bar
/// port, lane 1 the cross port.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayedInterferometer {
    /// Differential delay of the long arm, seconds.
    pub arm_delay_long: f64,
    /// Static phase on the long arm, radians.
    pub static_phase: f64,
    pub arm_loss_long_db: f64,
    pub arm_loss_short_db: f64,
    pub coupler_in_kappa: f64,
    pub coupler_out_kappa: f64,
    /// Propagation delay shared by both arms, seconds.
    pub common_base_delay: f64,
    /// Phase on the short (heater) arm, radians.
    pub short_arm_phase: f64,
    /// Extra delay on the short arm, seconds.
    pub short_arm_delay: f64,
}

/// Field amplitudes at the two outputs of a cell for unit input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiOutputs {
    pub bar: ComplexAmplitude,
    pub cross: ComplexAmplitude,
}

impl DiOutputs {
    pub fn get(&self, port: DiPort) -> ComplexAmplitude {
        match port {
            DiPort::Bar => self.bar,
            DiPort::Cross => self.cross,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiPort {
    Bar,
    Cross,
}

/// One arm's contribution to one output: `coefficient * exp(-j 2 pi f delay)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ArmPath {
    pub coefficient: Complex64,
    pub delay: f64,
}

impl DelayedInterferometer {
    /// Balanced, lossless cell with no base delay.
    pub fn ideal(arm_delay_long: f64, static_phase: f64) -> Self {
        Self {
            arm_delay_long,
            static_phase,
            arm_loss_long_db: 0.0,
            arm_loss_short_db: 0.0,
            coupler_in_kappa: 0.5,
            coupler_out_kappa: 0.5,
            common_base_delay: 0.0,
            short_arm_phase: 0.0,
            short_arm_delay: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("long-arm delay", self.arm_delay_long),
            ("long-arm loss", self.arm_loss_long_db),
            ("short-arm loss", self.arm_loss_short_db),
            ("base delay", self.common_base_delay),
            ("short-arm delay", self.short_arm_delay),
        ];
        for (what, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{what} must be finite and >= 0, got {v}")));
            }
        }
        for (what, k) in [
            ("input", self.coupler_in_kappa),
            ("output", self.coupler_out_kappa),
        ] {
            if !(0.0..=1.0).contains(&k) {
                return Err(domain(format!(
                    "{what} coupler ratio must lie in [0, 1], got {k}"
                )));
            }
        }
        if !(self.static_phase.is_finite() && self.short_arm_phase.is_finite()) {
            return Err(domain("arm phases must be finite"));
        }
        Ok(())
    }

    /// Total delay difference between the arms, seconds.
    pub fn differential_delay(&self) -> f64 {
        self.arm_delay_long - self.short_arm_delay
    }

    /// Full 2x2 response `coupler_out * diag(long, short) * coupler_in`.
    pub fn transfer(&self, frequency: f64) -> Result<Transfer2x2> {
        self.validate()?;
        let long = Complex64::from_polar(1.0, self.static_phase)
            * propagate(
                self.common_base_delay + self.arm_delay_long,
                self.arm_loss_long_db,
                frequency,
            );
        let short = Complex64::from_polar(1.0, self.short_arm_phase)
            * propagate(
                self.common_base_delay + self.short_arm_delay,
                self.arm_loss_short_db,
                frequency,
            );
        Ok(coupler_matrix(self.coupler_in_kappa)?
            .then(&Transfer2x2::diagonal(long, short))
            .then(&coupler_matrix(self.coupler_out_kappa)?))
    }

    /// Bar and cross outputs for unit input on coupler port 0.
    pub fn response(&self, frequency: f64) -> Result<DiOutputs> {
        let [bar, cross] = self
            .transfer(frequency)?
            .apply([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        Ok(DiOutputs { bar, cross })
    }

    /// The two arm contributions to `port`, relative to the base delay.
    pub(crate) fn paths(&self, port: DiPort) -> [ArmPath; 2] {
        let t_in = (1.0 - self.coupler_in_kappa).sqrt();
        let x_in = Complex64::new(0.0, self.coupler_in_kappa.sqrt());
        let t_out = (1.0 - self.coupler_out_kappa).sqrt();
        let x_out = Complex64::new(0.0, self.coupler_out_kappa.sqrt());
        let long = Complex64::from_polar(loss_amplitude(self.arm_loss_long_db), self.static_phase);
        let short =
            Complex64::from_polar(loss_amplitude(self.arm_loss_short_db), self.short_arm_phase);
        let (via_long, via_short) = match port {
            DiPort::Bar => (t_out * t_in * long, x_out * x_in * short),
            DiPort::Cross => (x_out * t_in * long, t_out * x_in * short),
        };
        [
            ArmPath {
                coefficient: via_long,
                delay: self.arm_delay_long,
            },
            ArmPath {
                coefficient: via_short,
                delay: self.short_arm_delay,
            },
        ]
    }

    /// Free spectral range `1 / |differential delay|`; `None` for a zero delay.
    pub fn free_spectral_range(&self) -> Option<f64> {
        let tau = self.differential_delay().abs();
        (tau > 0.0).then(|| 1.0 / tau)
    }
}

/// Frequency response of a single cell.
pub fn di_response(di: &DelayedInterferometer, frequency: f64) -> Result<DiOutputs> {
    di.response(frequency)
}

/// Interference angle `phi - 2 pi f tau` of an ideal cell.
pub fn interference_angle(di: &DelayedInterferometer, frequency: f64) -> f64 {
    di.static_phase - di.short_arm_phase - 2.0 * PI * frequency * di.differential_delay()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructive_at_dc() {
        let di = DelayedInterferometer::ideal(50e-12, 0.0);
        let out = di.response(0.0).unwrap();
        assert!((out.cross.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(out.bar.norm_sqr() < 1e-15);
    }

    #[test]
    fn half_cycle_swaps_ports() {
        let di = DelayedInterferometer::ideal(50e-12, 0.0);
        let out = di.response(10e9).unwrap();
        assert!((out.bar.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(out.cross.norm_sqr() < 1e-12);
    }

    #[test]
    fn quadrature_splits_evenly() {
        let di = DelayedInterferometer::ideal(50e-12, 0.0);
        let out = di.response(5e9).unwrap();
        assert!((out.bar.norm_sqr() - 0.5).abs() < 1e-12);
        assert!((out.cross.norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cosine_law() {
        for (phase, f) in [(0.3, 1.7e9), (-1.1, 13.2e9), (2.9, 0.4e9)] {
            let di = DelayedInterferometer::ideal(25e-12, phase);
            let out = di.response(f).unwrap();
            let theta = interference_angle(&di, f);
            assert!((out.cross.norm_sqr() - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
            assert!((out.bar.norm_sqr() - (theta / 2.0).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn paths_agree_with_matrix() {
        let di = DelayedInterferometer {
            arm_loss_long_db: 1.3,
            arm_loss_short_db: 0.2,
            coupler_in_kappa: 0.45,
            coupler_out_kappa: 0.55,
            common_base_delay: 4e-12,
            short_arm_phase: 0.4,
            short_arm_delay: 3e-12,
            ..DelayedInterferometer::ideal(50e-12, -0.7)
        };
        for f in [0.0, 3.1e9, 17.9e9] {
            let out = di.response(f).unwrap();
            for port in [DiPort::Bar, DiPort::Cross] {
                let sum: Complex64 = di
                    .paths(port)
                    .iter()
                    .map(|p| p.coefficient * propagate(di.common_base_delay + p.delay, 0.0, f))
                    .sum();
                assert!((sum - out.get(port)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_invalid() {
        let mut di = DelayedInterferometer::ideal(50e-12, 0.0);
        di.coupler_in_kappa = 1.2;
        assert!(di.response(0.0).is_err());
        let mut di = DelayedInterferometer::ideal(50e-12, 0.0);
        di.arm_loss_long_db = -0.5;
        assert!(di.validate().is_err());
    }
}
