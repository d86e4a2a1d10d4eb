//! Thermo-optic heater model: `dphi = (2 pi / lambda) (dn/dT) dT L`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::photonic::WaveguideContext;

/// A heated waveguide section of length `length` (m).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeaterSection {
    #[serde(rename = "length_m")]
    pub length: f64,
    #[serde(rename = "waveguide")]
    pub ctx: WaveguideContext,
}

impl Default for HeaterSection {
    /// The 500 um short arm of the first interferometer.
    fn default() -> Self {
        Self {
            length: 500e-6,
            ctx: WaveguideContext::default(),
        }
    }
}

impl HeaterSection {
    pub fn new(length: f64, ctx: WaveguideContext) -> Result<Self> {
        let h = Self { length, ctx };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(domain(format!(
                "heater length must be > 0, got {}",
                self.length
            )));
        }
        self.ctx.validate()
    }

    /// Phase shift per kelvin, rad/K.
    pub fn phase_per_kelvin(&self) -> f64 {
        2.0 * PI / self.ctx.wavelength * self.ctx.dn_dt * self.length
    }
}

/// Temperature change (K) needed for a phase shift `dphi` (rad).
pub fn phase_to_temperature(dphi: f64, heater: &HeaterSection) -> Result<f64> {
    heater.validate()?;
    if !(dphi.is_finite() && dphi >= 0.0) {
        return Err(domain(format!("phase shift must be >= 0, got {dphi}")));
    }
    Ok(dphi * heater.ctx.wavelength / (2.0 * PI * heater.ctx.dn_dt * heater.length))
}

/// Phase shift (rad) produced by a temperature change `dt` (K).
pub fn temperature_to_phase(dt: f64, heater: &HeaterSection) -> Result<f64> {
    heater.validate()?;
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(domain(format!("temperature change must be >= 0, got {dt}")));
    }
    Ok(dt * heater.phase_per_kelvin())
}
