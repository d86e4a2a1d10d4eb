//! Transfer-function models of the individual photonic primitives.
//!
//! All fields are scalar, single-mode and single-wavelength. Losses are
//! quoted in power dB and applied to the field as `10^(-dB/20)`.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Complex field amplitude. Power is `norm_sqr()`.
pub type ComplexAmplitude = Complex64;

/// Vacuum speed of light in m/s, rounded to the value the chip geometry was
/// laid out with (100 ps at n_eff = 2.5 is exactly 12 mm).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// A 2x2 complex transfer matrix acting on a pair of waveguide modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transfer2x2 {
    pub m11: ComplexAmplitude,
    pub m12: ComplexAmplitude,
    pub m21: ComplexAmplitude,
    pub m22: ComplexAmplitude,
}

impl Transfer2x2 {
    pub const IDENTITY: Transfer2x2 = Transfer2x2 {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn new(
        m11: ComplexAmplitude,
        m12: ComplexAmplitude,
        m21: ComplexAmplitude,
        m22: ComplexAmplitude,
    ) -> Self {
        Self { m11, m12, m21, m22 }
    }

    /// Independent propagation on the two lanes.
    pub fn diagonal(upper: ComplexAmplitude, lower: ComplexAmplitude) -> Self {
        Self::new(
            upper,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            lower,
        )
    }

    /// `self` followed by `next`, i.e. the matrix product `next * self`.
    pub fn then(&self, next: &Transfer2x2) -> Transfer2x2 {
        *next * *self
    }

    pub fn apply(&self, input: [ComplexAmplitude; 2]) -> [ComplexAmplitude; 2] {
        [
            self.m11 * input[0] + self.m12 * input[1],
            self.m21 * input[0] + self.m22 * input[1],
        ]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Transfer2x2 {
        Transfer2x2::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    /// Largest entry-wise deviation of `M * M^H` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = *self * self.adjoint();
        let one = Complex64::new(1.0, 0.0);
        [
            (p.m11 - one).norm(),
            p.m12.norm(),
            p.m21.norm(),
            (p.m22 - one).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|c| c.is_finite())
    }
}

impl Mul for Transfer2x2 {
    type Output = Transfer2x2;

    fn mul(self, rhs: Transfer2x2) -> Transfer2x2 {
        Transfer2x2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// Material and wavelength context of the silicon waveguides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveguideContext {
    pub n_eff: f64,
    #[serde(rename = "wavelength_m")]
    pub wavelength: f64,
    /// Thermo-optic coefficient in 1/K.
    #[serde(rename = "dn_dt_per_k")]
    pub dn_dt: f64,
}

impl Default for WaveguideContext {
    fn default() -> Self {
        Self {
            n_eff: 2.5,
            wavelength: 1550e-9,
            dn_dt: 1.9e-4,
        }
    }
}

impl WaveguideContext {
    pub fn new(n_eff: f64, wavelength: f64, dn_dt: f64) -> Result<Self> {
        let ctx = Self {
            n_eff,
            wavelength,
            dn_dt,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_eff.is_finite() && self.n_eff > 1.0) {
            return Err(domain(format!("n_eff must be > 1, got {}", self.n_eff)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(domain(format!(
                "wavelength must be > 0, got {}",
                self.wavelength
            )));
        }
        if !(self.dn_dt.is_finite() && self.dn_dt > 0.0) {
            return Err(domain(format!("dn/dT must be > 0, got {}", self.dn_dt)));
        }
        Ok(())
    }
}

/// A photonic building block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    /// Symmetric directional coupler with cross power ratio `kappa`.
    Coupler {
        kappa: f64,
    },
    DelayLine {
        delay: f64,
        loss_db: f64,
    },
    PhaseShift {
        phi: f64,
    },
    /// One branch of a 1x2 splitter; the loss includes the split.
    YBranch {
        insertion_loss_db: f64,
    },
    Attenuator {
        loss_db: f64,
    },
}

/// The response of an [`Element`] at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementResponse {
    /// Single-waveguide element.
    Scalar(ComplexAmplitude),
    /// Two-waveguide element.
    Matrix(Transfer2x2),
}

impl Element {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Element::Coupler { kappa } => check_kappa(kappa),
            Element::DelayLine { delay, loss_db } => {
                check_nonneg("delay", delay)?;
                check_nonneg("loss", loss_db)
            }
            Element::PhaseShift { phi } => {
                if phi.is_finite() {
                    Ok(())
                } else {
                    Err(domain("phase must be finite"))
                }
            }
            Element::YBranch { insertion_loss_db } => {
                check_nonneg("insertion loss", insertion_loss_db)
            }
            Element::Attenuator { loss_db } => check_nonneg("loss", loss_db),
        }
    }

    pub fn response(&self, frequency: f64) -> Result<ElementResponse> {
        self.validate()?;
        Ok(match *self {
            Element::Coupler { kappa } => ElementResponse::Matrix(coupler_matrix(kappa)?),
            Element::DelayLine { delay, loss_db } => {
                ElementResponse::Scalar(delay_response(delay, loss_db, frequency)?)
            }
            Element::PhaseShift { phi } => ElementResponse::Scalar(Complex64::from_polar(1.0, phi)),
            Element::YBranch { insertion_loss_db } => {
                ElementResponse::Scalar(Complex64::new(loss_amplitude(insertion_loss_db), 0.0))
            }
            Element::Attenuator { loss_db } => {
                ElementResponse::Scalar(Complex64::new(loss_amplitude(loss_db), 0.0))
            }
        })
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if (0.0..=1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(domain(format!(
            "coupler cross ratio must lie in [0, 1], got {kappa}"
        )))
    }
}

fn check_nonneg(what: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{what} must be finite and >= 0, got {value}"
        )))
    }
}

/// Lossless symmetric coupler: through amplitude `sqrt(1 - kappa)`, cross
/// amplitude `j * sqrt(kappa)`.
pub fn coupler_matrix(kappa: f64) -> Result<Transfer2x2> {
    check_kappa(kappa)?;
    let through = Complex64::new((1.0 - kappa).sqrt(), 0.0);
    let cross = J * kappa.sqrt();
    Ok(Transfer2x2::new(through, cross, cross, through))
}

/// Field response of a lossy delay line at baseband frequency `frequency`.
pub fn delay_response(delay: f64, loss_db: f64, frequency: f64) -> Result<ComplexAmplitude> {
    check_nonneg("delay", delay)?;
    check_nonneg("loss", loss_db)?;
    Ok(propagate(delay, loss_db, frequency))
}

pub(crate) fn propagate(delay: f64, loss_db: f64, frequency: f64) -> ComplexAmplitude {
    Complex64::from_polar(loss_amplitude(loss_db), -2.0 * PI * frequency * delay)
}

pub(crate) fn loss_amplitude(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 20.0)
}

/// Field amplitude factor of a power loss in dB.
pub fn db_to_amplitude(loss_db: f64) -> Result<f64> {
    check_nonneg("loss", loss_db)?;
    Ok(loss_amplitude(loss_db))
}

/// Power loss in dB of a field amplitude factor.
pub fn amplitude_to_db(amplitude: f64) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(domain(format!("amplitude must be > 0, got {amplitude}")));
    }
    Ok(-20.0 * amplitude.log10())
}

/// Linear power to dB; zero maps to negative infinity.
pub fn power_to_db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Physical waveguide length that produces `delay` at group index `n_eff`.
pub fn delay_to_length(delay: f64, ctx: &WaveguideContext) -> Result<f64> {
    check_nonneg("delay", delay)?;
    Ok(SPEED_OF_LIGHT / ctx.n_eff * delay)
}

pub fn length_to_delay(length: f64, ctx: &WaveguideContext) -> Result<f64> {
    check_nonneg("length", length)?;
    Ok(length * ctx.n_eff / SPEED_OF_LIGHT)
}
