use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// A ratio that may legitimately diverge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Finite(f64),
    /// The denominator is exactly zero with a nonzero numerator.
    Unbounded,
    /// No meaningful value (for example `0 / 0`).
    Degenerate,
}

/// Default clamp for plotting unbounded metrics.
pub const DEFAULT_PLOT_CAP: f64 = 1e6;

impl Metric {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Metric::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Metric::Unbounded)
    }

    /// Value for plotting: unbounded maps to `cap`, degenerate to NaN.
    pub fn clamped(&self, cap: f64) -> f64 {
        match *self {
            Metric::Finite(v) => v.min(cap),
            Metric::Unbounded => cap,
            Metric::Degenerate => f64::NAN,
        }
    }

    /// `10 log10` of the value; unbounded stays unbounded.
    pub fn to_db(&self) -> Metric {
        match *self {
            Metric::Finite(v) if v > 0.0 => Metric::Finite(10.0 * v.log10()),
            Metric::Finite(_) => Metric::Degenerate,
            other => other,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Finite(v) => fmt::Display::fmt(v, f),
            Metric::Unbounded => f.pad("inf"),
            Metric::Degenerate => f.pad("degenerate"),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Metric::Finite(v) => s.serialize_f64(v),
            Metric::Unbounded => s.serialize_str("inf"),
            Metric::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

fn check_power(what: &str, p: f64) -> Result<()> {
    if p.is_finite() && p >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{what} must be a finite power >= 0, got {p}"
        )))
    }
}

/// Power lost relative to the ideal setting, floored at zero.
pub fn degradation(power_at_phi: f64, power_at_ideal: f64) -> Result<f64> {
    check_power("detuned power", power_at_phi)?;
    check_power("ideal power", power_at_ideal)?;
    Ok((power_at_ideal - power_at_phi).max(0.0))
}

/// `(P_out - P_degradation) / P_degradation`.
pub fn snr(p_out: f64, p_degradation: f64) -> Result<Metric> {
    check_power("output power", p_out)?;
    check_power("degradation", p_degradation)?;
    Ok(match (p_out == 0.0, p_degradation == 0.0) {
        (true, true) => Metric::Degenerate,
        (false, true) => Metric::Unbounded,
        _ => Metric::Finite((p_out - p_degradation) / p_degradation),
    })
}

/// `P_out1 / P_out2`.
pub fn mismatch_ratio(p_out1: f64, p_out2: f64) -> Result<Metric> {
    check_power("first power", p_out1)?;
    check_power("second power", p_out2)?;
    Ok(if p_out2 == 0.0 {
        Metric::Degenerate
    } else {
        Metric::Finite(p_out1 / p_out2)
    })
}

/// `SNR / P_mismatchRatio`.
pub fn fom(snr_value: Metric, mismatch_value: Metric) -> Metric {
    match (snr_value, mismatch_value) {
        (_, Metric::Degenerate | Metric::Unbounded) => Metric::Degenerate,
        (_, Metric::Finite(0.0)) => Metric::Degenerate,
        (Metric::Unbounded, _) => Metric::Unbounded,
        (Metric::Degenerate, _) => Metric::Degenerate,
        (Metric::Finite(s), Metric::Finite(m)) => Metric::Finite(s / m),
    }
}

/// `P_max / P_min`; a zero minimum is unbounded.
pub fn extinction_ratio(p_max: f64, p_min: f64) -> Result<Metric> {
    check_power("maximum power", p_max)?;
    check_power("minimum power", p_min)?;
    if p_min > p_max {
        return Err(domain(format!("minimum {p_min} exceeds maximum {p_max}")));
    }
    Ok(match (p_max == 0.0, p_min == 0.0) {
        (true, _) => Metric::Degenerate,
        (false, true) => Metric::Unbounded,
        _ => Metric::Finite(p_max / p_min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degradation_examples() {
        assert!((degradation(0.8, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(degradation(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(degradation(1.2, 1.0).unwrap(), 0.0);
        assert!(degradation(-0.1, 1.0).is_err());
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr(1.0, 0.1).unwrap(), Metric::Finite((1.0 - 0.1) / 0.1));
        assert!((snr(1.0, 0.1).unwrap().value().unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(snr(1.0, 0.0).unwrap(), Metric::Unbounded);
        assert_eq!(snr(0.0, 0.0).unwrap(), Metric::Degenerate);
    }

    #[test]
    fn mismatch_examples() {
        assert_eq!(mismatch_ratio(0.7, 0.7).unwrap(), Metric::Finite(1.0));
        assert_eq!(mismatch_ratio(1.0, 0.5).unwrap(), Metric::Finite(2.0));
        assert_eq!(mismatch_ratio(1.0, 0.0).unwrap(), Metric::Degenerate);
    }

    #[test]
    fn fom_examples() {
        assert_eq!(
            fom(Metric::Finite(9.0), Metric::Finite(1.0)),
            Metric::Finite(9.0)
        );
        assert_eq!(
            fom(Metric::Unbounded, Metric::Finite(1.0)),
            Metric::Unbounded
        );
        assert_eq!(
            fom(Metric::Finite(9.0), Metric::Finite(0.0)),
            Metric::Degenerate
        );
        assert_eq!(
            fom(Metric::Finite(9.0), Metric::Degenerate),
            Metric::Degenerate
        );
    }

    #[test]
    fn extinction_examples() {
        assert_eq!(extinction_ratio(0.3, 0.3).unwrap(), Metric::Finite(1.0));
        let er = extinction_ratio(1.0, 0.01).unwrap();
        assert!((er.value().unwrap() - 100.0).abs() < 1e-12);
        assert!((er.to_db().value().unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(extinction_ratio(1.0, 0.0).unwrap(), Metric::Unbounded);
        assert!(extinction_ratio(0.1, 0.2).is_err());
    }

    #[test]
    fn sentinel_serialization() {
        assert_eq!(
            serde_json::to_string(&Metric::Unbounded).unwrap(),
            "\"inf\""
        );
        assert_eq!(serde_json::to_string(&Metric::Finite(2.5)).unwrap(), "2.5");
        assert_eq!(Metric::Unbounded.to_string(), "inf");
        assert_eq!(Metric::Unbounded.clamped(DEFAULT_PLOT_CAP), 1e6);
    }
}
