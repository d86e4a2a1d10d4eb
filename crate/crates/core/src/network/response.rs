use serde::Serialize;

use super::{NetworkParams, OfftNetwork};
use crate::error::{domain, OfftError, Result};
use crate::photonic::ComplexAmplitude;

/// Below this peak power a port is treated as carrying no signal.
pub const DEGENERATE_POWER: f64 = 1e-24;

/// Per-bin complex response on a frequency grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    /// `per_port[bin][i]` is the response of bin `bin` at `frequencies[i]`.
    pub per_port: Vec<Vec<ComplexAmplitude>>,
}

impl FrequencyResponse {
    pub fn power(&self, port: usize) -> Vec<f64> {
        self.per_port[port].iter().map(|h| h.norm_sqr()).collect()
    }

    /// Sum over all ports of `|H_k(f)|^2` at each frequency.
    pub fn total_power(&self) -> Vec<f64> {
        (0..self.frequencies.len())
            .map(|i| self.per_port.iter().map(|p| p[i].norm_sqr()).sum())
            .collect()
    }
}

pub fn frequency_response(net: &OfftNetwork, frequencies: &[f64]) -> Result<FrequencyResponse> {
    if frequencies.is_empty() {
        return Err(domain("frequency list is empty"));
    }
    let mut per_port = vec![Vec::with_capacity(frequencies.len()); net.n_points()];
    for &f in frequencies {
        for (bin, h) in net.all_bin_responses(f)?.into_iter().enumerate() {
            per_port[bin].push(h);
        }
    }
    Ok(FrequencyResponse {
        frequencies: frequencies.to_vec(),
        per_port,
    })
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or the function can no
/// longer discriminate between the interior points.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..400 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { c } else { d })
}

/// Frequency of maximum transmission of `port` (a DFT bin) in `[f_lo, f_hi]`.
///
/// Scans a grid of spacing `resolution`, then refines around the best grid
/// point by golden-section search.
pub fn peak_frequency(
    net: &OfftNetwork,
    port: usize,
    f_lo: f64,
    f_hi: f64,
    resolution: f64,
) -> Result<f64> {
    if f_lo.is_nan() || f_hi.is_nan() || f_lo >= f_hi {
        return Err(domain(format!("need f_lo < f_hi, got {f_lo} and {f_hi}")));
    }
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(domain(format!("resolution must be > 0, got {resolution}")));
    }
    let power = |f: f64| net.bin_response(port, f).map(|h| h.norm_sqr());
    let steps = ((f_hi - f_lo) / resolution).ceil().max(1.0) as usize;
    let step = (f_hi - f_lo) / steps as f64;
    let mut best = (f_lo, f64::NEG_INFINITY);
    for i in 0..=steps {
        let f = f_lo + i as f64 * step;
        let p = power(f)?;
        if p > best.1 {
            best = (f, p);
        }
    }
    if best.1 < DEGENERATE_POWER {
        return Err(OfftError::Degenerate(format!(
            "port {port} transmits no power in [{f_lo}, {f_hi}] Hz"
        )));
    }
    let lo = (best.0 - step).max(f_lo);
    let hi = (best.0 + step).min(f_hi);
    let refined = golden_section_max(power, lo, hi, step * 1e-9)?;
    Ok(if power(refined)? >= best.1 {
        refined
    } else {
        best.0
    })
}

/// Peak frequency of every bin of the ideal `n_points` design at `fs`,
/// searched over one comb period centred so that no peak sits on an edge.
pub fn auto_probe_frequencies(n_points: usize, fs: f64) -> Result<Vec<f64>> {
    let ideal = OfftNetwork::build(&NetworkParams::ideal(n_points, fs))?;
    let lo = -fs / 2.0;
    let hi = (n_points as f64 - 0.5) * fs;
    (0..n_points)
        .map(|k| peak_frequency(&ideal, k, lo, hi, fs / 1000.0))
        .collect()
}
